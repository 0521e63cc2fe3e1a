// Copyright 2026 The FID Audit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FIDAUDIT_CSC_H_
#define FIDAUDIT_CSC_H_

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "fidaudit/subgroup.h"

namespace fidaudit {

// Per-point costs of assigning label 0 (c0) or label 1 (c1).
struct CostPair {
  Eigen::VectorXd c0;
  Eigen::VectorXd c1;
};

inline constexpr double kCscRidge = 1e-6;

// Regression-based cost-sensitive classifier over threshold groups: fit
// ridge regressors r0 ~ c0 and r1 ~ c1 on the sensitive block and return
// g(x) = 1{(r0 - r1)(x) > 0}.
ThresholdGroup CscBestResponse(const Eigen::MatrixXd& sensitive,
                               const CostPair& costs,
                               double eps = kCscRidge);

// Total cost sum_i g_i c1_i + (1 - g_i) c0_i of a membership vector.
double CscCost(const Eigen::VectorXd& w, const CostPair& costs);

// Same oracle with the factorization of S^T S + eps I cached, for repeated
// calls against one sensitive block. Ridge fits are linear in the target,
// so the zero-baseline costs c1 = base + shift used by the constrained
// search reduce to two cached solves.
class CscOracle {
 public:
  CscOracle(const Eigen::MatrixXd& sensitive, double eps = kCscRidge);

  // Coefficients of the ridge fit of target y.
  Eigen::VectorXd Fit(const Eigen::VectorXd& y) const;

  ThresholdGroup BestResponse(const CostPair& costs) const;

  // Best response to c0 = 0, c1 = base + shift, where Fit(base) was
  // precomputed by the caller as base_fit.
  ThresholdGroup ShiftedResponse(const Eigen::VectorXd& base_fit,
                                 double shift) const;

  const Eigen::MatrixXd& sensitive() const { return sensitive_; }

 private:
  Eigen::MatrixXd sensitive_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd ones_fit_;
};

}  // namespace fidaudit

#endif  // FIDAUDIT_CSC_H_
