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

#include "fidaudit/csc.h"

#include <string>

#include "fidaudit/error.h"
#include "fidaudit/models.h"

namespace fidaudit {
namespace {

void CheckCosts(const Eigen::MatrixXd& s, const CostPair& costs) {
  if (costs.c0.size() != s.rows() || costs.c1.size() != s.rows()) {
    throw AuditError(ErrorCode::kDimensionMismatch,
                     "cost vectors must have one entry per row (" +
                         std::to_string(s.rows()) + ")");
  }
  if (!costs.c0.allFinite() || !costs.c1.allFinite()) {
    throw AuditError(ErrorCode::kNonFinite, "costs must be finite");
  }
}

}  // namespace

ThresholdGroup CscBestResponse(const Eigen::MatrixXd& sensitive,
                               const CostPair& costs, double eps) {
  CheckCosts(sensitive, costs);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(sensitive.rows());
  const LinearCoefficients r0 = FitWls(sensitive, costs.c0, ones, eps);
  const LinearCoefficients r1 = FitWls(sensitive, costs.c1, ones, eps);
  return ThresholdGroup{r0.theta - r1.theta};
}

double CscCost(const Eigen::VectorXd& w, const CostPair& costs) {
  return w.dot(costs.c1) + (Eigen::VectorXd::Ones(w.size()) - w).dot(costs.c0);
}

CscOracle::CscOracle(const Eigen::MatrixXd& sensitive, double eps)
    : sensitive_(sensitive) {
  Eigen::MatrixXd a = sensitive.transpose() * sensitive;
  a.diagonal().array() += eps;
  llt_.compute(a);
  if (llt_.info() != Eigen::Success) {
    throw AuditError(ErrorCode::kSingularSystem,
                     "sensitive Gram matrix is not positive definite");
  }
  ones_fit_ = Fit(Eigen::VectorXd::Ones(sensitive.rows()));
}

Eigen::VectorXd CscOracle::Fit(const Eigen::VectorXd& y) const {
  if (y.size() != sensitive_.rows()) {
    throw AuditError(ErrorCode::kDimensionMismatch,
                     "regression target has the wrong length");
  }
  return llt_.solve(sensitive_.transpose() * y);
}

ThresholdGroup CscOracle::BestResponse(const CostPair& costs) const {
  CheckCosts(sensitive_, costs);
  return ThresholdGroup{Fit(costs.c0) - Fit(costs.c1)};
}

ThresholdGroup CscOracle::ShiftedResponse(const Eigen::VectorXd& base_fit,
                                          double shift) const {
  return ThresholdGroup{-(base_fit + shift * ones_fit_)};
}

}  // namespace fidaudit
