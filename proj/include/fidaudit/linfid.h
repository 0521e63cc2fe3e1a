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

#ifndef FIDAUDIT_LINFID_H_
#define FIDAUDIT_LINFID_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fidaudit/dataset.h"
#include "fidaudit/separable_search.h"

namespace fidaudit {

struct LinFidConfig {
  double lambda_size = 1e5;
  double lambda_coef = 0.1;
  double ridge_eps = 1e-6;
  double lr = 0.05;
  int max_iters = 1000;
  uint64_t seed = 0;
  double alpha_lo = 0.0;
  double alpha_hi = 1.0;
  int target_feature = 0;
  // kMinimize drives the subgroup coefficient down, kMaximize up.
  Direction direction = Direction::kMinimize;
  double init_scale = 0.01;
  int plateau_window = 50;
  double plateau_tol = 1e-9;
  // Evaluate the final group with memberships thresholded at 0.5.
  bool hard_evaluation = false;
};

// Regression design: the encoded features followed by a column of ones.
// Coefficient j belongs to feature j.
Eigen::MatrixXd LinFidDesign(const Dataset& ds);

// WLS coefficient of feature j under weights w and under unit weights.
struct LinFidValue {
  double group_coef = 0.0;
  double population_coef = 0.0;
  double lin_fid = 0.0;  // |group_coef - population_coef|
};

LinFidValue LinFid(const Dataset& ds, int j, const Eigen::VectorXd& w,
                   double eps);

// max(alpha_lo - |w|, 0) + max(|w| - alpha_hi, 0), with |w| a fraction.
double SizePenalty(const Eigen::VectorXd& w, double alpha_lo, double alpha_hi);

struct LinFidObjective {
  double value = 0.0;
  double coef = 0.0;     // subgroup coefficient of the target feature
  double penalty = 0.0;  // SizePenalty of the soft weights
  double size = 0.0;
  Eigen::VectorXd gradient;  // d value / d theta
  Eigen::VectorXd coef_gradient;
  Eigen::VectorXd penalty_gradient;
};

// Objective sign * lambda_coef * coef_j(theta) + lambda_size * P_size(theta)
// over soft memberships w = sigmoid(S theta). The gradient differentiates
// through the normal equations: d coef_j / d w_i = (A^-1 e_j . x_i) r_i.
class LinFidProblem {
 public:
  LinFidProblem(const Dataset& ds, const LinFidConfig& cfg);

  LinFidObjective Evaluate(const Eigen::VectorXd& theta) const;
  int dim() const { return static_cast<int>(sensitive_.cols()); }

 private:
  LinFidConfig cfg_;
  Eigen::MatrixXd design_;
  Eigen::VectorXd y_;
  Eigen::MatrixXd sensitive_;
  double sign_ = 1.0;
};

struct LinFidTraceRecord {
  int t = 0;
  double objective = 0.0;
  double size = 0.0;
  double coefficient = 0.0;
};

struct LinFidResult {
  AuditResult audit;  // notion "LR"; fid/avg_fid hold LIN-FID
  Eigen::VectorXd theta;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  bool plateaued = false;
  bool aborted = false;  // non-finite objective
  LinFidValue train;
  LinFidValue test;
  std::vector<LinFidTraceRecord> trace;
};

// ADAM (beta1 0.9, beta2 0.999, eps 1e-8) from a seeded N(0, init_scale^2)
// start. Stops once the best objective improves by less than plateau_tol
// (relative) over plateau_window steps, or at max_iters. The returned theta
// is the best iterate seen. The audit is converged when the objective stayed
// finite and the evaluated group lies in the band; gap_certified records
// whether the plateau rule fired.
LinFidResult OptimizeLinFid(const Dataset& train, const LinFidConfig& cfg);

// Weights used for evaluation: soft, or hard at 0.5.
Eigen::VectorXd LinFidWeights(const Eigen::VectorXd& theta,
                              const Dataset& ds, bool hard);

void EvaluateLinFidOnTest(LinFidResult* result, const Dataset& test,
                          const LinFidConfig& cfg);

// Runs both directions and keeps the in-band result with the larger train
// LIN-FID.
LinFidResult OptimizeLinFidBothDirections(const Dataset& train,
                                          const LinFidConfig& cfg);

// Largest relative deviation between the analytic gradient and central
// differences with step h.
double LinFidGradientCheck(const Dataset& ds, const LinFidConfig& cfg,
                           const Eigen::VectorXd& theta, double h = 1e-5);

std::string LinFidTraceToJsonl(const std::vector<LinFidTraceRecord>& trace);

}  // namespace fidaudit

#endif  // FIDAUDIT_LINFID_H_
