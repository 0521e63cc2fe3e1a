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

#ifndef FIDAUDIT_MODELS_H_
#define FIDAUDIT_MODELS_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace fidaudit {

struct LogisticModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  // Mean log-loss before each epoch's update, plus the final loss.
  std::vector<double> training_loss_trace;
};

struct LogisticOptions {
  double learning_rate = 0.1;
  int epochs = 500;
  uint64_t seed = 0;
};

// Full-batch gradient descent on the mean log-loss. Weights start from a
// seeded N(0, 0.01^2) draw, so results are a pure function of the inputs.
// Throws kDegenerateLabels unless y holds both 0 and 1 (and nothing else).
LogisticModel FitLogistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const LogisticOptions& options = {});

// Mean log-loss and its gradient with respect to (weights, intercept); the
// intercept derivative is the last entry of *gradient.
double LogisticLoss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& weights, double intercept,
                    Eigen::VectorXd* gradient = nullptr);

// sigmoid(x w + b) row by row.
Eigen::VectorXd PredictProba(const LogisticModel& model,
                             const Eigen::MatrixXd& x);

double Sigmoid(double z);

struct LinearCoefficients {
  Eigen::VectorXd theta;
  double ridge_eps = 0.0;
};

// Weighted ridge least squares: argmin sum_i w_i (theta.x_i - y_i)^2 +
// eps |theta|^2, via a Cholesky factorization of X^T W X + eps I. Throws
// kSingularSystem when that matrix is not positive definite.
LinearCoefficients FitWls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& w, double eps);

}  // namespace fidaudit

#endif  // FIDAUDIT_MODELS_H_
