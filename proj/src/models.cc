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

#include "fidaudit/models.h"

#include <cmath>
#include <random>

#include "fidaudit/error.h"

namespace fidaudit {

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace

double LogisticLoss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& weights, double intercept,
                    Eigen::VectorXd* gradient) {
  const Eigen::Index n = x.rows();
  const Eigen::VectorXd z =
      (x * weights).array() + intercept;
  double loss = 0.0;
  Eigen::VectorXd residual(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // -[y log p + (1-y) log(1-p)] = softplus(z) - y z
    loss += Softplus(z[i]) - y[i] * z[i];
    residual[i] = Sigmoid(z[i]) - y[i];
  }
  loss /= static_cast<double>(n);
  if (gradient) {
    gradient->resize(weights.size() + 1);
    gradient->head(weights.size()) =
        x.transpose() * residual / static_cast<double>(n);
    (*gradient)[weights.size()] = residual.mean();
  }
  return loss;
}

LogisticModel FitLogistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const LogisticOptions& options) {
  if (x.rows() != y.size()) {
    throw AuditError(ErrorCode::kDimensionMismatch,
                     "feature rows and labels disagree");
  }
  if (x.rows() < 2) {
    throw AuditError(ErrorCode::kDegenerateLabels,
                     "logistic regression needs at least two rows");
  }
  bool has_pos = false;
  bool has_neg = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] == 1.0) {
      has_pos = true;
    } else if (y[i] == 0.0) {
      has_neg = true;
    } else {
      throw AuditError(ErrorCode::kDegenerateLabels,
                       "logistic labels must be 0 or 1");
    }
  }
  if (!has_pos || !has_neg) {
    throw AuditError(ErrorCode::kDegenerateLabels,
                     "logistic labels contain a single class");
  }

  LogisticModel model;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> init(0.0, 0.01);
  model.weights.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) model.weights[j] = init(rng);
  model.intercept = 0.0;

  Eigen::VectorXd grad;
  const Eigen::Index d = x.cols();
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const double loss =
        LogisticLoss(x, y, model.weights, model.intercept, &grad);
    model.training_loss_trace.push_back(loss);
    model.weights -= options.learning_rate * grad.head(d);
    model.intercept -= options.learning_rate * grad[d];
  }
  model.training_loss_trace.push_back(
      LogisticLoss(x, y, model.weights, model.intercept));
  return model;
}

Eigen::VectorXd PredictProba(const LogisticModel& model,
                             const Eigen::MatrixXd& x) {
  if (x.cols() != model.weights.size()) {
    throw AuditError(ErrorCode::kDimensionMismatch,
                     "model expects " + std::to_string(model.weights.size()) +
                         " columns, got " + std::to_string(x.cols()));
  }
  Eigen::VectorXd z = (x * model.weights).array() + model.intercept;
  return z.unaryExpr([](double v) { return Sigmoid(v); });
}

LinearCoefficients FitWls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& w, double eps) {
  if (x.rows() != y.size() || x.rows() != w.size()) {
    throw AuditError(ErrorCode::kDimensionMismatch,
                     "WLS inputs disagree on row count");
  }
  if (eps < 0.0) {
    throw AuditError(ErrorCode::kInvalidArgument, "ridge eps must be >= 0");
  }
  Eigen::MatrixXd gram = x.transpose() * w.asDiagonal() * x;
  gram.diagonal().array() += eps;
  const Eigen::VectorXd rhs = x.transpose() * w.cwiseProduct(y);
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  // LLT happily factors tiny negative round-off pivots into NaNs; treat any
  // non-finite or numerically zero pivot as singular.
  const double scale = std::max(1.0, gram.diagonal().cwiseAbs().maxCoeff());
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    const auto diag = llt.matrixLLT().diagonal();
    for (Eigen::Index k = 0; k < diag.size(); ++k) {
      if (!std::isfinite(diag[k]) || diag[k] * diag[k] <= 1e-13 * scale) {
        ok = false;
        break;
      }
    }
  }
  if (!ok) {
    throw AuditError(ErrorCode::kSingularSystem,
                     "weighted normal equations are singular");
  }
  return {llt.solve(rhs), eps};
}

}  // namespace fidaudit
