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

#include "fidaudit/linfid.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "fidaudit/error.h"
#include "fidaudit/models.h"
#include "json.hpp"

namespace fidaudit {
namespace {

void CheckFeature(const Dataset& ds, int j) {
  if (j < 0 || j >= ds.num_features()) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "target feature " + std::to_string(j) + " out of range");
  }
}

Eigen::VectorXd SoftWeights(const Eigen::MatrixXd& s,
                            const Eigen::VectorXd& theta) {
  return (s * theta).unaryExpr([](double z) { return Sigmoid(z); });
}

}  // namespace

Eigen::MatrixXd LinFidDesign(const Dataset& ds) {
  Eigen::MatrixXd x(ds.rows(), ds.num_features() + 1);
  x.leftCols(ds.num_features()) = ds.feature_matrix();
  x.col(ds.num_features()).setOnes();
  return x;
}

LinFidValue LinFid(const Dataset& ds, int j, const Eigen::VectorXd& w,
                   double eps) {
  CheckFeature(ds, j);
  if (w.size() != ds.rows()) {
    throw AuditError(ErrorCode::kDimensionMismatch,
                     "weights must have one entry per row");
  }
  if (!(w.sum() > 0.0)) {
    throw AuditError(ErrorCode::kUndefinedAverage,
                     "LIN-FID is undefined for an empty group");
  }
  const Eigen::MatrixXd x = LinFidDesign(ds);
  LinFidValue v;
  v.group_coef = FitWls(x, ds.labels(), w, eps).theta[j];
  v.population_coef =
      FitWls(x, ds.labels(), Eigen::VectorXd::Ones(ds.rows()), eps).theta[j];
  v.lin_fid = std::abs(v.group_coef - v.population_coef);
  return v;
}

double SizePenalty(const Eigen::VectorXd& w, double alpha_lo,
                   double alpha_hi) {
  const double s = GroupSize(w);
  return std::max(alpha_lo - s, 0.0) + std::max(s - alpha_hi, 0.0);
}

LinFidProblem::LinFidProblem(const Dataset& ds, const LinFidConfig& cfg)
    : cfg_(cfg),
      design_(LinFidDesign(ds)),
      y_(ds.labels()),
      sensitive_(ds.sensitive_matrix()),
      sign_(cfg.direction == Direction::kMinimize ? 1.0 : -1.0) {
  CheckFeature(ds, cfg.target_feature);
  if (!(cfg.lambda_size > 0.0) || !(cfg.lr > 0.0)) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "lambda_size and lr must be positive");
  }
  if (!(cfg.alpha_lo >= 0.0 && cfg.alpha_lo < cfg.alpha_hi &&
        cfg.alpha_hi <= 1.0)) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "size band must satisfy 0 <= alpha_lo < alpha_hi <= 1");
  }
}

LinFidObjective LinFidProblem::Evaluate(const Eigen::VectorXd& theta) const {
  if (theta.size() != sensitive_.cols()) {
    throw AuditError(ErrorCode::kDimensionMismatch,
                     "subgroup parameters do not match the sensitive block");
  }
  const Eigen::Index n = design_.rows();
  const Eigen::Index d = design_.cols();
  const int j = cfg_.target_feature;
  const Eigen::VectorXd w = SoftWeights(sensitive_, theta);

  const Eigen::MatrixXd xw = design_.array().colwise() * w.array();
  Eigen::MatrixXd a = design_.transpose() * xw;
  a.diagonal().array() += cfg_.ridge_eps;
  const Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw AuditError(ErrorCode::kSingularSystem,
                     "weighted normal equations are not positive definite");
  }
  const Eigen::VectorXd beta = llt.solve(xw.transpose() * y_);
  const Eigen::VectorXd u = llt.solve(Eigen::VectorXd::Unit(d, j));
  const Eigen::VectorXd resid = y_ - design_ * beta;

  LinFidObjective out;
  out.coef = beta[j];
  out.size = w.mean();
  out.penalty = SizePenalty(w, cfg_.alpha_lo, cfg_.alpha_hi);
  out.value = sign_ * cfg_.lambda_coef * out.coef +
              cfg_.lambda_size * out.penalty;

  double dpen = 0.0;
  if (out.size < cfg_.alpha_lo) dpen = -1.0;
  if (out.size > cfg_.alpha_hi) dpen = 1.0;
  const Eigen::ArrayXd dw = w.array() * (1.0 - w.array());
  const Eigen::ArrayXd dcoef_dw = (design_ * u).array() * resid.array();
  out.coef_gradient =
      sensitive_.transpose() *
      (sign_ * cfg_.lambda_coef * dcoef_dw * dw).matrix();
  out.penalty_gradient =
      sensitive_.transpose() *
      (cfg_.lambda_size * dpen / static_cast<double>(n) * dw).matrix();
  out.gradient = out.coef_gradient + out.penalty_gradient;
  return out;
}

Eigen::VectorXd LinFidWeights(const Eigen::VectorXd& theta, const Dataset& ds,
                              bool hard) {
  Eigen::VectorXd w = SoftWeights(ds.sensitive_matrix(), theta);
  if (hard) w = w.unaryExpr([](double v) { return v > 0.5 ? 1.0 : 0.0; });
  return w;
}

LinFidResult OptimizeLinFid(const Dataset& train, const LinFidConfig& cfg) {
  const LinFidProblem problem(train, cfg);
  const int d = problem.dim();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> init(0.0, cfg.init_scale);
  Eigen::VectorXd theta(d);
  for (int k = 0; k < d; ++k) theta[k] = init(rng);

  LinFidResult out;
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(d);
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kAdamEps = 1e-8;
  std::vector<double> best_history;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_theta = theta;
  int t = 0;
  for (t = 0; t <= cfg.max_iters; ++t) {
    const LinFidObjective obj = problem.Evaluate(theta);
    if (!std::isfinite(obj.value) || !obj.gradient.allFinite()) {
      out.aborted = true;
      break;
    }
    out.trace.push_back({t, obj.value, obj.size, obj.coef});
    if (t == 0) out.initial_objective = obj.value;
    if (obj.value < best) {
      best = obj.value;
      best_theta = theta;
    }
    best_history.push_back(best);
    const int win = cfg.plateau_window;
    if (t >= win) {
      const double gain = best_history[t - win] - best;
      if (gain < cfg.plateau_tol * std::max(1.0, std::abs(best))) {
        out.plateaued = true;
        break;
      }
    }
    if (t == cfg.max_iters) break;
    const int step = t + 1;
    m1 = kBeta1 * m1 + (1.0 - kBeta1) * obj.gradient;
    m2 = kBeta2 * m2 + (1.0 - kBeta2) * obj.gradient.cwiseAbs2();
    const double c1 = 1.0 - std::pow(kBeta1, step);
    const double c2 = 1.0 - std::pow(kBeta2, step);
    theta -= (cfg.lr * (m1 / c1).array() /
              ((m2 / c2).array().sqrt() + kAdamEps))
                 .matrix();
  }
  out.theta = best_theta;
  out.final_objective = best;

  AuditResult& r = out.audit;
  r.feature = cfg.target_feature;
  r.feature_name = train.feature_names()[cfg.target_feature];
  r.notion = "LR";
  r.direction = cfg.direction;
  r.alpha_lo = cfg.alpha_lo;
  r.alpha_hi = cfg.alpha_hi;
  r.group.theta = best_theta;
  r.group.kind = cfg.hard_evaluation ? GroupKind::kHard : GroupKind::kSoft;
  r.group.sensitive_feature_names = train.sensitive_names();
  r.iterations_used = std::min(t, cfg.max_iters);
  const Eigen::VectorXd w = LinFidWeights(best_theta, train,
                                          cfg.hard_evaluation);
  r.size_train = GroupSize(w);
  r.in_band = r.size_train >= cfg.alpha_lo && r.size_train <= cfg.alpha_hi;
  // Both stopping rules end the run; only a non-finite objective or a size
  // outside the band leaves it unconverged.
  r.gap_certified = out.plateaued;
  r.converged = !out.aborted && r.in_band;
  if (w.sum() > 0.0) {
    out.train = LinFid(train, cfg.target_feature, w, cfg.ridge_eps);
  } else {
    r.converged = false;
  }
  r.fid_train = r.avg_fid_train = out.train.lin_fid;
  r.group_mean_train = out.train.group_coef;
  r.population_mean_train = out.train.population_coef;
  return out;
}

void EvaluateLinFidOnTest(LinFidResult* result, const Dataset& test,
                          const LinFidConfig& cfg) {
  const Eigen::VectorXd w =
      LinFidWeights(result->theta, test, cfg.hard_evaluation);
  AuditResult& r = result->audit;
  r.evaluated_on_test = true;
  r.size_test = GroupSize(w);
  if (w.sum() > 0.0) {
    result->test = LinFid(test, cfg.target_feature, w, cfg.ridge_eps);
    r.fid_test = result->test.lin_fid;
    r.avg_fid_test = result->test.lin_fid;
    r.group_mean_test = result->test.group_coef;
  }
  r.population_mean_test = result->test.population_coef;
}

LinFidResult OptimizeLinFidBothDirections(const Dataset& train,
                                          const LinFidConfig& cfg) {
  LinFidConfig lo = cfg;
  lo.direction = Direction::kMinimize;
  LinFidConfig hi = cfg;
  hi.direction = Direction::kMaximize;
  LinFidResult a = OptimizeLinFid(train, lo);
  LinFidResult b = OptimizeLinFid(train, hi);
  return &PickBetter(a.audit, b.audit) == &a.audit ? std::move(a)
                                                   : std::move(b);
}

double LinFidGradientCheck(const Dataset& ds, const LinFidConfig& cfg,
                           const Eigen::VectorXd& theta, double h) {
  const LinFidProblem problem(ds, cfg);
  const Eigen::VectorXd g = problem.Evaluate(theta).gradient;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    Eigen::VectorXd tp = theta, tm = theta;
    tp[k] += h;
    tm[k] -= h;
    const double fd =
        (problem.Evaluate(tp).value - problem.Evaluate(tm).value) / (2 * h);
    const double scale = std::max({std::abs(fd), std::abs(g[k]), 1e-6});
    worst = std::max(worst, std::abs(fd - g[k]) / scale);
  }
  return worst;
}

std::string LinFidTraceToJsonl(const std::vector<LinFidTraceRecord>& trace) {
  std::string out;
  for (const LinFidTraceRecord& rec : trace) {
    nlohmann::ordered_json line;
    line["t"] = rec.t;
    line["objective"] = rec.objective;
    line["size"] = rec.size;
    line["coefficient"] = rec.coefficient;
    out += line.dump();
    out += '\n';
  }
  return out;
}

}  // namespace fidaudit
