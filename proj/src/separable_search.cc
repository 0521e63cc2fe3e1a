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

#include "fidaudit/separable_search.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fidaudit/csv.h"
#include "fidaudit/error.h"
#include "json.hpp"

namespace fidaudit {
namespace {

double PositivePart(double x) { return x > 0.0 ? x : 0.0; }

bool InBand(double size, double lo, double hi) {
  return size >= lo && size <= hi;
}

// Distance of a size from the band, zero inside it.
double BandDistance(double size, double lo, double hi) {
  return std::max({lo - size, size - hi, 0.0});
}

void FillTrainStats(AuditResult* r, const Eigen::VectorXd& column,
                    const Eigen::VectorXd& w) {
  const FidValues v = FidValue(column, w);
  r->fid_train = v.fid;
  r->avg_fid_train = v.avg_fid.value_or(0.0);
  r->size_train = GroupSize(w);
  r->group_mean_train = v.group_mean.value_or(v.population_mean);
  r->population_mean_train = v.population_mean;
}

}  // namespace

const char* DirectionName(Direction d) {
  return d == Direction::kMinimize ? "minimize" : "maximize";
}

void ValidateConfig(const SearchConfig& cfg) {
  if (!(cfg.alpha_lo >= 0.0 && cfg.alpha_lo < cfg.alpha_hi &&
        cfg.alpha_hi <= 1.0)) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "size band must satisfy 0 <= alpha_lo < alpha_hi <= 1");
  }
  if (!(cfg.B > 0.0) || !(cfg.eta > 0.0) || !(cfg.nu > 0.0)) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "B, eta and nu must be positive");
  }
  if (cfg.max_iters <= 0 || cfg.check_every <= 0) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "max_iters and check_every must be positive");
  }
}

SearchConfig DefaultHyperparameters(double mu_abs, int n, double alpha_lo,
                                    double alpha_hi,
                                    const HyperparameterOptions& options,
                                    std::vector<std::string>* warnings) {
  SearchConfig cfg;
  cfg.alpha_lo = alpha_lo;
  cfg.alpha_hi = alpha_hi;
  cfg.max_iters = options.max_iters;
  cfg.eta = 1e-5;
  if (!(mu_abs > 0.0)) {
    cfg.degenerate = true;
    cfg.B = 1.0;
    // Any positive tolerance works for a zero objective.
    cfg.nu = 0.05 * std::max(1.0, n * alpha_lo);
  } else {
    cfg.B = 1e4 * mu_abs;
    cfg.nu = 0.05 * mu_abs * n * alpha_lo;
    if (!(cfg.nu > 0.0)) cfg.nu = 0.05 * mu_abs;
  }
  if (options.eta) cfg.eta = *options.eta;
  if (options.theoretical_eta) {
    cfg.eta = cfg.nu / (2.0 * static_cast<double>(n) * n * cfg.B);
  }
  if (warnings && !cfg.degenerate && cfg.eta * cfg.B > mu_abs) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "eta*B = %.3g exceeds mean |importance| %.3g", cfg.eta * cfg.B,
                  mu_abs);
    warnings->push_back(buf);
  }
  return cfg;
}

SearchConfig DefaultHyperparameters(const ImportanceMatrix& m, int j,
                                    double alpha_lo, double alpha_hi,
                                    const HyperparameterOptions& options,
                                    std::vector<std::string>* warnings) {
  if (j < 0 || j >= m.cols()) {
    throw AuditError(ErrorCode::kInvalidArgument, "feature index out of range");
  }
  const double mu = m.values.col(j).cwiseAbs().mean();
  return DefaultHyperparameters(mu, m.rows(), alpha_lo, alpha_hi, options,
                                warnings);
}

std::array<double, 2> DualWeights(const std::array<double, 2>& theta,
                                  double B) {
  if (!std::isfinite(theta[0]) || !std::isfinite(theta[1])) {
    throw AuditError(ErrorCode::kNonFinite, "dual parameters are not finite");
  }
  // The slack coordinate has theta = 0.
  const double top = std::max({theta[0], theta[1], 0.0});
  const double e0 = std::exp(theta[0] - top);
  const double e1 = std::exp(theta[1] - top);
  const double denom = std::exp(-top) + e0 + e1;
  return {B * e0 / denom, B * e1 / denom};
}

std::array<double, 2> SizeViolations(const Eigen::VectorXd& w, double alpha_lo,
                                     double alpha_hi) {
  const double s = GroupSize(w);
  return {alpha_lo - s, s - alpha_hi};
}

double Lagrangian(const Eigen::VectorXd& w, const std::array<double, 2>& lam,
                  const Eigen::VectorXd& cost, const SearchConfig& cfg) {
  if (w.size() != cost.size()) {
    throw AuditError(ErrorCode::kDimensionMismatch,
                     "membership and cost vectors differ in length");
  }
  const auto phi = SizeViolations(w, cfg.alpha_lo, cfg.alpha_hi);
  return w.dot(cost) + lam[0] * phi[0] + lam[1] * phi[1];
}

AuditResult ConstrainedSearch(const ImportanceMatrix& m, int j,
                              const SearchConfig& cfg, const Dataset& ds) {
  ValidateConfig(cfg);
  if (m.rows() != ds.rows()) {
    throw AuditError(ErrorCode::kAlignment,
                     "importance rows do not match dataset rows");
  }
  if (j < 0 || j >= m.cols()) {
    throw AuditError(ErrorCode::kInvalidArgument, "feature index out of range");
  }
  const int n = ds.rows();
  const Eigen::MatrixXd& s = ds.sensitive_matrix();
  const Eigen::VectorXd column = m.values.col(j);
  const double sign = cfg.direction == Direction::kMinimize ? 1.0 : -1.0;
  const Eigen::VectorXd cost = sign * column;

  AuditResult r;
  r.feature = j;
  if (j < static_cast<int>(m.feature_names.size())) {
    r.feature_name = m.feature_names[j];
  }
  r.notion = NotionName(m.notion);
  r.direction = cfg.direction;
  r.alpha_lo = cfg.alpha_lo;
  r.alpha_hi = cfg.alpha_hi;
  r.config = cfg;
  r.degenerate = cfg.degenerate || column.cwiseAbs().maxCoeff() == 0.0;
  r.group.kind = GroupKind::kHard;
  r.group.sensitive_feature_names = ds.sensitive_names();

  const CscOracle oracle(s, cfg.csc_ridge);
  const Eigen::VectorXd cost_fit = oracle.Fit(cost);
  const double inv_n = 1.0 / n;

  DualState& st = r.dual;
  Eigen::VectorXd member_sum = Eigen::VectorXd::Zero(n);
  std::array<double, 2> lambda_sum{0.0, 0.0};
  std::vector<std::pair<Eigen::VectorXd, double>> played;  // (theta, size)

  // Best in-band group so far, and the group closest to the band.
  Eigen::VectorXd best_theta, closest_theta;
  double best_avg = -1.0;
  double closest_dist = std::numeric_limits<double>::infinity();
  // Every group the oracle returns is a candidate for the reported group.
  auto consider = [&](const ThresholdGroup& g, const Eigen::VectorXd& w) {
    const double size = GroupSize(w);
    if (InBand(size, cfg.alpha_lo, cfg.alpha_hi)) {
      const double avg = FidValue(column, w).avg_fid.value_or(0.0);
      if (avg > best_avg) {
        best_avg = avg;
        best_theta = g.theta;
      }
    } else if (best_avg < 0.0) {
      const double dist = BandDistance(size, cfg.alpha_lo, cfg.alpha_hi);
      if (dist < closest_dist) {
        closest_dist = dist;
        closest_theta = g.theta;
      }
    }
  };
  int t = 0;
  for (t = 1; t <= cfg.max_iters; ++t) {
    st.lambda = DualWeights(st.theta, cfg.B);
    // Including row i costs C_i - (lambda_L - lambda_U) / n.
    const ThresholdGroup g = oracle.ShiftedResponse(
        cost_fit, -(st.lambda[0] - st.lambda[1]) * inv_n);
    const Eigen::VectorXd w = Membership(g, s);
    const double size = GroupSize(w);
    member_sum += w;
    lambda_sum[0] += st.lambda[0];
    lambda_sum[1] += st.lambda[1];
    st.iterate_avg_groups.Add(g, 1.0);

    consider(g, w);

    if (t % cfg.check_every == 0 || t == cfg.max_iters) {
      const Eigen::VectorXd p_hat = member_sum / t;
      const std::array<double, 2> lam_hat{lambda_sum[0] / t,
                                          lambda_sum[1] / t};
      const double lag = Lagrangian(p_hat, lam_hat, cost, cfg);
      const auto phi = SizeViolations(p_hat, cfg.alpha_lo, cfg.alpha_hi);
      const double obj = p_hat.dot(cost);
      double upper;
      if (cfg.literal_dual_response) {
        upper = obj + cfg.B * phi[0] * phi[0] + cfg.B * phi[1] * phi[1];
      } else {
        upper = obj + cfg.B * PositivePart(std::max(phi[0], phi[1]));
      }
      const ThresholdGroup g_low = oracle.ShiftedResponse(
          cost_fit, -(lam_hat[0] - lam_hat[1]) * inv_n);
      const Eigen::VectorXd w_low = Membership(g_low, s);
      const double lower = Lagrangian(w_low, lam_hat, cost, cfg);
      consider(g_low, w_low);
      st.gap = std::max(std::abs(lag - lower), std::abs(upper - lag));
      st.iterate_avg_lambda = lam_hat;

      TraceRecord rec;
      rec.t = t;
      rec.gap = st.gap;
      rec.size = GroupSize(p_hat);
      rec.avg_fid = FidValue(column, p_hat).avg_fid.value_or(0.0);
      rec.lambda = st.lambda;
      rec.lagrangian = lag;
      rec.upper = upper;
      rec.lower = lower;
      r.trace.push_back(rec);
      if (st.gap <= cfg.nu) {
        r.gap_certified = true;
        break;
      }
    }

    const double scale = cfg.eta * n;
    st.theta[0] += scale * (cfg.alpha_lo - size);
    st.theta[1] += scale * (size - cfg.alpha_hi);
  }
  r.iterations_used = std::min(t, cfg.max_iters);
  r.final_gap = st.gap;
  st.iterate_avg_groups.Normalize();

  const Eigen::VectorXd p_hat = member_sum / r.iterations_used;
  r.expected_size = GroupSize(p_hat);
  r.expected_violation =
      SizeViolations(p_hat, cfg.alpha_lo, cfg.alpha_hi);
  r.expected_objective = p_hat.dot(cost);
  double efid = 0.0;
  for (const auto& [g, p] : st.iterate_avg_groups.members()) {
    efid += p * FidValue(column, Membership(g, s)).fid;
  }
  r.expected_fid = efid;

  r.in_band = best_avg >= 0.0;
  r.group.theta = r.in_band ? best_theta : closest_theta;
  r.converged = r.gap_certified && r.in_band;
  FillTrainStats(&r, column, Membership(ThresholdGroup{r.group.theta}, s));
  return r;
}

void EvaluateOnTest(AuditResult* result, const ImportanceMatrix& m,
                    const Dataset& ds) {
  if (m.rows() != ds.rows()) {
    throw AuditError(ErrorCode::kAlignment,
                     "test importance rows do not match test dataset rows");
  }
  const Eigen::VectorXd w = Membership(result->group, ds.sensitive_matrix());
  const FidValues v = FidValue(m.values, result->feature, w);
  result->evaluated_on_test = true;
  result->fid_test = v.fid;
  result->avg_fid_test = v.avg_fid;
  result->size_test = GroupSize(w);
  result->group_mean_test = v.group_mean;
  result->population_mean_test = v.population_mean;
}

const AuditResult& PickBetter(const AuditResult& a, const AuditResult& b) {
  if (a.in_band != b.in_band) return a.in_band ? a : b;
  if (!a.in_band) {
    const double da = BandDistance(a.size_train, a.alpha_lo, a.alpha_hi);
    const double db = BandDistance(b.size_train, b.alpha_lo, b.alpha_hi);
    if (da != db) return da < db ? a : b;
  }
  if (a.converged != b.converged) return a.converged ? a : b;
  return b.avg_fid_train > a.avg_fid_train ? b : a;
}

AuditResult SearchBothDirections(const ImportanceMatrix& m, int j,
                                 const SearchConfig& cfg, const Dataset& ds) {
  SearchConfig lo = cfg;
  lo.direction = Direction::kMinimize;
  SearchConfig hi = cfg;
  hi.direction = Direction::kMaximize;
  AuditResult a = ConstrainedSearch(m, j, lo, ds);
  AuditResult b = ConstrainedSearch(m, j, hi, ds);
  return &PickBetter(a, b) == &a ? std::move(a) : std::move(b);
}

std::vector<AlphaRange> DefaultAlphaRanges() {
  return {{0.01, 0.05}, {0.05, 0.1}, {0.1, 0.15}, {0.15, 0.2}, {0.2, 0.25}};
}

std::vector<AlphaRange> ParseAlphaRanges(const std::string& text) {
  std::vector<AlphaRange> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) {
      throw AuditError(ErrorCode::kInvalidArgument,
                       "range '" + item + "' is not of the form lo-hi");
    }
    const auto lo = ParseReal(item.substr(0, dash));
    const auto hi = ParseReal(item.substr(dash + 1));
    if (!lo || !hi || !(*lo >= 0.0 && *lo < *hi && *hi <= 1.0)) {
      throw AuditError(ErrorCode::kInvalidArgument,
                       "invalid size range '" + item + "'");
    }
    out.emplace_back(*lo, *hi);
  }
  if (out.empty()) {
    throw AuditError(ErrorCode::kInvalidArgument, "no size ranges given");
  }
  return out;
}

SweepResult AvgFidSweep(const ImportanceMatrix& train_m, int j,
                        const std::vector<AlphaRange>& ranges,
                        const Dataset& train, const ImportanceMatrix* test_m,
                        const Dataset* test, const SweepOptions& options) {
  SweepResult out;
  double best_score = -1.0;
  for (const auto& [lo, hi] : ranges) {
    const SearchConfig cfg =
        DefaultHyperparameters(train_m, j, lo, hi, options.hyper);
    AuditResult r = SearchBothDirections(train_m, j, cfg, train);
    if (test_m && test) EvaluateOnTest(&r, *test_m, *test);
    if (r.converged) {
      const double score = r.evaluated_on_test ? r.avg_fid_test.value_or(0.0)
                                               : r.avg_fid_train;
      if (score > best_score) {
        best_score = score;
        out.best = static_cast<int>(out.per_range.size());
      }
    }
    out.per_range.push_back(std::move(r));
  }
  return out;
}

std::string TraceToJsonl(const std::vector<TraceRecord>& trace) {
  std::string out;
  for (const TraceRecord& rec : trace) {
    nlohmann::ordered_json line;
    line["t"] = rec.t;
    line["gap"] = rec.gap;
    line["size"] = rec.size;
    line["avg_fid"] = rec.avg_fid;
    line["lambda"] = {rec.lambda[0], rec.lambda[1]};
    out += line.dump();
    out += '\n';
  }
  return out;
}

}  // namespace fidaudit
