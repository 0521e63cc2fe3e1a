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

#ifndef FIDAUDIT_SEPARABLE_SEARCH_H_
#define FIDAUDIT_SEPARABLE_SEARCH_H_

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fidaudit/csc.h"
#include "fidaudit/dataset.h"
#include "fidaudit/importance.h"
#include "fidaudit/subgroup.h"

namespace fidaudit {

// Sign applied to the importance column before the search minimizes the
// group sum: kMinimize searches for a low-importance group (cost C = M_j),
// kMaximize for a high-importance group (cost C = -M_j).
enum class Direction { kMinimize, kMaximize };

const char* DirectionName(Direction d);

struct SearchConfig {
  double alpha_lo = 0.0;
  double alpha_hi = 1.0;
  double B = 1.0;      // bound on |lambda|_1
  double eta = 1e-5;   // exponentiated-gradient step
  double nu = 1e-3;    // target Lagrangian gap, in units of summed importance
  int max_iters = 5000;
  Direction direction = Direction::kMinimize;
  int check_every = 10;
  // Use lambda' = B (Phi_L, Phi_U) for the dual value instead of the exact
  // best response.
  bool literal_dual_response = false;
  double csc_ridge = kCscRidge;
  bool degenerate = false;  // importance column is identically zero
};

// Throws kInvalidArgument unless 0 <= alpha_lo < alpha_hi <= 1 and B, eta,
// nu, max_iters are positive.
void ValidateConfig(const SearchConfig& cfg);

struct HyperparameterOptions {
  // eta = nu / (2 n^2 B) instead of the fixed empirical step.
  bool theoretical_eta = false;
  // Replaces the default step when set (ignored with theoretical_eta).
  std::optional<double> eta;
  int max_iters = 5000;
};

// B = 1e4 mu, eta = 1e-5, nu = 0.05 mu n alpha_lo, T = 5000, where mu is
// the mean absolute importance of column j. A zero column yields a
// degenerate config with B = 1. A warning is appended when eta B > mu.
SearchConfig DefaultHyperparameters(const ImportanceMatrix& m, int j,
                                    double alpha_lo, double alpha_hi,
                                    const HyperparameterOptions& options = {},
                                    std::vector<std::string>* warnings =
                                        nullptr);
SearchConfig DefaultHyperparameters(double mu_abs, int n, double alpha_lo,
                                    double alpha_hi,
                                    const HyperparameterOptions& options = {},
                                    std::vector<std::string>* warnings =
                                        nullptr);

// lambda_i = B exp(theta_i) / (1 + exp(theta_0) + exp(theta_1)).
std::array<double, 2> DualWeights(const std::array<double, 2>& theta,
                                  double B);

// Size violations alpha_lo - |w| and |w| - alpha_hi (fractions).
std::array<double, 2> SizeViolations(const Eigen::VectorXd& w, double alpha_lo,
                                     double alpha_hi);

// sum_i w_i C_i + lambda_L (alpha_lo - |w|) + lambda_U (|w| - alpha_hi).
double Lagrangian(const Eigen::VectorXd& w, const std::array<double, 2>& lam,
                  const Eigen::VectorXd& cost, const SearchConfig& cfg);

struct DualState {
  std::array<double, 2> theta{0.0, 0.0};
  std::array<double, 2> lambda{0.0, 0.0};
  GroupDistribution iterate_avg_groups;
  std::array<double, 2> iterate_avg_lambda{0.0, 0.0};
  double gap = 0.0;
};

struct TraceRecord {
  int t = 0;
  double gap = 0.0;
  double size = 0.0;     // size of the averaged distribution
  double avg_fid = 0.0;  // AVG-FID of the averaged membership
  std::array<double, 2> lambda{0.0, 0.0};
  double lagrangian = 0.0;
  double upper = 0.0;
  double lower = 0.0;
};

struct AuditResult {
  int feature = -1;
  std::string feature_name;
  std::string notion;
  SubgroupSpec group;
  Direction direction = Direction::kMinimize;
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;

  double fid_train = 0.0;
  double avg_fid_train = 0.0;
  double size_train = 0.0;
  double group_mean_train = 0.0;       // mean importance inside the group
  double population_mean_train = 0.0;  // mean importance over all rows

  bool evaluated_on_test = false;
  double fid_test = 0.0;
  std::optional<double> avg_fid_test;
  double size_test = 0.0;
  std::optional<double> group_mean_test;
  double population_mean_test = 0.0;

  int iterations_used = 0;
  bool gap_certified = false;  // final gap <= nu
  bool in_band = false;        // reported group's train size is in the band
  bool converged = false;      // gap_certified && in_band
  bool degenerate = false;
  double final_gap = 0.0;

  // Averaged play over all iterations.
  double expected_size = 0.0;
  std::array<double, 2> expected_violation{0.0, 0.0};
  double expected_objective = 0.0;  // sum_i phat_i C_i, signed search cost
  double expected_fid = 0.0;        // E_{g ~ phat} FID(g)

  SearchConfig config;
  DualState dual;
  std::vector<TraceRecord> trace;

  // Signed group-minus-population mean difference.
  double mean_diff_train() const {
    return group_mean_train - population_mean_train;
  }
  std::optional<double> mean_diff_test() const {
    if (!group_mean_test) return std::nullopt;
    return *group_mean_test - population_mean_test;
  }
};

// Algorithm: exponentiated-gradient dual player against a cost-sensitive
// best-response primal player, stopped once the Lagrangian gap of the
// averaged play is at most nu (checked every cfg.check_every rounds). The
// reported group is the round's group with the largest AVG-FID among those
// whose size lies in the band; if no round lands in the band the group with
// the closest size is reported and the result is not converged.
AuditResult ConstrainedSearch(const ImportanceMatrix& m, int j,
                              const SearchConfig& cfg, const Dataset& ds);

// Fills the *_test fields from held-out rows.
void EvaluateOnTest(AuditResult* result, const ImportanceMatrix& m,
                    const Dataset& ds);

// Runs both directions and keeps the better one: in-band results beat
// out-of-band ones, then larger train AVG-FID wins.
AuditResult SearchBothDirections(const ImportanceMatrix& m, int j,
                                 const SearchConfig& cfg, const Dataset& ds);
const AuditResult& PickBetter(const AuditResult& a, const AuditResult& b);

using AlphaRange = std::pair<double, double>;

std::vector<AlphaRange> DefaultAlphaRanges();

// Parses "0.01-0.05,0.05-0.1". Throws kInvalidArgument on malformed input.
std::vector<AlphaRange> ParseAlphaRanges(const std::string& text);

struct SweepResult {
  std::vector<AuditResult> per_range;
  int best = -1;  // index into per_range, -1 when nothing converged
};

struct SweepOptions {
  HyperparameterOptions hyper;
};

// Per range: default hyperparameters, both directions, evaluation on the
// test rows when given. The overall best maximizes test AVG-FID (train
// AVG-FID without test data) among converged results.
SweepResult AvgFidSweep(const ImportanceMatrix& train_m, int j,
                        const std::vector<AlphaRange>& ranges,
                        const Dataset& train, const ImportanceMatrix* test_m,
                        const Dataset* test,
                        const SweepOptions& options = {});

// Trace as JSON lines: {"t","gap","size","avg_fid","lambda":[..]}.
std::string TraceToJsonl(const std::vector<TraceRecord>& trace);

}  // namespace fidaudit

#endif  // FIDAUDIT_SEPARABLE_SEARCH_H_
