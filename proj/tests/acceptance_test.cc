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

// Acceptance checks for the audit engine. Prints one PASS or FAIL line per
// criterion and exits non-zero when any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "fidaudit/brute_force.h"
#include "fidaudit/fairness.h"
#include "fidaudit/linfid.h"
#include "fidaudit/marginal.h"
#include "fidaudit/models.h"
#include "fidaudit/runner.h"
#include "fidaudit/separable_search.h"
#include "fidaudit/subgroup.h"
#include "test_util.h"

namespace fidaudit {
namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void Report(const char* name, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

HyperparameterOptions SmallStep() {
  HyperparameterOptions opts;
  opts.eta = 1e-2;  // eta * n between 1 and 2 on 100-200 rows
  return opts;
}

// Iteration counts and train/test agreement gathered across checks.
struct Tally {
  std::vector<int> separable_iterations;  // converged runs only
  std::vector<double> size_gaps;          // converged runs with n >= 5000
  int sign_checked = 0;
  int sign_agree = 0;
  int linfid_runs = 0;
  int linfid_converged = 0;
  int linfid_max_iterations = 0;
};

// Rich groups against single-attribute groups, one comparison per feature:
// the best converged rich AVG-FID over the bands against the best in-band
// marginal AVG-FID. Per-band outcomes are kept for the report.
struct RichVsMarginal {
  int compared = 0;
  int held = 0;
  int skipped = 0;  // no converged rich result while a marginal group fit
  double worst = 0.0;  // most negative rich - marginal + nu_avg
  int band_compared = 0;
  int band_held = 0;
};

double NuAvg(const AuditResult& r, int n) {
  return r.config.nu / (n * r.alpha_lo);
}

void CompareFeature(const std::vector<AuditResult>& rich,
                    const std::vector<AuditResult>& marginal, int n,
                    RichVsMarginal* rm) {
  const AuditResult* best_rich = nullptr;
  const AuditResult* best_marginal = nullptr;
  for (size_t b = 0; b < rich.size(); ++b) {
    const AuditResult& r = rich[b];
    const AuditResult& mg = marginal[b];
    if (r.converged &&
        (!best_rich || r.avg_fid_train > best_rich->avg_fid_train)) {
      best_rich = &r;
    }
    if (mg.in_band &&
        (!best_marginal || mg.avg_fid_train > best_marginal->avg_fid_train)) {
      best_marginal = &mg;
    }
    if (r.converged && mg.in_band) {
      ++rm->band_compared;
      rm->band_held +=
          r.avg_fid_train >= mg.avg_fid_train - NuAvg(r, n);
    }
  }
  if (!best_marginal) return;
  if (!best_rich) {
    ++rm->skipped;
    return;
  }
  const double margin = best_rich->avg_fid_train -
                        best_marginal->avg_fid_train + NuAvg(*best_rich, n);
  ++rm->compared;
  if (margin >= 0.0) ++rm->held;
  rm->worst = std::min(rm->worst, margin);
}

void EquilibriumGuarantee(Tally* tally, RichVsMarginal* rm) {
  const auto start = Clock::now();
  int certified_runs = 0, bound_ok = 0, fixtures_with_run = 0;
  int fid_checked = 0, fid_ok = 0;
  double worst_violation = 0.0, worst_objective = 0.0;
  for (int f = 0; f < 40; ++f) {
    const testing::SmallFixture fx = testing::MakeSmallFixture(f);
    const int n = fx.ds.rows();
    bool any = false;
    std::vector<AuditResult> runs;
    SearchConfig cfg =
        DefaultHyperparameters(fx.m, 0, fx.alpha_lo, fx.alpha_hi, SmallStep());
    const BruteForceResult bf = BruteForceMaxFid(fx.m, 0, cfg, fx.ds);
    for (Direction dir : {Direction::kMinimize, Direction::kMaximize}) {
      cfg.direction = dir;
      AuditResult r = ConstrainedSearch(fx.m, 0, cfg, fx.ds);
      if (!r.converged) continue;
      any = true;
      ++certified_runs;
      tally->separable_iterations.push_back(r.iterations_used);
      // Signed search cost against the brute-force optimum of the same sign.
      const double opt =
          dir == Direction::kMinimize ? bf.min_sum : -bf.max_sum;
      const double bound = (1.0 + 2.0 * cfg.nu) / cfg.B;
      const double violation = std::max(
          {r.expected_violation[0], r.expected_violation[1], 0.0});
      const double excess = r.expected_objective - opt;
      worst_violation = std::max(worst_violation, violation / bound);
      worst_objective = std::max(worst_objective, excess / cfg.nu);
      if (violation <= bound && excess <= cfg.nu) ++bound_ok;
      runs.push_back(std::move(r));
    }
    if (runs.size() == 2) {
      ++fid_checked;
      const double best =
          std::max(runs[0].expected_fid, runs[1].expected_fid);
      if (best >= bf.fid - cfg.nu) ++fid_ok;
    }
    fixtures_with_run += any;
    const AuditResult both =
        SearchBothDirections(fx.m, 0, cfg, fx.ds);
    CompareFeature({both},
                   {MarginalBaseline(fx.m, 0, fx.ds, fx.alpha_lo,
                                     fx.alpha_hi)},
                   n, rm);
  }
  const double secs = Seconds(start);
  const bool pass = fixtures_with_run >= 20 && bound_ok == certified_runs &&
                    fid_ok == fid_checked && secs <= 60.0;
  Report("equilibrium-guarantee", pass,
         Format("%d/40 fixtures with a converged run; %d/%d runs within the "
                "size and objective bounds (worst violation/bound %.3f, worst "
                "excess/nu %.3f); expected FID >= max FID - nu on %d/%d; "
                "%.1fs",
                fixtures_with_run, bound_ok, certified_runs, worst_violation,
                worst_objective, fid_ok, fid_checked, secs));
}

// Closed-form regime slopes: WLS of y on (r, x, 1) restricted to one regime,
// minus the pooled slope.
double TwoRegimeOptimum(const Dataset& ds) {
  const Eigen::MatrixXd x = LinFidDesign(ds);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(ds.rows());
  const double pooled =
      testing::NormalEquationOracle(x, ds.labels(), ones, 1e-6)[1];
  double best = 0.0;
  for (double regime : {0.0, 1.0}) {
    Eigen::VectorXd w(ds.rows());
    for (int i = 0; i < ds.rows(); ++i) {
      w[i] = ds.feature_matrix()(i, 0) == regime ? 1.0 : 0.0;
    }
    const double slope =
        testing::NormalEquationOracle(x, ds.labels(), w, 1e-6)[1];
    best = std::max(best, std::abs(slope - pooled));
  }
  return best;
}

void PlantedRecovery(Tally* tally) {
  const auto start = Clock::now();
  const testing::Planted p = testing::MakePlanted(500);
  const SearchConfig cfg =
      DefaultHyperparameters(p.m, 1, 0.15, 0.25, SmallStep());
  const AuditResult r = SearchBothDirections(p.m, 1, cfg, p.ds);
  if (r.converged) tally->separable_iterations.push_back(r.iterations_used);
  const bool sep_ok = r.converged && r.avg_fid_train >= 0.9 * 0.8 &&
                      r.size_train >= 0.15 && r.size_train <= 0.25;

  const Dataset two = testing::MakeTwoRegime();
  const double optimum = TwoRegimeOptimum(two);
  LinFidConfig lcfg;
  lcfg.target_feature = 1;
  lcfg.alpha_lo = 0.4;
  lcfg.alpha_hi = 0.6;
  lcfg.hard_evaluation = true;
  const LinFidResult hard = OptimizeLinFidBothDirections(two, lcfg);
  lcfg.hard_evaluation = false;
  const LinFidResult soft = OptimizeLinFidBothDirections(two, lcfg);
  for (const LinFidResult* lr : {&hard, &soft}) {
    ++tally->linfid_runs;
    tally->linfid_converged += lr->audit.converged;
    tally->linfid_max_iterations =
        std::max(tally->linfid_max_iterations, lr->audit.iterations_used);
  }
  const bool lin_ok = hard.audit.converged &&
                      hard.audit.avg_fid_train >= 0.9 * optimum;
  const double secs = Seconds(start);
  Report("planted-recovery", sep_ok && lin_ok && secs <= 30.0,
         Format("separable avg_fid %.4f at size %.3f (%s, converged %d); "
                "LIN-FID %.4f vs optimum %.4f at size %.3f with 0.5 "
                "thresholding (soft weights %.4f); %.1fs",
                r.avg_fid_train, r.size_train, DirectionName(r.direction),
                r.converged, hard.audit.avg_fid_train, optimum,
                hard.audit.size_train, soft.audit.avg_fid_train, secs));
}

std::string CompasPath(const char* file) {
  return std::string(FIDAUDIT_SOURCE_DIR) + "/data/compas/" + file;
}

void Compas(Tally* tally, RichVsMarginal* rm, const testing::TempDir& dir) {
  const auto start = Clock::now();
  RunManifest m;
  m.data_path = CompasPath("compas.csv");
  m.schema_path = CompasPath("schema_recid.json");
  m.standardize = true;
  m.logistic.epochs = 2000;
  m.logistic.learning_rate = 0.1;
  m.out_dir = dir.File("compas");
  m.jobs = ResolveJobs(1);
  const RunOutcome out = RunSeparable(m);
  const double secs = Seconds(start);

  // Any feature with an in-band group whose mean is at least 2x away from
  // the population mean, and the arrest-without-charge feature in
  // particular.
  int features_2x = 0;
  const AuditResult* arrest = nullptr;
  for (const FeatureOutcome& f : out.features) {
    bool hit = false;
    for (const AuditResult& r : f.per_range) {
      if (!r.in_band || r.degenerate) continue;
      const double g = std::abs(r.group_mean_train);
      const double pop = std::abs(r.population_mean_train);
      if (g >= 2.0 * pop || 2.0 * g <= pop) hit = true;
      if (r.feature_name == "charge_arrest_case_no_charge" &&
          pop >= 0.045 && pop <= 0.135 && 2.0 * g <= pop &&
          r.group_mean_train * r.population_mean_train >= 0.0 &&
          (!arrest || r.avg_fid_train > arrest->avg_fid_train)) {
        arrest = &r;
      }
    }
    features_2x += hit;
  }
  std::string detail = Format("%d features with a 2x in-band group; ",
                              features_2x);
  if (arrest) {
    detail += Format(
        "arrest without charge: band [%g, %g], size %.4f, population mean "
        "%.4f, group mean %.4f (%.2fx smaller), gap certified %d",
        arrest->alpha_lo, arrest->alpha_hi, arrest->size_train,
        arrest->population_mean_train, arrest->group_mean_train,
        arrest->population_mean_train / arrest->group_mean_train,
        arrest->gap_certified);
  } else {
    detail += "no matching group for arrest without charge";
  }
  Report("compas-grad", arrest != nullptr && secs <= 600.0,
         detail + Format("; %.1fs", secs));

  const PreparedRun prep = Prepare(m, true);
  const int n = prep.split.train.rows();
  for (size_t k = 0; k < out.features.size(); ++k) {
    const FeatureOutcome& f = out.features[k];
    const std::vector<AuditResult> marginal = MarginalBaseline(
        prep.train_importance, prep.features[k], prep.split.train,
        prep.ranges);
    for (size_t b = 0; b < f.per_range.size(); ++b) {
      const AuditResult& r = f.per_range[b];
      if (r.converged) {
        tally->separable_iterations.push_back(r.iterations_used);
        tally->size_gaps.push_back(std::abs(r.size_train - r.size_test));
      }
    }
    CompareFeature(f.per_range, marginal, n, rm);
    if (f.best >= 0 && !f.per_range[f.best].degenerate) {
      const AuditResult& r = f.per_range[f.best];
      if (r.mean_diff_test()) {
        ++tally->sign_checked;
        tally->sign_agree +=
            (r.mean_diff_train() > 0) == (*r.mean_diff_test() > 0);
      }
    }
  }
}

void LargeSynthetic(Tally* tally) {
  const testing::Planted p = testing::MakeLargeSynthetic(6000, 11);
  const SplitPair split = Split(p.ds, 0.8, 0);
  const ImportanceMatrix train = p.m.SelectRows(split.train_rows);
  const ImportanceMatrix test = p.m.SelectRows(split.test_rows);
  for (int j = 0; j < p.ds.num_features(); ++j) {
    const SweepResult s = AvgFidSweep(train, j, DefaultAlphaRanges(),
                                      split.train, &test, &split.test);
    for (const AuditResult& r : s.per_range) {
      if (!r.converged) continue;
      tally->separable_iterations.push_back(r.iterations_used);
      tally->size_gaps.push_back(std::abs(r.size_train - r.size_test));
    }
    if (s.best >= 0 && !s.per_range[s.best].degenerate) {
      const AuditResult& r = s.per_range[s.best];
      if (r.mean_diff_test()) {
        ++tally->sign_checked;
        tally->sign_agree +=
            (r.mean_diff_train() > 0) == (*r.mean_diff_test() > 0);
      }
    }
    for (const AlphaRange& range : DefaultAlphaRanges()) {
      LinFidConfig cfg;
      cfg.target_feature = j;
      cfg.alpha_lo = range.first;
      cfg.alpha_hi = range.second;
      const LinFidResult lr = OptimizeLinFidBothDirections(split.train, cfg);
      ++tally->linfid_runs;
      tally->linfid_converged += lr.audit.converged;
      tally->linfid_max_iterations =
          std::max(tally->linfid_max_iterations, lr.audit.iterations_used);
    }
  }
}

void Generalization(const Tally& t) {
  double mean_gap = 0.0;
  for (double g : t.size_gaps) mean_gap += g;
  if (!t.size_gaps.empty()) mean_gap /= t.size_gaps.size();
  const bool pass = !t.size_gaps.empty() && mean_gap <= 0.01 &&
                    t.sign_checked > 0 &&
                    t.sign_agree >= 0.9 * t.sign_checked;
  Report("generalization", pass,
         Format("mean |size_train - size_test| %.4f over %zu converged runs "
                "with n >= 5000; train/test sign agreement %d/%d features",
                mean_gap, t.size_gaps.size(), t.sign_agree, t.sign_checked));
}

void ConvergenceBudget(const Tally& t) {
  const auto& its = t.separable_iterations;
  const auto within = [&](int cap) {
    return std::count_if(its.begin(), its.end(),
                         [cap](int k) { return k <= cap; });
  };
  const double share =
      its.empty() ? 0.0 : static_cast<double>(within(5000)) / its.size();
  const bool pass = !its.empty() && share >= 0.9 &&
                    t.linfid_converged >= 0.9 * t.linfid_runs &&
                    t.linfid_max_iterations <= 1000;
  Report("convergence-budget", pass,
         Format("%zu converged separable runs: %.1f%% within 5000 "
                "iterations, %.1f%% within 3000; LIN-FID %d/%d converged, at "
                "most %d iterations",
                its.size(), 100.0 * share,
                its.empty() ? 0.0 : 100.0 * within(3000) / its.size(),
                t.linfid_converged, t.linfid_runs, t.linfid_max_iterations));
}

void NumericalSuites(const testing::TempDir& dir) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.1, 2.0);

  double wls_err = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd x(60, 5);
    Eigen::VectorXd y(60), w(60);
    for (int i = 0; i < 60; ++i) {
      for (int k = 0; k < 5; ++k) x(i, k) = normal(rng);
      y[i] = normal(rng);
      w[i] = unif(rng);
    }
    const Eigen::VectorXd theta = FitWls(x, y, w, 1e-6).theta;
    const std::vector<double> oracle =
        testing::NormalEquationOracle(x, y, w, 1e-6);
    double num = 0.0, den = 0.0;
    for (int k = 0; k < 5; ++k) {
      num = std::max(num, std::abs(theta[k] - oracle[k]));
      den = std::max(den, std::abs(oracle[k]));
    }
    wls_err = std::max(wls_err, num / den);
  }

  double grad_err = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd x(30, 4);
    Eigen::VectorXd y(30);
    for (int i = 0; i < 30; ++i) {
      x(i, 0) = i % 2;
      for (int k = 1; k < 4; ++k) x(i, k) = normal(rng);
      y[i] = x(i, 2) - x(i, 3) * (1 + x(i, 0)) + 0.1 * normal(rng);
    }
    const Dataset ds({testing::Col("b", ColumnKind::kBinary, true),
                      testing::Col("z", ColumnKind::kNumeric, true),
                      testing::Col("u", ColumnKind::kNumeric, false),
                      testing::Col("v", ColumnKind::kNumeric, false)},
                     x, y, testing::Iota(30));
    LinFidConfig cfg;
    cfg.target_feature = 3;
    cfg.alpha_lo = trial % 2 ? 0.6 : 0.1;
    cfg.alpha_hi = trial % 2 ? 0.9 : 0.3;
    cfg.direction = trial % 3 ? Direction::kMinimize : Direction::kMaximize;
    const Eigen::Vector3d theta(0.5 * normal(rng), 0.5 * normal(rng),
                                0.5 * normal(rng));
    grad_err = std::max(grad_err, LinFidGradientCheck(ds, cfg, theta));
  }

  const auto dual = DualWeights({0.0, 0.0}, 3.0);
  const bool dual_ok = dual[0] == 1.0 && dual[1] == 1.0;

  bool complement_ok = true;
  std::uniform_int_distribution<int> eighths(-64, 64);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd c(50), w(50);
    for (int i = 0; i < 50; ++i) {
      c[i] = eighths(rng) / 8.0;
      w[i] = coin(rng);
    }
    const FidValues g = FidValue(c, w);
    const FidValues gc = FidValue(c, Eigen::VectorXd::Ones(50) - w);
    complement_ok &= g.group_sum + gc.group_sum == g.population_sum;
  }

  Eigen::VectorXd probs(200), labels(200);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    probs[i] = u01(rng);
    labels[i] = u01(rng) < probs[i];
  }
  const FairnessReport fr =
      FairnessDeltas(probs, labels, Eigen::VectorXd::Ones(200));
  const bool fairness_ok = fr.pos_rate_delta == 0.0 && *fr.tpr_delta == 0.0 &&
                           *fr.fpr_delta == 0.0 && fr.ece_delta == 0.0;

  testing::WritePlantedFiles(testing::MakePlanted(500), dir.File("p.csv"),
                             dir.File("p.json"), dir.File("p_imp.csv"));
  RunManifest m;
  m.data_path = dir.File("p.csv");
  m.schema_path = dir.File("p.json");
  m.importance = "file:" + dir.File("p_imp.csv");
  m.ranges = {{0.15, 0.25}, {0.3, 0.5}};
  m.hyper.eta = 1e-2;
  m.out_dir = dir.File("det_a");
  RunSeparable(m);
  m.out_dir = dir.File("det_b");
  RunSeparable(m);
  const bool deterministic =
      testing::ReadText(dir.File("det_a/report.json")) ==
          testing::ReadText(dir.File("det_b/report.json")) &&
      testing::ReadText(dir.File("det_a/summary.csv")) ==
          testing::ReadText(dir.File("det_b/summary.csv"));

  const bool pass = wls_err <= 1e-8 && grad_err <= 1e-4 && dual_ok &&
                    complement_ok && fairness_ok && deterministic;
  Report("numerical-suites", pass,
         Format("WLS relative error %.2e; LIN-FID gradient error %.2e; dual "
                "weights (%g, %g); complement identity %s; fairness on all "
                "rows %s; reports byte-identical %s (operation examples run "
                "as unit tests)",
                wls_err, grad_err, dual[0], dual[1],
                complement_ok ? "exact" : "broken",
                fairness_ok ? "zero" : "nonzero",
                deterministic ? "yes" : "no"));
}

void RichBeatsMarginal(const RichVsMarginal& rm) {
  Report("rich-vs-marginal", rm.compared > 0 && rm.held == rm.compared,
         Format("best rich >= best marginal - nu_avg on %d/%d features and "
                "fixtures (worst margin %.3g); %d skipped without a converged "
                "rich result; band by band %d/%d",
                rm.held, rm.compared, rm.worst, rm.skipped, rm.band_held,
                rm.band_compared));
}

}  // namespace
}  // namespace fidaudit

int main() {
  using namespace fidaudit;
  const testing::TempDir dir("acceptance");
  Tally tally;
  RichVsMarginal rm;
  try {
    EquilibriumGuarantee(&tally, &rm);
    PlantedRecovery(&tally);
    Compas(&tally, &rm, dir);
    LargeSynthetic(&tally);
    Generalization(tally);
    ConvergenceBudget(tally);
    NumericalSuites(dir);
    RichBeatsMarginal(rm);
  } catch (const std::exception& e) {
    Report("acceptance", false, std::string("aborted: ") + e.what());
  }
  return failures == 0 ? 0 : 1;
}
