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

#include "fidaudit/runner.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include "fidaudit/error.h"
#include "fidaudit/report.h"
#include "fidaudit/subgroup.h"

namespace fidaudit {
namespace {

namespace fs = std::filesystem;

constexpr const char* kFilePrefix = "file:";

bool BinaryLabels(const Eigen::VectorXd& y) {
  bool zero = false, one = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] == 0.0) {
      zero = true;
    } else if (y[i] == 1.0) {
      one = true;
    } else {
      return false;
    }
  }
  return zero && one;
}

std::string RangeTag(const AlphaRange& r) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g-%g", r.first, r.second);
  return buf;
}

nlohmann::ordered_json ManifestToJson(const RunManifest& m,
                                      const PreparedRun& prep) {
  nlohmann::ordered_json j;
  j["data"] = m.data_path;
  j["schema"] = m.schema_path;
  j["importance"] = m.importance;
  nlohmann::ordered_json ranges = nlohmann::ordered_json::array();
  for (const auto& [lo, hi] : prep.ranges) ranges.push_back({lo, hi});
  j["ranges"] = ranges;
  j["seed"] = m.seed;
  j["split"] = prep.split.fraction;
  j["standardize"] = m.standardize;
  j["logistic"] = {{"learning_rate", m.logistic.learning_rate},
                   {"epochs", m.logistic.epochs}};
  j["hyper"] = {{"theoretical_eta", m.hyper.theoretical_eta},
                {"eta", m.hyper.eta ? nlohmann::ordered_json(*m.hyper.eta)
                                    : nlohmann::ordered_json(nullptr)},
                {"max_iters", m.hyper.max_iters}};
  return j;
}

nlohmann::ordered_json DatasetToJson(const PreparedRun& prep) {
  return {{"rows", prep.data.rows()},
          {"train_rows", prep.split.train.rows()},
          {"test_rows", prep.split.test.rows()},
          {"features", prep.data.num_features()},
          {"sensitive", prep.data.num_sensitive()}};
}

int BestConverged(const std::vector<AuditResult>& rs) {
  int best = -1;
  double score = -1.0;
  for (size_t k = 0; k < rs.size(); ++k) {
    if (!rs[k].converged) continue;
    const double s = rs[k].evaluated_on_test ? rs[k].avg_fid_test.value_or(0.0)
                                             : rs[k].avg_fid_train;
    if (s > score) {
      score = s;
      best = static_cast<int>(k);
    }
  }
  return best;
}

// Index of the summary row for a feature: the best converged band, else the
// best attempt by the usual preference order.
int SummaryIndex(const FeatureOutcome& f) {
  if (f.best >= 0) return f.best;
  if (f.per_range.empty()) return -1;
  int pick = 0;
  for (size_t k = 1; k < f.per_range.size(); ++k) {
    if (&PickBetter(f.per_range[pick], f.per_range[k]) == &f.per_range[k]) {
      pick = static_cast<int>(k);
    }
  }
  return pick;
}

std::string Timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Shared tail of every command: report.json, summary.csv, plot_data.csv and
// run_info.json.
void WriteOutputs(const std::string& command, const RunManifest& manifest,
                  const PreparedRun& prep, RunOutcome* out, double seconds,
                  int jobs) {
  std::vector<SummaryRow> rows;
  std::vector<AuditResult> all;
  nlohmann::ordered_json features = nlohmann::ordered_json::array();
  int converged = 0;
  for (const FeatureOutcome& f : out->features) {
    const int pick = SummaryIndex(f);
    if (f.best >= 0) ++converged;
    nlohmann::ordered_json entry;
    entry["best_range"] = f.best;
    entry["summary_range"] = pick;
    entry["fairness"] = f.fairness ? FairnessToJson(*f.fairness)
                                   : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json per = nlohmann::ordered_json::array();
    for (const AuditResult& r : f.per_range) {
      per.push_back(AuditResultToJson(r));
      all.push_back(r);
    }
    entry["results"] = per;
    features.push_back(entry);
    if (pick >= 0) rows.push_back({f.per_range[pick], f.fairness});
  }
  nlohmann::ordered_json report;
  report["command"] = command;
  report["manifest"] = ManifestToJson(manifest, prep);
  report["dataset"] = DatasetToJson(prep);
  report["converged_features"] = converged;
  report["features"] = features;
  out->report = report;
  out->warnings = prep.warnings;

  const fs::path dir(manifest.out_dir);
  WriteFileAtomic((dir / "report.json").string(), report.dump(1) + "\n");
  WriteFileAtomic((dir / "summary.csv").string(), SummaryCsv(rows));
  WriteFileAtomic((dir / "plot_data.csv").string(), PlotDataCsv(all));
  nlohmann::ordered_json info;
  info["timestamp"] = Timestamp();
  info["command"] = command;
  info["seconds"] = seconds;
  info["jobs"] = jobs;
  info["warnings"] = prep.warnings;
  WriteFileAtomic((dir / "run_info.json").string(), info.dump(1) + "\n");
}

void EnsureDir(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) {
    throw AuditError(ErrorCode::kIo,
                     "cannot create " + path + ": " + ec.message());
  }
}

double Elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

void ValidateManifest(const RunManifest& m, bool needs_subgroup) {
  auto require_file = [](const std::string& path, const char* what) {
    if (path.empty()) {
      throw AuditError(ErrorCode::kInvalidArgument,
                       std::string("missing ") + what + " path");
    }
    if (!fs::is_regular_file(path)) {
      throw AuditError(ErrorCode::kIo,
                       std::string(what) + " not found: " + path);
    }
  };
  require_file(m.data_path, "dataset");
  require_file(m.schema_path, "schema");
  if (m.importance != "grad") {
    if (m.importance.rfind(kFilePrefix, 0) != 0) {
      throw AuditError(ErrorCode::kInvalidArgument,
                       "importance must be grad or file:PATH");
    }
    require_file(m.importance.substr(std::string(kFilePrefix).size()),
                 "importance file");
  }
  if (needs_subgroup) require_file(m.subgroup_path, "subgroup");
  for (const auto& [lo, hi] : m.ranges) {
    if (!(lo >= 0.0 && lo <= hi && hi <= 1.0)) {
      throw AuditError(ErrorCode::kInvalidArgument, "invalid alpha range");
    }
  }
  if (m.split && !(*m.split > 0.0 && *m.split < 1.0)) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "split fraction must be in (0, 1)");
  }
  if (m.out_dir.empty()) {
    throw AuditError(ErrorCode::kInvalidArgument, "missing output directory");
  }
  if (m.jobs < 1) {
    throw AuditError(ErrorCode::kInvalidArgument, "jobs must be positive");
  }
}

int ResolveJobs(int flag) {
  if (const char* env = std::getenv("AUDIT_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1, flag);
}

PreparedRun Prepare(const RunManifest& manifest, bool with_importance) {
  PreparedRun prep;
  const auto schema = LoadSchema(manifest.schema_path);
  LoadOptions load;
  load.standardize = manifest.standardize;
  prep.data = LoadDataset(manifest.data_path, schema, load, &prep.warnings);
  const double fraction =
      manifest.split.value_or(DefaultSplitFraction(prep.data.rows()));
  prep.split = Split(prep.data, fraction, manifest.seed);

  if (BinaryLabels(prep.split.train.labels())) {
    LogisticOptions opts = manifest.logistic;
    opts.seed = manifest.seed;
    prep.model = FitLogistic(prep.split.train.feature_matrix(),
                             prep.split.train.labels(), opts);
  }

  if (with_importance) {
    if (manifest.importance == "grad") {
      if (!prep.model) {
        throw AuditError(ErrorCode::kDegenerateLabels,
                         "grad importance needs 0/1 labels with both classes "
                         "in the train split");
      }
      prep.train_importance = GradSaliency(*prep.model, prep.split.train);
      prep.test_importance = GradSaliency(*prep.model, prep.split.test);
    } else {
      const ImportanceMatrix full = LoadImportance(
          manifest.importance.substr(std::string(kFilePrefix).size()),
          prep.data);
      prep.train_importance = full.SelectRows(prep.split.train_rows);
      prep.test_importance = full.SelectRows(prep.split.test_rows);
    }
  }

  if (manifest.features.empty()) {
    for (int j = 0; j < prep.data.num_features(); ++j) {
      prep.features.push_back(j);
    }
  } else {
    for (const std::string& name : manifest.features) {
      const int j = prep.data.FeatureIndex(name);
      if (j < 0) {
        throw AuditError(ErrorCode::kInvalidArgument,
                         "unknown feature: " + name);
      }
      prep.features.push_back(j);
    }
  }
  prep.ranges = manifest.ranges.empty() ? DefaultAlphaRanges()
                                        : manifest.ranges;
  return prep;
}

AuditResult ScoreGroup(const SubgroupSpec& spec, const ImportanceMatrix& m,
                       int j, const Dataset& ds, const ImportanceMatrix* test_m,
                       const Dataset* test) {
  if (spec.theta.size() != ds.sensitive_matrix().cols()) {
    throw AuditError(ErrorCode::kDimensionMismatch,
                     "subgroup has " + std::to_string(spec.theta.size()) +
                         " coefficients, dataset has " +
                         std::to_string(ds.sensitive_matrix().cols()) +
                         " sensitive columns");
  }
  if (m.rows() != ds.rows()) {
    throw AuditError(ErrorCode::kAlignment,
                     "importance rows do not match dataset rows");
  }
  const Eigen::VectorXd w = Membership(spec, ds.sensitive_matrix());
  const FidValues v = FidValue(m.values, j, w);
  AuditResult r;
  r.feature = j;
  if (j < static_cast<int>(m.feature_names.size())) {
    r.feature_name = m.feature_names[j];
  }
  r.notion = NotionName(m.notion);
  r.group = spec;
  r.alpha_lo = 0.0;
  r.alpha_hi = 1.0;
  r.fid_train = v.fid;
  r.avg_fid_train = v.avg_fid.value_or(0.0);
  r.size_train = GroupSize(w);
  r.population_mean_train = v.population_mean;
  r.group_mean_train = v.group_mean.value_or(v.population_mean);
  r.direction = r.group_mean_train < r.population_mean_train
                    ? Direction::kMinimize
                    : Direction::kMaximize;
  r.degenerate = m.values.col(j).cwiseAbs().maxCoeff() == 0.0;
  r.in_band = r.size_train > 0.0;
  r.converged = r.in_band;
  if (test_m && test) EvaluateOnTest(&r, *test_m, *test);
  return r;
}

std::optional<FairnessReport> GroupFairness(const LogisticModel& model,
                                            const SubgroupSpec& spec,
                                            const Dataset& ds) {
  const Eigen::VectorXd w = Membership(spec, ds.sensitive_matrix());
  const Eigen::VectorXd hard =
      (w.array() > 0.5).cast<double>().matrix();
  if (hard.sum() == 0.0) return std::nullopt;
  return FairnessDeltas(PredictProba(model, ds.feature_matrix()), ds.labels(),
                        hard);
}

void ParallelFor(int count, int jobs, const std::function<void(int)>& fn) {
  const int workers = std::max(1, std::min(jobs, count));
  if (workers == 1) {
    for (int k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> threads;
  for (int t = 0; t < workers; ++t) {
    threads.emplace_back([&] {
      for (int k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (std::thread& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

RunOutcome RunSeparable(const RunManifest& manifest) {
  const auto start = std::chrono::steady_clock::now();
  ValidateManifest(manifest, false);
  const PreparedRun prep = Prepare(manifest, true);
  const int jobs = ResolveJobs(manifest.jobs);
  EnsureDir(manifest.out_dir);
  const fs::path results = fs::path(manifest.out_dir) / "results";
  EnsureDir(results.string());

  RunOutcome out;
  out.features.resize(prep.features.size());
  SweepOptions opts;
  opts.hyper = manifest.hyper;
  ParallelFor(static_cast<int>(prep.features.size()), jobs, [&](int k) {
    const int j = prep.features[k];
    SweepResult sweep = AvgFidSweep(prep.train_importance, j, prep.ranges,
                                    prep.split.train, &prep.test_importance,
                                    &prep.split.test, opts);
    FeatureOutcome& f = out.features[k];
    f.per_range = std::move(sweep.per_range);
    f.best = sweep.best;
    const std::string slug = Slug(prep.train_importance.feature_names[j]);
    for (size_t r = 0; r < f.per_range.size(); ++r) {
      const std::string base =
          (results / (slug + "_" + RangeTag(prep.ranges[r]))).string();
      WriteFileAtomic(base + ".json",
                      AuditResultToJson(f.per_range[r]).dump(1) + "\n");
      WriteFileAtomic(base + ".trace.jsonl",
                      TraceToJsonl(f.per_range[r].trace));
    }
    const int pick = SummaryIndex(f);
    if (prep.model && pick >= 0) {
      f.fairness =
          GroupFairness(*prep.model, f.per_range[pick].group, prep.split.test);
    }
  });

  WriteOutputs("separable", manifest, prep, &out, Elapsed(start), jobs);
  const bool any = std::any_of(out.features.begin(), out.features.end(),
                               [](const FeatureOutcome& f) {
                                 return f.best >= 0;
                               });
  out.exit_code = any ? kExitOk : kExitNoneConverged;
  return out;
}

RunOutcome RunLinear(const RunManifest& manifest) {
  const auto start = std::chrono::steady_clock::now();
  ValidateManifest(manifest, false);
  const PreparedRun prep = Prepare(manifest, false);
  const int jobs = ResolveJobs(manifest.jobs);
  EnsureDir(manifest.out_dir);
  const fs::path results = fs::path(manifest.out_dir) / "results";
  EnsureDir(results.string());

  RunOutcome out;
  out.features.resize(prep.features.size());
  ParallelFor(static_cast<int>(prep.features.size()), jobs, [&](int k) {
    const int j = prep.features[k];
    FeatureOutcome& f = out.features[k];
    const std::string slug = Slug(prep.data.feature_names()[j]);
    for (const AlphaRange& range : prep.ranges) {
      LinFidConfig cfg = manifest.linfid;
      cfg.alpha_lo = range.first;
      cfg.alpha_hi = range.second;
      cfg.target_feature = j;
      cfg.seed = manifest.seed;
      LinFidResult r = OptimizeLinFidBothDirections(prep.split.train, cfg);
      EvaluateLinFidOnTest(&r, prep.split.test, cfg);
      const std::string base =
          (results / (slug + "_" + RangeTag(range))).string();
      WriteFileAtomic(base + ".json",
                      AuditResultToJson(r.audit).dump(1) + "\n");
      WriteFileAtomic(base + ".trace.jsonl", LinFidTraceToJsonl(r.trace));
      f.per_range.push_back(std::move(r.audit));
    }
    f.best = BestConverged(f.per_range);
    const int pick = SummaryIndex(f);
    if (prep.model && pick >= 0) {
      f.fairness =
          GroupFairness(*prep.model, f.per_range[pick].group, prep.split.test);
    }
  });

  WriteOutputs("linear", manifest, prep, &out, Elapsed(start), jobs);
  const bool any = std::any_of(out.features.begin(), out.features.end(),
                               [](const FeatureOutcome& f) {
                                 return f.best >= 0;
                               });
  out.exit_code = any ? kExitOk : kExitNoneConverged;
  return out;
}

RunOutcome ScoreSubgroup(const RunManifest& manifest) {
  const auto start = std::chrono::steady_clock::now();
  ValidateManifest(manifest, true);
  const PreparedRun prep = Prepare(manifest, true);
  const SubgroupSpec spec = LoadSubgroup(manifest.subgroup_path);
  const auto names = prep.data.sensitive_names();
  if (spec.theta.size() != static_cast<Eigen::Index>(names.size())) {
    throw AuditError(ErrorCode::kDimensionMismatch,
                     "subgroup has " + std::to_string(spec.theta.size()) +
                         " coefficients, dataset has " +
                         std::to_string(names.size()) +
                         " sensitive columns including the bias");
  }
  if (!spec.sensitive_feature_names.empty() &&
      spec.sensitive_feature_names != names) {
    throw AuditError(ErrorCode::kAlignment,
                     "subgroup sensitive feature names do not match the "
                     "dataset");
  }
  EnsureDir(manifest.out_dir);

  RunOutcome out;
  out.features.resize(prep.features.size());
  for (size_t k = 0; k < prep.features.size(); ++k) {
    FeatureOutcome& f = out.features[k];
    f.per_range.push_back(ScoreGroup(spec, prep.train_importance,
                                     prep.features[k], prep.split.train,
                                     &prep.test_importance, &prep.split.test));
    f.best = f.per_range[0].converged ? 0 : -1;
    if (prep.model) f.fairness = GroupFairness(*prep.model, spec, prep.split.test);
  }
  WriteOutputs("score", manifest, prep, &out, Elapsed(start), 1);
  out.exit_code = kExitOk;
  return out;
}

}  // namespace fidaudit
