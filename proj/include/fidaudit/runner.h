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

#ifndef FIDAUDIT_RUNNER_H_
#define FIDAUDIT_RUNNER_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fidaudit/dataset.h"
#include "fidaudit/fairness.h"
#include "fidaudit/importance.h"
#include "fidaudit/linfid.h"
#include "fidaudit/models.h"
#include "fidaudit/separable_search.h"
#include "json.hpp"

namespace fidaudit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNoneConverged = 3;

struct RunManifest {
  std::string data_path;
  std::string schema_path;
  std::string importance = "grad";   // "grad" or "file:PATH"
  std::vector<AlphaRange> ranges;    // empty selects the default bands
  std::vector<std::string> features; // empty selects every feature
  uint64_t seed = 0;
  std::optional<double> split;       // train fraction; default by size
  std::string out_dir;
  int jobs = 1;
  bool standardize = false;
  LogisticOptions logistic;
  HyperparameterOptions hyper;
  LinFidConfig linfid;               // alpha, feature and direction ignored
  std::string subgroup_path;         // score only
};

// Throws kInvalidArgument or kIo describing the first problem found.
void ValidateManifest(const RunManifest& manifest, bool needs_subgroup);

// AUDIT_JOBS when set to a positive integer, otherwise the flag value.
int ResolveJobs(int flag);

// Everything a command needs before searching.
struct PreparedRun {
  Dataset data;
  SplitPair split;
  std::optional<LogisticModel> model;  // present when labels are 0/1
  ImportanceMatrix train_importance;
  ImportanceMatrix test_importance;
  std::vector<int> features;
  std::vector<AlphaRange> ranges;
  std::vector<std::string> warnings;
};

// Loads, splits, fits the classifier and builds importance. Importance is
// only required when with_importance is set.
PreparedRun Prepare(const RunManifest& manifest, bool with_importance);

struct FeatureOutcome {
  std::vector<AuditResult> per_range;
  int best = -1;  // index into per_range
  std::optional<FairnessReport> fairness;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<FeatureOutcome> features;
  nlohmann::ordered_json report;
  std::vector<std::string> warnings;
};

RunOutcome RunSeparable(const RunManifest& manifest);
RunOutcome RunLinear(const RunManifest& manifest);
RunOutcome ScoreSubgroup(const RunManifest& manifest);

// Train and, when given, test values of a fixed group for feature j.
AuditResult ScoreGroup(const SubgroupSpec& spec, const ImportanceMatrix& m,
                       int j, const Dataset& ds,
                       const ImportanceMatrix* test_m = nullptr,
                       const Dataset* test = nullptr);

// Hard-membership fairness deltas of a group on the given rows, or nothing
// when the group is empty there.
std::optional<FairnessReport> GroupFairness(const LogisticModel& model,
                                            const SubgroupSpec& spec,
                                            const Dataset& ds);

// Runs fn(0..count-1) on up to jobs threads; rethrows the first failure.
void ParallelFor(int count, int jobs, const std::function<void(int)>& fn);

}  // namespace fidaudit

#endif  // FIDAUDIT_RUNNER_H_
