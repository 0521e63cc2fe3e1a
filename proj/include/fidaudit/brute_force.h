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

#ifndef FIDAUDIT_BRUTE_FORCE_H_
#define FIDAUDIT_BRUTE_FORCE_H_

#include <vector>

#include <Eigen/Dense>

#include "fidaudit/dataset.h"
#include "fidaudit/importance.h"
#include "fidaudit/separable_search.h"

namespace fidaudit {

inline constexpr int kMaxBruteForceProfiles = 20;

// Distinct rows of the sensitive block, in first-appearance order, and the
// profile index of every row.
struct ProfileTable {
  Eigen::MatrixXd profiles;
  std::vector<int> row_profile;
};

ProfileTable DistinctProfiles(const Eigen::MatrixXd& sensitive);

// True when some theta has theta.x > 0 exactly on the rows of points with
// member[k] set. Solved as a phase-one simplex on theta.x >= 1 (members),
// theta.x <= 0 (non-members).
bool ThresholdRealizable(const Eigen::MatrixXd& points,
                         const std::vector<bool>& member);

struct BruteForceResult {
  int realizable_labelings = 0;  // ignoring the size band
  int feasible_labelings = 0;    // realizable and size in band
  // Feasible labeling with the largest AVG-FID.
  std::vector<bool> best_profiles;
  Eigen::VectorXd best_membership;
  double avg_fid = 0.0;
  double fid = 0.0;  // largest FID over feasible labelings
  // Extremes of sum_i g_i M_ij over feasible labelings.
  double min_sum = 0.0;
  double max_sum = 0.0;
};

// Exhaustive search over every subset of distinct profiles. Throws
// kTooManyProfiles above kMaxBruteForceProfiles and returns
// feasible_labelings = 0 when nothing fits the band.
BruteForceResult BruteForceMaxFid(const ImportanceMatrix& m, int j,
                                  const SearchConfig& cfg, const Dataset& ds);

}  // namespace fidaudit

#endif  // FIDAUDIT_BRUTE_FORCE_H_
