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

#ifndef FIDAUDIT_SUBGROUP_H_
#define FIDAUDIT_SUBGROUP_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace fidaudit {

// g(x) = 1{theta . x > 0} over the sensitive block (bias included). Ties are
// non-members, so theta = 0 is the empty group.
struct ThresholdGroup {
  Eigen::VectorXd theta;
};

// g(x) = sigmoid(theta . x).
struct SoftGroup {
  Eigen::VectorXd theta;
};

Eigen::VectorXd Membership(const ThresholdGroup& g,
                           const Eigen::MatrixXd& sensitive);
Eigen::VectorXd Membership(const SoftGroup& g,
                           const Eigen::MatrixXd& sensitive);

// |g| as a fraction of the rows.
double GroupSize(const Eigen::VectorXd& w);

// Disparity of one importance column relative to a (possibly fractional)
// membership vector. fid uses sums, avg_fid uses means; avg_fid is absent
// for an empty group.
struct FidValues {
  double fid = 0.0;
  std::optional<double> avg_fid;
  double group_sum = 0.0;
  double population_sum = 0.0;
  std::optional<double> group_mean;
  double population_mean = 0.0;
};

FidValues FidValue(const Eigen::VectorXd& column, const Eigen::VectorXd& w);
// Same, for column j of a matrix.
FidValues FidValue(const Eigen::MatrixXd& values, int j,
                   const Eigen::VectorXd& w);
// Throws kUndefinedAverage for an empty group.
double AvgFid(const Eigen::VectorXd& column, const Eigen::VectorXd& w);

// A finite mixture of threshold groups with normalized weights.
class GroupDistribution {
 public:
  void Add(const ThresholdGroup& g, double weight);
  void Normalize();
  const std::vector<std::pair<ThresholdGroup, double>>& members() const {
    return members_;
  }
  // sum_k p_k g_k(x), row by row.
  Eigen::VectorXd ExpectedMembership(const Eigen::MatrixXd& sensitive) const;

 private:
  std::vector<std::pair<ThresholdGroup, double>> members_;
};

enum class GroupKind { kHard, kSoft };

struct SubgroupSpec {
  Eigen::VectorXd theta;
  GroupKind kind = GroupKind::kHard;
  std::vector<std::string> sensitive_feature_names;
};

nlohmann::json SubgroupToJson(const SubgroupSpec& spec);
SubgroupSpec SubgroupFromJson(const nlohmann::json& doc);
SubgroupSpec LoadSubgroup(const std::string& path);

// Membership of a serialized group; soft groups keep fractional weights.
Eigen::VectorXd Membership(const SubgroupSpec& spec,
                           const Eigen::MatrixXd& sensitive);

}  // namespace fidaudit

#endif  // FIDAUDIT_SUBGROUP_H_
