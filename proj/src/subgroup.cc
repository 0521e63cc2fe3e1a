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

#include "fidaudit/subgroup.h"

#include <cmath>
#include <fstream>

#include "fidaudit/error.h"
#include "fidaudit/models.h"

namespace fidaudit {
namespace {

void CheckDims(const Eigen::VectorXd& theta, const Eigen::MatrixXd& s) {
  if (theta.size() != s.cols()) {
    throw AuditError(ErrorCode::kDimensionMismatch,
                     "subgroup has " + std::to_string(theta.size()) +
                         " coefficients, sensitive block has " +
                         std::to_string(s.cols()) + " columns");
  }
}

}  // namespace

Eigen::VectorXd Membership(const ThresholdGroup& g,
                           const Eigen::MatrixXd& sensitive) {
  CheckDims(g.theta, sensitive);
  return (sensitive * g.theta)
      .unaryExpr([](double z) { return z > 0.0 ? 1.0 : 0.0; });
}

Eigen::VectorXd Membership(const SoftGroup& g,
                           const Eigen::MatrixXd& sensitive) {
  CheckDims(g.theta, sensitive);
  return (sensitive * g.theta).unaryExpr([](double z) { return Sigmoid(z); });
}

double GroupSize(const Eigen::VectorXd& w) {
  return w.size() == 0 ? 0.0 : w.mean();
}

FidValues FidValue(const Eigen::VectorXd& column, const Eigen::VectorXd& w) {
  if (column.size() != w.size()) {
    throw AuditError(ErrorCode::kDimensionMismatch,
                     "importance column and membership disagree on length");
  }
  FidValues out;
  const double n = static_cast<double>(column.size());
  out.group_sum = w.dot(column);
  out.population_sum = column.sum();
  out.population_mean = n > 0 ? out.population_sum / n : 0.0;
  out.fid = std::abs(out.group_sum - out.population_sum);
  const double mass = w.sum();
  if (mass > 0.0) {
    out.group_mean = out.group_sum / mass;
    out.avg_fid = std::abs(*out.group_mean - out.population_mean);
  }
  return out;
}

FidValues FidValue(const Eigen::MatrixXd& values, int j,
                   const Eigen::VectorXd& w) {
  if (j < 0 || j >= values.cols()) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "feature index " + std::to_string(j) + " out of range");
  }
  return FidValue(Eigen::VectorXd(values.col(j)), w);
}

double AvgFid(const Eigen::VectorXd& column, const Eigen::VectorXd& w) {
  const FidValues v = FidValue(column, w);
  if (!v.avg_fid) {
    throw AuditError(ErrorCode::kUndefinedAverage,
                     "AVG-FID is undefined for an empty group");
  }
  return *v.avg_fid;
}

void GroupDistribution::Add(const ThresholdGroup& g, double weight) {
  if (weight < 0.0) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "distribution weights must be non-negative");
  }
  if (!members_.empty() && members_.back().first.theta.size() ==
                               g.theta.size() &&
      members_.back().first.theta == g.theta) {
    members_.back().second += weight;
    return;
  }
  members_.emplace_back(g, weight);
}

void GroupDistribution::Normalize() {
  double total = 0.0;
  for (const auto& m : members_) total += m.second;
  if (total <= 0.0) return;
  for (auto& m : members_) m.second /= total;
}

Eigen::VectorXd GroupDistribution::ExpectedMembership(
    const Eigen::MatrixXd& sensitive) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sensitive.rows());
  for (const auto& [g, p] : members_) out += p * Membership(g, sensitive);
  return out;
}

nlohmann::json SubgroupToJson(const SubgroupSpec& spec) {
  nlohmann::json doc;
  doc["theta"] = std::vector<double>(spec.theta.data(),
                                     spec.theta.data() + spec.theta.size());
  doc["kind"] = spec.kind == GroupKind::kHard ? "hard" : "soft";
  doc["sensitive_feature_names"] = spec.sensitive_feature_names;
  return doc;
}

SubgroupSpec SubgroupFromJson(const nlohmann::json& doc) {
  SubgroupSpec spec;
  try {
    const auto theta = doc.at("theta").get<std::vector<double>>();
    spec.theta = Eigen::Map<const Eigen::VectorXd>(
        theta.data(), static_cast<Eigen::Index>(theta.size()));
    const std::string kind = doc.value("kind", std::string("hard"));
    if (kind == "hard") {
      spec.kind = GroupKind::kHard;
    } else if (kind == "soft") {
      spec.kind = GroupKind::kSoft;
    } else {
      throw AuditError(ErrorCode::kSchema, "unknown subgroup kind " + kind);
    }
    if (doc.contains("sensitive_feature_names")) {
      spec.sensitive_feature_names =
          doc.at("sensitive_feature_names").get<std::vector<std::string>>();
      if (spec.sensitive_feature_names.size() !=
          static_cast<size_t>(spec.theta.size())) {
        throw AuditError(ErrorCode::kDimensionMismatch,
                         "subgroup names and theta differ in length");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorCode::kSchema,
                     std::string("malformed subgroup: ") + e.what());
  }
  for (Eigen::Index k = 0; k < spec.theta.size(); ++k) {
    if (!std::isfinite(spec.theta[k])) {
      throw AuditError(ErrorCode::kNonFinite, "subgroup theta is not finite");
    }
  }
  return spec;
}

SubgroupSpec LoadSubgroup(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw AuditError(ErrorCode::kIo, "cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorCode::kSchema, path + ": " + e.what());
  }
  return SubgroupFromJson(doc);
}

Eigen::VectorXd Membership(const SubgroupSpec& spec,
                           const Eigen::MatrixXd& sensitive) {
  if (spec.kind == GroupKind::kHard) {
    return Membership(ThresholdGroup{spec.theta}, sensitive);
  }
  return Membership(SoftGroup{spec.theta}, sensitive);
}

}  // namespace fidaudit
