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

#include "fidaudit/fairness.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fidaudit/error.h"

namespace fidaudit {
namespace {

void CheckInputs(const Eigen::VectorXd& probs, const Eigen::VectorXd& labels,
                 const Eigen::VectorXd& mask, int bins) {
  if (probs.size() != labels.size() || probs.size() != mask.size()) {
    throw AuditError(ErrorCode::kDimensionMismatch,
                     "probabilities, labels and membership differ in length");
  }
  if (bins <= 0) {
    throw AuditError(ErrorCode::kInvalidArgument, "bins must be positive");
  }
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0.0 && labels[i] != 1.0) {
      throw AuditError(ErrorCode::kInvalidArgument,
                       "fairness metrics need 0/1 labels");
    }
  }
}

std::optional<double> Delta(const std::optional<double>& a,
                            const std::optional<double>& b) {
  if (!a || !b) return std::nullopt;
  return *a - *b;
}

}  // namespace

double ExpectedCalibrationError(const Eigen::VectorXd& probs,
                                const Eigen::VectorXd& labels,
                                const Eigen::VectorXd& mask, int bins) {
  CheckInputs(probs, labels, mask, bins);
  std::vector<double> conf(bins, 0.0), acc(bins, 0.0);
  std::vector<int> count(bins, 0);
  int total = 0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (!(mask[i] > 0.5)) continue;
    const int b = std::clamp(static_cast<int>(std::floor(probs[i] * bins)), 0,
                             bins - 1);
    conf[b] += probs[i];
    acc[b] += labels[i];
    ++count[b];
    ++total;
  }
  if (total == 0) return 0.0;
  double ece = 0.0;
  for (int b = 0; b < bins; ++b) {
    if (count[b] == 0) continue;
    ece += std::abs(acc[b] - conf[b]) / total;
  }
  return ece;
}

ClassifierMetrics ComputeMetrics(const Eigen::VectorXd& probs,
                                 const Eigen::VectorXd& labels,
                                 const Eigen::VectorXd& mask, double threshold,
                                 int bins) {
  CheckInputs(probs, labels, mask, bins);
  ClassifierMetrics m;
  int pred_pos = 0, pos = 0, neg = 0, tp = 0, fp = 0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (!(mask[i] > 0.5)) continue;
    ++m.rows;
    const bool yhat = probs[i] >= threshold;
    pred_pos += yhat;
    if (labels[i] == 1.0) {
      ++pos;
      tp += yhat;
    } else {
      ++neg;
      fp += yhat;
    }
  }
  if (m.rows > 0) m.positive_rate = static_cast<double>(pred_pos) / m.rows;
  if (pos > 0) m.tpr = static_cast<double>(tp) / pos;
  if (neg > 0) m.fpr = static_cast<double>(fp) / neg;
  m.ece = ExpectedCalibrationError(probs, labels, mask, bins);
  return m;
}

FairnessReport FairnessDeltas(const Eigen::VectorXd& probs,
                              const Eigen::VectorXd& labels,
                              const Eigen::VectorXd& w, double threshold,
                              int bins) {
  CheckInputs(probs, labels, w, bins);
  const Eigen::VectorXd hard =
      w.unaryExpr([](double v) { return v > 0.5 ? 1.0 : 0.0; });
  FairnessReport r;
  r.group = ComputeMetrics(probs, labels, hard, threshold, bins);
  if (r.group.rows == 0) {
    throw AuditError(ErrorCode::kUndefinedAverage,
                     "fairness metrics are undefined for an empty group");
  }
  r.population = ComputeMetrics(probs, labels,
                                Eigen::VectorXd::Ones(probs.size()), threshold,
                                bins);
  r.n_group = r.group.rows;
  r.group_size = static_cast<double>(r.n_group) / probs.size();
  r.pos_rate_delta = r.group.positive_rate - r.population.positive_rate;
  r.tpr_delta = Delta(r.group.tpr, r.population.tpr);
  r.fpr_delta = Delta(r.group.fpr, r.population.fpr);
  r.ece_delta = r.group.ece - r.population.ece;
  return r;
}

nlohmann::ordered_json FairnessToJson(const FairnessReport& report) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["pos_rate_delta"] = report.pos_rate_delta;
  j["tpr_delta"] = opt(report.tpr_delta);
  j["fpr_delta"] = opt(report.fpr_delta);
  j["ece_delta"] = report.ece_delta;
  j["group_size"] = report.group_size;
  j["n_group"] = report.n_group;
  j["group"] = {{"positive_rate", report.group.positive_rate},
                {"tpr", opt(report.group.tpr)},
                {"fpr", opt(report.group.fpr)},
                {"ece", report.group.ece}};
  j["population"] = {{"positive_rate", report.population.positive_rate},
                     {"tpr", opt(report.population.tpr)},
                     {"fpr", opt(report.population.fpr)},
                     {"ece", report.population.ece}};
  return j;
}

}  // namespace fidaudit
