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

#ifndef FIDAUDIT_FAIRNESS_H_
#define FIDAUDIT_FAIRNESS_H_

#include <optional>

#include <Eigen/Dense>

#include "json.hpp"

namespace fidaudit {

// Classifier metrics over the rows where mask > 0.5.
struct ClassifierMetrics {
  int rows = 0;
  double positive_rate = 0.0;  // share predicted positive
  std::optional<double> tpr;   // missing without positive labels
  std::optional<double> fpr;   // missing without negative labels
  double ece = 0.0;
};

ClassifierMetrics ComputeMetrics(const Eigen::VectorXd& probs,
                                 const Eigen::VectorXd& labels,
                                 const Eigen::VectorXd& mask,
                                 double threshold = 0.5, int bins = 10);

// Binned expected calibration error with equal-width bins on [0, 1].
double ExpectedCalibrationError(const Eigen::VectorXd& probs,
                                const Eigen::VectorXd& labels,
                                const Eigen::VectorXd& mask, int bins = 10);

// Each delta is the metric on the group minus the metric on all rows.
struct FairnessReport {
  double pos_rate_delta = 0.0;
  std::optional<double> tpr_delta;
  std::optional<double> fpr_delta;
  double ece_delta = 0.0;
  double group_size = 0.0;  // fraction of rows
  int n_group = 0;
  ClassifierMetrics group;
  ClassifierMetrics population;
};

// Membership is thresholded at 0.5 first, so soft groups are accepted.
// Throws kUndefinedAverage for an empty group and kInvalidArgument for
// labels other than 0/1 or mismatched lengths.
FairnessReport FairnessDeltas(const Eigen::VectorXd& probs,
                              const Eigen::VectorXd& labels,
                              const Eigen::VectorXd& w,
                              double threshold = 0.5, int bins = 10);

nlohmann::ordered_json FairnessToJson(const FairnessReport& report);

}  // namespace fidaudit

#endif  // FIDAUDIT_FAIRNESS_H_
