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

#ifndef FIDAUDIT_IMPORTANCE_H_
#define FIDAUDIT_IMPORTANCE_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fidaudit/dataset.h"
#include "fidaudit/models.h"

namespace fidaudit {

enum class ImportanceNotion { kGrad, kLime, kShap, kExternal };

const char* NotionName(ImportanceNotion notion);

// Per-point local explanation values: values(i, j) is the importance of
// feature j at row i.
struct ImportanceMatrix {
  Eigen::MatrixXd values;
  ImportanceNotion notion = ImportanceNotion::kExternal;
  std::vector<std::string> feature_names;

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }
  ImportanceMatrix SelectRows(const std::vector<int>& rows) const;
};

struct ImportanceStats {
  Eigen::VectorXd mu_abs;  // mean |value| per feature
  Eigen::VectorXd mean;
};

// Vanilla gradient of the positive-class probability with respect to each
// input: p_i (1 - p_i) w_j. The model must have been fit on
// ds.feature_matrix() columns.
ImportanceMatrix GradSaliency(const LogisticModel& model, const Dataset& ds);

// Reads an importance file: header = encoded feature names (optionally
// preceded by "row_id"), one row per dataset row in dataset order.
ImportanceMatrix LoadImportance(const std::string& path, const Dataset& ds);

// Writes the same format LoadImportance reads, with a leading row_id column.
void WriteImportance(const std::string& path, const ImportanceMatrix& m);

ImportanceStats ComputeImportanceStats(const ImportanceMatrix& m);

}  // namespace fidaudit

#endif  // FIDAUDIT_IMPORTANCE_H_
