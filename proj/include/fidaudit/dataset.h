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

#ifndef FIDAUDIT_DATASET_H_
#define FIDAUDIT_DATASET_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace fidaudit {

enum class ColumnKind { kNumeric, kBinary, kCategorical };

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  bool sensitive = false;
  bool target = false;
};

// Parses the schema document: [{"name":..,"kind":..,"sensitive":..,
// "target":..}]. Validates that exactly one column is the target and at least
// one is sensitive.
std::vector<ColumnSchema> ParseSchema(const nlohmann::json& doc);
std::vector<ColumnSchema> LoadSchema(const std::string& path);

// One column of the encoded feature space.
struct EncodedColumn {
  std::string name;      // "age", or "race=Asian" for a one-hot level
  std::string source;    // originating file column
  ColumnKind kind = ColumnKind::kNumeric;
  bool sensitive = false;
};

// Name used for the constant column appended to the sensitive block.
inline constexpr const char* kBiasName = "bias";

// An encoded, immutable tabular dataset.
//
// Encoded features are ordered sensitive first, then safe, each block in
// schema order with one-hot levels sorted lexicographically. The sensitive
// matrix carries one extra trailing column of ones so threshold groups can
// express offsets.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<EncodedColumn> columns, Eigen::MatrixXd features,
          Eigen::VectorXd labels, std::vector<int64_t> row_ids);

  int rows() const { return static_cast<int>(labels_.size()); }
  int num_features() const { return static_cast<int>(columns_.size()); }
  int num_sensitive() const { return num_sensitive_; }  // excludes bias

  // n x (num_sensitive + 1); last column is identically 1.
  const Eigen::MatrixXd& sensitive_matrix() const { return sensitive_; }
  const Eigen::MatrixXd& safe_matrix() const { return safe_; }
  // n x num_features, sensitive block then safe block (no bias column).
  const Eigen::MatrixXd& feature_matrix() const { return features_; }
  const Eigen::VectorXd& labels() const { return labels_; }

  const std::vector<EncodedColumn>& columns() const { return columns_; }
  std::vector<std::string> feature_names() const;
  // Sensitive feature names followed by kBiasName.
  std::vector<std::string> sensitive_names() const;
  // Original column name -> encoded feature indices, in schema order.
  const std::vector<std::pair<std::string, std::vector<int>>>& encoding_map()
      const {
    return encoding_map_;
  }
  // Position of each row in the originally loaded file.
  const std::vector<int64_t>& row_ids() const { return row_ids_; }

  int FeatureIndex(const std::string& name) const;  // -1 when absent

  // Rows in the given order; row ids are carried along.
  Dataset SelectRows(const std::vector<int>& rows) const;

 private:
  std::vector<EncodedColumn> columns_;
  int num_sensitive_ = 0;
  Eigen::MatrixXd features_;
  Eigen::MatrixXd sensitive_;
  Eigen::MatrixXd safe_;
  Eigen::VectorXd labels_;
  std::vector<int64_t> row_ids_;
  std::vector<std::pair<std::string, std::vector<int>>> encoding_map_;
};

struct LoadOptions {
  char delimiter = ',';
  // Z-score numeric (not binary or one-hot) columns over all loaded rows.
  bool standardize = false;
};

// Loads a delimiter-separated file with a header row. Columns absent from
// the schema are ignored. Warnings (e.g. single-level categoricals) are
// appended to *warnings when non-null.
Dataset LoadDataset(const std::string& path,
                    const std::vector<ColumnSchema>& schema,
                    const LoadOptions& options = {},
                    std::vector<std::string>* warnings = nullptr);

struct SplitPair {
  Dataset train;
  Dataset test;
  // Positions in the source dataset, ascending within each part.
  std::vector<int> train_rows;
  std::vector<int> test_rows;
  uint64_t seed = 0;
  double fraction = 0.0;
};

// Uniform shuffle with a seeded generator; train gets floor(fraction * n)
// rows. Both parts keep source order.
SplitPair Split(const Dataset& ds, double fraction, uint64_t seed);

// 0.8 for n >= 1000, otherwise 0.5.
double DefaultSplitFraction(int n);

}  // namespace fidaudit

#endif  // FIDAUDIT_DATASET_H_
