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

#include "fidaudit/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "fidaudit/csv.h"
#include "fidaudit/error.h"

namespace fidaudit {
namespace {

ColumnKind ParseKind(const std::string& kind) {
  if (kind == "numeric") return ColumnKind::kNumeric;
  if (kind == "binary") return ColumnKind::kBinary;
  if (kind == "categorical") return ColumnKind::kCategorical;
  throw AuditError(ErrorCode::kSchema, "unknown column kind '" + kind + "'");
}

std::optional<double> ParseBinary(const std::string& text) {
  auto value = ParseReal(text);
  if (value && (*value == 0.0 || *value == 1.0)) return value;
  if (text == "true" || text == "True") return 1.0;
  if (text == "false" || text == "False") return 0.0;
  return std::nullopt;
}

}  // namespace

std::vector<ColumnSchema> ParseSchema(const nlohmann::json& doc) {
  if (!doc.is_array()) {
    throw AuditError(ErrorCode::kSchema, "schema must be a JSON array");
  }
  std::vector<ColumnSchema> schema;
  std::set<std::string> seen;
  int targets = 0;
  int sensitive = 0;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("name")) {
      throw AuditError(ErrorCode::kSchema, "schema entry without a name");
    }
    ColumnSchema col;
    col.name = item.at("name").get<std::string>();
    col.kind = ParseKind(item.value("kind", std::string("numeric")));
    col.sensitive = item.value("sensitive", false);
    col.target = item.value("target", false);
    if (!seen.insert(col.name).second) {
      throw AuditError(ErrorCode::kSchema, "duplicate column " + col.name);
    }
    if (col.target && col.sensitive) {
      throw AuditError(ErrorCode::kSchema,
                       "target column cannot be sensitive: " + col.name);
    }
    if (col.target && col.kind == ColumnKind::kCategorical) {
      throw AuditError(ErrorCode::kSchema,
                       "target column must be numeric or binary");
    }
    targets += col.target;
    sensitive += col.sensitive;
    schema.push_back(std::move(col));
  }
  if (targets != 1) {
    throw AuditError(ErrorCode::kSchema,
                     "schema needs exactly one target column, found " +
                         std::to_string(targets));
  }
  if (sensitive < 1) {
    throw AuditError(ErrorCode::kSchema, "schema has no sensitive column");
  }
  return schema;
}

std::vector<ColumnSchema> LoadSchema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw AuditError(ErrorCode::kIo, "cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorCode::kSchema, path + ": " + e.what());
  }
  return ParseSchema(doc);
}

Dataset::Dataset(std::vector<EncodedColumn> columns, Eigen::MatrixXd features,
                 Eigen::VectorXd labels, std::vector<int64_t> row_ids)
    : columns_(std::move(columns)),
      features_(std::move(features)),
      labels_(std::move(labels)),
      row_ids_(std::move(row_ids)) {
  const int n = static_cast<int>(labels_.size());
  if (features_.rows() != n || features_.cols() != num_features() ||
      static_cast<int>(row_ids_.size()) != n) {
    throw AuditError(ErrorCode::kDimensionMismatch,
                     "dataset blocks disagree on shape");
  }
  // Sensitive columns must form a prefix.
  num_sensitive_ = 0;
  while (num_sensitive_ < num_features() && columns_[num_sensitive_].sensitive) {
    ++num_sensitive_;
  }
  for (int j = num_sensitive_; j < num_features(); ++j) {
    if (columns_[j].sensitive) {
      throw AuditError(ErrorCode::kSchema,
                       "sensitive columns must precede safe columns");
    }
  }
  sensitive_.resize(n, num_sensitive_ + 1);
  sensitive_.leftCols(num_sensitive_) = features_.leftCols(num_sensitive_);
  sensitive_.col(num_sensitive_).setOnes();
  safe_ = features_.rightCols(num_features() - num_sensitive_);

  for (int j = 0; j < num_features(); ++j) {
    const auto& src = columns_[j].source;
    auto it = std::find_if(encoding_map_.begin(), encoding_map_.end(),
                           [&](const auto& e) { return e.first == src; });
    if (it == encoding_map_.end()) {
      encoding_map_.push_back({src, {j}});
    } else {
      it->second.push_back(j);
    }
  }
}

std::vector<std::string> Dataset::feature_names() const {
  std::vector<std::string> names;
  names.reserve(columns_.size());
  for (const auto& c : columns_) names.push_back(c.name);
  return names;
}

std::vector<std::string> Dataset::sensitive_names() const {
  std::vector<std::string> names;
  for (int j = 0; j < num_sensitive_; ++j) names.push_back(columns_[j].name);
  names.push_back(kBiasName);
  return names;
}

int Dataset::FeatureIndex(const std::string& name) const {
  for (int j = 0; j < num_features(); ++j) {
    if (columns_[j].name == name) return j;
  }
  return -1;
}

Dataset Dataset::SelectRows(const std::vector<int>& rows) const {
  Eigen::MatrixXd features(rows.size(), num_features());
  Eigen::VectorXd labels(rows.size());
  std::vector<int64_t> ids(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    features.row(i) = features_.row(rows[i]);
    labels[i] = labels_[rows[i]];
    ids[i] = row_ids_[rows[i]];
  }
  return Dataset(columns_, std::move(features), std::move(labels),
                 std::move(ids));
}

Dataset LoadDataset(const std::string& path,
                    const std::vector<ColumnSchema>& schema,
                    const LoadOptions& options,
                    std::vector<std::string>* warnings) {
  const CsvTable table = ReadCsv(path, options.delimiter);
  if (table.rows.empty()) {
    throw AuditError(ErrorCode::kEmptyDataset, path + " has no data rows");
  }
  std::map<std::string, int> position;
  for (size_t i = 0; i < table.header.size(); ++i) {
    position[table.header[i]] = static_cast<int>(i);
  }
  for (const auto& col : schema) {
    if (!position.count(col.name)) {
      throw AuditError(ErrorCode::kSchema,
                       path + ": missing column '" + col.name + "'");
    }
  }
  const int n = static_cast<int>(table.rows.size());

  // Build encoded columns block by block: sensitive first, then safe.
  std::vector<EncodedColumn> columns;
  std::vector<std::vector<double>> values;
  auto cell_error = [&](int row, const ColumnSchema& col) {
    return AuditError(ErrorCode::kParse,
                      path + ": row " + std::to_string(row) + ", column '" +
                          col.name + "': cannot parse '" +
                          table.rows[row][position[col.name]] + "'");
  };
  for (bool sensitive_block : {true, false}) {
    for (const auto& col : schema) {
      if (col.target || col.sensitive != sensitive_block) continue;
      const int src = position[col.name];
      if (col.kind == ColumnKind::kCategorical) {
        std::set<std::string> levels;
        for (const auto& row : table.rows) levels.insert(row[src]);
        if (levels.size() == 1 && warnings) {
          warnings->push_back("column '" + col.name +
                              "' has a single level; its one-hot column is "
                              "constant");
        }
        for (const auto& level : levels) {
          std::vector<double> v(n);
          for (int i = 0; i < n; ++i) v[i] = table.rows[i][src] == level;
          columns.push_back({col.name + "=" + level, col.name,
                             ColumnKind::kBinary, col.sensitive});
          values.push_back(std::move(v));
        }
        continue;
      }
      std::vector<double> v(n);
      for (int i = 0; i < n; ++i) {
        auto parsed = col.kind == ColumnKind::kBinary
                          ? ParseBinary(table.rows[i][src])
                          : ParseReal(table.rows[i][src]);
        if (!parsed) throw cell_error(i, col);
        v[i] = *parsed;
      }
      if (options.standardize && col.kind == ColumnKind::kNumeric) {
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        const double sd = std::sqrt(var / n);
        for (double& x : v) x = sd > 0.0 ? (x - mean) / sd : 0.0;
      }
      columns.push_back({col.name, col.name, col.kind, col.sensitive});
      values.push_back(std::move(v));
    }
  }

  Eigen::MatrixXd features(n, static_cast<int>(columns.size()));
  for (size_t j = 0; j < columns.size(); ++j) {
    for (int i = 0; i < n; ++i) features(i, j) = values[j][i];
  }
  Eigen::VectorXd labels(n);
  const auto target = std::find_if(schema.begin(), schema.end(),
                                   [](const auto& c) { return c.target; });
  for (int i = 0; i < n; ++i) {
    auto parsed = target->kind == ColumnKind::kBinary
                      ? ParseBinary(table.rows[i][position[target->name]])
                      : ParseReal(table.rows[i][position[target->name]]);
    if (!parsed) throw cell_error(i, *target);
    labels[i] = *parsed;
  }
  std::vector<int64_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return Dataset(std::move(columns), std::move(features), std::move(labels),
                 std::move(ids));
}

SplitPair Split(const Dataset& ds, double fraction, uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw AuditError(ErrorCode::kSplit, "split fraction must be in (0, 1)");
  }
  const int n = ds.rows();
  const int n_train = static_cast<int>(std::floor(fraction * n));
  if (n_train == 0 || n_train == n) {
    throw AuditError(ErrorCode::kSplit,
                     "split of " + std::to_string(n) +
                         " rows leaves an empty part");
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  SplitPair out;
  out.train_rows.assign(order.begin(), order.begin() + n_train);
  out.test_rows.assign(order.begin() + n_train, order.end());
  std::sort(out.train_rows.begin(), out.train_rows.end());
  std::sort(out.test_rows.begin(), out.test_rows.end());
  out.train = ds.SelectRows(out.train_rows);
  out.test = ds.SelectRows(out.test_rows);
  out.seed = seed;
  out.fraction = fraction;
  return out;
}

double DefaultSplitFraction(int n) { return n >= 1000 ? 0.8 : 0.5; }

}  // namespace fidaudit
