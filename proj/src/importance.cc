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

#include "fidaudit/importance.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fidaudit/csv.h"
#include "fidaudit/error.h"

namespace fidaudit {

const char* NotionName(ImportanceNotion notion) {
  switch (notion) {
    case ImportanceNotion::kGrad: return "GRAD";
    case ImportanceNotion::kLime: return "LIME";
    case ImportanceNotion::kShap: return "SHAP";
    case ImportanceNotion::kExternal: return "EXTERNAL";
  }
  return "EXTERNAL";
}

ImportanceMatrix ImportanceMatrix::SelectRows(
    const std::vector<int>& rows) const {
  ImportanceMatrix out;
  out.notion = notion;
  out.feature_names = feature_names;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
  for (size_t i = 0; i < rows.size(); ++i) {
    out.values.row(static_cast<Eigen::Index>(i)) = values.row(rows[i]);
  }
  return out;
}

ImportanceMatrix GradSaliency(const LogisticModel& model, const Dataset& ds) {
  const Eigen::VectorXd p = PredictProba(model, ds.feature_matrix());
  const Eigen::VectorXd scale = p.array() * (1.0 - p.array());
  ImportanceMatrix m;
  m.notion = ImportanceNotion::kGrad;
  m.feature_names = ds.feature_names();
  m.values = scale * model.weights.transpose();
  return m;
}

ImportanceMatrix LoadImportance(const std::string& path, const Dataset& ds) {
  const CsvTable table = ReadCsv(path);
  const auto names = ds.feature_names();
  size_t offset = 0;
  if (!table.header.empty() && table.header.front() == "row_id") offset = 1;
  if (table.header.size() - offset != names.size() ||
      !std::equal(names.begin(), names.end(), table.header.begin() + offset)) {
    throw AuditError(ErrorCode::kAlignment,
                     path + ": header does not match the dataset's encoded "
                            "feature names");
  }
  if (static_cast<int>(table.rows.size()) != ds.rows()) {
    throw AuditError(ErrorCode::kAlignment,
                     path + ": " + std::to_string(table.rows.size()) +
                         " rows, dataset has " + std::to_string(ds.rows()));
  }
  ImportanceMatrix m;
  m.notion = ImportanceNotion::kExternal;
  m.feature_names = names;
  m.values.resize(ds.rows(), static_cast<Eigen::Index>(names.size()));
  for (int i = 0; i < ds.rows(); ++i) {
    const auto& row = table.rows[i];
    if (offset == 1) {
      auto id = ParseReal(row[0]);
      if (!id || *id != static_cast<double>(i)) {
        throw AuditError(ErrorCode::kAlignment,
                         path + ": row " + std::to_string(i) +
                             " has row_id '" + row[0] + "'");
      }
    }
    for (size_t j = 0; j < names.size(); ++j) {
      auto v = ParseReal(row[j + offset]);
      if (!v) {
        throw AuditError(ErrorCode::kNonFinite,
                         path + ": row " + std::to_string(i) + ", feature '" +
                             names[j] + "': '" + row[j + offset] +
                             "' is not a finite number");
      }
      m.values(i, static_cast<Eigen::Index>(j)) = *v;
    }
  }
  return m;
}

void WriteImportance(const std::string& path, const ImportanceMatrix& m) {
  std::ofstream out(path);
  if (!out) throw AuditError(ErrorCode::kIo, "cannot write " + path);
  out << "row_id";
  for (const auto& name : m.feature_names) out << ',' << CsvEscape(name);
  out << '\n';
  char buf[32];
  for (int i = 0; i < m.rows(); ++i) {
    out << i;
    for (int j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m.values(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

ImportanceStats ComputeImportanceStats(const ImportanceMatrix& m) {
  ImportanceStats stats;
  if (m.rows() == 0) {
    stats.mu_abs = Eigen::VectorXd::Zero(m.cols());
    stats.mean = Eigen::VectorXd::Zero(m.cols());
    return stats;
  }
  stats.mu_abs = m.values.cwiseAbs().colwise().mean().transpose();
  stats.mean = m.values.colwise().mean().transpose();
  return stats;
}

}  // namespace fidaudit
