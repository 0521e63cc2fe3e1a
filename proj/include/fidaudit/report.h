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

#ifndef FIDAUDIT_REPORT_H_
#define FIDAUDIT_REPORT_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fidaudit/fairness.h"
#include "fidaudit/separable_search.h"
#include "json.hpp"

namespace fidaudit {

nlohmann::ordered_json ConfigToJson(const SearchConfig& cfg);
// The trace is written separately as JSON lines.
nlohmann::ordered_json AuditResultToJson(const AuditResult& r);

// Largest |theta_k| over the non-bias coordinates, after scaling theta to
// unit length. At most k entries, ties broken by position.
std::vector<std::pair<std::string, double>> TopCoefficients(
    const SubgroupSpec& group, int k = 5);

// |log10(group mean / population mean)| on the train rows, or nothing when
// the ratio is not positive.
std::optional<double> LogRatio(const AuditResult& r);

// One summary row per audited feature.
struct SummaryRow {
  AuditResult result;
  std::optional<FairnessReport> fairness;
};

// Rows sorted by test AVG-FID (descending) with the subgroup table columns,
// top coefficients, fairness deltas and the log ratio.
std::string SummaryCsv(std::vector<SummaryRow> rows);

// feature, band, log ratio, AVG-FID and size for every result.
std::string PlotDataCsv(const std::vector<AuditResult>& results);

// Writes through a temporary file and a rename so readers never observe a
// partial file. Throws kIo on failure.
void WriteFileAtomic(const std::string& path, const std::string& contents);

// Filesystem-safe form of a feature name.
std::string Slug(const std::string& name);

// Fixed-format number for CSV cells ("%.10g"), empty for nothing.
std::string CsvNumber(std::optional<double> v);

}  // namespace fidaudit

#endif  // FIDAUDIT_REPORT_H_
