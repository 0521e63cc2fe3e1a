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

#ifndef FIDAUDIT_CSV_H_
#define FIDAUDIT_CSV_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fidaudit {

// A parsed delimiter-separated table. Quoted fields follow RFC 4180: a field
// wrapped in double quotes may contain the delimiter, and "" is an escaped
// quote.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> SplitCsvLine(std::string_view line, char delimiter);

// Throws AuditError(kIo) if the file cannot be opened and kParse on ragged
// rows. Blank lines are skipped.
CsvTable ReadCsv(const std::string& path, char delimiter = ',');

std::optional<double> ParseReal(std::string_view text);

// Quotes a field only when it contains the delimiter, a quote or a newline.
std::string CsvEscape(std::string_view field);

}  // namespace fidaudit

#endif  // FIDAUDIT_CSV_H_
