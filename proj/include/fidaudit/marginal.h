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

#ifndef FIDAUDIT_MARGINAL_H_
#define FIDAUDIT_MARGINAL_H_

#include <string>
#include <utility>
#include <vector>

#include "fidaudit/dataset.h"
#include "fidaudit/importance.h"
#include "fidaudit/separable_search.h"
#include "fidaudit/subgroup.h"

namespace fidaudit {

struct MarginalGroup {
  std::string description;  // "male=1", "race=Asian", "age>31"
  ThresholdGroup group;
};

// Groups defined by a single sensitive attribute: both values of a binary
// column, each one-hot level, and x > t at the deciles of a numeric column.
// Each is expressed as a threshold over the sensitive block with bias.
std::vector<MarginalGroup> MarginalCandidates(const Dataset& ds);

// Best marginal group for feature j within [alpha_lo, alpha_hi] by train
// AVG-FID. The result is not in band when no candidate fits.
AuditResult MarginalBaseline(const ImportanceMatrix& m, int j,
                             const Dataset& ds, double alpha_lo,
                             double alpha_hi);

// One result per range.
std::vector<AuditResult> MarginalBaseline(
    const ImportanceMatrix& m, int j, const Dataset& ds,
    const std::vector<AlphaRange>& ranges);

}  // namespace fidaudit

#endif  // FIDAUDIT_MARGINAL_H_
