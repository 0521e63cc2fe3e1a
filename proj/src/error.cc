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

#include "fidaudit/error.h"

namespace fidaudit {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kEmptyDataset: return "empty_dataset";
    case ErrorCode::kSplit: return "split";
    case ErrorCode::kDegenerateLabels: return "degenerate_labels";
    case ErrorCode::kSingularSystem: return "singular_system";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kAlignment: return "alignment";
    case ErrorCode::kUndefinedAverage: return "undefined_average";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kTooManyProfiles: return "too_many_profiles";
    case ErrorCode::kNonFinite: return "non_finite";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace fidaudit
