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

#ifndef FIDAUDIT_ERROR_H_
#define FIDAUDIT_ERROR_H_

#include <stdexcept>
#include <string>

namespace fidaudit {

enum class ErrorCode {
  kSchema,
  kParse,
  kEmptyDataset,
  kSplit,
  kDegenerateLabels,
  kSingularSystem,
  kDimensionMismatch,
  kAlignment,
  kUndefinedAverage,
  kInvalidArgument,
  kTooManyProfiles,
  kNonFinite,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries a machine-readable code so the
// CLI can map it to an exit status.
class AuditError : public std::runtime_error {
 public:
  AuditError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fidaudit

#endif  // FIDAUDIT_ERROR_H_
