/*
 * Copyright 2026 The CAPCE Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CAPCE_ERROR_H_
#define CAPCE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace capce {

enum class ErrorCode {
  kInvalidArgument,
  kMissingColumn,
  kEmptyAfterFiltering,
  kParseError,
  kTooFewRecords,
  kUnknownSetting,
  kBadBox,
  kDegreeTooHigh,
  kDimensionMismatch,
  kOrderTooHigh,
  kTooFewSamples,
  kKappaTooSmall,
  kSingularSystem,
  kGramSingular,
  kNonFiniteEstimate,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures surface as capce::Error carrying a machine-readable
// code; callers that aggregate failures (benchmark cells, bootstrap
// resamples) switch on code() rather than parsing what().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& message);

}  // namespace capce

#endif  // CAPCE_ERROR_H_
