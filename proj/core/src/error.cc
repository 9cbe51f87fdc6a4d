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

#include "capce/error.h"

namespace capce {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kEmptyAfterFiltering: return "EmptyAfterFiltering";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kTooFewRecords: return "TooFewRecords";
    case ErrorCode::kUnknownSetting: return "UnknownSetting";
    case ErrorCode::kBadBox: return "BadBox";
    case ErrorCode::kDegreeTooHigh: return "DegreeTooHigh";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kOrderTooHigh: return "OrderTooHigh";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kKappaTooSmall: return "KappaTooSmall";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kGramSingular: return "GramSingular";
    case ErrorCode::kNonFiniteEstimate: return "NonFiniteEstimate";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace capce
