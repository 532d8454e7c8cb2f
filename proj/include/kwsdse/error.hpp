/*
 * Copyright 2026 The kwsdse Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kwsdse {

/// Every failure the library can report. The numeric values are mirrored by
/// the C API status codes in kwsdse.h and must stay in sync.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kNonIntegerChannels = 2,
  kInvalidShape = 3,
  kNotHardwareFriendly = 4,
  kUnsupportedLayer = 5,
  kNonPositiveEnergy = 6,
  kTooFewPoints = 7,
  kRankDeficient = 8,
  kDenominatorVanishes = 9,
  kPoleAtPoint = 10,
  kInfeasible = 11,
  kSingularInversion = 12,
  kEmptyContour = 13,
  kEmptySamples = 14,
  kEmptyGrid = 15,
  kEmptyInput = 16,
  kMissingHeader = 17,
  kBadNumeric = 18,
  kOutOfRange = 19,
  kInconsistentEnergy = 20,
  kIo = 21,
  kParse = 22,
  kMissingModel = 23,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Input-file error with provenance. row and column are 1-based; 0 means
/// "not applicable" (e.g. a missing file has neither).
class InputError : public Error {
 public:
  InputError(ErrorCode code, std::string file, int row, int column,
             const std::string& detail);

  const std::string& file() const noexcept { return file_; }
  int row() const noexcept { return row_; }
  int column() const noexcept { return column_; }

 private:
  std::string file_;
  int row_;
  int column_;
};

}  // namespace kwsdse
