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

#include "kwsdse/error.hpp"

namespace kwsdse {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonIntegerChannels: return "NonIntegerChannels";
    case ErrorCode::kInvalidShape: return "InvalidShape";
    case ErrorCode::kNotHardwareFriendly: return "NotHardwareFriendly";
    case ErrorCode::kUnsupportedLayer: return "UnsupportedLayer";
    case ErrorCode::kNonPositiveEnergy: return "NonPositiveEnergy";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kDenominatorVanishes: return "DenominatorVanishes";
    case ErrorCode::kPoleAtPoint: return "PoleAtPoint";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kSingularInversion: return "SingularInversion";
    case ErrorCode::kEmptyContour: return "EmptyContour";
    case ErrorCode::kEmptySamples: return "EmptySamples";
    case ErrorCode::kEmptyGrid: return "EmptyGrid";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kMissingHeader: return "MissingHeader";
    case ErrorCode::kBadNumeric: return "BadNumeric";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kInconsistentEnergy: return "InconsistentEnergy";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kMissingModel: return "MissingModel";
  }
  return "Unknown";
}

namespace {

std::string with_provenance(const std::string& file, int row, int column,
                            const std::string& detail) {
  std::string out = file;
  if (row > 0) out += ":" + std::to_string(row);
  if (column > 0) out += ":" + std::to_string(column);
  out += ": " + detail;
  return out;
}

}  // namespace

InputError::InputError(ErrorCode code, std::string file, int row, int column,
                       const std::string& detail)
    : Error(code, with_provenance(file, row, column, detail)),
      file_(std::move(file)),
      row_(row),
      column_(column) {}

}  // namespace kwsdse
