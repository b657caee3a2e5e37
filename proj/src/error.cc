// Copyright 2026 The CalliSense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "callisense/error.h"

#include <string>

namespace callisense {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSchema:
      return "SchemaError";
    case ErrorKind::kInvariant:
      return "InvariantError";
    case ErrorKind::kDegenerateQuad:
      return "DegenerateQuad";
    case ErrorKind::kMissingFile:
      return "MissingFile";
    case ErrorKind::kBadCsvRow:
      return "BadCsvRow";
    case ErrorKind::kNonMonotoneTime:
      return "NonMonotoneTime";
    case ErrorKind::kBadImage:
      return "BadImage";
    case ErrorKind::kBadConfig:
      return "BadConfig";
    case ErrorKind::kEmptyTrace:
      return "EmptyTrace";
    case ErrorKind::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorKind::kNoContacts:
      return "NoContacts";
    case ErrorKind::kEmptyStroke:
      return "EmptyStroke";
    case ErrorKind::kEmptyStream:
      return "EmptyStream";
    case ErrorKind::kLengthMismatch:
      return "LengthMismatch";
    case ErrorKind::kEmptyValues:
      return "EmptyValues";
    case ErrorKind::kEmptyGlyph:
      return "EmptyGlyph";
    case ErrorKind::kDegenerateStroke:
      return "DegenerateStroke";
    case ErrorKind::kEmptySession:
      return "EmptySession";
    case ErrorKind::kEmptyScript:
      return "EmptyScript";
    case ErrorKind::kBadProfile:
      return "BadProfile";
    case ErrorKind::kIo:
      return "IoError";
  }
  return "Error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
      kind_(kind),
      detail_(message) {}

}  // namespace callisense
