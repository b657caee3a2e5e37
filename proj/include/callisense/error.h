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

#ifndef CALLISENSE_ERROR_H_
#define CALLISENSE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace callisense {

enum class ErrorKind {
  kSchema,
  kInvariant,
  kDegenerateQuad,
  kMissingFile,
  kBadCsvRow,
  kNonMonotoneTime,
  kBadImage,
  kBadConfig,
  kEmptyTrace,
  kDimensionMismatch,
  kNoContacts,
  kEmptyStroke,
  kEmptyStream,
  kLengthMismatch,
  kEmptyValues,
  kEmptyGlyph,
  kDegenerateStroke,
  kEmptySession,
  kEmptyScript,
  kBadProfile,
  kIo,
};

std::string_view ErrorKindName(ErrorKind kind);

// All library failures are reported as `Error`. `what()` is prefixed with the
// kind name, e.g. "InvariantError: strokes[1]: stroke index gap".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const { return kind_; }
  // Message without the kind prefix.
  const std::string& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace callisense

#endif  // CALLISENSE_ERROR_H_
