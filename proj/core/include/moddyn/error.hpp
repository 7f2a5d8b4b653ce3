// Copyright 2026  The moddyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MODDYN_ERROR_HPP_
#define MODDYN_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace moddyn {

enum class ErrorCode {
  kIo,               // file could not be opened, read or written
  kValidation,       // value violates a type invariant (NaN, bad dims, ...)
  kFormat,           // wrong magic / not a file of the expected kind
  kCorruption,       // header and payload disagree
  kParse,            // malformed text row
  kDuplicateId,
  kRange,            // numeric value outside its allowed interval
  kDimension,        // shapes of two operands do not agree
  kDomain,           // argument outside a function's mathematical domain
  kConfig,           // unusable configuration (e.g. single-class split)
  kVariantMismatch,  // raw checkpoint used as proposed or vice versa
  kCheckpointFormat,
};

std::string_view ErrorCodeName(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// the command-line tool can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace moddyn

#endif  // MODDYN_ERROR_HPP_
