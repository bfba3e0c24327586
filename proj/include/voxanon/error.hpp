// Copyright 2026 The voxanon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VOXANON_ERROR_HPP_
#define VOXANON_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace voxanon {

enum class ErrorKind {
  kIo,
  kFormat,
  kContract,
  kNumerical,
  kConfig,
  kParse,
  kValidation,
  kReconcile,
};

const char* ErrorKindName(ErrorKind kind);

// All library failures are reported as Error; kind() tells callers which
// contract was broken so the C layer can map it to a status code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace voxanon

#endif  // VOXANON_ERROR_HPP_
