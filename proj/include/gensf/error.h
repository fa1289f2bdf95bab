// Copyright 2026 The GenSF Authors.
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

#ifndef GENSF_ERROR_H_
#define GENSF_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace gensf {

// Machine-readable error categories. The CLI prints the category name and
// maps usage errors to exit code 2, everything else to 1.
enum class ErrorKind {
  kParse,
  kValidation,
  kConfig,
  kIo,
  kNotFound,
  kRange,
  kDivergence,
  kUsage,
};

std::string_view ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gensf

#endif  // GENSF_ERROR_H_
