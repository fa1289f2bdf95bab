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

#include "gensf/error.h"

namespace gensf {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse_error";
    case ErrorKind::kValidation: return "validation_error";
    case ErrorKind::kConfig: return "config_error";
    case ErrorKind::kIo: return "io_error";
    case ErrorKind::kNotFound: return "not_found";
    case ErrorKind::kRange: return "range_error";
    case ErrorKind::kDivergence: return "divergence";
    case ErrorKind::kUsage: return "usage_error";
  }
  return "error";
}

}  // namespace gensf
