// Copyright 2026 The bfsim Authors
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

#ifndef BFSIM_ERROR_HPP_
#define BFSIM_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace bfsim {

// Mirrors the bfs_status codes of the C API one-to-one.
enum class ErrorCode {
  kInvalidArgument = 1,
  kInvalidInput = 2,
  kUnsupportedSize = 3,
  kInvalidState = 4,
  kOutOfRange = 5,
  kSingularInput = 6,
  kOutOfRegime = 7,
  kIo = 8,
  kResourceLimit = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void Require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) Fail(code, what);
}

}  // namespace bfsim

#endif  // BFSIM_ERROR_HPP_
