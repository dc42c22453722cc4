/*
 * Copyright 2026 The imbal Authors.
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

#ifndef IMBAL_ERROR_HPP_
#define IMBAL_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace imbal {

// Coarse error categories. They map one-to-one onto the C API status codes.
enum class ErrorCode {
  kInvalidArgument = 1,
  kIo = 2,
  kParse = 3,
  kDomain = 4,
  kRuntime = 5,
  kNetwork = 6,
  kSchema = 7,
  kCancelled = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Thrown from cancellation checkpoints once a deadline passes or a stop is
// requested. Never escapes evaluate().
class Cancelled : public Error {
 public:
  Cancelled() : Error(ErrorCode::kCancelled, "evaluation cancelled") {}
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace imbal

#endif  // IMBAL_ERROR_HPP_
