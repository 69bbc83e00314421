/*
 * Copyright 2026 The Coughscreen Authors.
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

#ifndef COUGHSCREEN_ERROR_H_
#define COUGHSCREEN_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace coughscreen {

// Coarse failure categories. The service maps these onto HTTP status codes
// and the CLI onto exit codes, so keep the list short.
enum class ErrorKind {
  kDecode,           // malformed audio or document bytes
  kEmptyInput,       // zero-length input where content is required
  kDegenerateInput,  // e.g. all-zero clip passed to peak normalization
  kTooShort,         // clip shorter than one analysis frame
  kInvalidArgument,  // precondition violated by the caller
  kContract,         // shape / width mismatch between collaborating parts
  kLoad,             // model or artifact could not be loaded
  kRuntime,          // a model backend failed while running
  kSchema,           // document does not match its schema
  kConfig,           // missing or inconsistent configuration
  kUndefined,        // metric or stack is mathematically undefined
  kStorage,          // filesystem failure in the submission store
  kNotFound,
  kConflict,
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

}  // namespace coughscreen

#endif  // COUGHSCREEN_ERROR_H_
