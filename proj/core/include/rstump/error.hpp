// Copyright 2026 The rstump Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace rstump {

// Broad failure classes. The command-line tool maps these onto exit codes.
enum class ErrorKind {
  kConfig,      // bad run configuration or schema
  kData,        // malformed or invalid input data
  kDegenerate,  // data are valid but admit no analysis (empty arm, no split, zero variance)
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what) : Error(ErrorKind::kDegenerate, what) {}
};

// No split satisfies the minimum node size. Kept distinct so callers can
// report "no partition satisfies the size constraint" instead of failing.
class EmptyUniverseError : public DegenerateError {
 public:
  explicit EmptyUniverseError(const std::string& what) : DegenerateError(what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

}  // namespace rstump
