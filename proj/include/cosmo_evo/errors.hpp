// Copyright 2026 The cosmo-evo Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace cosmo_evo {

// Malformed trajectory or argument handed to a pure operation.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Configuration value outside its documented bounds. `key()` names the
// dotted config key that failed validation.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class EnumerationTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyBuffer : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BufferTooSmall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyMinibatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cosmo_evo
