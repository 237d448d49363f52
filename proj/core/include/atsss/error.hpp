// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace atsss {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or policy passed to a pure computation.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Configuration rejected during validation. Carries every violation found.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  ConfigError(const std::string& field, const std::string& message);

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// An invariant broke while a simulation was running.
class SimulationError : public Error {
 public:
  using Error::Error;
};

}  // namespace atsss
