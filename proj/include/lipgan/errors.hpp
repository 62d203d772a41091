#pragma once

#include <stdexcept>
#include <string>

namespace lipgan {

/// Base for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or usage. The CLI maps it to exit code 1.
struct ConfigError : Error {
  using Error::Error;
};

/// File system or format failure. The CLI maps it to exit code 3.
struct IoError : Error {
  using Error::Error;
};

struct NonFiniteGradient : Error {
  explicit NonFiniteGradient(std::string param)
      : Error("non-finite gradient in parameter '" + param + "'"), parameter(std::move(param)) {}
  std::string parameter;
};

}  // namespace lipgan
