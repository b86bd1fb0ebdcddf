// SPDX-License-Identifier: MIT
/**
 * @file errors.hpp
 * @brief Error categories shared by the library and the CLI.
 *
 * Each category maps to one CLI exit code: ConfigError -> 2,
 * AssumptionError -> 3, NumericalError and IoError -> 4.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace robustfolio {

/// Invalid parameters or malformed input.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A modelling assumption does not hold (arbitrage, boundary optimum,
/// growth guard, pi* = 0 where a nonzero optimizer is required).
class AssumptionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A solver failed to converge or left the utility domain.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An output file could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace robustfolio
