#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace osrl {

/// Malformed or inconsistent input (dimension mismatch, invalid distribution, out-of-range index).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The LP solver hit its iteration cap or produced an inconsistent answer.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration that cannot be honored (e.g. a strong-properness modulus too large for the box).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Oracle acquisition ran out of budget or depth before every action was induced.
class PartialOracleError : public std::runtime_error {
 public:
  PartialOracleError(const std::string& what, std::vector<std::size_t> missing)
      : std::runtime_error(what), missing_(std::move(missing)) {}

  const std::vector<std::size_t>& missing_actions() const noexcept { return missing_; }

 private:
  std::vector<std::size_t> missing_;
};

}  // namespace osrl
