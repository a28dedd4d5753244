#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace wigner {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration, initialization or unsupported request. Raised before
// any compute starts.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Blowups, non-finite values and undefined measures.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, std::optional<std::size_t> step = {},
                          std::optional<double> time = {})
      : Error(what), step_(step), time_(time) {}

  std::optional<std::size_t> step() const noexcept { return step_; }
  std::optional<double> time() const noexcept { return time_; }

 private:
  std::optional<std::size_t> step_;
  std::optional<double> time_;
};

// Insufficient or misaligned time series.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace wigner
