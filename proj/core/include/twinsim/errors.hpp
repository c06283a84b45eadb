#pragma once

#include <stdexcept>
#include <string>

namespace twinsim {

/// Argument outside an operation's domain (bad shape, non-positive scale, NaN...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Missing or unusable configuration, e.g. an empty calibration table.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulated process did not finish inside its horizon.
class TimeoutError : public std::runtime_error {
 public:
  TimeoutError(const std::string& what, double remaining_bytes)
      : std::runtime_error(what), remaining_bytes_(remaining_bytes) {}

  double remaining_bytes() const noexcept { return remaining_bytes_; }

 private:
  double remaining_bytes_;
};

}  // namespace twinsim
