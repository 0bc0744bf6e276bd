#pragma once

#include <stdexcept>
#include <string>

namespace nhl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters, malformed configuration, violated preconditions.
// `key` names the offending configuration field when there is one.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message, std::string key = {})
      : Error(message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// Integration blew up (gain runaway, non-finite amplitudes) or a linear
// algebra routine failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace nhl
