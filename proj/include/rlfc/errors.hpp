#pragma once

#include <stdexcept>
#include <string>

namespace rlfc {

// Each error class maps onto one CLI exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const { return 1; }
};

class UsageError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 2; }
};

class IoError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 3; }
};

class FormatError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 4; }
};

class VerificationError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 5; }
};

}  // namespace rlfc
