#pragma once

#include <stdexcept>
#include <string>

namespace airbs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated precondition on an argument or configuration value.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// AirBS and MU closer than the channel singularity guard.
class CoincidentPointsError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace airbs
