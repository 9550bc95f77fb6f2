#pragma once

#include <stdexcept>
#include <string>

namespace rc {

/// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Arrival intensity at or beyond the service capacity of a lane.
class Unstable : public Error {
 public:
  using Error::Error;
};

class InfeasibleBand : public Error {
 public:
  using Error::Error;
};

class InfeasibleTarget : public Error {
 public:
  using Error::Error;
};

class ZoneTooShort : public Error {
 public:
  using Error::Error;
};

/// No admissible speed curve for a vehicle; the simulator treats it as spillback.
class ZoneOverflow : public Error {
 public:
  using Error::Error;
};

}  // namespace rc
