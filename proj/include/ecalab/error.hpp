#pragma once

#include <stdexcept>
#include <string>

namespace ecalab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Target coincides with the illuminator or a receiver, or the node layout is invalid.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A waveform evaluation left the guarded (non-wrapping) window of the master process.
class WindowOverrunError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The interference-cancelled steering vector vanished (steering inside the interference span).
class DegenerateSteeringError : public Error {
 public:
  using Error::Error;
};

class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

/// Hessian (or another matrix that must be invertible) is singular or indefinite.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Requested delay lies outside the range the reference record can interpolate.
class RangeError : public Error {
 public:
  using Error::Error;
};

}  // namespace ecalab
