#pragma once

#include <stdexcept>
#include <string>

namespace magnon {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent or invalid configuration (lengths, thresholds, schema).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Operation requires J1 < J2 (or the reverse) and the input is outside it.
class RegimeError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

/// The bulk gap closes (J1 == J2), so topology is undefined.
class GapClosureError : public Error {
 public:
  using Error::Error;
};

/// Malformed state or measurement input.
class InputError : public Error {
 public:
  using Error::Error;
};

class NoiseModelError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DetunedDriveError : public Error {
 public:
  DetunedDriveError(const std::string& what, double detuning_mhz)
      : Error(what), detuning_mhz_(detuning_mhz) {}
  double detuning_mhz() const noexcept { return detuning_mhz_; }

 private:
  double detuning_mhz_;
};

class RangeError : public Error {
 public:
  RangeError(const std::string& what, double achievable_max)
      : Error(what), achievable_max_(achievable_max) {}
  double achievable_max() const noexcept { return achievable_max_; }

 private:
  double achievable_max_;
};

class InconclusiveWindowError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// Output directory or file could not be written.
class OutputError : public Error {
 public:
  using Error::Error;
};

}  // namespace magnon
