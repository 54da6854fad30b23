#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace modalstab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedOrderError : public Error {
 public:
  using Error::Error;
};

class InvalidOrderError : public Error {
 public:
  using Error::Error;
};

/// A point or argument lies outside the admissible set.
class DomainError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Lifting parameter gamma sits on a spectral resonance.
class ResonanceError : public Error {
 public:
  ResonanceError(const std::string& what, int mode_index)
      : Error(what), mode_index_(mode_index) {}
  /// 1-based index of the offending mode.
  int mode_index() const noexcept { return mode_index_; }

 private:
  int mode_index_;
};

class SynthesisError : public Error {
 public:
  using Error::Error;
};

/// Synthesized gains do not make the closed loop Hurwitz.
class GainValidationError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class UndefinedRatioError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration; `field()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace modalstab
