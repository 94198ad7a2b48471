#pragma once

#include <stdexcept>
#include <string>

namespace softmodes {

/// Invalid parameter value (non-positive rate, empty dictionary, bad prior, ...).
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Shape or geometry mismatch: patch larger than lattice, fields on different grids.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Score or schedule evaluated at t <= 0, where sigma^2(t) = 0.
struct SingularNoiseError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Fourier shell index beyond the lattice Nyquist limit L/2.
struct AliasingError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Field is identically zero (or has zero variance) where a normalization is required.
struct DegenerateFieldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dense operator requested beyond the feasible site count.
struct SizeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// r(t) has no sign change on the searched interval.
struct NoTransitionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No usable data points for an estimator (all spectra degenerate).
struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sign test invoked with too few (or no) nonzero paired differences.
struct UndefinedTestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// NaN/Inf detected during integration; carries the failing step index.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, long step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

/// Configuration file problem; carries the offending field or line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string field, int line = 0)
      : std::runtime_error(what + (line > 0 ? " at line " + std::to_string(line) : "") +
                           (field.empty() ? "" : " [" + field + "]")),
        field_(std::move(field)),
        line_(line) {}
  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

}  // namespace softmodes
