#pragma once

#include <stdexcept>
#include <string>

namespace nsch {

/// Malformed or inconsistent configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model parameters violate a structural assumption (bounds, coercivity, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A time step could not be completed (Krylov stall, NaN). Carries the last
/// residual so the driver can decide whether to retry with a smaller dt.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nsch
