// Exception types shared across the library. The CLI maps these onto exit
// codes: ConfigError -> 2, NumericalError and subclasses -> 3.
#pragma once

#include <stdexcept>
#include <string>

namespace qsdsim {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidDimensionError : NumericalError {
  explicit InvalidDimensionError(const std::string& msg) : NumericalError(msg) {}
};

struct DimensionMismatchError : NumericalError {
  explicit DimensionMismatchError(const std::string& msg) : NumericalError(msg) {}
};

struct HermiticityError : NumericalError {
  explicit HermiticityError(const std::string& msg) : NumericalError(msg) {}
};

// Zero-norm state; usually means the integrator blew up.
struct DegenerateStateError : NumericalError {
  explicit DegenerateStateError(const std::string& msg) : NumericalError(msg) {}
};

struct IntegratorFailure : NumericalError {
  explicit IntegratorFailure(const std::string& msg) : NumericalError(msg) {}
};

// Raised when the truncation health monitor crosses its abort threshold.
struct TruncationError : NumericalError {
  explicit TruncationError(const std::string& msg) : NumericalError(msg) {}
};

struct InvalidDensityMatrixError : NumericalError {
  explicit InvalidDensityMatrixError(const std::string& msg) : NumericalError(msg) {}
};

struct CheckpointError : std::runtime_error {
  explicit CheckpointError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace qsdsim
