#pragma once

#include <stdexcept>
#include <string>

namespace covspec {

// Base class for all library failures so callers can catch one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInput : Error {
  using Error::Error;
};

// Fixed-point solver ran out of iterations even after damping.
struct NonConvergence : Error {
  int iterations;
  double last_residual;
  NonConvergence(int iters, double resid, const std::string& where)
      : Error(where + ": no convergence after " + std::to_string(iters) +
              " iterations, residual " + std::to_string(resid)),
        iterations(iters),
        last_residual(resid) {}
};

struct PoleError : Error {
  using Error::Error;
};

struct NearSingular : Error {
  using Error::Error;
};

struct CoincidentPoints : Error {
  using Error::Error;
};

struct ContourOverlap : Error {
  using Error::Error;
};

struct QuadratureDiverged : Error {
  using Error::Error;
};

struct LogDomain : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct SingularMatrix : Error {
  using Error::Error;
};

struct Degenerate : Error {
  using Error::Error;
};

struct InsufficientData : Error {
  using Error::Error;
};

}  // namespace covspec
