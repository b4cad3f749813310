#pragma once

#include <stdexcept>

namespace phonoq {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad configuration or data that fails a documented invariant.
struct ValidationError : Error {
  using Error::Error;
};

// An operation would push amplitude past the retained Fock levels.
struct TruncationError : Error {
  using Error::Error;
};

struct SpaceMismatch : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct ZeroAmplitude : Error {
  using Error::Error;
};

// Lindblad integrator step produced a per-step trace defect above tolerance.
struct StepSizeError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace phonoq
