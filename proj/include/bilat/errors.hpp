#pragma once

#include <stdexcept>
#include <string>

namespace bilat {

// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside its mathematical domain (u ∉ [0,1], τ ∉ (0,1), ...).
struct DomainError : Error {
  using Error::Error;
};

// A positive count multiplies a cell probability that underflowed.
struct NonfiniteLikelihood : Error {
  using Error::Error;
};

// Fisher information (or its Schur complement) is numerically singular.
struct SingularInformation : Error {
  using Error::Error;
};

// No optimizer start reached the gradient tolerance within the iteration cap.
struct NoConvergence : Error {
  using Error::Error;
};

// Simulation spec marked as a Type-I-error study but the rates differ.
struct H0ViolationInSpec : Error {
  using Error::Error;
};

// Parameter-sweep rejection sampling failed too many consecutive proposals.
struct SamplingExhausted : Error {
  using Error::Error;
};

// Malformed input file; message carries the offending line.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace bilat
