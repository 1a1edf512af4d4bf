#pragma once

#include <stdexcept>
#include <string>

namespace pathlp {

// Base class of every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input validation: bad files, bad shapes, bad parameters.
struct ParseError : Error {
  using Error::Error;
};
struct RankDeficient : Error {
  using Error::Error;
};
struct InfeasibleInput : Error {
  using Error::Error;
};
struct PreconditionViolation : Error {
  using Error::Error;
};

// Numerical failures.
struct NotPositiveDefinite : Error {
  using Error::Error;
};
struct SingularUpdate : Error {
  using Error::Error;
};
struct NoConvergence : Error {
  using Error::Error;
};
struct InvariantViolation : Error {
  using Error::Error;
};
struct OracleContractViolation : Error {
  using Error::Error;
};
struct OverflowError : Error {
  using Error::Error;
};
struct ExtractionFailure : Error {
  using Error::Error;
};

// Vertex rounding failures.
struct RoundingFailure : Error {
  using Error::Error;
};

}  // namespace pathlp
