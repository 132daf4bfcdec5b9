// SPDX-License-Identifier: Apache-2.0

#ifndef FLMOR_ERRORS_HPP
#define FLMOR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace flmor {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Malformed input file (carries file name and line when known).
class ParseError : public Error {
public:
  using Error::Error;
};

// Inconsistent dimensions between blocks or operands.
class StructureError : public Error {
public:
  using Error::Error;
};

// A domain invariant failed (singular E, unstable pencil, bad band, ...).
class ValidationError : public Error {
public:
  using Error::Error;
};

// A factorization or linear solve failed.
class SolverError : public Error {
public:
  using Error::Error;
};

// A computed quantity missed its accuracy target.
class AccuracyError : public Error {
public:
  explicit AccuracyError(const std::string &msg, double achieved)
      : Error(msg), achieved_residual(achieved) {}
  double achieved_residual;
};

// Principal matrix logarithm undefined: eigenvalue on the closed negative
// real axis.
class BranchCutError : public Error {
public:
  using Error::Error;
};

// Biorthonormalization breakdown; carries a condition estimate so the
// caller can decide to restart.
class BreakdownError : public Error {
public:
  explicit BreakdownError(const std::string &msg, double cond)
      : Error(msg), condition_estimate(cond) {}
  double condition_estimate;
};

// A size cap was exceeded (dense formation, oracle, elimination).
class CapExceededError : public Error {
public:
  using Error::Error;
};

} // namespace flmor

#endif
