#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dwreg {

// Base of every error raised by the library. Argument errors that indicate
// programming mistakes (bad tau, invalid parameters) use std::invalid_argument.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problems with input data: ingestion failures, rank-deficient designs,
// malformed serialized fits.
class DataError : public Error {
 public:
  using Error::Error;
};

// Numerical failures: non-convergence, boundary optima, underflowing
// likelihoods, truncated sums that did not converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, std::size_t iterations)
      : NumericalError(what + " (after " + std::to_string(iterations) + " iterations)"),
        iterations_(iterations) {}

  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

// The likelihood is maximized on the boundary of the parameter space, so no
// interior MLE exists (e.g. an all-zero sample, or NB with k -> infinity).
class BoundaryError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Some observation has a probability that underflows to zero.
class DegenerateLikelihoodError : public NumericalError {
 public:
  DegenerateLikelihoodError(std::size_t index, std::int64_t y)
      : NumericalError("degenerate likelihood: probability of observation " +
                       std::to_string(index) + " (y=" + std::to_string(y) +
                       ") underflows to zero"),
        index_(index),
        y_(y) {}

  std::size_t index() const noexcept { return index_; }
  std::int64_t y() const noexcept { return y_; }

 private:
  std::size_t index_;
  std::int64_t y_;
};

}  // namespace dwreg
