#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bimat {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed or out-of-domain input (non-finite entries, asymmetric spectra, singular mass matrix).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Structural defect of the plant or the requested design (uncontrollable pair, forbidden mode).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// The equation has no unique solution (spectral condition violated within tolerance).
class NoUniqueSolutionError : public Error {
 public:
  NoUniqueSolutionError(const std::string& what, double margin) : Error(what), margin_(margin) {}
  double margin() const noexcept { return margin_; }

 private:
  double margin_;
};

/// Linear system is numerically singular; carries the 2-norm condition estimate.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, double condition) : Error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// Iterative kernel failed (eigensolver non-convergence, series did not converge).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A factorization failed its right-coprimeness certification.
class CoprimenessError : public Error {
 public:
  using Error::Error;
};

/// No nonsingular solution X was found within the allowed number of random draws.
class NonsingularSearchError : public Error {
 public:
  NonsingularSearchError(const std::string& what, double best_condition)
      : Error(what), best_condition_(best_condition) {}
  double best_condition() const noexcept { return best_condition_; }

 private:
  double best_condition_;
};

/// Inconsistent non-homogeneous linear system.
class NoSolutionError : public Error {
 public:
  NoSolutionError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace bimat
