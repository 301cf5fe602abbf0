#pragma once

#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace bimat {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Real>
using RealMatrix = Matrix<Real>;

template <typename Real>
using ComplexMatrix = Matrix<Complex<Real>>;

template <typename Real>
using ComplexVector = Vector<Complex<Real>>;

/// Real type underlying a (possibly complex) scalar.
template <typename Scalar>
struct RealOf {
  using type = Scalar;
};
template <typename Real>
struct RealOf<std::complex<Real>> {
  using type = Real;
};
template <typename Scalar>
using RealOf_t = typename RealOf<Scalar>::type;

template <typename Scalar>
inline constexpr bool is_complex_v = false;
template <typename Real>
inline constexpr bool is_complex_v<std::complex<Real>> = true;

enum class TimeDomain { continuous, discrete };

/// Library-wide default tolerances.
template <typename Real>
struct Tolerance {
  /// Relative residual for equation checks.
  static constexpr Real residual = Real(1e-10);
  /// Eigenvalue matching.
  static constexpr Real eigenvalue = Real(1e-8);
  /// Relative singular-value cutoff for rank decisions.
  static constexpr Real rank = Real(1e-8);
  /// Absolute gap below which spectral uniqueness conditions count as violated.
  static constexpr Real spectral_gap = Real(1e-8);
  /// Condition number above which a matrix is treated as singular.
  static Real singular_condition() { return Real(1) / (Real(1e3) * std::numeric_limits<Real>::epsilon()); }
};

}  // namespace bimat
