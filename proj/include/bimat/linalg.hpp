#pragma once

// Dense kernels shared by the bimatrix algebra and the solvers. Everything
// here works on plain Eigen matrices; nothing knows about bimatrices.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "bimat/errors.hpp"
#include "bimat/types.hpp"

namespace bimat {

inline std::string shape_string(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (m.rows() != m.cols())
    throw DimensionError(std::string(what) + ": expected a square matrix, got " + shape_string(m.rows(), m.cols()));
}

/// Eigenvalues of a dense real or complex matrix.
template <typename Scalar>
std::vector<Complex<RealOf_t<Scalar>>> eigenvalues(const Matrix<Scalar>& m) {
  using Real = RealOf_t<Scalar>;
  require_square(m, "eigenvalues");
  std::vector<Complex<Real>> out;
  if (m.rows() == 0) return out;
  if constexpr (is_complex_v<Scalar>) {
    Eigen::ComplexEigenSolver<Matrix<Scalar>> es(m, false);
    if (es.info() != Eigen::Success) throw NumericError("eigenvalues: complex QR iteration did not converge");
    out.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  } else {
    Eigen::EigenSolver<Matrix<Scalar>> es(m, false);
    if (es.info() != Eigen::Success) throw NumericError("eigenvalues: real QR iteration did not converge");
    out.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  }
  return out;
}

template <typename Scalar>
RealOf_t<Scalar> spectral_radius(const Matrix<Scalar>& m) {
  RealOf_t<Scalar> rho(0);
  for (const auto& l : eigenvalues(m)) rho = std::max(rho, std::abs(l));
  return rho;
}

template <typename Scalar>
RealOf_t<Scalar> spectral_abscissa(const Matrix<Scalar>& m) {
  using Real = RealOf_t<Scalar>;
  Real mu = -std::numeric_limits<Real>::infinity();
  for (const auto& l : eigenvalues(m)) mu = std::max(mu, l.real());
  return mu;
}

template <typename Scalar>
Vector<RealOf_t<Scalar>> singular_values(const Matrix<Scalar>& m) {
  if (m.size() == 0) return {};
  return Eigen::JacobiSVD<Matrix<Scalar>>(m).singularValues();
}

/// Number of singular values above `rel_tol` times the largest.
template <typename Scalar>
Eigen::Index numerical_rank(const Matrix<Scalar>& m, RealOf_t<Scalar> rel_tol) {
  const auto sv = singular_values(m);
  if (sv.size() == 0 || sv(0) == 0) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++r;
  return r;
}

/// 2-norm condition number; +inf for exactly singular input.
template <typename Scalar>
RealOf_t<Scalar> condition_number(const Matrix<Scalar>& m) {
  using Real = RealOf_t<Scalar>;
  const auto sv = singular_values(m);
  if (sv.size() == 0) return Real(1);
  const Real smin = sv(sv.size() - 1);
  if (smin == Real(0)) return std::numeric_limits<Real>::infinity();
  return sv(0) / smin;
}

/// Monic characteristic polynomial det(sI - M), coefficients lowest degree first.
///
/// Reduces to Hessenberg form and runs La Budde's recurrence on the leading
/// principal submatrices, so it never calls an eigensolver.
template <typename Scalar>
Vector<Scalar> characteristic_polynomial(const Matrix<Scalar>& m) {
  require_square(m, "characteristic_polynomial");
  const Eigen::Index n = m.rows();
  std::vector<Vector<Scalar>> p(n + 1);
  p[0] = Vector<Scalar>::Ones(1);
  if (n == 0) return p[0];
  const Matrix<Scalar> h = Eigen::HessenbergDecomposition<Matrix<Scalar>>(m).matrixH();
  for (Eigen::Index i = 1; i <= n; ++i) {
    // (s - h_ii) p_{i-1}
    Vector<Scalar> next = Vector<Scalar>::Zero(i + 1);
    next.tail(i) += p[i - 1];
    next.head(i) -= h(i - 1, i - 1) * p[i - 1];
    Scalar beta_prod(1);
    for (Eigen::Index k = 1; k < i; ++k) {
      beta_prod *= h(i - k, i - k - 1);
      const Scalar coeff = h(i - k - 1, i - 1) * beta_prod;
      next.head(p[i - k - 1].size()) -= coeff * p[i - k - 1];
    }
    p[i] = std::move(next);
  }
  return p[n];
}

/// Evaluate a polynomial with scalar coefficients at a square matrix (Horner).
template <typename Scalar, typename CoeffScalar>
Matrix<Scalar> polynomial_at(const Vector<CoeffScalar>& coeffs, const Matrix<Scalar>& m) {
  require_square(m, "polynomial_at");
  Matrix<Scalar> acc = Matrix<Scalar>::Zero(m.rows(), m.cols());
  const Matrix<Scalar> eye = Matrix<Scalar>::Identity(m.rows(), m.cols());
  for (Eigen::Index k = coeffs.size() - 1; k >= 0; --k) acc = acc * m + Scalar(coeffs(k)) * eye;
  return acc;
}

/// Solves A X - X B = C by complex Schur reduction of both coefficients.
///
/// Throws NoUniqueSolutionError when a diagonal pair of the triangular
/// factors coincides within `gap`.
template <typename Scalar>
Matrix<Scalar> solve_sylvester_schur(const Matrix<Scalar>& a, const Matrix<Scalar>& b, const Matrix<Scalar>& c,
                                     RealOf_t<Scalar> gap = Tolerance<RealOf_t<Scalar>>::spectral_gap) {
  using Real = RealOf_t<Scalar>;
  using C = Complex<Real>;
  using CM = Matrix<C>;
  require_square(a, "solve_sylvester_schur (A)");
  require_square(b, "solve_sylvester_schur (B)");
  if (c.rows() != a.rows() || c.cols() != b.rows())
    throw DimensionError("solve_sylvester_schur: C is " + shape_string(c.rows(), c.cols()) + ", expected " +
                         shape_string(a.rows(), b.rows()));
  const CM ac = a.template cast<C>();
  const CM bc = b.template cast<C>();
  Eigen::ComplexSchur<CM> sa(ac), sb(bc);
  if (sa.info() != Eigen::Success || sb.info() != Eigen::Success)
    throw NumericError("solve_sylvester_schur: Schur decomposition did not converge");
  const CM& t = sa.matrixT();
  const CM& u = sa.matrixU();
  const CM& s = sb.matrixT();
  const CM& v = sb.matrixU();
  const CM rhs = u.adjoint() * c.template cast<C>() * v;
  CM y(a.rows(), b.rows());
  const CM eye = CM::Identity(a.rows(), a.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    Vector<C> col = rhs.col(j);
    for (Eigen::Index k = 0; k < j; ++k) col += y.col(k) * s(k, j);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (std::abs(t(i, i) - s(j, j)) < gap)
        throw NoUniqueSolutionError("solve_sylvester_schur: coefficient spectra intersect",
                                    static_cast<double>(std::abs(t(i, i) - s(j, j))));
    }
    const CM shifted = t - s(j, j) * eye;
    y.col(j) = shifted.template triangularView<Eigen::Upper>().solve(col);
  }
  const CM x = u * y * v.adjoint();
  if constexpr (is_complex_v<Scalar>) {
    return x;
  } else {
    return x.real();
  }
}

/// Matrix exponential (Pade approximant with scaling and squaring).
template <typename Scalar>
Matrix<Scalar> expm(const Matrix<Scalar>& m) {
  require_square(m, "expm");
  if (m.rows() == 0) return m;
  return m.exp();
}

/// Greedy multiset comparison: repeatedly pairs the globally closest
/// remaining (computed, target) elements. Reports the worst paired distance
/// and whether every pair is within `abs_tol + rel_tol * |target|`.
template <typename Real>
struct MultisetMatch {
  bool matched = false;
  Real max_distance = 0;
};

template <typename Real>
MultisetMatch<Real> match_multisets(const std::vector<Complex<Real>>& computed, const std::vector<Complex<Real>>& target,
                                    Real abs_tol, Real rel_tol) {
  MultisetMatch<Real> out;
  if (computed.size() != target.size()) {
    out.max_distance = std::numeric_limits<Real>::infinity();
    return out;
  }
  const std::size_t n = computed.size();
  std::vector<bool> used_c(n, false), used_t(n, false);
  out.matched = true;
  for (std::size_t step = 0; step < n; ++step) {
    Real best = std::numeric_limits<Real>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (used_c[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (used_t[j]) continue;
        const Real d = std::abs(computed[i] - target[j]);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    used_c[bi] = used_t[bj] = true;
    out.max_distance = std::max(out.max_distance, best);
    if (best > abs_tol + rel_tol * std::abs(target[bj])) out.matched = false;
  }
  return out;
}

/// Worst distance between a multiset and its complex conjugate (0 for spectra of real matrices).
template <typename Real>
Real conjugation_defect(const std::vector<Complex<Real>>& values) {
  std::vector<Complex<Real>> conj(values.size());
  std::transform(values.begin(), values.end(), conj.begin(), [](const Complex<Real>& z) { return std::conj(z); });
  return match_multisets(values, conj, Real(0), Real(0)).max_distance;
}

}  // namespace bimat
