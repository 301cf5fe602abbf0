#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bimat/bimatrix.hpp"
#include "bimat/poly.hpp"
#include "bimat/system.hpp"

namespace bimat {

// ---------------------------------------------------------------------------
// Characteristic polynomials

/// Monic polynomial, coefficients lowest degree first.
template <typename Real = double>
struct CharPoly {
  Vector<Real> coefficients;
  Eigen::Index degree() const { return coefficients.size() - 1; }
};

/// Characteristic polynomial of to_real(b), degree 2p.
template <typename Real>
CharPoly<Real> char_poly(const Bimatrix<Real>& b) {
  require_square(b.p1(), "char_poly");
  return {characteristic_polynomial(to_real(b))};
}

// ---------------------------------------------------------------------------
// Shared results

template <typename Real = double>
struct EquationSolution {
  Bimatrix<Real> x;
  Real residual = 0;             // relative residual of the defining equation
  Real margin = 0;               // min |lambda - mu| (Sylvester) or min |lambda mu - 1| (Stein)
  Real prefactor_condition = 0;  // 2-norm condition of the polynomial prefactor (closed forms only)
  std::size_t terms = 0;         // series terms used (series forms only)
};

template <typename Real = double>
struct MatrixSolution {
  ComplexMatrix<Real> x;
  Real residual = 0;
  Real margin = 0;
  Real prefactor_condition = 0;
};

template <typename Real>
Real relative(Real num, Real den) {
  return num / std::max(den, std::numeric_limits<Real>::min());
}

template <typename Real>
Real sylvester_residual(const Bimatrix<Real>& a, const Bimatrix<Real>& f, const Bimatrix<Real>& c,
                        const Bimatrix<Real>& x) {
  const Bimatrix<Real> ax = a * x, xf = x * f;
  return relative(norm(ax - xf - c), norm(ax) + norm(xf) + norm(c));
}

template <typename Real>
Real stein_residual(const Bimatrix<Real>& a, const Bimatrix<Real>& f, const Bimatrix<Real>& c,
                    const Bimatrix<Real>& x) {
  const Bimatrix<Real> axf = a * x * f;
  return relative(norm(x - axf - c), norm(x) + norm(axf) + norm(c));
}

template <typename Real>
Real gsyl_residual(const Bimatrix<Real>& a, const Bimatrix<Real>& b, const Bimatrix<Real>& f, const Bimatrix<Real>& x,
                   const Bimatrix<Real>& y) {
  const Bimatrix<Real> ax = a * x, by = b * y, xf = x * f;
  return relative(norm(ax + by - xf), norm(ax) + norm(by) + norm(xf));
}

namespace detail {

template <typename Real>
void require_conformant(const Bimatrix<Real>& a, const Bimatrix<Real>& f, const Bimatrix<Real>& c, const char* who) {
  require_square(a.p1(), who);
  require_square(f.p1(), who);
  if (c.rows() != a.rows() || c.cols() != f.rows())
    throw DimensionError(std::string(who) + ": C is " + shape_string(c.rows(), c.cols()) + ", expected " +
                         shape_string(a.rows(), f.rows()));
}

template <typename Real>
std::vector<Bimatrix<Real>> powers(const Bimatrix<Real>& b, std::size_t count) {
  std::vector<Bimatrix<Real>> out;
  out.reserve(count + 1);
  out.push_back(Bimatrix<Real>::identity(b.rows()));
  for (std::size_t k = 1; k <= count; ++k) out.push_back(out.back() * b);
  return out;
}

template <typename Scalar>
std::vector<Matrix<Scalar>> powers(const Matrix<Scalar>& m, std::size_t count) {
  std::vector<Matrix<Scalar>> out;
  out.reserve(count + 1);
  out.push_back(Matrix<Scalar>::Identity(m.rows(), m.cols()));
  for (std::size_t k = 1; k <= count; ++k) out.push_back(out.back() * m);
  return out;
}

template <typename Real>
Real min_gap(const std::vector<Complex<Real>>& l, const std::vector<Complex<Real>>& m) {
  Real g = std::numeric_limits<Real>::infinity();
  for (const auto& a : l)
    for (const auto& b : m) g = std::min(g, std::abs(a - b));
  return g;
}

template <typename Real>
Real min_product_gap(const std::vector<Complex<Real>>& l, const std::vector<Complex<Real>>& m) {
  Real g = std::numeric_limits<Real>::infinity();
  for (const auto& a : l)
    for (const auto& b : m) g = std::min(g, std::abs(a * b - Complex<Real>(1)));
  return g;
}

// Factored prefactor P for repeated solves P X = R in the real representation.
template <typename Real>
struct Prefactor {
  Eigen::ColPivHouseholderQR<RealMatrix<Real>> qr;
  Real condition;

  explicit Prefactor(const Bimatrix<Real>& p) : qr(to_real(p)), condition(condition_number(to_real(p))) {}
  Bimatrix<Real> solve(const Bimatrix<Real>& r) const { return from_real(RealMatrix<Real>(qr.solve(to_real(r)))); }
};

// The closed forms amplify rounding by cond(P); one refinement step on the
// residual, through the same linear map, recovers most of it.
template <typename Real, typename Map, typename Residual>
Bimatrix<Real> refined(const Bimatrix<Real>& c, Map map, Residual residual) {
  Bimatrix<Real> x = map(c);
  x += map(residual(x));
  return x;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Sylvester bimatrix equation  {A} X - X {F} = C

enum class SeriesMethod { direct, recursive };

/// D(1..count) with D(k) = sum_{i<k} A^i C F^{k-1-i}, either summed directly
/// or by D(k+1) = A D(k) + C F^k, D(1) = C.
template <typename Real>
std::vector<Bimatrix<Real>> sylvester_d_terms(const Bimatrix<Real>& a, const Bimatrix<Real>& f,
                                              const Bimatrix<Real>& c, std::size_t count, SeriesMethod method) {
  detail::require_conformant(a, f, c, "sylvester_d_terms");
  std::vector<Bimatrix<Real>> d;
  d.reserve(count);
  if (count == 0) return d;
  const auto fp = detail::powers(f, count);
  if (method == SeriesMethod::direct) {
    const auto ap = detail::powers(a, count);
    for (std::size_t k = 1; k <= count; ++k) {
      Bimatrix<Real> acc = Bimatrix<Real>::zero(c.rows(), c.cols());
      for (std::size_t i = 0; i < k; ++i) acc += ap[i] * c * fp[k - 1 - i];
      d.push_back(std::move(acc));
    }
  } else {
    d.push_back(c);
    for (std::size_t k = 1; k < count; ++k) d.push_back(a * d.back() + c * fp[k]);
  }
  return d;
}

/// Unique solution of {A} X - X {F} = C from beta(A) X = sum_k beta_k D(k),
/// beta the characteristic polynomial of F.
template <typename Real>
EquationSolution<Real> solve_sylvester(const Bimatrix<Real>& a, const Bimatrix<Real>& f, const Bimatrix<Real>& c,
                                       SeriesMethod method = SeriesMethod::recursive,
                                       Real gap_tol = Tolerance<Real>::spectral_gap) {
  detail::require_conformant(a, f, c, "solve_sylvester");
  EquationSolution<Real> out;
  out.margin = detail::min_gap(spectrum(a).eigenvalues, spectrum(f).eigenvalues);
  if (out.margin < gap_tol)
    throw NoUniqueSolutionError("solve_sylvester: spectra of A and F intersect", static_cast<double>(out.margin));
  const Vector<Real> beta = char_poly(f).coefficients;
  const std::size_t q = static_cast<std::size_t>(beta.size() - 1);
  const auto ap = detail::powers(a, q);
  Bimatrix<Real> pre = Bimatrix<Real>::zero(a.rows(), a.cols());
  for (std::size_t k = 0; k <= q; ++k) pre += beta(k) * ap[k];
  const detail::Prefactor<Real> pf(pre);
  auto map = [&](const Bimatrix<Real>& rhs_c) {
    const auto d = sylvester_d_terms(a, f, rhs_c, q, method);
    Bimatrix<Real> rhs = Bimatrix<Real>::zero(c.rows(), c.cols());
    for (std::size_t k = 1; k <= q; ++k) rhs += beta(k) * d[k - 1];
    return pf.solve(rhs);
  };
  out.x = detail::refined(c, map, [&](const Bimatrix<Real>& x) { return Bimatrix<Real>(c - (a * x - x * f)); });
  out.prefactor_condition = pf.condition;
  out.residual = sylvester_residual(a, f, c, out.x);
  return out;
}

// ---------------------------------------------------------------------------
// Stein bimatrix equation  X = {A} X {F} + C

/// D(1..count) with D(k) = sum_{i<k} A^i C F^i, either summed directly or by
/// D(k+1) = A D(k) F + C, D(1) = C.
template <typename Real>
std::vector<Bimatrix<Real>> stein_d_terms(const Bimatrix<Real>& a, const Bimatrix<Real>& f, const Bimatrix<Real>& c,
                                          std::size_t count, SeriesMethod method) {
  detail::require_conformant(a, f, c, "stein_d_terms");
  std::vector<Bimatrix<Real>> d;
  d.reserve(count);
  if (count == 0) return d;
  if (method == SeriesMethod::direct) {
    const auto ap = detail::powers(a, count);
    const auto fp = detail::powers(f, count);
    for (std::size_t k = 1; k <= count; ++k) {
      Bimatrix<Real> acc = Bimatrix<Real>::zero(c.rows(), c.cols());
      for (std::size_t i = 0; i < k; ++i) acc += ap[i] * c * fp[i];
      d.push_back(std::move(acc));
    }
  } else {
    d.push_back(c);
    for (std::size_t k = 1; k < count; ++k) d.push_back(a * d.back() * f + c);
  }
  return d;
}

/// Unique solution of X = {A} X {F} + C from
/// (sum_k beta_k A^{q-k}) X = sum_{k>=1} beta_k A^{q-k} D(k).
template <typename Real>
EquationSolution<Real> solve_stein(const Bimatrix<Real>& a, const Bimatrix<Real>& f, const Bimatrix<Real>& c,
                                   SeriesMethod method = SeriesMethod::recursive,
                                   Real gap_tol = Tolerance<Real>::spectral_gap) {
  detail::require_conformant(a, f, c, "solve_stein");
  EquationSolution<Real> out;
  out.margin = detail::min_product_gap(spectrum(a).eigenvalues, spectrum(f).eigenvalues);
  if (out.margin < gap_tol)
    throw NoUniqueSolutionError("solve_stein: some eigenvalue product of A and F equals 1",
                                static_cast<double>(out.margin));
  const Vector<Real> beta = char_poly(f).coefficients;
  const std::size_t q = static_cast<std::size_t>(beta.size() - 1);
  const auto ap = detail::powers(a, q);
  Bimatrix<Real> pre = Bimatrix<Real>::zero(a.rows(), a.cols());
  for (std::size_t k = 0; k <= q; ++k) pre += beta(k) * ap[q - k];
  const detail::Prefactor<Real> pf(pre);
  auto map = [&](const Bimatrix<Real>& rhs_c) {
    const auto d = stein_d_terms(a, f, rhs_c, q, method);
    Bimatrix<Real> rhs = Bimatrix<Real>::zero(c.rows(), c.cols());
    for (std::size_t k = 1; k <= q; ++k) rhs += beta(k) * (ap[q - k] * d[k - 1]);
    return pf.solve(rhs);
  };
  out.x = detail::refined(c, map, [&](const Bimatrix<Real>& x) { return Bimatrix<Real>(c - (x - a * x * f)); });
  out.prefactor_condition = pf.condition;
  out.residual = stein_residual(a, f, c, out.x);
  return out;
}

/// sum_{k>=0} A^k C F^k, stopped once a term falls below 1e-14 of the sum
/// twice in a row.
template <typename Real>
EquationSolution<Real> stein_series(const Bimatrix<Real>& a, const Bimatrix<Real>& f, const Bimatrix<Real>& c,
                                    Real rel_stop = Real(1e-14)) {
  detail::require_conformant(a, f, c, "stein_series");
  const Real rho = spectrum(a).rho * spectrum(f).rho;
  if (!(rho < Real(1)))
    throw PreconditionError("stein_series: requires rho(A) rho(F) < 1, got " + std::to_string(static_cast<double>(rho)));
  using std::log;
  const Real needed = rho > Real(0) ? log(Real(1e-17)) / log(rho) : Real(1);
  const std::size_t cap = static_cast<std::size_t>(std::min<Real>(Real(10) * needed + Real(1000), Real(1e6)));
  EquationSolution<Real> out;
  Bimatrix<Real> term = c;
  Bimatrix<Real> sum = c;
  int quiet = 0;
  std::size_t k = 1;
  for (; k <= cap; ++k) {
    term = a * term * f;
    sum += term;
    if (norm(term) <= rel_stop * norm(sum)) {
      if (++quiet == 2) break;
    } else {
      quiet = 0;
    }
  }
  if (k > cap) throw NumericError("stein_series: no convergence after " + std::to_string(cap) + " terms");
  out.x = std::move(sum);
  out.terms = k + 1;
  out.margin = Real(1) - rho;
  out.residual = stein_residual(a, f, c, out.x);
  return out;
}

// ---------------------------------------------------------------------------
// Lyapunov bimatrix equations

/// {A}^H P + P {A} = -Q for stable A, via a Schur-based solve on the real
/// representation.
template <typename Real>
EquationSolution<Real> solve_lyapunov_ct(const Bimatrix<Real>& a, const Bimatrix<Real>& q) {
  detail::require_conformant(a, a, q, "solve_lyapunov_ct");
  const Real mu = spectrum(a).mu;
  if (!(mu < Real(0)))
    throw PreconditionError("solve_lyapunov_ct: A is not Hurwitz (spectral abscissa " +
                            std::to_string(static_cast<double>(mu)) + ")");
  const RealMatrix<Real> ar = to_real(a);
  const RealMatrix<Real> pr =
      solve_sylvester_schur<Real>(ar.transpose(), RealMatrix<Real>(-ar), RealMatrix<Real>(-to_real(q)));
  EquationSolution<Real> out;
  out.x = from_real(pr);
  out.margin = -Real(2) * mu;
  const Bimatrix<Real> ah = adjoint(a);
  const Bimatrix<Real> l = ah * out.x, r = out.x * a;
  out.residual = relative(norm(l + r + q), norm(l) + norm(r) + norm(q));
  return out;
}

/// P = {A}^H P {A} + Q for Schur-stable A, by the convergent series.
template <typename Real>
EquationSolution<Real> solve_lyapunov_dt(const Bimatrix<Real>& a, const Bimatrix<Real>& q) {
  detail::require_conformant(a, a, q, "solve_lyapunov_dt");
  const Real rho = spectrum(a).rho;
  if (!(rho < Real(1)))
    throw PreconditionError("solve_lyapunov_dt: A is not Schur stable (spectral radius " +
                            std::to_string(static_cast<double>(rho)) + ")");
  return stein_series(adjoint(a), a, q);
}

// ---------------------------------------------------------------------------
// Conjugate matrix equations

namespace detail {

// Ordinary Sylvester A X - X B = C in closed form: gamma(A) X = sum_k gamma_k D(k).
template <typename Real>
MatrixSolution<Real> sylvester_closed_form(const ComplexMatrix<Real>& a, const ComplexMatrix<Real>& b,
                                           const ComplexMatrix<Real>& c, Real gap_tol) {
  using CM = ComplexMatrix<Real>;
  MatrixSolution<Real> out;
  out.margin = min_gap(eigenvalues(a), eigenvalues(b));
  if (out.margin < gap_tol) throw NoUniqueSolutionError("spectra intersect", static_cast<double>(out.margin));
  const Vector<Complex<Real>> g = characteristic_polynomial(b);
  const std::size_t p = static_cast<std::size_t>(g.size() - 1);
  const auto ap = powers(a, p);
  CM pre = CM::Zero(a.rows(), a.cols());
  CM rhs = CM::Zero(c.rows(), c.cols());
  CM d = CM::Zero(c.rows(), c.cols());
  CM bk = CM::Identity(b.rows(), b.cols());
  for (std::size_t k = 0; k <= p; ++k) {
    pre += g(k) * ap[k];
    if (k >= 1) {
      d = a * d + c * bk;  // D(k)
      bk = bk * b;
      rhs += g(k) * d;
    }
  }
  out.prefactor_condition = condition_number(pre);
  out.x = pre.colPivHouseholderQr().solve(rhs);
  return out;
}

// Ordinary Stein X = A X B + C in closed form.
template <typename Real>
MatrixSolution<Real> stein_closed_form(const ComplexMatrix<Real>& a, const ComplexMatrix<Real>& b,
                                       const ComplexMatrix<Real>& c, Real gap_tol) {
  using CM = ComplexMatrix<Real>;
  MatrixSolution<Real> out;
  out.margin = min_product_gap(eigenvalues(a), eigenvalues(b));
  if (out.margin < gap_tol) throw NoUniqueSolutionError("eigenvalue product equals 1", static_cast<double>(out.margin));
  const Vector<Complex<Real>> g = characteristic_polynomial(b);
  const std::size_t p = static_cast<std::size_t>(g.size() - 1);
  const auto ap = powers(a, p);
  CM pre = CM::Zero(a.rows(), a.cols());
  CM rhs = CM::Zero(c.rows(), c.cols());
  CM d = CM::Zero(c.rows(), c.cols());
  for (std::size_t k = 0; k <= p; ++k) {
    pre += g(k) * ap[p - k];
    if (k >= 1) {
      d = a * d * b + c;  // D(k)
      rhs += g(k) * (ap[p - k] * d);
    }
  }
  out.prefactor_condition = condition_number(pre);
  out.x = pre.colPivHouseholderQr().solve(rhs);
  return out;
}

template <typename Real>
void require_conj_shapes(const ComplexMatrix<Real>& a2, const ComplexMatrix<Real>& f2, const ComplexMatrix<Real>& c2,
                         const char* who) {
  require_square(a2, who);
  require_square(f2, who);
  if (c2.rows() != a2.rows() || c2.cols() != f2.rows())
    throw DimensionError(std::string(who) + ": C2 is " + shape_string(c2.rows(), c2.cols()) + ", expected " +
                         shape_string(a2.rows(), f2.rows()));
}

}  // namespace detail

/// conj(a2) X - conj(X) f2 = c2.
///
/// Reduced to the ordinary Sylvester equation
/// (a2 conj(a2)) X - X (conj(f2) f2) = a2 c2 + conj(c2) f2.
template <typename Real>
MatrixSolution<Real> solve_conjugate_sylvester(const ComplexMatrix<Real>& a2, const ComplexMatrix<Real>& f2,
                                               const ComplexMatrix<Real>& c2,
                                               Real gap_tol = Tolerance<Real>::spectral_gap) {
  detail::require_conj_shapes(a2, f2, c2, "solve_conjugate_sylvester");
  const ComplexMatrix<Real> ap = a2 * a2.conjugate();
  const ComplexMatrix<Real> bp = f2.conjugate() * f2;
  const ComplexMatrix<Real> cp = a2 * c2 + c2.conjugate() * f2;
  MatrixSolution<Real> out;
  try {
    out = detail::sylvester_closed_form<Real>(ap, bp, cp, gap_tol);
  } catch (const NoUniqueSolutionError& e) {
    throw NoUniqueSolutionError("solve_conjugate_sylvester: spectra of a2 conj(a2) and conj(f2) f2 intersect",
                                e.margin());
  }
  const ComplexMatrix<Real> l = a2.conjugate() * out.x, r = out.x.conjugate() * f2;
  out.residual = relative<Real>((l - r - c2).norm(), l.norm() + r.norm() + c2.norm());
  return out;
}

/// X = a2 conj(X) f2 + c2.
///
/// Reduced to the ordinary Stein equation
/// X = (a2 conj(a2)) X (conj(f2) f2) + c2 + a2 conj(c2) f2.
template <typename Real>
MatrixSolution<Real> solve_conjugate_stein(const ComplexMatrix<Real>& a2, const ComplexMatrix<Real>& f2,
                                           const ComplexMatrix<Real>& c2,
                                           Real gap_tol = Tolerance<Real>::spectral_gap) {
  detail::require_conj_shapes(a2, f2, c2, "solve_conjugate_stein");
  const ComplexMatrix<Real> ap = a2 * a2.conjugate();
  const ComplexMatrix<Real> bp = f2.conjugate() * f2;
  const ComplexMatrix<Real> cp = c2 + a2 * c2.conjugate() * f2;
  MatrixSolution<Real> out;
  try {
    out = detail::stein_closed_form<Real>(ap, bp, cp, gap_tol);
  } catch (const NoUniqueSolutionError& e) {
    throw NoUniqueSolutionError("solve_conjugate_stein: eigenvalue product condition violated", e.margin());
  }
  const ComplexMatrix<Real> t = a2 * out.x.conjugate() * f2;
  out.residual = relative<Real>((out.x - t - c2).norm(), out.x.norm() + t.norm() + c2.norm());
  return out;
}

/// sum_k (a2 conj(a2))^k (c2 + a2 conj(c2) f2) (conj(f2) f2)^k.
template <typename Real>
MatrixSolution<Real> conjugate_stein_series(const ComplexMatrix<Real>& a2, const ComplexMatrix<Real>& f2,
                                            const ComplexMatrix<Real>& c2, Real rel_stop = Real(1e-14)) {
  detail::require_conj_shapes(a2, f2, c2, "conjugate_stein_series");
  const ComplexMatrix<Real> ap = a2 * a2.conjugate();
  const ComplexMatrix<Real> bp = f2.conjugate() * f2;
  const Real rho = spectral_radius(ap) * spectral_radius(bp);
  if (!(rho < Real(1))) throw PreconditionError("conjugate_stein_series: requires rho(a2 conj a2) rho(conj f2 f2) < 1");
  MatrixSolution<Real> out;
  ComplexMatrix<Real> term = c2 + a2 * c2.conjugate() * f2;
  ComplexMatrix<Real> sum = term;
  int quiet = 0;
  for (std::size_t k = 1; k < 1000000; ++k) {
    term = ap * term * bp;
    sum += term;
    if (term.norm() <= rel_stop * sum.norm()) {
      if (++quiet == 2) break;
    } else {
      quiet = 0;
    }
  }
  out.x = sum;
  out.margin = Real(1) - rho;
  const ComplexMatrix<Real> t = a2 * out.x.conjugate() * f2;
  out.residual = relative<Real>((out.x - t - c2).norm(), out.x.norm() + t.norm() + c2.norm());
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force oracle: every equation here is linear over the reals in the
// 4np real components of X.

enum class OracleKind { gsyl_homog, sylvester, stein };

template <typename Real = double>
struct OracleProblem {
  OracleKind kind = OracleKind::sylvester;
  Bimatrix<Real> a;  // n x n
  Bimatrix<Real> b;  // n x m (gsyl_homog only)
  Bimatrix<Real> f;  // p x p
  Bimatrix<Real> c;  // n x p (sylvester, stein)
};

template <typename Real = double>
struct OracleResult {
  bool unique = false;
  Bimatrix<Real> x;           // unique or least-squares solution (zero for gsyl_homog)
  Bimatrix<Real> y;           // gsyl_homog only
  Eigen::Index rank = 0;      // rank of the real operator
  Eigen::Index nullspace_dim = 0;
  RealMatrix<Real> nullspace;  // orthonormal basis, columns in oracle_vec layout
  Real residual = 0;
};

/// [vec Re P1; vec Im P1; vec Re P2; vec Im P2].
template <typename Real>
Vector<Real> oracle_vec(const Bimatrix<Real>& b) {
  const Eigen::Index s = b.rows() * b.cols();
  Vector<Real> v(4 * s);
  const ComplexMatrix<Real>& p1 = b.p1();
  const ComplexMatrix<Real>& p2 = b.p2();
  for (Eigen::Index j = 0, t = 0; j < b.cols(); ++j)
    for (Eigen::Index i = 0; i < b.rows(); ++i, ++t) {
      v(t) = p1(i, j).real();
      v(s + t) = p1(i, j).imag();
      v(2 * s + t) = p2(i, j).real();
      v(3 * s + t) = p2(i, j).imag();
    }
  return v;
}

template <typename Real>
Bimatrix<Real> oracle_unvec(const Vector<Real>& v, Eigen::Index rows, Eigen::Index cols) {
  const Eigen::Index s = rows * cols;
  if (v.size() != 4 * s) throw DimensionError("oracle_unvec: length mismatch");
  ComplexMatrix<Real> p1(rows, cols), p2(rows, cols);
  for (Eigen::Index j = 0, t = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i, ++t) {
      p1(i, j) = Complex<Real>(v(t), v(s + t));
      p2(i, j) = Complex<Real>(v(2 * s + t), v(3 * s + t));
    }
  return Bimatrix<Real>(std::move(p1), std::move(p2));
}

template <typename Real>
OracleResult<Real> oracle_solve(const OracleProblem<Real>& prob) {
  const Eigen::Index n = prob.a.rows(), p = prob.f.rows();
  require_square(prob.a.p1(), "oracle_solve (A)");
  require_square(prob.f.p1(), "oracle_solve (F)");
  const bool homog = prob.kind == OracleKind::gsyl_homog;
  const Eigen::Index m = homog ? prob.b.cols() : 0;
  if (homog && prob.b.rows() != n) throw DimensionError("oracle_solve: B has wrong row count");
  if (!homog && (prob.c.rows() != n || prob.c.cols() != p))
    throw DimensionError("oracle_solve: C is " + shape_string(prob.c.rows(), prob.c.cols()) + ", expected " +
                         shape_string(n, p));

  const Eigen::Index nx = 4 * n * p, ny = 4 * m * p, rows = 4 * n * p;
  RealMatrix<Real> op(rows, nx + ny);
  auto apply_op = [&](const Bimatrix<Real>& x, const Bimatrix<Real>& y) -> Bimatrix<Real> {
    switch (prob.kind) {
      case OracleKind::gsyl_homog:
        return prob.a * x + prob.b * y - x * prob.f;
      case OracleKind::stein:
        return x - prob.a * x * prob.f;
      default:
        return prob.a * x - x * prob.f;
    }
  };
  const Bimatrix<Real> zx = Bimatrix<Real>::zero(n, p), zy = Bimatrix<Real>::zero(m, p);
  for (Eigen::Index k = 0; k < nx + ny; ++k) {
    Vector<Real> e = Vector<Real>::Zero(nx + ny);
    e(k) = Real(1);
    const Bimatrix<Real> x = k < nx ? oracle_unvec<Real>(e.head(nx), n, p) : zx;
    const Bimatrix<Real> y = k < nx ? zy : oracle_unvec<Real>(e.tail(ny), m, p);
    op.col(k) = oracle_vec(apply_op(x, y));
  }

  OracleResult<Real> out;
  Eigen::ColPivHouseholderQR<RealMatrix<Real>> qr(op);
  qr.setThreshold(Real(1e-10));
  out.rank = qr.rank();
  out.nullspace_dim = (nx + ny) - out.rank;
  if (out.nullspace_dim > 0) {
    Eigen::JacobiSVD<RealMatrix<Real>> svd(op, Eigen::ComputeFullV);
    out.nullspace = svd.matrixV().rightCols(out.nullspace_dim);
  } else {
    out.nullspace = RealMatrix<Real>(nx + ny, 0);
  }
  out.unique = out.nullspace_dim == 0;

  if (homog) {
    out.x = zx;
    out.y = zy;
    return out;
  }
  const Vector<Real> rhs = oracle_vec(prob.c);
  Vector<Real> sol;
  if (out.unique) {
    sol = qr.solve(rhs);
  } else {
    sol = op.completeOrthogonalDecomposition().solve(rhs);
  }
  out.residual = relative<Real>((op * sol - rhs).norm(), rhs.norm());
  if (out.residual > Real(1e-8))
    throw NoSolutionError("oracle_solve: inconsistent system", static_cast<double>(out.residual));
  out.x = oracle_unvec<Real>(sol, n, p);
  return out;
}

// ---------------------------------------------------------------------------
// Generalized Sylvester bimatrix equation  {A} X + {B} Y = X {F}

template <typename Real = double>
struct GSylSolution {
  Bimatrix<Real> x;
  Bimatrix<Real> y;
  ComplexMatrix<Real> z1;
  ComplexMatrix<Real> z2;
  bool nonsingular_x = false;
  Real condition_x = 0;  // condition of to_real(X) when square
  Real residual = 0;
};

namespace detail {

template <typename Real>
void finish(GSylSolution<Real>& s, const Bimatrix<Real>& a, const Bimatrix<Real>& b, const Bimatrix<Real>& f) {
  s.residual = gsyl_residual(a, b, f, s.x, s.y);
  if (s.x.is_square()) {
    s.condition_x = condition_number(to_real(s.x));
    s.nonsingular_x = s.condition_x <= Tolerance<Real>::singular_condition();
  }
}

template <typename Real>
void require_gsyl_shapes(const SystemModel<Real>& sys, const Bimatrix<Real>& f, const ComplexMatrix<Real>& z1,
                         const ComplexMatrix<Real>& z2, const char* who) {
  require_square(f.p1(), who);
  const Eigen::Index m = sys.inputs(), p = f.rows();
  if (z1.rows() != m || z1.cols() != p || z2.rows() != m || z2.cols() != p)
    throw DimensionError(std::string(who) + ": Z must be " + shape_string(m, p));
}

// sum_i C_i W F^i by Horner.
template <typename Real>
Bimatrix<Real> horner(const std::vector<Bimatrix<Real>>& coeffs, const Bimatrix<Real>& w, const Bimatrix<Real>& f) {
  Bimatrix<Real> acc = Bimatrix<Real>::zero(coeffs.front().rows(), f.cols());
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * f + (*it) * w;
  return acc;
}

}  // namespace detail

/// X = sum N_i Z F^i, Y = sum D_i Z F^i for any certified factorization.
template <typename Real>
GSylSolution<Real> solve_gsyl(const SystemModel<Real>& sys, const Bimatrix<Real>& f,
                              const CoprimeFactorization<Real>& cf, const ComplexMatrix<Real>& z1,
                              const ComplexMatrix<Real>& z2) {
  if (!cf.certified) throw PreconditionError("solve_gsyl: factorization is not certified right-coprime");
  detail::require_gsyl_shapes(sys, f, z1, z2, "solve_gsyl");
  if (cf.n.rows() != sys.states() || cf.n.cols() != sys.inputs())
    throw DimensionError("solve_gsyl: factorization does not match the system");
  const Bimatrix<Real> z(z1, z2);
  GSylSolution<Real> s{detail::horner(cf.n.coeffs, z, f), detail::horner(cf.d.coeffs, z, f), z1, z2};
  detail::finish(s, sys.a, sys.b, f);
  return s;
}

// ---------------------------------------------------------------------------
// Decoupled form: F = diag(F11, F22) in the real representation

template <typename Real = double>
struct DecoupledSolution {
  ComplexMatrix<Real> x_plus, y_plus, x_minus, y_minus;
  Real residual_plus = 0;   // first decoupled equation
  Real residual_minus = 0;  // second decoupled equation
  bool simplified = false;  // real Z+- formula was used
  GSylSolution<Real> assembled;
};

enum class DecoupledFormula { automatic, general, simplified };

namespace detail {

// sum_i (P_i Re Z + j Q_i Im Z) G^i; with `simplified`, sum_i P_i Z G^i.
template <typename Real>
ComplexMatrix<Real> decoupled_sum(const PolyMatrix<Complex<Real>>& p, const PolyMatrix<Complex<Real>>& q,
                                  const ComplexMatrix<Real>& z, const RealMatrix<Real>& g, bool simplified) {
  using CM = ComplexMatrix<Real>;
  const CM gc = g.template cast<Complex<Real>>();
  const CM zr = z.real().template cast<Complex<Real>>();
  const CM zi = z.imag().template cast<Complex<Real>>();
  const Complex<Real> j(0, 1);
  CM acc = CM::Zero(p.rows(), g.cols());
  for (Eigen::Index i = p.degree(); i >= 0; --i) {
    const CM term = simplified ? CM(p.coeffs[i] * z) : CM(p.coeffs[i] * zr + j * (q.coeffs[i] * zi));
    acc = acc * gc + term;
  }
  return acc;
}

template <typename Real>
Real decoupled_residual(const SystemModel<Real>& sys, const ComplexMatrix<Real>& x, const ComplexMatrix<Real>& y,
                        const RealMatrix<Real>& g, Real sign) {
  const auto& a1 = sys.a.p1();
  const auto& a2 = sys.a.p2();
  const auto& b1 = sys.b.p1();
  const auto& b2 = sys.b.p2();
  const ComplexMatrix<Real> l1 = a1 * x + sign * (a2.conjugate() * x.conjugate());
  const ComplexMatrix<Real> l2 = b1 * y + sign * (b2.conjugate() * y.conjugate());
  const ComplexMatrix<Real> r = x * g.template cast<Complex<Real>>();
  return relative<Real>((l1 + l2 - r).norm(), l1.norm() + l2.norm() + r.norm());
}

template <typename Real>
Bimatrix<Real> assemble_pm(const ComplexMatrix<Real>& plus, const ComplexMatrix<Real>& minus) {
  const Real half(0.5);
  return Bimatrix<Real>(half * (plus + minus), half * (plus - minus).conjugate());
}

}  // namespace detail

/// Solutions of the two decoupled equations with real F11, F22, and the
/// assembled (X, Y) with F1 = (F11 + F22)/2, F2 = (F11 - F22)/2.
template <typename Real>
DecoupledSolution<Real> solve_gsyl_decoupled(const SystemModel<Real>& sys, const RealMatrix<Real>& f11,
                                             const RealMatrix<Real>& f22, const CoprimeFactorization<Real>& cf,
                                             const ComplexMatrix<Real>& z_plus, const ComplexMatrix<Real>& z_minus,
                                             DecoupledFormula formula = DecoupledFormula::automatic) {
  if (f11.rows() != f11.cols() || f22.rows() != f22.cols() || f11.rows() != f22.rows())
    throw PreconditionError("solve_gsyl_decoupled: F11 and F22 must be square real matrices of equal size");
  if (!cf.certified) throw PreconditionError("solve_gsyl_decoupled: factorization is not certified right-coprime");
  const Eigen::Index m = sys.inputs(), p = f11.rows();
  if (z_plus.rows() != m || z_plus.cols() != p || z_minus.rows() != m || z_minus.cols() != p)
    throw DimensionError("solve_gsyl_decoupled: Z+- must be " + shape_string(m, p));

  const bool real_z = z_plus.imag().isZero(0) && z_minus.imag().isZero(0);
  bool simplified = false;
  if (formula == DecoupledFormula::simplified) {
    if (!real_z) throw PreconditionError("solve_gsyl_decoupled: simplified formula needs real Z+-");
    simplified = true;
  } else if (formula == DecoupledFormula::automatic) {
    simplified = real_z;
  }

  const DecoupledPolys<Real> dp = to_decoupled(cf.n, cf.d);
  DecoupledSolution<Real> out;
  out.simplified = simplified;
  out.x_plus = detail::decoupled_sum(dp.n_plus, dp.n_minus, z_plus, f11, simplified);
  out.y_plus = detail::decoupled_sum(dp.d_plus, dp.d_minus, z_plus, f11, simplified);
  out.x_minus = detail::decoupled_sum(dp.n_minus, dp.n_plus, z_minus, f22, simplified);
  out.y_minus = detail::decoupled_sum(dp.d_minus, dp.d_plus, z_minus, f22, simplified);
  out.residual_plus = detail::decoupled_residual(sys, out.x_plus, out.y_plus, f11, Real(1));
  out.residual_minus = detail::decoupled_residual(sys, out.x_minus, out.y_minus, f22, Real(-1));

  const Real half(0.5);
  const Bimatrix<Real> f = Bimatrix<Real>::linear((half * (f11 + f22)).template cast<Complex<Real>>()) +
                           Bimatrix<Real>::antilinear((half * (f11 - f22)).template cast<Complex<Real>>());
  auto& s = out.assembled;
  s.x = detail::assemble_pm(out.x_plus, out.x_minus);
  s.y = detail::assemble_pm(out.y_plus, out.y_minus);
  s.z1 = half * (z_plus + z_minus);
  s.z2 = (half * (z_plus - z_minus)).conjugate();
  detail::finish(s, sys.a, sys.b, f);
  return out;
}

// ---------------------------------------------------------------------------
// Antilinear systems (A1 = 0, B1 = 0)

enum class AntiMode { general, normalize, anti_preserve };

inline const char* to_string(AntiMode m) {
  switch (m) {
    case AntiMode::normalize:
      return "normalize";
    case AntiMode::anti_preserve:
      return "anti_preserve";
    default:
      return "general";
  }
}

namespace detail {

// Parity-split sum over the N0 coefficients:
// sum_i coef_i * (even ? w_even : w_odd) * right_i.
template <typename Real>
ComplexMatrix<Real> parity_sum(const PolyMatrix<Complex<Real>>& p, bool conj_coeffs, const ComplexMatrix<Real>& w_even,
                               const ComplexMatrix<Real>& w_odd, const std::vector<ComplexMatrix<Real>>& right) {
  ComplexMatrix<Real> acc = ComplexMatrix<Real>::Zero(p.rows(), w_even.cols());
  for (Eigen::Index i = 0; i <= p.degree(); ++i) {
    const ComplexMatrix<Real> c = conj_coeffs ? ComplexMatrix<Real>(p.coeffs[i].conjugate()) : p.coeffs[i];
    acc += c * (i % 2 == 0 ? w_even : w_odd) * right[i];
  }
  return acc;
}

}  // namespace detail

/// Gain-design solutions for antilinear systems.
///
/// general: F1 and F2 real gives X+- = sum_even N0_i Z+- G+-^i
///          +- sum_odd N0_i conj(Z+-) G+-^i with G+- = F1 +- F2; any other F
///          falls back to the bimatrix polynomial series.
/// normalize (F2 = 0): X1 pairs Z1 with even and Z2 with odd coefficients,
///          X2 the reverse with conjugated coefficients.
/// anti_preserve (F1 = 0): powers of conj(F2) F2 with conj(Z) on odd terms.
template <typename Real>
GSylSolution<Real> solve_antilinear(const SystemModel<Real>& sys, AntiMode mode, const Bimatrix<Real>& f,
                                    const CoprimeFactorization<Real>& cf, const ComplexMatrix<Real>& z1,
                                    const ComplexMatrix<Real>& z2) {
  using CM = ComplexMatrix<Real>;
  if (cf.variant != FactorVariant::anti)
    throw PreconditionError("solve_antilinear: requires an anti-right-coprime factorization");
  if (!cf.certified) throw PreconditionError("solve_antilinear: factorization is not certified");
  detail::require_gsyl_shapes(sys, f, z1, z2, "solve_antilinear");
  const Real ftol = Real(1e-12) * std::max(norm(f), Real(1));
  const Eigen::Index p = f.rows();
  const Eigen::Index deg = cf.n0.degree();
  GSylSolution<Real> s;
  s.z1 = z1;
  s.z2 = z2;

  switch (mode) {
    case AntiMode::general: {
      const bool real_f = f.p1().imag().norm() <= ftol && f.p2().imag().norm() <= ftol;
      if (!real_f) return solve_gsyl(sys, f, cf, z1, z2);
      const RealMatrix<Real> g_plus = (f.p1() + f.p2()).real();
      const RealMatrix<Real> g_minus = (f.p1() - f.p2()).real();
      auto side = [&](const PolyMatrix<Complex<Real>>& coeffs, const CM& z, const RealMatrix<Real>& g, Real sign) {
        const auto gp = detail::powers<Complex<Real>>(g.template cast<Complex<Real>>(), static_cast<std::size_t>(deg));
        const CM zc = z.conjugate();
        CM acc = CM::Zero(coeffs.rows(), p);
        for (Eigen::Index i = 0; i <= deg; ++i) {
          if (i % 2 == 0)
            acc += coeffs.coeffs[i] * z * gp[i];
          else
            acc += sign * (coeffs.coeffs[i] * zc * gp[i]);
        }
        return acc;
      };
      const CM zp = z1 + z2.conjugate(), zm = z1 - z2.conjugate();
      s.x = detail::assemble_pm<Real>(side(cf.n0, zp, g_plus, Real(1)), side(cf.n0, zm, g_minus, Real(-1)));
      s.y = detail::assemble_pm<Real>(side(cf.d0, zp, g_plus, Real(1)), side(cf.d0, zm, g_minus, Real(-1)));
      break;
    }
    case AntiMode::normalize: {
      if (f.p2().norm() > ftol) throw PreconditionError("solve_antilinear: normalize mode requires F2 = 0");
      const auto fp = detail::powers<Complex<Real>>(f.p1(), static_cast<std::size_t>(deg));
      s.x = Bimatrix<Real>(detail::parity_sum(cf.n0, false, z1, z2, fp), detail::parity_sum(cf.n0, true, z2, z1, fp));
      s.y = Bimatrix<Real>(detail::parity_sum(cf.d0, false, z1, z2, fp), detail::parity_sum(cf.d0, true, z2, z1, fp));
      break;
    }
    case AntiMode::anti_preserve: {
      if (f.p1().norm() > ftol) throw PreconditionError("solve_antilinear: anti_preserve mode requires F1 = 0");
      const CM& f2 = f.p2();
      const CM g = f2.conjugate() * f2;
      // right_i = G^{i/2} for even i, F2 G^{(i-1)/2} for odd i.
      std::vector<CM> right;
      CM gk = CM::Identity(p, p);
      for (Eigen::Index i = 0; i <= deg; ++i) {
        if (i % 2 == 0) {
          right.push_back(gk);
        } else {
          right.push_back(f2 * gk);
          gk = gk * g;
        }
      }
      const CM z1c = z1.conjugate(), z2c = z2.conjugate();
      s.x = Bimatrix<Real>(detail::parity_sum(cf.n0, false, z1, z1c, right),
                           detail::parity_sum(cf.n0, true, z2, z2c, right));
      s.y = Bimatrix<Real>(detail::parity_sum(cf.d0, false, z1, z1c, right),
                           detail::parity_sum(cf.d0, true, z2, z2c, right));
      break;
    }
  }
  detail::finish(s, sys.a, sys.b, f);
  return s;
}

}  // namespace bimat
