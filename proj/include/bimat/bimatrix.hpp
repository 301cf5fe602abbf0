#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "bimat/errors.hpp"
#include "bimat/linalg.hpp"
#include "bimat/types.hpp"

namespace bimat {

/// Ordered pair {P1, P2} of same-shape complex matrices acting on a vector as
/// x -> P1 x + conj(P2) conj(x). Linear over the reals only.
template <typename Real = double>
class Bimatrix {
 public:
  using RealScalar = Real;
  using Scalar = Complex<Real>;
  using MatrixType = ComplexMatrix<Real>;

  Bimatrix() = default;

  Bimatrix(MatrixType p1, MatrixType p2) : p1_(std::move(p1)), p2_(std::move(p2)) {
    if (p1_.rows() != p2_.rows() || p1_.cols() != p2_.cols())
      throw DimensionError("Bimatrix: components have shapes " + shape_string(p1_.rows(), p1_.cols()) + " and " +
                           shape_string(p2_.rows(), p2_.cols()));
    if (!p1_.allFinite() || !p2_.allFinite()) throw InputError("Bimatrix: non-finite entry");
  }

  static Bimatrix zero(Eigen::Index rows, Eigen::Index cols) {
    return Bimatrix(MatrixType::Zero(rows, cols), MatrixType::Zero(rows, cols));
  }
  static Bimatrix identity(Eigen::Index n) { return Bimatrix(MatrixType::Identity(n, n), MatrixType::Zero(n, n)); }
  /// {0, I}: pure conjugation.
  static Bimatrix conjugation(Eigen::Index n) { return Bimatrix(MatrixType::Zero(n, n), MatrixType::Identity(n, n)); }
  static Bimatrix linear(MatrixType p1) {
    MatrixType z = MatrixType::Zero(p1.rows(), p1.cols());
    return Bimatrix(std::move(p1), std::move(z));
  }
  static Bimatrix antilinear(MatrixType p2) {
    MatrixType z = MatrixType::Zero(p2.rows(), p2.cols());
    return Bimatrix(std::move(z), std::move(p2));
  }

  Eigen::Index rows() const { return p1_.rows(); }
  Eigen::Index cols() const { return p1_.cols(); }
  bool is_square() const { return rows() == cols(); }

  const MatrixType& p1() const { return p1_; }
  const MatrixType& p2() const { return p2_; }

  template <typename Other>
  Bimatrix<Other> cast() const {
    return Bimatrix<Other>(p1_.template cast<Complex<Other>>(), p2_.template cast<Complex<Other>>());
  }

  Bimatrix& operator+=(const Bimatrix& o) {
    check_same_shape(o, "operator+=");
    p1_ += o.p1_;
    p2_ += o.p2_;
    return *this;
  }
  Bimatrix& operator-=(const Bimatrix& o) {
    check_same_shape(o, "operator-=");
    p1_ -= o.p1_;
    p2_ -= o.p2_;
    return *this;
  }
  // Only real scalars: a complex scalar does not commute with conjugation.
  Bimatrix& operator*=(Real s) {
    p1_ *= s;
    p2_ *= s;
    return *this;
  }

 private:
  void check_same_shape(const Bimatrix& o, const char* what) const {
    if (rows() != o.rows() || cols() != o.cols())
      throw DimensionError(std::string("Bimatrix::") + what + ": " + shape_string(rows(), cols()) + " vs " +
                           shape_string(o.rows(), o.cols()));
  }

  MatrixType p1_;
  MatrixType p2_;
};

template <typename Real>
Bimatrix<Real> operator+(Bimatrix<Real> a, const Bimatrix<Real>& b) {
  return a += b;
}
template <typename Real>
Bimatrix<Real> operator-(Bimatrix<Real> a, const Bimatrix<Real>& b) {
  return a -= b;
}
template <typename Real>
Bimatrix<Real> operator-(const Bimatrix<Real>& a) {
  return Bimatrix<Real>(-a.p1(), -a.p2());
}
template <typename Real>
Bimatrix<Real> operator*(Real s, Bimatrix<Real> a) {
  return a *= s;
}
template <typename Real>
Bimatrix<Real> operator*(Bimatrix<Real> a, Real s) {
  return a *= s;
}

/// P1 x + conj(P2) conj(x).
template <typename Real>
ComplexVector<Real> apply(const Bimatrix<Real>& b, const ComplexVector<Real>& x) {
  if (x.size() != b.cols())
    throw DimensionError("apply: bimatrix is " + shape_string(b.rows(), b.cols()) + ", vector has " +
                         std::to_string(x.size()) + " entries");
  return b.p1() * x + (b.p2() * x).conjugate();
}

/// {A1,A2}{B1,B2} = {A1 B1 + conj(A2) B2, conj(A1) B2 + A2 B1}.
template <typename Real>
Bimatrix<Real> multiply(const Bimatrix<Real>& a, const Bimatrix<Real>& b) {
  if (a.cols() != b.rows())
    throw DimensionError("multiply: inner dimensions differ (" + shape_string(a.rows(), a.cols()) + " * " +
                         shape_string(b.rows(), b.cols()) + ")");
  return Bimatrix<Real>(a.p1() * b.p1() + a.p2().conjugate() * b.p2(), a.p1().conjugate() * b.p2() + a.p2() * b.p1());
}

template <typename Real>
Bimatrix<Real> operator*(const Bimatrix<Real>& a, const Bimatrix<Real>& b) {
  return multiply(a, b);
}

template <typename Real>
Bimatrix<Real> power(const Bimatrix<Real>& b, unsigned k) {
  require_square(b.p1(), "power");
  Bimatrix<Real> result = Bimatrix<Real>::identity(b.rows());
  Bimatrix<Real> base = b;
  while (k) {
    if (k & 1u) result = result * base;
    k >>= 1u;
    if (k) base = base * base;
  }
  return result;
}

/// {P1^H, P2^T}; the real representation of the result is the transpose.
template <typename Real>
Bimatrix<Real> adjoint(const Bimatrix<Real>& b) {
  return Bimatrix<Real>(b.p1().adjoint(), b.p2().transpose());
}

/// [[Re(P1+P2), -Im(P1+P2)], [Im(P1-P2), Re(P1-P2)]], acting on [Re x; Im x].
template <typename Real>
RealMatrix<Real> to_real(const Bimatrix<Real>& b) {
  const Eigen::Index n = b.rows(), m = b.cols();
  const ComplexMatrix<Real> s = b.p1() + b.p2();
  const ComplexMatrix<Real> d = b.p1() - b.p2();
  RealMatrix<Real> r(2 * n, 2 * m);
  r.topLeftCorner(n, m) = s.real();
  r.topRightCorner(n, m) = -s.imag();
  r.bottomLeftCorner(n, m) = d.imag();
  r.bottomRightCorner(n, m) = d.real();
  return r;
}

template <typename Real>
Bimatrix<Real> from_real(const RealMatrix<Real>& r) {
  if (r.rows() % 2 != 0 || r.cols() % 2 != 0)
    throw DimensionError("from_real: dimensions must be even, got " + shape_string(r.rows(), r.cols()));
  const Eigen::Index n = r.rows() / 2, m = r.cols() / 2;
  const RealMatrix<Real> f11 = r.topLeftCorner(n, m), f12 = r.topRightCorner(n, m);
  const RealMatrix<Real> f21 = r.bottomLeftCorner(n, m), f22 = r.bottomRightCorner(n, m);
  const Real half(0.5);
  ComplexMatrix<Real> p1(n, m), p2(n, m);
  p1.real() = half * (f11 + f22);
  p1.imag() = half * (f21 - f12);
  p2.real() = half * (f11 - f22);
  p2.imag() = -half * (f12 + f21);
  return Bimatrix<Real>(std::move(p1), std::move(p2));
}

/// [[P1, conj(P2)], [P2, conj(P1)]].
template <typename Real>
ComplexMatrix<Real> complex_lifting(const Bimatrix<Real>& b) {
  const Eigen::Index n = b.rows(), m = b.cols();
  ComplexMatrix<Real> l(2 * n, 2 * m);
  l.topLeftCorner(n, m) = b.p1();
  l.topRightCorner(n, m) = b.p2().conjugate();
  l.bottomLeftCorner(n, m) = b.p2();
  l.bottomRightCorner(n, m) = b.p1().conjugate();
  return l;
}

/// Frobenius norm of the real representation.
template <typename Real>
Real norm(const Bimatrix<Real>& b) {
  using std::sqrt;
  return sqrt(Real(2) * (b.p1().squaredNorm() + b.p2().squaredNorm()));
}

template <typename Real>
struct Spectrum {
  std::vector<Complex<Real>> eigenvalues;
  Real rho = 0;  // spectral radius
  Real mu = 0;   // spectral abscissa
};

template <typename Real>
Spectrum<Real> spectrum(const Bimatrix<Real>& b) {
  require_square(b.p1(), "spectrum");
  Spectrum<Real> s;
  s.eigenvalues = eigenvalues(to_real(b));
  s.rho = Real(0);
  s.mu = s.eigenvalues.empty() ? Real(0) : -std::numeric_limits<Real>::infinity();
  for (const auto& l : s.eigenvalues) {
    s.rho = std::max(s.rho, std::abs(l));
    s.mu = std::max(s.mu, l.real());
  }
  return s;
}

template <typename Real>
Bimatrix<Real> inverse(const Bimatrix<Real>& b) {
  require_square(b.p1(), "inverse");
  const RealMatrix<Real> r = to_real(b);
  const Real cond = condition_number(r);
  if (!(cond <= Tolerance<Real>::singular_condition()))
    throw SingularityError("inverse: bimatrix is numerically singular", static_cast<double>(cond));
  return from_real(RealMatrix<Real>(r.partialPivLu().inverse()));
}

/// e^{t{P1,P2}} through the real representation.
template <typename Real>
Bimatrix<Real> exponential(const Bimatrix<Real>& b, Real t) {
  require_square(b.p1(), "exponential");
  return from_real(expm(RealMatrix<Real>(t * to_real(b))));
}

template <typename Real>
struct DefinitenessReport {
  bool positive_definite = false;
  bool symmetric = false;
  Real asymmetry = 0;       // relative Frobenius asymmetry of the real representation
  Real min_eigenvalue = 0;  // of the symmetric part
  std::string diagnostic;
};

/// Positive definiteness means: the real representation is symmetric and
/// its smallest eigenvalue is positive.
template <typename Real>
DefinitenessReport<Real> check_positive_definite(const Bimatrix<Real>& b, Real sym_tol = Real(1e-10)) {
  DefinitenessReport<Real> rep;
  if (!b.is_square()) {
    rep.diagnostic = "not square";
    return rep;
  }
  const RealMatrix<Real> r = to_real(b);
  const Real scale = std::max(r.norm(), std::numeric_limits<Real>::min());
  rep.asymmetry = (r - r.transpose()).norm() / scale;
  rep.symmetric = rep.asymmetry <= sym_tol;
  const RealMatrix<Real> sym = Real(0.5) * (r + r.transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix<Real>> es(sym, Eigen::EigenvaluesOnly);
  rep.min_eigenvalue = es.eigenvalues().size() ? es.eigenvalues()(0) : Real(0);
  if (!rep.symmetric) {
    rep.diagnostic = "real representation is not symmetric";
    return rep;
  }
  if (!(rep.min_eigenvalue > Real(0))) {
    rep.diagnostic = "real representation has a nonpositive eigenvalue";
    return rep;
  }
  rep.positive_definite = true;
  return rep;
}

template <typename Real>
bool is_positive_definite(const Bimatrix<Real>& b) {
  return check_positive_definite(b).positive_definite;
}

}  // namespace bimat
