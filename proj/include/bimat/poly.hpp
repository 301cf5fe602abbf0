#pragma once

// Polynomial (bi)matrices and right-coprime factorizations of
// (sI - A) N(s) = B D(s) and its antilinear analogue
// s conj(N0)(s) - A2 N0(s) = B2 D0(s).
//
// Conjugating a polynomial conjugates its coefficients only: s is treated
// as a real parameter throughout.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "bimat/bimatrix.hpp"
#include "bimat/system.hpp"

namespace bimat {

/// Dense matrix polynomial, coefficients from degree 0 upward.
template <typename Scalar>
struct PolyMatrix {
  std::vector<Matrix<Scalar>> coeffs;

  PolyMatrix() = default;
  PolyMatrix(Eigen::Index rows, Eigen::Index cols, Eigen::Index degree)
      : coeffs(static_cast<std::size_t>(degree + 1), Matrix<Scalar>::Zero(rows, cols)) {}
  explicit PolyMatrix(std::vector<Matrix<Scalar>> c) : coeffs(std::move(c)) {}

  Eigen::Index rows() const { return coeffs.empty() ? 0 : coeffs.front().rows(); }
  Eigen::Index cols() const { return coeffs.empty() ? 0 : coeffs.front().cols(); }
  Eigen::Index degree() const { return static_cast<Eigen::Index>(coeffs.size()) - 1; }
};

/// Horner evaluation at a complex point; coefficients are never conjugated.
template <typename Scalar>
ComplexMatrix<RealOf_t<Scalar>> evaluate(const PolyMatrix<Scalar>& p, Complex<RealOf_t<Scalar>> s) {
  using C = Complex<RealOf_t<Scalar>>;
  ComplexMatrix<RealOf_t<Scalar>> acc = ComplexMatrix<RealOf_t<Scalar>>::Zero(p.rows(), p.cols());
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) acc = acc * s + it->template cast<C>();
  return acc;
}

template <typename Scalar>
PolyMatrix<Scalar> conjugate(const PolyMatrix<Scalar>& p) {
  PolyMatrix<Scalar> out = p;
  for (auto& c : out.coeffs) c = c.conjugate();
  return out;
}

/// p(-s).
template <typename Scalar>
PolyMatrix<Scalar> reflect(const PolyMatrix<Scalar>& p) {
  PolyMatrix<Scalar> out = p;
  for (std::size_t i = 1; i < out.coeffs.size(); i += 2) out.coeffs[i] = -out.coeffs[i];
  return out;
}

/// Polynomial with bimatrix coefficients.
template <typename Real = double>
struct PolyBimatrix {
  std::vector<Bimatrix<Real>> coeffs;
  bool padded = false;  // top coefficient is an explicit zero added for even degree

  Eigen::Index rows() const { return coeffs.empty() ? 0 : coeffs.front().rows(); }
  Eigen::Index cols() const { return coeffs.empty() ? 0 : coeffs.front().cols(); }
  Eigen::Index degree() const { return static_cast<Eigen::Index>(coeffs.size()) - 1; }

  PolyMatrix<Complex<Real>> first() const {
    PolyMatrix<Complex<Real>> out;
    for (const auto& c : coeffs) out.coeffs.push_back(c.p1());
    return out;
  }
  PolyMatrix<Complex<Real>> second() const {
    PolyMatrix<Complex<Real>> out;
    for (const auto& c : coeffs) out.coeffs.push_back(c.p2());
    return out;
  }
};

/// (N1(s), N2(s)) = (sum p1_i s^i, sum p2_i s^i).
template <typename Real>
std::pair<ComplexMatrix<Real>, ComplexMatrix<Real>> eval_poly(const PolyBimatrix<Real>& p, Complex<Real> s) {
  return {evaluate(p.first(), s), evaluate(p.second(), s)};
}

/// Value at a real point, which is again a bimatrix.
template <typename Real>
Bimatrix<Real> eval_poly_real(const PolyBimatrix<Real>& p, Real s) {
  auto [n1, n2] = eval_poly(p, Complex<Real>(s));
  return Bimatrix<Real>(std::move(n1), std::move(n2));
}

template <typename Real>
PolyBimatrix<Real> make_poly_bimatrix(const PolyMatrix<Complex<Real>>& first, const PolyMatrix<Complex<Real>>& second) {
  if (first.coeffs.size() != second.coeffs.size())
    throw DimensionError("make_poly_bimatrix: component degrees differ");
  PolyBimatrix<Real> out;
  for (std::size_t i = 0; i < first.coeffs.size(); ++i) out.coeffs.emplace_back(first.coeffs[i], second.coeffs[i]);
  return out;
}

/// Real factorization (sI - a) n0(s) = b d0(s).
template <typename Real = double>
struct RealPolyPair {
  PolyMatrix<Real> n0;
  PolyMatrix<Real> d0;
  std::vector<int> column_degrees;
};

enum class FactorVariant { general, decoupled_pair, anti };

inline const char* to_string(FactorVariant v) {
  switch (v) {
    case FactorVariant::decoupled_pair:
      return "decoupled_pair";
    case FactorVariant::anti:
      return "anti";
    default:
      return "general";
  }
}

template <typename Real = double>
struct CoprimeReport {
  bool pass = false;
  bool rank_pass = false;
  std::vector<Complex<Real>> failures;  // points where the stacked matrix loses column rank
  Real residual = 0;                    // relative residual of the defining identity
  Real min_singular_ratio = 0;          // smallest sigma_min/sigma_max seen over all tested points
  std::size_t points_tested = 0;
};

template <typename Real = double>
struct CoprimeFactorization {
  PolyBimatrix<Real> n;
  PolyBimatrix<Real> d;
  FactorVariant variant = FactorVariant::general;
  bool certified = false;
  CoprimeReport<Real> report;
  Bimatrix<Real> a;  // system the factorization belongs to
  Bimatrix<Real> b;
  std::vector<int> column_degrees;
  // Antilinear variant only.
  PolyMatrix<Complex<Real>> n0;
  PolyMatrix<Complex<Real>> d0;
  bool padded = false;

  Eigen::Index degree() const { return n.degree(); }
};

namespace detail {

template <typename Scalar>
struct KrylovPair {
  PolyMatrix<Scalar> n;
  PolyMatrix<Scalar> d;
  std::vector<int> indices;
};

// Column-Popov factorization from the crate-ordered Krylov basis
// b_1..b_r, T b_1..T b_r, ... where T x = a x, or T x = conj(a x) when
// `skew` is set (then the chains start at conj(b_j)).
template <typename Scalar>
KrylovPair<Scalar> krylov_factorization(const Matrix<Scalar>& a, const Matrix<Scalar>& b, bool skew,
                                        RealOf_t<Scalar> tol) {
  using Real = RealOf_t<Scalar>;
  const Eigen::Index q = a.rows(), r = b.cols();
  auto step = [&](const Vector<Scalar>& x) -> Vector<Scalar> {
    Vector<Scalar> y = a * x;
    if (skew) y = y.conjugate();
    return y;
  };

  Real bscale = 0;
  for (Eigen::Index j = 0; j < r; ++j) bscale = std::max(bscale, b.col(j).norm());
  const Real anorm = a.norm();

  std::vector<std::vector<Vector<Scalar>>> chain(r);
  std::vector<int> nu(r, -1);
  std::vector<std::pair<Eigen::Index, int>> selected;
  Matrix<Scalar> qbasis(q, q);
  Eigen::Index count = 0;

  for (int k = 0; k <= q; ++k) {
    bool any = false;
    for (Eigen::Index j = 0; j < r; ++j) {
      if (nu[j] >= 0) continue;
      any = true;
      Vector<Scalar> v;
      Real ref;
      if (k == 0) {
        v = b.col(j);
        if (skew) v = v.conjugate();
        ref = bscale;
      } else {
        v = step(chain[j].back());
        ref = anorm * chain[j].back().norm();
      }
      chain[j].push_back(v);
      Vector<Scalar> res = v;
      for (int pass = 0; pass < 2 && count > 0; ++pass)
        res -= qbasis.leftCols(count) * (qbasis.leftCols(count).adjoint() * res);
      const Real rn = res.norm();
      if (count < q && ref > Real(0) && rn > tol * ref) {
        qbasis.col(count++) = res / rn;
        selected.emplace_back(j, k);
      } else {
        nu[j] = k;
      }
    }
    if (!any) break;
  }

  if (count < q)
    throw StructuralError("uncontrollable pair: Krylov basis has rank " + std::to_string(count) + " of " +
                          std::to_string(q) + " (rank defect " + std::to_string(q - count) + ")");

  Matrix<Scalar> basis(q, q);
  for (std::size_t t = 0; t < selected.size(); ++t) basis.col(t) = chain[selected[t].first][selected[t].second];
  const auto qr = basis.colPivHouseholderQr();

  const int omega = q == 0 ? 0 : *std::max_element(nu.begin(), nu.end());
  KrylovPair<Scalar> out{PolyMatrix<Scalar>(q, r, omega), PolyMatrix<Scalar>(r, r, omega), nu};

  for (Eigen::Index i = 0; i < r; ++i) {
    const int v = nu[i];
    out.d.coeffs[v](i, i) += Scalar(1);
    if (q > 0) {
      const Vector<Scalar> c = qr.solve(chain[i][v]);
      for (std::size_t t = 0; t < selected.size(); ++t) {
        const auto [j, k] = selected[t];
        Scalar dk = c(t);
        if constexpr (is_complex_v<Scalar>) {
          if (skew && k % 2 == 0) dk = std::conj(dk);
        }
        out.d.coeffs[k](j, i) -= dk;
      }
    }
    // N_{k-1} = T-style back substitution from N_v = 0.
    Vector<Scalar> nk = Vector<Scalar>::Zero(q);
    for (int k = v; k >= 1; --k) {
      Vector<Scalar> next = a * nk + b * out.d.coeffs[k].col(i);
      if (skew) next = next.conjugate();
      out.n.coeffs[k - 1].col(i) = next;
      nk = next;
    }
  }
  return out;
}

template <typename Real>
std::vector<Real> sample_points(Eigen::Index degree) {
  const Eigen::Index count = 2 * (degree + 1) + 1;
  std::vector<Real> s(count);
  for (Eigen::Index k = 0; k < count; ++k)
    s[k] = Real(-2) + Real(4) * Real(k) / Real(std::max<Eigen::Index>(count - 1, 1)) + Real(0.0123);
  return s;
}

// Column j of P(s) is divided by sum_k max(1, |s|)^k ||C_k(:, j)||, which
// keeps high-degree rows from dominating at large |s| while an exact zero
// such as s I at s = 0 still shows up as a vanishing singular value.
template <typename Scalar>
std::pair<Eigen::Index, RealOf_t<Scalar>> scaled_rank(const PolyMatrix<Scalar>& p, Complex<RealOf_t<Scalar>> s,
                                                      RealOf_t<Scalar> rel_tol) {
  using Real = RealOf_t<Scalar>;
  ComplexMatrix<Real> m = evaluate(p, s);
  const Real r = std::max(Real(1), Real(std::abs(s)));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    Real ref = 0, pw = 1;
    for (const auto& c : p.coeffs) {
      ref += pw * Real(c.col(j).norm());
      pw *= r;
    }
    if (ref > Real(0)) m.col(j) /= ref;
  }
  const Vector<Real> sv = singular_values(m);
  if (sv.size() == 0) return {0, Real(1)};
  const Real top = std::max(Real(sv(0)), Real(1));
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * top) ++rank;
  return {rank, sv(sv.size() - 1) / top};
}

}  // namespace detail

/// Rank test for a tall polynomial matrix: full column rank for every complex s?
///
/// Candidate rank-drop points are the finite eigenvalues of a companion
/// pencil of W P(s) for a random square-making W; each candidate plus 16
/// random probes gets an SVD rank test.
template <typename Scalar>
CoprimeReport<RealOf_t<Scalar>> check_full_column_rank(const PolyMatrix<Scalar>& p,
                                                       RealOf_t<Scalar> rel_tol = Tolerance<RealOf_t<Scalar>>::rank,
                                                       std::uint64_t seed = 0x5eedULL) {
  using Real = RealOf_t<Scalar>;
  using C = Complex<Real>;
  using CM = ComplexMatrix<Real>;
  CoprimeReport<Real> rep;
  rep.min_singular_ratio = Real(1);
  const Eigen::Index rows = p.rows(), c = p.cols();
  if (rows < c) {
    rep.rank_pass = false;
    return rep;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto rand_c = [&]() { return C(Real(normal(rng)), Real(normal(rng))); };

  std::vector<C> candidates;
  const Eigen::Index d = p.degree();
  if (d >= 1 && c > 0) {
    CM w(c, rows);
    for (Eigen::Index i = 0; i < c; ++i)
      for (Eigen::Index j = 0; j < rows; ++j) w(i, j) = rand_c();
    std::vector<CM> q;
    for (const auto& m : p.coeffs) q.push_back(w * m.template cast<C>());
    const Eigen::Index n = c * d;
    CM e = CM::Identity(n, n), ac = CM::Zero(n, n);
    e.bottomRightCorner(c, c) = q[d];
    for (Eigen::Index k = 0; k + 1 < d; ++k) ac.block(k * c, (k + 1) * c, c, c) = CM::Identity(c, c);
    for (Eigen::Index k = 0; k < d; ++k) ac.block((d - 1) * c, k * c, c, c) = -q[k];
    const C sigma = rand_c() * Real(0.5);
    const auto lu = CM(ac - sigma * e).fullPivLu();
    if (lu.isInvertible()) {
      const CM m = lu.solve(e);
      Eigen::ComplexEigenSolver<CM> es(m, false);
      if (es.info() == Eigen::Success) {
        Real mu_max = 0;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) mu_max = std::max(mu_max, std::abs(es.eigenvalues()(i)));
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
          const C mu = es.eigenvalues()(i);
          // Defective infinite eigenvalues come back as |mu| ~ sqrt(eps), so
          // the cutoff sits well above that.
          if (std::abs(mu) > Real(1e-6) * mu_max) candidates.push_back(sigma + C(1) / mu);
        }
      }
    } else {
      // det(W P(s)) vanishes near sigma; let the rank test decide there.
      candidates.push_back(sigma);
    }
  }
  for (int i = 0; i < 16; ++i) candidates.push_back(rand_c());

  rep.rank_pass = true;
  for (const C& s : candidates) {
    const auto [rank, ratio] = detail::scaled_rank(p, s, rel_tol);
    rep.min_singular_ratio = std::min(rep.min_singular_ratio, ratio);
    ++rep.points_tested;
    if (rank < c) {
      rep.rank_pass = false;
      rep.failures.push_back(s);
    }
  }
  rep.pass = rep.rank_pass;
  return rep;
}

/// Lifted stacked matrix [[N1, conj N2], [N2, conj N1]; same for D], coefficientwise.
template <typename Real>
PolyMatrix<Complex<Real>> lifted_stack(const PolyBimatrix<Real>& n, const PolyBimatrix<Real>& d) {
  const Eigen::Index nr = n.rows(), m = n.cols();
  PolyMatrix<Complex<Real>> out(2 * nr + 2 * m, 2 * m, std::max(n.degree(), d.degree()));
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    auto& c = out.coeffs[i];
    if (i < n.coeffs.size()) {
      c.topRows(2 * nr) = complex_lifting(n.coeffs[i]);
    }
    if (i < d.coeffs.size()) {
      c.bottomRows(2 * m) = complex_lifting(d.coeffs[i]);
    }
  }
  return out;
}

template <typename Real>
struct DecoupledPolys {
  PolyMatrix<Complex<Real>> n_plus, n_minus, d_plus, d_minus;
};

/// N_pm = N1 pm conj(N2), D_pm likewise (inverse of the one-to-one map).
template <typename Real>
DecoupledPolys<Real> to_decoupled(const PolyBimatrix<Real>& n, const PolyBimatrix<Real>& d) {
  DecoupledPolys<Real> out;
  for (const auto& c : n.coeffs) {
    out.n_plus.coeffs.push_back(c.p1() + c.p2().conjugate());
    out.n_minus.coeffs.push_back(c.p1() - c.p2().conjugate());
  }
  for (const auto& c : d.coeffs) {
    out.d_plus.coeffs.push_back(c.p1() + c.p2().conjugate());
    out.d_minus.coeffs.push_back(c.p1() - c.p2().conjugate());
  }
  return out;
}

/// N1 = (N+ + N-)/2, N2 = conj(N+ - N-)/2, and the same for D.
template <typename Real>
std::pair<PolyBimatrix<Real>, PolyBimatrix<Real>> from_decoupled(const DecoupledPolys<Real>& dp) {
  auto assemble = [](const PolyMatrix<Complex<Real>>& plus, const PolyMatrix<Complex<Real>>& minus) {
    if (plus.coeffs.size() != minus.coeffs.size()) throw DimensionError("from_decoupled: degree mismatch");
    PolyBimatrix<Real> out;
    const Real half(0.5);
    for (std::size_t i = 0; i < plus.coeffs.size(); ++i)
      out.coeffs.emplace_back(half * (plus.coeffs[i] + minus.coeffs[i]),
                              half * (plus.coeffs[i] - minus.coeffs[i]).conjugate());
    return out;
  };
  return {assemble(dp.n_plus, dp.n_minus), assemble(dp.d_plus, dp.d_minus)};
}

/// [[N+, -N-], [D+, -D-], [conj N+, conj N-], [conj D+, conj D-]].
template <typename Real>
PolyMatrix<Complex<Real>> decoupled_stack(const DecoupledPolys<Real>& dp) {
  const Eigen::Index nr = dp.n_plus.rows(), m = dp.n_plus.cols();
  const Eigen::Index deg = static_cast<Eigen::Index>(dp.n_plus.coeffs.size()) - 1;
  PolyMatrix<Complex<Real>> out(2 * nr + 2 * m, 2 * m, deg);
  for (Eigen::Index i = 0; i <= deg; ++i) {
    auto& c = out.coeffs[i];
    const auto& np = dp.n_plus.coeffs[i];
    const auto& nm = dp.n_minus.coeffs[i];
    const auto& dpl = dp.d_plus.coeffs[i];
    const auto& dm = dp.d_minus.coeffs[i];
    c.block(0, 0, nr, m) = np;
    c.block(0, m, nr, m) = -nm;
    c.block(nr, 0, m, m) = dpl;
    c.block(nr, m, m, m) = -dm;
    c.block(nr + m, 0, nr, m) = np.conjugate();
    c.block(nr + m, m, nr, m) = nm.conjugate();
    c.block(2 * nr + m, 0, m, m) = dpl.conjugate();
    c.block(2 * nr + m, m, m, m) = dm.conjugate();
  }
  return out;
}

/// [[N0(s), -N0(-s)], [D0(s), -D0(-s)], [conj N0(s), conj N0(-s)], [conj D0(s), conj D0(-s)]].
template <typename Real>
PolyMatrix<Complex<Real>> anti_stack(const PolyMatrix<Complex<Real>>& n0, const PolyMatrix<Complex<Real>>& d0) {
  DecoupledPolys<Real> dp{n0, reflect(n0), d0, reflect(d0)};
  return decoupled_stack(dp);
}

/// max over real sample points of ||s N - A N - B D|| / scale.
template <typename Real>
Real identity_residual(const Bimatrix<Real>& a, const Bimatrix<Real>& b, const PolyBimatrix<Real>& n,
                       const PolyBimatrix<Real>& d) {
  Real worst = 0;
  for (Real s : detail::sample_points<Real>(std::max(n.degree(), d.degree()))) {
    const Bimatrix<Real> ns = eval_poly_real(n, s), ds = eval_poly_real(d, s);
    const Bimatrix<Real> an = a * ns, bd = b * ds;
    const Bimatrix<Real> r = s * ns - an - bd;
    const Real scale = (s < Real(0) ? -s : s) * norm(ns) + norm(an) + norm(bd) + std::numeric_limits<Real>::min();
    worst = std::max(worst, norm(r) / scale);
  }
  return worst;
}

/// max over real sample points of ||s conj(N0) - A2 N0 - B2 D0|| / scale.
template <typename Real>
Real anti_identity_residual(const ComplexMatrix<Real>& a2, const ComplexMatrix<Real>& b2,
                            const PolyMatrix<Complex<Real>>& n0, const PolyMatrix<Complex<Real>>& d0) {
  Real worst = 0;
  for (Real s : detail::sample_points<Real>(std::max(n0.degree(), d0.degree()))) {
    const ComplexMatrix<Real> ns = evaluate(n0, Complex<Real>(s)), ds = evaluate(d0, Complex<Real>(s));
    const ComplexMatrix<Real> an = a2 * ns, bd = b2 * ds;
    const ComplexMatrix<Real> r = s * ns.conjugate() - an - bd;
    const Real scale = (s < Real(0) ? -s : s) * ns.norm() + an.norm() + bd.norm() + std::numeric_limits<Real>::min();
    worst = std::max(worst, Real(r.norm() / scale));
  }
  return worst;
}

/// Rank certification plus identity residual for any factorization variant.
template <typename Real>
CoprimeReport<Real> check_coprime(const CoprimeFactorization<Real>& f) {
  CoprimeReport<Real> rep;
  Real residual = 0;
  switch (f.variant) {
    case FactorVariant::anti:
      rep = check_full_column_rank(anti_stack<Real>(f.n0, f.d0));
      residual = anti_identity_residual(f.a.p2(), f.b.p2(), f.n0, f.d0);
      break;
    case FactorVariant::decoupled_pair:
      rep = check_full_column_rank(decoupled_stack(to_decoupled(f.n, f.d)));
      residual = identity_residual(f.a, f.b, f.n, f.d);
      break;
    default:
      rep = check_full_column_rank(lifted_stack(f.n, f.d));
      residual = identity_residual(f.a, f.b, f.n, f.d);
      break;
  }
  rep.residual = residual;
  rep.pass = rep.rank_pass && residual < Real(1e-9);
  return rep;
}

namespace detail {

template <typename Real>
void certify(CoprimeFactorization<Real>& f, const char* who) {
  f.report = check_coprime(f);
  if (!f.report.pass) {
    std::string msg = std::string(who) + ": certification failed (residual " +
                      std::to_string(static_cast<double>(f.report.residual)) + ")";
    for (const auto& s : f.report.failures)
      msg += " rank drop near " + std::to_string(static_cast<double>(s.real())) + "+" +
             std::to_string(static_cast<double>(s.imag())) + "j";
    throw CoprimenessError(msg);
  }
  f.certified = true;
}

template <typename Scalar>
PolyMatrix<Scalar> stack(const PolyMatrix<Scalar>& top, const PolyMatrix<Scalar>& bottom) {
  PolyMatrix<Scalar> out(top.rows() + bottom.rows(), top.cols(), std::max(top.degree(), bottom.degree()));
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    if (i < top.coeffs.size()) out.coeffs[i].topRows(top.rows()) = top.coeffs[i];
    if (i < bottom.coeffs.size()) out.coeffs[i].bottomRows(bottom.rows()) = bottom.coeffs[i];
  }
  return out;
}

}  // namespace detail

/// Right-coprime (N, D) with (sI - a) N(s) = b D(s); column degrees of D are
/// the controllability indices.
template <typename Real>
RealPolyPair<Real> minimal_right_factorization(const RealMatrix<Real>& a, const RealMatrix<Real>& b,
                                               Real tol = Tolerance<Real>::rank) {
  require_square(a, "minimal_right_factorization");
  if (b.rows() != a.rows())
    throw DimensionError("minimal_right_factorization: b has " + std::to_string(b.rows()) + " rows, expected " +
                         std::to_string(a.rows()));
  if (b.cols() < 1) throw DimensionError("minimal_right_factorization: b needs at least one column");
  auto kp = detail::krylov_factorization<Real>(a, b, false, tol);
  const auto rep = check_full_column_rank(detail::stack(kp.n, kp.d));
  if (!rep.rank_pass) throw CoprimenessError("minimal_right_factorization: factorization is not right-coprime");
  return {std::move(kp.n), std::move(kp.d), std::move(kp.indices)};
}

/// Factorization of a general or normal system.
///
/// Normal systems use the complex pair (A1, B1) directly with N2 = D2 = 0.
/// Otherwise the real pair (to_real(A), to_real(B)) is factored and each
/// coefficient is mapped back through from_real.
template <typename Real>
CoprimeFactorization<Real> coprime_factorization(const SystemModel<Real>& sys, Real tol = Tolerance<Real>::rank) {
  validate(sys);
  CoprimeFactorization<Real> f;
  f.a = sys.a;
  f.b = sys.b;
  f.variant = FactorVariant::general;
  if (sys.structure == Structure::normal) {
    auto kp = detail::krylov_factorization<Complex<Real>>(sys.a.p1(), sys.b.p1(), false, tol);
    for (auto& c : kp.n.coeffs) f.n.coeffs.push_back(Bimatrix<Real>::linear(c));
    for (auto& c : kp.d.coeffs) f.d.coeffs.push_back(Bimatrix<Real>::linear(c));
    f.column_degrees = kp.indices;
  } else {
    auto kp = detail::krylov_factorization<Real>(to_real(sys.a), to_real(sys.b), false, tol);
    for (auto& c : kp.n.coeffs) f.n.coeffs.push_back(from_real(c));
    for (auto& c : kp.d.coeffs) f.d.coeffs.push_back(from_real(c));
    f.column_degrees = kp.indices;
  }
  detail::certify(f, "coprime_factorization");
  return f;
}

/// Reassembles a factorization from its decoupled halves (N+, D+), (N-, D-)
/// and certifies it with the decoupled rank condition.
template <typename Real>
CoprimeFactorization<Real> decoupled_factorization(const SystemModel<Real>& sys, const DecoupledPolys<Real>& dp) {
  validate(sys);
  CoprimeFactorization<Real> f;
  f.a = sys.a;
  f.b = sys.b;
  f.variant = FactorVariant::decoupled_pair;
  std::tie(f.n, f.d) = from_decoupled(dp);
  detail::certify(f, "decoupled_factorization");
  return f;
}

/// Anti-right-coprime factorization s conj(N0)(s) - A2 N0(s) = B2 D0(s) of
/// an antilinear system, plus the assembled bimatrix pair
/// N1 = even part of N0, N2 = conj(odd part of N0).
template <typename Real>
CoprimeFactorization<Real> anti_coprime_factorization(const SystemModel<Real>& sys, Real tol = Tolerance<Real>::rank) {
  validate(sys);
  if (!sys.a.p1().isZero(0) || !sys.b.p1().isZero(0))
    throw PreconditionError("anti_coprime_factorization: requires A1 = 0 and B1 = 0");
  auto kp = detail::krylov_factorization<Complex<Real>>(sys.a.p2(), sys.b.p2(), true, tol);
  CoprimeFactorization<Real> f;
  f.a = sys.a;
  f.b = sys.b;
  f.variant = FactorVariant::anti;
  f.column_degrees = kp.indices;
  f.n0 = std::move(kp.n);
  f.d0 = std::move(kp.d);
  if (f.n0.degree() % 2 != 0) {
    f.n0.coeffs.push_back(ComplexMatrix<Real>::Zero(f.n0.rows(), f.n0.cols()));
    f.d0.coeffs.push_back(ComplexMatrix<Real>::Zero(f.d0.rows(), f.d0.cols()));
    f.padded = true;
  }
  for (std::size_t i = 0; i < f.n0.coeffs.size(); ++i) {
    if (i % 2 == 0) {
      f.n.coeffs.push_back(Bimatrix<Real>::linear(f.n0.coeffs[i]));
      f.d.coeffs.push_back(Bimatrix<Real>::linear(f.d0.coeffs[i]));
    } else {
      f.n.coeffs.push_back(Bimatrix<Real>::antilinear(f.n0.coeffs[i].conjugate()));
      f.d.coeffs.push_back(Bimatrix<Real>::antilinear(f.d0.coeffs[i].conjugate()));
    }
  }
  f.n.padded = f.d.padded = f.padded;
  detail::certify(f, "anti_coprime_factorization");
  return f;
}

}  // namespace bimat
