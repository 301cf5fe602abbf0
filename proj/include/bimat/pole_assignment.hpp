#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "bimat/bimatrix.hpp"
#include "bimat/poly.hpp"
#include "bimat/solvers.hpp"
#include "bimat/system.hpp"

namespace bimat {

// ---------------------------------------------------------------------------
// Second-order plants  M xi'' + D xi' + K xi = G v

template <typename Real = double>
struct SecondOrderModel {
  RealMatrix<Real> mass;
  RealMatrix<Real> damping;
  RealMatrix<Real> stiffness;
  RealMatrix<Real> input;

  Eigen::Index dofs() const { return mass.rows(); }
  Eigen::Index input_count() const { return input.cols(); }

  template <typename Other>
  SecondOrderModel<Other> cast() const {
    return {mass.template cast<Other>(), damping.template cast<Other>(), stiffness.template cast<Other>(),
            input.template cast<Other>()};
  }
};

enum class InputMode { paired, padded };

inline const char* to_string(InputMode m) { return m == InputMode::padded ? "padded" : "paired"; }

/// Complex-valued form with state x = xi + j xi'. Paired mode splits
/// G = [G1, G2] into one complex input; padded mode feeds each real input
/// through the real part only.
template <typename Real>
SystemModel<Real> second_order_to_complex(const SecondOrderModel<Real>& m2, InputMode mode = InputMode::paired) {
  using CM = ComplexMatrix<Real>;
  const Eigen::Index n = m2.dofs();
  require_square(m2.mass, "second_order_to_complex (M)");
  if (m2.damping.rows() != n || m2.damping.cols() != n || m2.stiffness.rows() != n || m2.stiffness.cols() != n)
    throw DimensionError("second_order_to_complex: D and K must be " + shape_string(n, n));
  if (m2.input.rows() != n || m2.input.cols() < 1)
    throw DimensionError("second_order_to_complex: G must have " + std::to_string(n) + " rows and at least one column");
  if (!m2.mass.allFinite() || !m2.damping.allFinite() || !m2.stiffness.allFinite() || !m2.input.allFinite())
    throw InputError("second_order_to_complex: non-finite coefficient");
  const Real cond = condition_number(m2.mass);
  if (!(cond <= Tolerance<Real>::singular_condition()))
    throw InputError("second_order_to_complex: mass matrix is singular (condition " +
                     std::to_string(static_cast<double>(cond)) + ")");

  const auto lu = m2.mass.partialPivLu();
  const RealMatrix<Real> md = lu.solve(m2.damping);
  const RealMatrix<Real> mk = lu.solve(m2.stiffness);
  const RealMatrix<Real> mg = lu.solve(m2.input);
  const RealMatrix<Real> eye = RealMatrix<Real>::Identity(n, n);
  const Real h(0.5);
  const Complex<Real> j(0, 1);

  const CM a1 = (-h * md).template cast<Complex<Real>>() - (h * j) * (eye + mk).template cast<Complex<Real>>();
  const CM a2 = (h * md).template cast<Complex<Real>>() - (h * j) * (eye - mk).template cast<Complex<Real>>();

  CM b1;
  if (mode == InputMode::paired) {
    RealMatrix<Real> g = mg;
    if (g.cols() % 2 != 0) {
      g.conservativeResize(Eigen::NoChange, g.cols() + 1);
      g.col(g.cols() - 1).setZero();
    }
    const Eigen::Index m = g.cols() / 2;
    b1 = (h * g.rightCols(m)).template cast<Complex<Real>>() + (h * j) * g.leftCols(m).template cast<Complex<Real>>();
  } else {
    b1 = (h * j) * mg.template cast<Complex<Real>>();
  }
  SystemModel<Real> sys{Bimatrix<Real>(a1, a2), Bimatrix<Real>(b1, CM(-b1)), TimeDomain::continuous,
                        Structure::general};
  validate(sys);
  return sys;
}

/// Clohessy-Wiltshire relative motion with xi = (radial, along-track, cross-track).
/// Without radial thrust the inputs are (a2, a3).
template <typename Real = double>
SecondOrderModel<Real> rendezvous_model(Real omega, bool include_radial = false) {
  if (!(omega > Real(0)) || !std::isfinite(static_cast<double>(omega)))
    throw InputError("rendezvous_model: omega must be positive");
  SecondOrderModel<Real> m2;
  m2.mass = RealMatrix<Real>::Identity(3, 3);
  m2.damping = RealMatrix<Real>::Zero(3, 3);
  m2.damping(0, 1) = -Real(2) * omega;
  m2.damping(1, 0) = Real(2) * omega;
  m2.stiffness = RealMatrix<Real>::Zero(3, 3);
  m2.stiffness(0, 0) = -Real(3) * omega * omega;
  m2.stiffness(2, 2) = omega * omega;
  const RealMatrix<Real> eye = RealMatrix<Real>::Identity(3, 3);
  m2.input = include_radial ? eye : RealMatrix<Real>(eye.rightCols(2));
  return m2;
}

// ---------------------------------------------------------------------------
// Target spectra

enum class TargetMode { general, normalize, anti_preserve };

inline const char* to_string(TargetMode m) {
  switch (m) {
    case TargetMode::normalize:
      return "normalize";
    case TargetMode::anti_preserve:
      return "anti_preserve";
    default:
      return "general";
  }
}

template <typename Real = double>
struct TargetSpectrum {
  std::vector<Complex<Real>> gamma;
  RealMatrix<Real> f_real;
  Bimatrix<Real> f;
  TargetMode mode = TargetMode::general;
  TimeDomain time_domain = TimeDomain::continuous;
  bool stable = false;  // continuous: mu(F) < 0; discrete: rho(F) < 1

  Eigen::Index states() const { return f.rows(); }
};

struct TargetOptions {
  // Couple repeated blocks into a single Jordan chain instead of a
  // semisimple block diagonal.
  bool cyclic = false;
  // anti_preserve only: refuse targets with rho(F2 conj(F2)) >= 1.
  bool enforce_stability = true;
};

namespace detail {

template <typename Real>
Real spectrum_tol(const std::vector<Complex<Real>>& g) {
  Real s(1);
  for (const auto& z : g) s = std::max(s, std::abs(z));
  return Real(1e-8) * s;
}

// Removes the element closest to `z` if within tol; returns success.
template <typename Real>
bool take(std::vector<Complex<Real>>& pool, Complex<Real> z, Real tol) {
  std::size_t best = pool.size();
  Real bd = tol;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const Real d = std::abs(pool[i] - z);
    if (d <= bd) {
      bd = d;
      best = i;
    }
  }
  if (best == pool.size()) return false;
  pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
  return true;
}

// Real block-diagonal matrix with spectrum `lambda` (conjugate-closed):
// 1x1 blocks for reals, [[a, b], [-b, a]] for a +- bj.
template <typename Real>
RealMatrix<Real> real_block_form(std::vector<Complex<Real>> lambda, bool cyclic, Real tol) {
  using std::abs;
  struct Block {
    Real a, b;
    bool pair;
  };
  std::vector<Block> blocks;
  std::sort(lambda.begin(), lambda.end(), [](const Complex<Real>& x, const Complex<Real>& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return std::abs(x.imag()) < std::abs(y.imag());
  });
  std::vector<Complex<Real>> pool = lambda;
  while (!pool.empty()) {
    const Complex<Real> z = pool.front();
    pool.erase(pool.begin());
    if (std::abs(z.imag()) <= tol) {
      blocks.push_back({z.real(), Real(0), false});
    } else {
      if (!take(pool, std::conj(z), tol))
        throw InputError("build_target: spectrum is not symmetric with respect to the real axis");
      blocks.push_back({z.real(), std::abs(z.imag()), true});
    }
  }
  Eigen::Index size = 0;
  for (const auto& b : blocks) size += b.pair ? 2 : 1;
  RealMatrix<Real> f = RealMatrix<Real>::Zero(size, size);
  Eigen::Index at = 0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Block& b = blocks[k];
    const Eigen::Index w = b.pair ? 2 : 1;
    f(at, at) = b.a;
    if (b.pair) {
      f(at, at + 1) = b.b;
      f(at + 1, at) = -b.b;
      f(at + 1, at + 1) = b.a;
    }
    if (cyclic && k + 1 < blocks.size()) {
      const Block& nb = blocks[k + 1];
      if (nb.pair == b.pair && abs(nb.a - b.a) <= tol && abs(nb.b - b.b) <= tol) {
        for (Eigen::Index i = 0; i < w; ++i) f(at + i, at + w + i) = Real(1);
      }
    }
    at += w;
  }
  return f;
}

template <typename Real>
void check_conjugate_symmetric(const std::vector<Complex<Real>>& g) {
  if (conjugation_defect(g) > spectrum_tol(g))
    throw InputError("build_target: spectrum is not symmetric with respect to the real axis");
}

template <typename Real>
bool is_stable(const RealMatrix<Real>& f, TimeDomain td) {
  if (f.rows() == 0) return true;
  return td == TimeDomain::continuous ? spectral_abscissa(f) < Real(0) : spectral_radius(f) < Real(1);
}

template <typename Real>
void finish_target(TargetSpectrum<Real>& t, const TargetOptions& opts) {
  if (t.mode == TargetMode::anti_preserve) {
    if (t.time_domain == TimeDomain::continuous)
      throw StructuralError(
          "build_target: anti_preserve needs discrete time; a continuous-time antilinear system cannot be "
          "asymptotically stable");
    const ComplexMatrix<Real> g = t.f.p2() * t.f.p2().conjugate();
    const Real rho = spectral_radius(g);
    if (opts.enforce_stability && !(rho < Real(1)))
      throw InputError("build_target: anti_preserve target has rho(F2 conj(F2)) = " +
                       std::to_string(static_cast<double>(rho)) + " >= 1");
  }
  t.stable = is_stable(t.f_real, t.time_domain);
}

}  // namespace detail

/// Target from a desired eigenvalue multiset of size 2n.
///
/// general: real block-diagonal F. normalize: F = {diag(L), 0} with L one
/// member of each conjugate pair (real values must come in pairs).
/// anti_preserve: F = {0, M} with M real and spectrum L, where the target is
/// L together with -L.
template <typename Real>
TargetSpectrum<Real> build_target(const std::vector<Complex<Real>>& gamma, TargetMode mode, TimeDomain td,
                                  const TargetOptions& opts = {}) {
  if (gamma.empty() || gamma.size() % 2 != 0)
    throw InputError("build_target: spectrum must have an even, positive number of entries, got " +
                     std::to_string(gamma.size()));
  for (const auto& z : gamma)
    if (!std::isfinite(static_cast<double>(z.real())) || !std::isfinite(static_cast<double>(z.imag())))
      throw InputError("build_target: non-finite eigenvalue");
  detail::check_conjugate_symmetric(gamma);
  const Real tol = detail::spectrum_tol(gamma);
  const Eigen::Index n = static_cast<Eigen::Index>(gamma.size() / 2);

  TargetSpectrum<Real> t;
  t.gamma = gamma;
  t.mode = mode;
  t.time_domain = td;

  switch (mode) {
    case TargetMode::general: {
      t.f_real = detail::real_block_form(gamma, opts.cyclic, tol);
      t.f = from_real(t.f_real);
      break;
    }
    case TargetMode::normalize: {
      // Conjugate pairs contribute their upper member; real values pair up.
      std::vector<Complex<Real>> pool = gamma;
      std::sort(pool.begin(), pool.end(),
                [](const Complex<Real>& a, const Complex<Real>& b) { return a.real() < b.real(); });
      ComplexVector<Real> diag(n);
      Eigen::Index k = 0;
      while (!pool.empty()) {
        Complex<Real> z = pool.front();
        pool.erase(pool.begin());
        if (std::abs(z.imag()) <= tol) z = Complex<Real>(z.real(), Real(0));
        if (!detail::take(pool, std::conj(z), tol))
          throw InputError("build_target: normalize mode needs every real eigenvalue with even multiplicity");
        diag(k++) = z.imag() < Real(0) ? std::conj(z) : z;
      }
      ComplexMatrix<Real> f1 = diag.asDiagonal();
      if (opts.cyclic)
        for (Eigen::Index i = 0; i + 1 < n; ++i)
          if (std::abs(diag(i) - diag(i + 1)) <= tol) f1(i, i + 1) = Real(1);
      t.f = Bimatrix<Real>::linear(std::move(f1));
      t.f_real = to_real(t.f);
      break;
    }
    case TargetMode::anti_preserve: {
      if (td == TimeDomain::continuous)
        throw StructuralError(
            "build_target: anti_preserve needs discrete time; a continuous-time antilinear system cannot be "
            "asymptotically stable");
      std::vector<Complex<Real>> pool = gamma, lambda;
      while (!pool.empty()) {
        const Complex<Real> z = pool.front();
        pool.erase(pool.begin());
        if (std::abs(z.imag()) <= tol) {
          if (!detail::take(pool, -z, tol))
            throw InputError("build_target: anti_preserve needs a spectrum symmetric under negation");
          lambda.push_back(Complex<Real>(z.real(), Real(0)));
        } else {
          if (!detail::take(pool, std::conj(z), tol) || !detail::take(pool, -z, tol) ||
              !detail::take(pool, -std::conj(z), tol))
            throw InputError("build_target: anti_preserve needs a spectrum symmetric under negation");
          lambda.push_back(z);
          lambda.push_back(std::conj(z));
        }
      }
      const RealMatrix<Real> m = detail::real_block_form(lambda, opts.cyclic, tol);
      t.f = Bimatrix<Real>::antilinear(m.template cast<Complex<Real>>());
      t.f_real = to_real(t.f);
      break;
    }
  }
  detail::finish_target(t, opts);
  return t;
}

/// Target from an explicit real matrix; the mode is checked, not imposed.
template <typename Real>
TargetSpectrum<Real> build_target(const RealMatrix<Real>& f_real, TargetMode mode, TimeDomain td,
                                  const TargetOptions& opts = {}) {
  require_square(f_real, "build_target");
  if (f_real.rows() == 0 || f_real.rows() % 2 != 0)
    throw DimensionError("build_target: F must have even positive dimension, got " +
                         shape_string(f_real.rows(), f_real.cols()));
  if (!f_real.allFinite()) throw InputError("build_target: non-finite entry in F");
  TargetSpectrum<Real> t;
  t.f_real = f_real;
  t.f = from_real(f_real);
  t.gamma = eigenvalues(f_real);
  t.mode = mode;
  t.time_domain = td;
  const Real tol = Real(1e-12) * std::max(Real(1), f_real.norm());
  if (mode == TargetMode::normalize && t.f.p2().norm() > tol)
    throw InputError("build_target: normalize mode requires F2 = 0 for the given F");
  if (mode == TargetMode::anti_preserve) {
    if (td == TimeDomain::continuous)
      throw StructuralError(
          "build_target: anti_preserve needs discrete time; a continuous-time antilinear system cannot be "
          "asymptotically stable");
    if (t.f.p1().norm() > tol) throw InputError("build_target: anti_preserve mode requires F1 = 0 for the given F");
  }
  detail::finish_target(t, opts);
  return t;
}

// ---------------------------------------------------------------------------
// Feedback design

template <typename Real>
Bimatrix<Real> closed_loop(const SystemModel<Real>& sys, const Bimatrix<Real>& k) {
  if (k.rows() != sys.inputs() || k.cols() != sys.states())
    throw DimensionError("closed_loop: K is " + shape_string(k.rows(), k.cols()) + ", expected " +
                         shape_string(sys.inputs(), sys.states()));
  return sys.a + sys.b * k;
}

/// Real gain acting on [xi; xi'] (or [Re x; Im x] in general).
template <typename Real>
RealMatrix<Real> realize_feedback(const Bimatrix<Real>& k) {
  return to_real(k);
}

template <typename Real = double>
struct DesignReport {
  std::vector<Complex<Real>> closed_loop_spectrum;
  bool spectrum_match = false;
  Real spectrum_distance = 0;     // worst paired eigenvalue distance
  Real similarity_residual = 0;   // ||X^-1 (A + BK) X - F|| / max(1, ||F||), real representation
  Real gsyl_residual = 0;
  Real condition_x = 0;
  int draws = 0;                  // number of Z tried
  Real transformed_p1 = 0;        // ||p1|| of X^-1 (A + BK) X
  Real transformed_p2 = 0;        // ||p2|| of X^-1 (A + BK) X
  std::string factorization;      // variant actually used
  std::string solver;             // gain formula actually used
};

template <typename Real = double>
struct FeedbackDesign {
  Bimatrix<Real> k;
  Bimatrix<Real> x;
  Bimatrix<Real> y;
  ComplexMatrix<Real> z1;
  ComplexMatrix<Real> z2;
  RealMatrix<Real> real_gain;
  Bimatrix<Real> closed;
  DesignReport<Real> report;
};

template <typename Real = double>
struct AssignOptions {
  std::uint64_t seed = 0x5eed;
  int max_draws = 32;
  Real max_condition = Real(1e10);
  Real match_tol = Real(1e-8);  // absolute and relative eigenvalue tolerance
  // Random search keeps drawing while X^-1 (A + BK) X misses F by more than this.
  Real similarity_tol = Real(1e-8);
  // Explicit free parameters; skips the random search.
  std::optional<std::pair<ComplexMatrix<Real>, ComplexMatrix<Real>>> z;
};

namespace detail {

template <typename Real>
ComplexMatrix<Real> random_complex(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix<Real> z(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = Complex<Real>(Real(re), Real(im));
    }
  return z;
}

// K = Y X^{-1}. Linear X and Y give {Y1 X1^{-1}, 0} exactly; otherwise
// solve X_r^T K_r^T = Y_r^T in the real representation.
template <typename Real>
Bimatrix<Real> right_divide(const Bimatrix<Real>& y, const Bimatrix<Real>& x) {
  if (x.p2().isZero(0) && y.p2().isZero(0)) {
    const ComplexMatrix<Real> kt = x.p1().transpose().partialPivLu().solve(ComplexMatrix<Real>(y.p1().transpose()));
    return Bimatrix<Real>::linear(kt.transpose());
  }
  const RealMatrix<Real> xr = to_real(x);
  const RealMatrix<Real> kt = xr.transpose().partialPivLu().solve(RealMatrix<Real>(to_real(y).transpose()));
  return from_real(RealMatrix<Real>(kt.transpose()));
}

}  // namespace detail

template <typename Real>
void verify_design(const SystemModel<Real>& sys, const TargetSpectrum<Real>& target, FeedbackDesign<Real>& d,
                   Real match_tol = Real(1e-8)) {
  auto& r = d.report;
  d.closed = closed_loop(sys, d.k);
  d.real_gain = realize_feedback(d.k);
  const RealMatrix<Real> cl = to_real(d.closed);
  r.closed_loop_spectrum = eigenvalues(cl);
  const auto m = match_multisets(r.closed_loop_spectrum, target.gamma, match_tol, match_tol);
  r.spectrum_match = m.matched;
  r.spectrum_distance = m.max_distance;
  const RealMatrix<Real> xr = to_real(d.x);
  const RealMatrix<Real> s = xr.partialPivLu().solve(RealMatrix<Real>(cl * xr));
  r.similarity_residual = (s - target.f_real).norm() / std::max(Real(1), target.f_real.norm());
  const Bimatrix<Real> sb = from_real(s);
  r.transformed_p1 = sb.p1().norm();
  r.transformed_p2 = sb.p2().norm();
  r.gsyl_residual = gsyl_residual(sys.a, sys.b, target.f, d.x, d.y);
  r.condition_x = condition_number(xr);
}

/// Full-state-feedback pole assignment through the generalized Sylvester
/// bimatrix equation: K = Y X^{-1} for a nonsingular solution (X, Y).
template <typename Real>
FeedbackDesign<Real> assign_poles(const SystemModel<Real>& sys, const TargetSpectrum<Real>& target,
                                  const AssignOptions<Real>& opts = {}) {
  validate(sys);
  const Eigen::Index n = sys.states(), m = sys.inputs();
  if (target.states() != n)
    throw DimensionError("assign_poles: target has " + std::to_string(target.states()) + " states, system has " +
                         std::to_string(n));
  if (target.mode == TargetMode::anti_preserve) {
    if (sys.time_domain == TimeDomain::continuous)
      throw StructuralError("assign_poles: anti_preserve design needs a discrete-time system");
    if (sys.structure != Structure::antilinear)
      throw PreconditionError("assign_poles: anti_preserve design needs an antilinear system");
  }

  const bool anti = sys.structure == Structure::antilinear;
  const CoprimeFactorization<Real> cf = anti ? anti_coprime_factorization(sys) : coprime_factorization(sys);
  const AntiMode amode = target.mode == TargetMode::normalize       ? AntiMode::normalize
                         : target.mode == TargetMode::anti_preserve ? AntiMode::anti_preserve
                                                                    : AntiMode::general;
  // Normal plant with a linear target: Z2 = 0 keeps the gain linear.
  const bool linear_gain = sys.structure == Structure::normal && target.f.p2().isZero(0);

  auto solve = [&](const ComplexMatrix<Real>& z1, const ComplexMatrix<Real>& z2) {
    return anti ? solve_antilinear(sys, amode, target.f, cf, z1, z2) : solve_gsyl(sys, target.f, cf, z1, z2);
  };

  FeedbackDesign<Real> d;
  d.report.factorization = to_string(cf.variant);
  d.report.solver = anti ? std::string("antilinear/") + to_string(amode) : std::string("polynomial");
  auto finish = [&](const GSylSolution<Real>& sol) {
    FeedbackDesign<Real> out = d;
    out.x = sol.x;
    out.y = sol.y;
    out.z1 = sol.z1;
    out.z2 = sol.z2;
    out.k = detail::right_divide(out.y, out.x);
    verify_design(sys, target, out, opts.match_tol);
    return out;
  };

  if (opts.z) {
    const GSylSolution<Real> sol = solve(opts.z->first, opts.z->second);
    d.report.draws = 1;
    if (!(sol.condition_x <= opts.max_condition))
      throw SingularityError("assign_poles: X is singular for the supplied Z", static_cast<double>(sol.condition_x));
    return finish(sol);
  }

  // A nonsingular but poorly conditioned X can amplify rounding in K past
  // the similarity tolerance; another draw usually fixes that.
  std::mt19937_64 rng(opts.seed);
  Real best_condition = std::numeric_limits<Real>::infinity();
  std::optional<FeedbackDesign<Real>> best;
  int tried = 0;
  for (int t = 0; t < opts.max_draws; ++t) {
    tried = t + 1;
    const ComplexMatrix<Real> z1 = detail::random_complex<Real>(rng, m, n);
    ComplexMatrix<Real> z2 = detail::random_complex<Real>(rng, m, n);
    if (linear_gain) z2.setZero();
    const GSylSolution<Real> sol = solve(z1, z2);
    best_condition = std::min(best_condition, sol.condition_x);
    if (!(sol.condition_x <= opts.max_condition)) continue;
    FeedbackDesign<Real> cand = finish(sol);
    const bool good = cand.report.similarity_residual <= opts.similarity_tol;
    if (!best || cand.report.similarity_residual < best->report.similarity_residual) best = std::move(cand);
    if (good) break;
  }
  if (!best)
    throw NonsingularSearchError("assign_poles: no nonsingular X in " + std::to_string(opts.max_draws) + " draws",
                                 static_cast<double>(best_condition));
  best->report.draws = tried;
  return *best;
}

}  // namespace bimat
