// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "bimat/bimat.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace bimat;
using oracle::Bi;
using oracle::C;
using oracle::CM;
using oracle::RM;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome golden() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto d = rendezvous::design(1.0, 1.0);
  const double elapsed = seconds_since(t0);
  const Bi ref = oracle::printed_gain(1.0, 1.0);
  double worst = 0;
  for (Eigen::Index c = 0; c < 3; ++c) {
    worst = std::max(worst, std::abs(d.design.k.p1()(0, c) - ref.p1()(0, c)) / std::abs(ref.p1()(0, c)));
    worst = std::max(worst, std::abs(d.design.k.p2()(0, c) - ref.p2()(0, c)) / std::abs(ref.p2()(0, c)));
  }
  return {worst < 1e-9 && elapsed < 1.0, fmt("max relative error %.2e, %.3f s", worst, elapsed)};
}

// Defective eigenvalues carry sqrt(eps) forward error, so this one runs in
// quad precision.
Outcome spectra() {
  using Q = boost::multiprecision::float128;
  using CQ = std::complex<Q>;
  auto distance = [](std::vector<CQ> got, const std::vector<C>& want) {
    std::vector<C> g;
    for (const auto& z : got) g.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
    // Distances are below double resolution; measure them in Q.
    double worst = 0;
    std::vector<bool> used(got.size(), false);
    for (const auto& w : want) {
      Q best = std::numeric_limits<Q>::infinity();
      std::size_t at = 0;
      for (std::size_t i = 0; i < got.size(); ++i) {
        if (used[i]) continue;
        const Q d = abs(got[i] - CQ(Q(w.real()), Q(w.imag())));
        if (d < best) best = d, at = i;
      }
      used[at] = true;
      worst = std::max(worst, static_cast<double>(best));
    }
    return got.size() == want.size() ? worst : INFINITY;
  };
  double worst = 0;
  const auto open = second_order_to_complex(rendezvous_model<Q>(Q(1)));
  worst = std::max(worst, distance(spectrum(open.a).eigenvalues, {0.0, 0.0, C(0, 1), C(0, -1), C(0, 1), C(0, -1)}));
  for (auto [w, g] : {std::pair{1.0, 0.5}, {0.2, 1.0}}) {
    const auto d = rendezvous::design<Q>(Q(w), Q(g));
    const std::vector<C> gamma = {-g, -g, C(-g, w), C(-g, -w), C(-g, w), C(-g, -w)};
    worst = std::max(worst, distance(spectrum(d.design.closed).eigenvalues, gamma));
  }
  return {worst < 1e-8, fmt("worst multiset distance %.2e (float128)", worst)};
}

Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  oracle::Rng rng(2024);
  double worst = 0;
  int count = 0;
  while (count < 200) {
    const Eigen::Index n = rng.integer(1, 3), p = rng.integer(1, 3);
    const int kind = count % 4;
    double err = 0;
    if (kind < 2) {
      const Bi a = rng.bimatrix(n, n), f = rng.bimatrix(p, p), c = rng.bimatrix(n, p);
      const RM ar = oracle::real_rep(a), fr = oracle::real_rep(f), cr = oracle::real_rep(c);
      const RM op = kind == 0 ? oracle::kron_sylvester_operator(ar, fr) : oracle::kron_stein_operator(ar, fr);
      if (oracle::singular_ratio(op) < 1e-6) continue;
      const RM ref = kind == 0 ? oracle::kron_sylvester(ar, fr, cr) : oracle::kron_stein(ar, fr, cr);
      const Bi x = kind == 0 ? solve_sylvester(a, f, c).x : solve_stein(a, f, c).x;
      err = oracle::rel(to_real(x), ref);
    } else {
      const CM a2 = rng.complex(n, n), f2 = rng.complex(p, p), c2 = rng.complex(n, p);
      const bool stein = kind == 3;
      if (oracle::singular_ratio(oracle::split_operator(a2, f2, stein)) < 1e-6) continue;
      const CM ref = oracle::split_solve(a2, f2, c2, stein);
      const CM x = stein ? solve_conjugate_stein(a2, f2, c2).x : solve_conjugate_sylvester(a2, f2, c2).x;
      err = oracle::rel(x, ref);
    }
    worst = std::max(worst, err);
    ++count;
  }
  const double elapsed = seconds_since(t0);
  return {worst < 1e-9 && elapsed < 30, fmt("worst relative error %.2e over 200 instances, %.2f s", worst, elapsed)};
}

Outcome dual_methods() {
  oracle::Rng rng(2025);
  double quad = 0, series = 0, recursion = 0;
  auto shifted = [](const Bi& a, double mu) {
    return a + Bi::linear(CM((mu - spectrum(a).mu) * CM::Identity(a.rows(), a.cols())));
  };
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = rng.integer(1, 2), p = rng.integer(1, 2);
    const Bi a = shifted(rng.bimatrix(n, n), -0.8), f = shifted(rng.bimatrix(p, p), -0.6);
    const Bi c = rng.bimatrix(n, p);
    // X = int e^{tA} C e^{tF} dt solves A X + X F = -C.
    const RM ref = oracle::integral_sylvester(oracle::real_rep(a), oracle::real_rep(c), oracle::real_rep(f), 1.4);
    quad = std::max(quad, oracle::rel(to_real(solve_sylvester(a, Bi(-f), Bi(-c)).x), ref));
  }
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index n = rng.integer(1, 3), p = rng.integer(1, 3);
    Bi a = rng.bimatrix(n, n), f = rng.bimatrix(p, p);
    const Bi c = rng.bimatrix(n, p);
    const auto q = static_cast<std::size_t>(2 * p);
    const auto sd = sylvester_d_terms(a, f, c, q, SeriesMethod::direct);
    const auto sr = sylvester_d_terms(a, f, c, q, SeriesMethod::recursive);
    const auto td = stein_d_terms(a, f, c, q, SeriesMethod::direct);
    const auto tr = stein_d_terms(a, f, c, q, SeriesMethod::recursive);
    for (std::size_t k = 0; k < q; ++k) {
      recursion = std::max(recursion, norm(sd[k] - sr[k]) / std::max(1.0, norm(sd[k])));
      recursion = std::max(recursion, norm(td[k] - tr[k]) / std::max(1.0, norm(td[k])));
    }
    a = (0.9 / spectrum(a).rho) * a;
    f = (0.9 / spectrum(f).rho) * f;
    series = std::max(series, oracle::rel(to_real(stein_series(a, f, c).x), to_real(solve_stein(a, f, c).x)));
  }
  return {quad < 1e-6 && series < 1e-10 && recursion < 1e-12,
          fmt("quadrature %.2e, series %.2e", quad, series) + fmt(", recursion %.2e", recursion)};
}

Outcome theorem1() {
  oracle::Rng rng(2026);
  double worst = 0;
  int mismatches = 0, count = 0;
  while (count < 100) {
    const Eigen::Index n = rng.integer(1, 4), m = rng.integer(1, 2), p = rng.integer(1, 3);
    const auto sys = make_system(rng.bimatrix(n, n), rng.bimatrix(n, m));
    CoprimeFactorization<double> cf;
    try {
      cf = coprime_factorization(sys);
    } catch (const StructuralError&) {
      continue;
    }
    const Bi f = rng.bimatrix(p, p);
    worst = std::max(worst, solve_gsyl(sys, f, cf, rng.complex(m, p), rng.complex(m, p)).residual);
    const auto orc = oracle_solve(OracleProblem<double>{OracleKind::gsyl_homog, sys.a, sys.b, f, Bi::zero(n, p)});
    if (oracle::theorem1_span(sys, f, cf) != orc.nullspace_dim) ++mismatches;
    ++count;
  }
  return {worst < 1e-9 && mismatches == 0,
          fmt("worst residual %.2e, span mismatches %.0f of 100", worst, mismatches)};
}

Outcome homomorphism() {
  oracle::Rng rng(2027);
  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Index n = rng.integer(1, 4);
    const Bi a = rng.bimatrix(n, n), b = rng.bimatrix(n, n);
    const RM ar = oracle::real_rep(a), br = oracle::real_rep(b);
    worst = std::max(worst, oracle::rel(to_real(a * b), RM(ar * br)));
    worst = std::max(worst, oracle::rel(to_real(adjoint(a)), RM(ar.transpose())));
    const RM inv = ar.inverse();
    worst = std::max(worst, (to_real(inverse(a)) - inv).norm() / inv.norm());
    const Bi s = (0.5 / std::max(1.0, norm(b))) * b;
    const RM e = oracle::expm(oracle::real_rep(s));
    worst = std::max(worst, (to_real(exponential(s, 1.0)) - e).norm() / e.norm());
  }
  return {worst < 1e-10, fmt("worst relative error %.2e over 1000 pairs", worst)};
}

Outcome antilinear_modes() {
  oracle::Rng rng(2028);
  double p2 = 0, p1 = 0;
  int disagreements = 0, count = 0;
  auto radius = [](const RM& m) {
    double r = 0;
    for (auto z : oracle::eig(m)) r = std::max(r, std::abs(z));
    return r;
  };
  while (count < 50) {
    const Eigen::Index n = rng.integer(1, 3);
    const auto sys =
        make_system(Bi::antilinear(rng.complex(n, n)), Bi::antilinear(rng.complex(n, 1)), TimeDomain::discrete);
    try {
      anti_coprime_factorization(sys);
    } catch (const StructuralError&) {
      continue;
    }
    // Every fifth target lies partly outside the unit disc.
    const double reach = count % 5 == 0 ? 1.4 : 0.9;
    std::vector<C> gn, ga;
    for (Eigen::Index i = 0; i < n; ++i) {
      const C z(rng.uniform(-reach, reach), rng.uniform(0.05, 0.4));
      gn.push_back(z);
      gn.push_back(std::conj(z));
      const double r = rng.uniform(0.1, reach);
      ga.push_back(r);
      ga.push_back(-r);
    }
    TargetOptions loose;
    loose.enforce_stability = false;
    const auto tn = build_target(gn, TargetMode::normalize, TimeDomain::discrete, loose);
    const auto ta = build_target(ga, TargetMode::anti_preserve, TimeDomain::discrete, loose);
    const auto dn = assign_poles(sys, tn);
    const auto da = assign_poles(sys, ta);
    p2 = std::max(p2, (inverse(dn.x) * closed_loop(sys, dn.k) * dn.x).p2().norm());
    p1 = std::max(p1, (inverse(da.x) * closed_loop(sys, da.k) * da.x).p1().norm());
    if (tn.stable != (radius(oracle::real_rep(closed_loop(sys, dn.k))) < 1)) ++disagreements;
    if (ta.stable != (radius(oracle::real_rep(closed_loop(sys, da.k))) < 1)) ++disagreements;
    ++count;
  }
  return {p2 < 1e-8 && p1 < 1e-8 && disagreements == 0,
          fmt("normalize |p2| %.2e, anti_preserve |p1| %.2e", p2, p1) +
              fmt(", stability disagreements %.0f", disagreements)};
}

Outcome continuous_rejection() {
  try {
    build_target(std::vector<C>{C(0.5), C(-0.5)}, TargetMode::anti_preserve, TimeDomain::continuous);
  } catch (const StructuralError& e) {
    return {true, std::string("StructuralError: ") + e.what()};
  } catch (const std::exception& e) {
    return {false, std::string("wrong error: ") + e.what()};
  }
  return {false, "target was accepted"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"golden gain reproduction", golden},
      {"rendezvous spectra", spectra},
      {"oracle equivalence", oracle_equivalence},
      {"dual-method identities", dual_methods},
      {"Theorem 1 property suite", theorem1},
      {"homomorphism suite", homomorphism},
      {"antilinear modes", antilinear_modes},
      {"continuous antilinear rejection", continuous_rejection},
  };
  int failed = 0;
  int index = 1;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", index++, name, o.detail.c_str());
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
