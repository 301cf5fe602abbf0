#include <doctest.h>

#include <algorithm>

#include "bimat/bimat.hpp"
#include "oracles.hpp"

using namespace bimat;
using oracle::Bi;
using oracle::C;
using oracle::CM;
using oracle::RM;

namespace {

std::vector<CM> firsts(const PolyBimatrix<double>& p) {
  std::vector<CM> out;
  for (const auto& c : p.coeffs) out.push_back(c.p1());
  return out;
}

std::vector<CM> seconds(const PolyBimatrix<double>& p) {
  std::vector<CM> out;
  for (const auto& c : p.coeffs) out.push_back(c.p2());
  return out;
}

Bi value(const PolyBimatrix<double>& p, double s) {
  return Bi(oracle::naive_poly(firsts(p), s), oracle::naive_poly(seconds(p), s));
}

// max over random real s of ||s N - A N - B D|| in the real representation.
double identity_error(const Bi& a, const Bi& b, const PolyBimatrix<double>& n, const PolyBimatrix<double>& d,
                      oracle::Rng& rng) {
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const double s = rng.uniform(-2, 2);
    const RM nr = oracle::real_rep(value(n, s)), dr = oracle::real_rep(value(d, s));
    const RM r = s * nr - oracle::real_rep(a) * nr - oracle::real_rep(b) * dr;
    worst = std::max(worst, r.norm() / std::max(1.0, nr.norm() + dr.norm()));
  }
  return worst;
}

SystemModel<double> random_general(oracle::Rng& rng, Eigen::Index n, Eigen::Index m) {
  return make_system(rng.bimatrix(n, n), rng.bimatrix(n, m));
}

SystemModel<double> random_anti(oracle::Rng& rng, Eigen::Index n, Eigen::Index m,
                                TimeDomain td = TimeDomain::continuous) {
  return make_system(Bi::antilinear(rng.complex(n, n)), Bi::antilinear(rng.complex(n, m)), td);
}

}  // namespace

TEST_CASE("minimal right factorization examples") {
  {
    const auto f = minimal_right_factorization<double>(RM::Zero(1, 1), RM::Ones(1, 1));
    REQUIRE(f.d0.degree() == 1);
    // N = c, D = c s for some nonzero c.
    const double c = f.n0.coeffs[0](0, 0);
    CHECK(std::abs(c) > 0);
    CHECK(std::abs(f.d0.coeffs[0](0, 0)) < 1e-15);
    CHECK(f.d0.coeffs[1](0, 0) == doctest::Approx(c));
    for (std::size_t i = 1; i < f.n0.coeffs.size(); ++i) CHECK(std::abs(f.n0.coeffs[i](0, 0)) < 1e-15);
  }
  {
    RM a(2, 2), b(2, 1);
    a << 0, 1, 0, 0;
    b << 0, 1;
    const auto f = minimal_right_factorization<double>(a, b);
    REQUIRE(f.d0.degree() == 2);
    const double c = f.d0.coeffs[2](0, 0);
    CHECK(std::abs(c) > 0);
    CHECK(std::abs(f.d0.coeffs[0](0, 0)) < 1e-15);
    CHECK(std::abs(f.d0.coeffs[1](0, 0)) < 1e-15);
    // N(s) = c [1; s]
    CHECK(f.n0.coeffs[0](0, 0) == doctest::Approx(c));
    CHECK(std::abs(f.n0.coeffs[0](1, 0)) < 1e-15);
    CHECK(std::abs(f.n0.coeffs[1](0, 0)) < 1e-15);
    CHECK(f.n0.coeffs[1](1, 0) == doctest::Approx(c));
    CHECK(f.column_degrees == std::vector<int>{2});
  }
  RM a = RM::Identity(2, 2), b(2, 1);
  b << 1, 1;
  CHECK_THROWS_AS(minimal_right_factorization<double>(a, b), StructuralError);
  CHECK_THROWS_AS(minimal_right_factorization<double>(a, RM(RM::Ones(3, 1))), DimensionError);
}

TEST_CASE("minimal right factorization on random pairs") {
  oracle::Rng rng(31);
  for (int t = 0; t < 40; ++t) {
    const Eigen::Index q = rng.integer(1, 6), r = rng.integer(1, 3);
    const RM a = rng.real(q, q), b = rng.real(q, r);
    const auto f = minimal_right_factorization<double>(a, b);
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
      const C s(rng.normal(), rng.normal());
      std::vector<CM> nc, dc;
      for (const auto& c : f.n0.coeffs) nc.push_back(c.cast<C>());
      for (const auto& c : f.d0.coeffs) dc.push_back(c.cast<C>());
      const CM nv = oracle::naive_poly(nc, s), dv = oracle::naive_poly(dc, s);
      const CM res = s * nv - a.cast<C>() * nv - b.cast<C>() * dv;
      worst = std::max(worst, res.norm() / std::max(1.0, nv.norm() + dv.norm()));
    }
    CHECK(worst < 1e-9);
    int total = 0;
    for (int d : f.column_degrees) total += d;
    CHECK(total == q);
    // Minimal column degrees are the controllability indices: the number of
    // indices >= k is rank K_k - rank K_{k-1}, K_k = [B, AB, ..., A^{k-1} B].
    std::vector<int> expected(static_cast<std::size_t>(r), 0);
    Eigen::Index prev = 0;
    RM krylov(q, 0), block = b;
    for (Eigen::Index k = 1; k <= q; ++k) {
      krylov.conservativeResize(Eigen::NoChange, krylov.cols() + r);
      krylov.rightCols(r) = block;
      block = a * block;
      Eigen::FullPivLU<RM> lu(krylov);
      lu.setThreshold(1e-10);
      const Eigen::Index rank = lu.rank();
      for (Eigen::Index i = 0; i < rank - prev; ++i) ++expected[static_cast<std::size_t>(i)];
      prev = rank;
    }
    std::vector<int> got = f.column_degrees;
    std::sort(got.rbegin(), got.rend());
    CHECK(got == expected);
  }
}

TEST_CASE("coprime factorization of a normal system") {
  oracle::Rng rng(32);
  const auto sys = make_system(Bi::linear(rng.complex(3, 3)), Bi::linear(rng.complex(3, 1)));
  REQUIRE(sys.structure == Structure::normal);
  const auto f = coprime_factorization(sys);
  CHECK(f.certified);
  for (const auto& c : f.n.coeffs) CHECK(c.p2().isZero(0));
  for (const auto& c : f.d.coeffs) CHECK(c.p2().isZero(0));
  CHECK(identity_error(sys.a, sys.b, f.n, f.d, rng) < 1e-9);
}

TEST_CASE("coprime factorization on random general systems") {
  oracle::Rng rng(33);
  for (int t = 0; t < 30; ++t) {
    const auto sys = random_general(rng, rng.integer(1, 3), 1);
    const auto f = coprime_factorization(sys);
    CHECK(f.certified);
    CHECK(f.report.pass);
    CHECK(f.report.residual < 1e-9);
    CHECK(identity_error(sys.a, sys.b, f.n, f.d, rng) < 1e-9);
  }
  const Bi a = Bi::linear(CM::Identity(2, 2));
  CM b1(2, 1);
  b1 << 1, 1;
  CHECK_THROWS_AS(coprime_factorization(make_system(a, Bi::linear(b1))), StructuralError);
}

TEST_CASE("rendezvous factorization against the printed polynomials") {
  oracle::Rng rng(34);
  for (double w : {1.0, 0.2}) {
    const auto sys = second_order_to_complex(rendezvous_model(w));
    const auto f = coprime_factorization(sys);
    REQUIRE(f.certified);
    CHECK(identity_error(sys.a, sys.b, f.n, f.d, rng) < 1e-9);

    // The printed pair satisfies the identity for the printed A, B.
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
      const double s = rng.uniform(-2, 2);
      const auto [n1, n2] = oracle::printed_n(w, s);
      const auto [d1, d2] = oracle::printed_d(w, s);
      const RM nr = oracle::real_rep(Bi(n1, n2)), dr = oracle::real_rep(Bi(d1, d2));
      const RM r = s * nr - oracle::real_rep(oracle::printed_a(w)) * nr - oracle::real_rep(oracle::printed_b()) * dr;
      worst = std::max(worst, r.norm());
    }
    CHECK(worst < 1e-12);

    // Same column space: printed(s) = computed(s) T for one constant real T.
    RM lhs(0, 2), rhs(0, 2);
    for (int i = 0; i < 12; ++i) {
      const double s = -1.5 + 0.25 * i;
      const auto [n1, n2] = oracle::printed_n(w, s);
      const auto [d1, d2] = oracle::printed_d(w, s);
      RM p(8, 2), c(8, 2);
      p << oracle::real_rep(Bi(n1, n2)), oracle::real_rep(Bi(d1, d2));
      c << oracle::real_rep(value(f.n, s)), oracle::real_rep(value(f.d, s));
      lhs.conservativeResize(lhs.rows() + 8, 2);
      rhs.conservativeResize(rhs.rows() + 8, 2);
      lhs.bottomRows(8) = c;
      rhs.bottomRows(8) = p;
    }
    const RM t = lhs.colPivHouseholderQr().solve(rhs);
    CHECK((lhs * t - rhs).norm() / rhs.norm() < 1e-10);
    CHECK(std::abs(t.determinant()) > 1e-6);
  }
}

TEST_CASE("coprimeness checks") {
  // [1; s] over s^2 is coprime.
  PolyMatrix<C> good(2, 1, 2);
  good.coeffs[0](0, 0) = 1;
  good.coeffs[1](1, 0) = 1;
  PolyMatrix<C> stacked(3, 1, 2);
  for (int i = 0; i <= 2; ++i) stacked.coeffs[i].topRows(2) = good.coeffs[i];
  stacked.coeffs[2](2, 0) = 1;
  CHECK(check_full_column_rank(stacked).pass);

  // N = D = s I shares the zero s = 0.
  PolyMatrix<C> bad(4, 2, 1);
  bad.coeffs[1].topRows(2) = CM::Identity(2, 2);
  bad.coeffs[1].bottomRows(2) = CM::Identity(2, 2);
  const auto rep = check_full_column_rank(bad);
  CHECK_FALSE(rep.pass);
  REQUIRE_FALSE(rep.failures.empty());
  bool at_zero = false;
  for (auto z : rep.failures) at_zero = at_zero || std::abs(z) < 1e-8;
  CHECK(at_zero);

  const auto cf = coprime_factorization(second_order_to_complex(rendezvous_model(1.0)));
  CHECK(check_coprime(cf).pass);
}

TEST_CASE("anti coprime factorization") {
  const auto scalar = make_system(Bi::antilinear(CM::Ones(1, 1)), Bi::antilinear(CM::Ones(1, 1)));
  REQUIRE(scalar.structure == Structure::antilinear);
  const auto f = anti_coprime_factorization(scalar);
  CHECK(f.certified);
  // N0 = c, D0 = c (s - 1).
  REQUIRE(f.n0.coeffs.size() >= 1);
  const C c = f.n0.coeffs[0](0, 0);
  CHECK(std::abs(c) > 0);
  CHECK(std::abs(f.d0.coeffs[0](0, 0) + c) < 1e-14);
  CHECK(std::abs(f.d0.coeffs[1](0, 0) - c) < 1e-14);
  for (std::size_t i = 1; i < f.n0.coeffs.size(); ++i) CHECK(std::abs(f.n0.coeffs[i](0, 0)) < 1e-14);
  CHECK(f.padded);  // degree 1 is padded to 2

  oracle::Rng rng(35);
  for (int t = 0; t < 30; ++t) {
    const auto sys = random_anti(rng, rng.integer(1, 3), rng.integer(1, 2));
    const auto af = anti_coprime_factorization(sys);
    CHECK(af.certified);
    CHECK(af.n0.degree() % 2 == 0);
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
      const double s = rng.uniform(-2, 2);
      const CM n0 = oracle::naive_poly(af.n0.coeffs, s), d0 = oracle::naive_poly(af.d0.coeffs, s);
      const CM r = s * n0.conjugate() - sys.a.p2() * n0 - sys.b.p2() * d0;
      worst = std::max(worst, r.norm() / std::max(1.0, n0.norm() + d0.norm()));
    }
    CHECK(worst < 1e-9);
    // Assembled bimatrix pair satisfies the general identity too.
    CHECK(identity_error(sys.a, sys.b, af.n, af.d, rng) < 1e-9);

    // N-(s) = N0(-s), D-(s) = D0(-s) solve the second decoupled equation
    // s N- - (A1 - conj A2) N- = (B1 - conj B2) D-, with A1 = B1 = 0.
    const auto dp = to_decoupled(af.n, af.d);
    for (int i = 0; i < 5; ++i) {
      const C s(rng.normal(), rng.normal());
      CHECK(oracle::rel(evaluate(dp.n_minus, s), oracle::naive_poly(af.n0.coeffs, -s)) < 1e-12);
      CHECK(oracle::rel(evaluate(dp.d_minus, s), oracle::naive_poly(af.d0.coeffs, -s)) < 1e-12);
    }
  }

  CHECK_THROWS_AS(anti_coprime_factorization(random_general(rng, 2, 1)), PreconditionError);
}

TEST_CASE("eval_poly") {
  oracle::Rng rng(36);
  PolyBimatrix<double> p;
  p.coeffs.push_back(rng.bimatrix(2, 3));
  for (C s : {C(0), C(1.5, -2)}) {
    const auto [n1, n2] = eval_poly(p, s);
    CHECK(n1 == p.coeffs[0].p1());
    CHECK(n2 == p.coeffs[0].p2());
  }
  PolyBimatrix<double> mono;
  mono.coeffs = {Bi::zero(2, 2), Bi::zero(2, 2), rng.bimatrix(2, 2)};
  const auto [m1, m2] = eval_poly(mono, C(2));
  CHECK(oracle::rel(m1, CM(4.0 * mono.coeffs[2].p1())) < 1e-15);
  CHECK(oracle::rel(m2, CM(4.0 * mono.coeffs[2].p2())) < 1e-15);

  for (int t = 0; t < 100; ++t) {
    PolyBimatrix<double> q;
    const int deg = rng.integer(0, 5);
    for (int i = 0; i <= deg; ++i) q.coeffs.push_back(rng.bimatrix(2, 2));
    const C s(rng.normal(), rng.normal());
    const auto [q1, q2] = eval_poly(q, s);
    CHECK(oracle::rel(q1, oracle::naive_poly(firsts(q), s)) < 1e-12);
    CHECK(oracle::rel(q2, oracle::naive_poly(seconds(q), s)) < 1e-12);
  }
}

TEST_CASE("decoupling round trip") {
  oracle::Rng rng(37);
  for (int t = 0; t < 50; ++t) {
    const int deg = rng.integer(0, 4);
    PolyBimatrix<double> n, d;
    for (int i = 0; i <= deg; ++i) {
      n.coeffs.push_back(rng.bimatrix(3, 2));
      d.coeffs.push_back(rng.bimatrix(2, 2));
    }
    const auto dp = to_decoupled(n, d);
    for (int i = 0; i <= deg; ++i) {
      CHECK(dp.n_plus.coeffs[i] == CM(n.coeffs[i].p1() + n.coeffs[i].p2().conjugate()));
      CHECK(dp.d_minus.coeffs[i] == CM(d.coeffs[i].p1() - d.coeffs[i].p2().conjugate()));
    }
    const auto [n2, d2] = from_decoupled(dp);
    const auto back = to_decoupled(n2, d2);
    for (int i = 0; i <= deg; ++i) {
      CHECK(oracle::rel(n2.coeffs[i].p1(), n.coeffs[i].p1()) < 1e-15);
      CHECK(oracle::rel(n2.coeffs[i].p2(), n.coeffs[i].p2()) < 1e-15);
      CHECK(oracle::rel(d2.coeffs[i].p2(), d.coeffs[i].p2()) < 1e-15);
      CHECK(oracle::rel(back.n_minus.coeffs[i], dp.n_minus.coeffs[i]) < 1e-15);
    }
  }

  // A certified factorization survives reassembly from its halves.
  const auto sys = random_general(rng, 2, 1);
  const auto f = coprime_factorization(sys);
  const auto g = decoupled_factorization(sys, to_decoupled(f.n, f.d));
  CHECK(g.certified);
  CHECK(g.variant == FactorVariant::decoupled_pair);
  CHECK(identity_error(sys.a, sys.b, g.n, g.d, rng) < 1e-9);
}
