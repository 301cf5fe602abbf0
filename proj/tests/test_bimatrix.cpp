#include <doctest.h>

#include "bimat/bimat.hpp"
#include "oracles.hpp"

using namespace bimat;
using oracle::Bi;
using oracle::C;
using oracle::CM;
using oracle::CV;
using oracle::RM;

namespace {
const C j(0, 1);

CM scalar(C v) { return CM::Constant(1, 1, v); }
}  // namespace

TEST_CASE("apply examples") {
  const Bi b(scalar(j), scalar(1));
  CV x(1);
  x << C(1, 1);
  CHECK(std::abs(bimat::apply(b, x)(0)) < 1e-15);

  oracle::Rng rng(11);
  const CV y = rng.complex(4, 1);
  CHECK((bimat::apply(Bi::identity(4), CV(y)) - y).norm() == 0);

  for (int t = 0; t < 50; ++t) {
    const Bi r = rng.bimatrix(3, 3);
    const CV v = rng.complex(3, 1);
    Eigen::VectorXd stacked(6);
    stacked << v.real(), v.imag();
    const Eigen::VectorXd out = oracle::real_rep(r) * stacked;
    const CV got = bimat::apply(r, v);
    CHECK((got.real() - out.head(3)).norm() < 1e-13);
    CHECK((got.imag() - out.tail(3)).norm() < 1e-13);
  }
  CHECK_THROWS_AS(bimat::apply(Bi::identity(2), CV(CV::Zero(3))), DimensionError);
}

TEST_CASE("multiply examples") {
  oracle::Rng rng(12);
  const Bi b = rng.bimatrix(3, 2);
  const Bi prod = multiply(Bi::identity(3), b);
  CHECK(prod.p1() == b.p1());
  CHECK(prod.p2() == b.p2());
  const Bi cc = multiply(Bi::conjugation(3), Bi::conjugation(3));
  CHECK(cc.p1() == CM::Identity(3, 3));
  CHECK(cc.p2().isZero(0));
  for (int t = 0; t < 100; ++t) {
    const Bi a = rng.bimatrix(3, 4), c = rng.bimatrix(4, 2);
    CHECK(oracle::rel(to_real(multiply(a, c)), RM(oracle::real_rep(a) * oracle::real_rep(c))) < 1e-12);
  }
  CHECK_THROWS_AS(multiply(rng.bimatrix(2, 3), rng.bimatrix(2, 3)), DimensionError);
}

TEST_CASE("adjoint examples") {
  oracle::Rng rng(13);
  const Bi id = adjoint(Bi::identity(3));
  CHECK(id.p1() == CM::Identity(3, 3));
  CHECK(id.p2().isZero(0));
  for (int t = 0; t < 100; ++t) {
    const Bi b = rng.bimatrix(2, 3);
    const Bi back = adjoint(adjoint(b));
    CHECK(back.p1() == b.p1());
    CHECK(back.p2() == b.p2());
    CHECK((to_real(adjoint(b)) - oracle::real_rep(b).transpose()).norm() < 1e-14);
  }
}

TEST_CASE("real representation") {
  CHECK(to_real(Bi::identity(3)) == RM::Identity(6, 6));
  RM expected = RM::Identity(6, 6);
  expected.bottomRightCorner(3, 3) *= -1;
  CHECK(to_real(Bi::conjugation(3)) == expected);

  oracle::Rng rng(14);
  for (int t = 0; t < 100; ++t) {
    const Bi b = rng.bimatrix(3, 2);
    CHECK((to_real(b) - oracle::real_rep(b)).norm() < 1e-14);
    const RM r = rng.real(4, 6);
    const Bi back = from_real(r);
    const Bi ref = oracle::bimatrix_of(r);
    CHECK((back.p1() - ref.p1()).norm() < 1e-14);
    CHECK((back.p2() - ref.p2()).norm() < 1e-14);
    CHECK((to_real(back) - r).norm() < 1e-14);
  }
  CHECK_THROWS_AS(from_real(RM(RM::Zero(3, 2))), DimensionError);

  // Rendezvous target: the printed F1, F2.
  for (double w : {1.0, 0.2, 2.5}) {
    const Bi f = from_real(rendezvous::target_matrix(w, 0.5));
    const Bi ref = oracle::printed_f(w, 0.5);
    CHECK((f.p1() - ref.p1()).norm() < 1e-15);
    CHECK((f.p2() - ref.p2()).norm() < 1e-15);
  }
}

TEST_CASE("complex lifting") {
  CHECK(complex_lifting(Bi::identity(2)) == CM::Identity(4, 4));
  CM anti = CM::Zero(4, 4);
  anti.topRightCorner(2, 2) = CM::Identity(2, 2);
  anti.bottomLeftCorner(2, 2) = CM::Identity(2, 2);
  CHECK(complex_lifting(Bi::conjugation(2)) == anti);

  oracle::Rng rng(15);
  for (int t = 0; t < 50; ++t) {
    const Bi b = rng.bimatrix(3, 3);
    CHECK(oracle::multiset_distance(oracle::eig(complex_lifting(b)), oracle::eig(oracle::real_rep(b))) < 1e-10);
  }
}

TEST_CASE("spectrum") {
  const Bi a = oracle::printed_a(1.0);
  const auto s = spectrum(a);
  CHECK(oracle::multiset_distance(s.eigenvalues, {0.0, 0.0, j, -j, j, -j}) < 1e-7);
  CHECK(s.rho == doctest::Approx(1.0).epsilon(1e-7));

  Eigen::VectorXcd d(3);
  d << 1.5, -2.0, 0.25;
  const auto sd = spectrum(Bi::linear(d.asDiagonal()));
  CHECK(oracle::multiset_distance(sd.eigenvalues, {1.5, 1.5, -2.0, -2.0, 0.25, 0.25}) < 1e-14);
  CHECK(sd.mu == doctest::Approx(1.5));

  oracle::Rng rng(16);
  for (int t = 0; t < 100; ++t) {
    const auto e = spectrum(rng.bimatrix(3, 3)).eigenvalues;
    std::vector<C> conj;
    for (auto z : e) conj.push_back(std::conj(z));
    CHECK(oracle::multiset_distance(e, conj) < 1e-9);
  }
  CHECK_THROWS_AS(spectrum(rng.bimatrix(2, 3)), DimensionError);
}

TEST_CASE("inverse") {
  const Bi half = inverse(Bi::linear(CM(2.0 * CM::Identity(3, 3))));
  CHECK((half.p1() - 0.5 * CM::Identity(3, 3)).norm() < 1e-15);
  CHECK(half.p2().isZero(0));
  const Bi conj = inverse(Bi::conjugation(3));
  CHECK(conj.p1().norm() < 1e-15);
  CHECK((conj.p2() - CM::Identity(3, 3)).norm() < 1e-15);

  // {1, 1} maps x to 2 Re x, singular.
  try {
    inverse(Bi(scalar(1), scalar(1)));
    FAIL("expected SingularityError");
  } catch (const SingularityError& e) {
    CHECK(e.condition() > 1e12);
  }

  oracle::Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    const Bi b = rng.bimatrix(3, 3);
    const RM ref = oracle::real_rep(b).inverse();
    CHECK(oracle::rel(to_real(inverse(b)), ref) < 1e-10 * std::max(1.0, ref.norm()));
  }
}

TEST_CASE("exponential") {
  const Bi e0 = exponential(Bi::zero(3, 3), 0.7);
  CHECK((e0.p1() - CM::Identity(3, 3)).norm() < 1e-15);
  CHECK(e0.p2().norm() < 1e-15);

  oracle::Rng rng(18);
  const CM a1 = rng.complex(3, 3);
  const Bi normal = exponential(Bi::linear(a1), 0.3);
  CHECK(oracle::rel(normal.p1(), CM((0.3 * a1).exp())) < 1e-12);
  CHECK(normal.p2().norm() < 1e-12);

  for (int t = 0; t < 50; ++t) {
    const Bi b = rng.bimatrix(3, 3, 0.6);
    const double tt = rng.uniform(0, 1);
    CHECK(oracle::rel(to_real(exponential(b, tt)), oracle::expm(tt * oracle::real_rep(b))) < 1e-10);
  }
  CHECK_THROWS_AS(exponential(rng.bimatrix(2, 3), 1.0), DimensionError);
}

TEST_CASE("positive definiteness") {
  CHECK(is_positive_definite(Bi::identity(3)));
  CHECK_FALSE(is_positive_definite(Bi::linear(CM(-CM::Identity(3, 3)))));
  CHECK_FALSE(is_positive_definite(Bi(scalar(1), scalar(1))));  // real rep diag(2, 0)
  oracle::Rng rng(19);
  const Bi non_hermitian = rng.bimatrix(3, 3);
  const auto rep = check_positive_definite(non_hermitian);
  CHECK_FALSE(rep.positive_definite);
  CHECK_FALSE(rep.diagnostic.empty());

  for (int t = 0; t < 20; ++t) {
    Bi a = rng.bimatrix(3, 3);
    a += Bi::linear(CM(-(spectrum(a).mu + 0.5) * CM::Identity(3, 3)));
    const auto p = solve_lyapunov_ct(a, Bi::identity(3));
    CHECK(is_positive_definite(p.x));
  }
}

TEST_CASE("homomorphism property") {
  oracle::Rng rng(20);
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Index n = rng.integer(1, 4), k = rng.integer(1, 4), m = rng.integer(1, 4);
    const Bi a = rng.bimatrix(n, k), b = rng.bimatrix(k, m), c = rng.bimatrix(n, k);
    const RM prod = to_real(a) * to_real(b);
    CHECK(oracle::rel(to_real(a * b), prod) < 1e-12);
    CHECK(oracle::rel(to_real(a + c), RM(to_real(a) + to_real(c))) < 1e-12);
    const RM g = to_real(a) * to_real(a).transpose();
    CHECK(oracle::rel(to_real(power(a * adjoint(a), 3)), RM(g * g * g)) < 1e-12);
  }
}

TEST_CASE("nonsingularity matches the real representation") {
  oracle::Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    Bi b = rng.bimatrix(3, 3);
    const bool make_singular = t % 2 == 0;
    if (make_singular) {
      RM r = to_real(b);
      const int k = rng.integer(0, 5);
      r.col(k) = r.col((k + 1) % 6) + r.col((k + 2) % 6);
      b = from_real(r);
    }
    Eigen::JacobiSVD<RM> svd(oracle::real_rep(b));
    const bool singular = svd.singularValues().minCoeff() < 1e-12 * svd.singularValues().maxCoeff();
    CHECK(singular == make_singular);
    if (singular)
      CHECK_THROWS_AS(inverse(b), SingularityError);
    else
      CHECK_NOTHROW(inverse(b));
  }
}
