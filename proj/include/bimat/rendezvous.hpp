#pragma once

// Reference design for the Clohessy-Wiltshire plant without radial thrust.

#include <utility>

#include "bimat/pole_assignment.hpp"

namespace bimat::rendezvous {

/// diag([[0,1],[0,0]], [[0,w],[-w,0]], [[0,w],[-w,0]]) - gamma I, spectrum
/// {-g, -g, -g +- wj, -g +- wj}.
template <typename Real = double>
RealMatrix<Real> target_matrix(Real omega, Real gamma) {
  RealMatrix<Real> f = -gamma * RealMatrix<Real>::Identity(6, 6);
  f(0, 1) = Real(1);
  f(2, 3) = omega;
  f(3, 2) = -omega;
  f(4, 5) = omega;
  f(5, 4) = -omega;
  return f;
}

/// Z1 = [1+j, 0, 0], Z2 = [0, 0, 1].
template <typename Real = double>
std::pair<ComplexMatrix<Real>, ComplexMatrix<Real>> free_parameters() {
  ComplexMatrix<Real> z1 = ComplexMatrix<Real>::Zero(1, 3), z2 = ComplexMatrix<Real>::Zero(1, 3);
  z1(0, 0) = Complex<Real>(1, 1);
  z2(0, 2) = Complex<Real>(1, 0);
  return {z1, z2};
}

/// Closed-form gain {K1, K2} for the design above.
template <typename Real = double>
Bimatrix<Real> closed_form_gain(Real w, Real g) {
  using C = Complex<Real>;
  const C j(0, 1);
  const Real w2 = w * w, w3 = w2 * w, w4 = w2 * w2, g2 = g * g, g3 = g2 * g, g4 = g2 * g2;
  const C k11 = g4 * j - Real(12) * g3 * w2 + Real(19) * g2 * w2 * j + g2 - Real(42) * g * w4 + Real(6) * g * w2 * j +
                Real(4) * w2;
  const C k21 = -g4 * j + Real(12) * g3 * w2 - Real(19) * g2 * w2 * j + g2 + Real(42) * g * w4 +
                Real(6) * g * w2 * j + Real(4) * w2;
  const C k12 = g4 + g2 * w2 - g2 * j + Real(12) * g * w2 * j - w2 * j;
  const C k22 = g4 + g2 * w2 + g2 * j + Real(12) * g * w2 * j + w2 * j;
  const C k3 = g * (Real(2) + g * j) / Real(2);
  ComplexMatrix<Real> k1(1, 3), k2(1, 3);
  k1 << k11 / (Real(12) * w3), k12 / (Real(6) * w2), -k3;
  k2 << -k21 / (Real(12) * w3), k22 / (Real(6) * w2), k3;
  return Bimatrix<Real>(k1, k2);
}

template <typename Real = double>
struct Design {
  SystemModel<Real> system;
  TargetSpectrum<Real> target;
  FeedbackDesign<Real> design;
};

/// Full pipeline with the reference F and Z.
template <typename Real = double>
Design<Real> design(Real omega, Real gamma) {
  Design<Real> out{second_order_to_complex(rendezvous_model(omega), InputMode::paired),
                   build_target(target_matrix(omega, gamma), TargetMode::general, TimeDomain::continuous),
                   {}};
  AssignOptions<Real> opts;
  opts.z = free_parameters<Real>();
  out.design = assign_poles(out.system, out.target, opts);
  return out;
}

}  // namespace bimat::rendezvous
