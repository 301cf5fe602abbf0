#pragma once

#include <string>

#include "bimat/bimatrix.hpp"

namespace bimat {

enum class Structure { general, normal, antilinear };

inline const char* to_string(Structure s) {
  switch (s) {
    case Structure::normal:
      return "normal";
    case Structure::antilinear:
      return "antilinear";
    default:
      return "general";
  }
}

inline const char* to_string(TimeDomain t) { return t == TimeDomain::discrete ? "discrete" : "continuous"; }

/// x' = {A1,A2} x + {B1,B2} u.
template <typename Real = double>
struct SystemModel {
  Bimatrix<Real> a;
  Bimatrix<Real> b;
  TimeDomain time_domain = TimeDomain::continuous;
  Structure structure = Structure::general;

  Eigen::Index states() const { return a.rows(); }
  Eigen::Index inputs() const { return b.cols(); }

  template <typename Other>
  SystemModel<Other> cast() const {
    return {a.template cast<Other>(), b.template cast<Other>(), time_domain, structure};
  }
};

/// Structure implied by which components vanish exactly.
template <typename Real>
Structure infer_structure(const Bimatrix<Real>& a, const Bimatrix<Real>& b) {
  const bool no2 = a.p2().isZero(0) && b.p2().isZero(0);
  const bool no1 = a.p1().isZero(0) && b.p1().isZero(0);
  if (no2) return Structure::normal;
  if (no1) return Structure::antilinear;
  return Structure::general;
}

template <typename Real>
void validate(const SystemModel<Real>& sys) {
  if (!sys.a.is_square())
    throw DimensionError("system: A is " + shape_string(sys.a.rows(), sys.a.cols()) + ", expected square");
  if (sys.b.rows() != sys.a.rows())
    throw DimensionError("system: B has " + std::to_string(sys.b.rows()) + " rows, A has " +
                         std::to_string(sys.a.rows()));
  if (sys.b.cols() < 1) throw DimensionError("system: at least one input is required");
  const Real scale = std::max(norm(sys.a) + norm(sys.b), Real(1));
  const Real tol = Real(1e-14) * scale;
  if (sys.structure == Structure::normal && (sys.a.p2().norm() > tol || sys.b.p2().norm() > tol))
    throw InputError("system: structure 'normal' requires A2 = 0 and B2 = 0");
  if (sys.structure == Structure::antilinear && (sys.a.p1().norm() > tol || sys.b.p1().norm() > tol))
    throw InputError("system: structure 'antilinear' requires A1 = 0 and B1 = 0");
}

template <typename Real>
SystemModel<Real> make_system(Bimatrix<Real> a, Bimatrix<Real> b, TimeDomain td = TimeDomain::continuous) {
  SystemModel<Real> sys{std::move(a), std::move(b), td, Structure::general};
  sys.structure = infer_structure(sys.a, sys.b);
  validate(sys);
  return sys;
}

}  // namespace bimat
