#pragma once

// JSON wire format: complex numbers are [re, im], matrices are arrays of
// rows, bimatrices are {"p1": ..., "p2": ...}.

#include <string>
#include <vector>

#include <json.hpp>

#include "bimat/bimatrix.hpp"
#include "bimat/pole_assignment.hpp"
#include "bimat/system.hpp"

namespace bimat::io {

using Json = nlohmann::ordered_json;

/// Deterministic serialization: fixed key order, doubles as %.17g.
std::string dump(const Json& j, int indent = 2);

/// Parses text; syntax errors become InputError with line and column.
Json parse(const std::string& text, const std::string& origin);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// Field access with path-qualified InputError messages.
const Json& field(const Json& j, const char* key, const std::string& path);
bool has(const Json& j, const char* key);
double number(const Json& j, const std::string& path);
std::string string(const Json& j, const std::string& path);

Complex<double> complex_from(const Json& j, const std::string& path);
RealMatrix<double> real_matrix_from(const Json& j, const std::string& path);
ComplexMatrix<double> complex_matrix_from(const Json& j, const std::string& path);
Bimatrix<double> bimatrix_from(const Json& j, const std::string& path);
std::vector<Complex<double>> complex_list_from(const Json& j, const std::string& path);

TimeDomain time_domain_from(const std::string& s, const std::string& path);
TargetMode target_mode_from(const std::string& s, const std::string& path);
InputMode input_mode_from(const std::string& s, const std::string& path);

SystemModel<double> system_from(const Json& j, const std::string& path);
SecondOrderModel<double> second_order_from(const Json& j, const std::string& path);

template <typename Real>
Json to_json(Complex<Real> z) {
  return Json::array({static_cast<double>(z.real()), static_cast<double>(z.imag())});
}

template <typename Scalar>
Json to_json(const Matrix<Scalar>& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      if constexpr (is_complex_v<Scalar>)
        row.push_back(to_json(m(i, k)));
      else
        row.push_back(static_cast<double>(m(i, k)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename Real>
Json to_json(const Bimatrix<Real>& b) {
  Json j = Json::object();
  j["p1"] = to_json(b.p1());
  j["p2"] = to_json(b.p2());
  return j;
}

template <typename Real>
Json to_json(const std::vector<Complex<Real>>& v) {
  Json a = Json::array();
  for (const auto& z : v) a.push_back(to_json(z));
  return a;
}

template <typename Real>
Json to_json(const SystemModel<Real>& s) {
  Json j = Json::object();
  j["a"] = to_json(s.a);
  j["b"] = to_json(s.b);
  j["time_domain"] = to_string(s.time_domain);
  j["structure"] = to_string(s.structure);
  return j;
}

template <typename Real>
Json to_json(const SecondOrderModel<Real>& m) {
  Json j = Json::object();
  j["mass"] = to_json(m.mass);
  j["damping"] = to_json(m.damping);
  j["stiffness"] = to_json(m.stiffness);
  j["input"] = to_json(m.input);
  return j;
}

template <typename Real>
Json to_json(const TargetSpectrum<Real>& t) {
  Json j = Json::object();
  j["mode"] = to_string(t.mode);
  j["time_domain"] = to_string(t.time_domain);
  j["gamma"] = to_json(t.gamma);
  j["f_real"] = to_json(t.f_real);
  j["f"] = to_json(t.f);
  j["stable"] = t.stable;
  return j;
}

template <typename Real>
Json to_json(const FeedbackDesign<Real>& d) {
  Json j = Json::object();
  j["k"] = to_json(d.k);
  j["real_gain"] = to_json(d.real_gain);
  j["x"] = to_json(d.x);
  j["y"] = to_json(d.y);
  j["z1"] = to_json(d.z1);
  j["z2"] = to_json(d.z2);
  return j;
}

template <typename Real>
Json to_json(const DesignReport<Real>& r) {
  Json j = Json::object();
  j["closed_loop_spectrum"] = to_json(r.closed_loop_spectrum);
  j["spectrum_match"] = r.spectrum_match;
  j["spectrum_distance"] = static_cast<double>(r.spectrum_distance);
  j["similarity_residual"] = static_cast<double>(r.similarity_residual);
  j["gsyl_residual"] = static_cast<double>(r.gsyl_residual);
  j["condition_x"] = static_cast<double>(r.condition_x);
  j["transformed_p1_norm"] = static_cast<double>(r.transformed_p1);
  j["transformed_p2_norm"] = static_cast<double>(r.transformed_p2);
  j["draws"] = r.draws;
  j["factorization"] = r.factorization;
  j["solver"] = r.solver;
  return j;
}

}  // namespace bimat::io
