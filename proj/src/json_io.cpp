#include "bimat/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bimat::io {

namespace {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const Json& j, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        emit(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line so matrices read row by row.
      const bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_object(); }) &&
                        std::none_of(j.begin(), j.end(), [](const Json& e) {
                          return e.is_array() && std::any_of(e.begin(), e.end(), [](const Json& x) {
                                   return x.is_array() || x.is_object();
                                 });
                        });
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat || indent < 0 ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        emit(e, flat ? -1 : indent, depth + 1, out);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InputError(path + ": " + what);
}

}  // namespace

std::string dump(const Json& j, int indent) {
  std::string out;
  emit(j, indent, 0, out);
  out += '\n';
  return out;
}

Json parse(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Report line and column instead of the raw byte offset.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError("malformed JSON in " + origin + " at line " + std::to_string(line) + ", column " +
                     std::to_string(col) + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("write to '" + path + "' failed");
}

bool has(const Json& j, const char* key) { return j.is_object() && j.contains(key); }

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path, std::string("missing field '") + key + "'");
  return *it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "non-finite number");
  return v;
}

std::string string(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Complex<double> complex_from(const Json& j, const std::string& path) {
  if (j.is_number()) return {number(j, path), 0.0};
  if (!j.is_array() || j.size() != 2) fail(path, "expected [re, im]");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

namespace {

template <typename Scalar, typename Read>
Matrix<Scalar> matrix_from(const Json& j, const std::string& path, Read read) {
  if (!j.is_array()) fail(path, "expected an array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array()) fail(path + "[" + std::to_string(i) + "]", "expected a row array");
    const auto c = static_cast<Eigen::Index>(j[i].size());
    if (cols >= 0 && c != cols) fail(path, "ragged rows");
    cols = c;
  }
  if (cols < 0) cols = 0;
  Matrix<Scalar> m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = read(j[i][k], path + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
  return m;
}

}  // namespace

RealMatrix<double> real_matrix_from(const Json& j, const std::string& path) {
  return matrix_from<double>(j, path, [](const Json& e, const std::string& p) { return number(e, p); });
}

ComplexMatrix<double> complex_matrix_from(const Json& j, const std::string& path) {
  return matrix_from<Complex<double>>(j, path, [](const Json& e, const std::string& p) { return complex_from(e, p); });
}

Bimatrix<double> bimatrix_from(const Json& j, const std::string& path) {
  ComplexMatrix<double> p1 = complex_matrix_from(field(j, "p1", path), path + ".p1");
  ComplexMatrix<double> p2 = has(j, "p2") ? complex_matrix_from(j["p2"], path + ".p2")
                                          : ComplexMatrix<double>::Zero(p1.rows(), p1.cols());
  try {
    return Bimatrix<double>(std::move(p1), std::move(p2));
  } catch (const Error& e) {
    throw DimensionError(path + ": " + e.what());
  }
}

std::vector<Complex<double>> complex_list_from(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  std::vector<Complex<double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(complex_from(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

TimeDomain time_domain_from(const std::string& s, const std::string& path) {
  if (s == "continuous") return TimeDomain::continuous;
  if (s == "discrete") return TimeDomain::discrete;
  fail(path, "unknown time domain '" + s + "'");
}

TargetMode target_mode_from(const std::string& s, const std::string& path) {
  if (s == "general") return TargetMode::general;
  if (s == "normalize") return TargetMode::normalize;
  if (s == "anti_preserve") return TargetMode::anti_preserve;
  fail(path, "unknown target mode '" + s + "'");
}

InputMode input_mode_from(const std::string& s, const std::string& path) {
  if (s == "paired") return InputMode::paired;
  if (s == "padded") return InputMode::padded;
  fail(path, "unknown input mode '" + s + "'");
}

SystemModel<double> system_from(const Json& j, const std::string& path) {
  const TimeDomain td =
      has(j, "time_domain") ? time_domain_from(string(j["time_domain"], path + ".time_domain"), path + ".time_domain")
                            : TimeDomain::continuous;
  return make_system(bimatrix_from(field(j, "a", path), path + ".a"), bimatrix_from(field(j, "b", path), path + ".b"),
                     td);
}

SecondOrderModel<double> second_order_from(const Json& j, const std::string& path) {
  SecondOrderModel<double> m;
  m.mass = real_matrix_from(field(j, "mass", path), path + ".mass");
  const Eigen::Index n = m.mass.rows();
  m.damping = has(j, "damping") ? real_matrix_from(j["damping"], path + ".damping") : RealMatrix<double>::Zero(n, n);
  m.stiffness =
      has(j, "stiffness") ? real_matrix_from(j["stiffness"], path + ".stiffness") : RealMatrix<double>::Zero(n, n);
  m.input = real_matrix_from(field(j, "input", path), path + ".input");
  return m;
}

}  // namespace bimat::io
