// SPDX-License-Identifier: Apache-2.0
#include "conecert/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace conecert::io {

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

namespace {

double number(const json& j, std::string_view name) {
  if (!j.is_number()) throw InputError(std::string(name) + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw InputError(std::string(name) + ": non-finite entry");
  return x;
}

}  // namespace

Matrix matrix_from_json(const json& j, std::string_view name) {
  if (j.is_number()) return Matrix::Constant(1, 1, number(j, name));
  if (!j.is_array() || j.empty()) {
    throw InputError(std::string(name) + ": expected a non-empty array of rows");
  }
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) {
    throw InputError(std::string(name) + ": rows must be non-empty arrays");
  }
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw InputError(std::string(name) + ": ragged rows");
    }
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = number(j[i][k], name);
  }
  return m;
}

Vector vector_from_json(const json& j, std::string_view name) {
  if (!j.is_array() || j.empty()) throw InputError(std::string(name) + ": expected an array");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = number(j[i], name);
  return v;
}

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InputError(std::string(what) + ": malformed JSON: " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Matrix& SystemFile::require(char which) const {
  const std::optional<Matrix>* slot = nullptr;
  switch (which) {
    case 'A': slot = &A; break;
    case 'B': slot = &B; break;
    case 'C': slot = &C; break;
    case 'D': slot = &D; break;
    default: break;
  }
  if (slot == nullptr || !slot->has_value()) {
    throw InputError(std::string("system file: matrix ") + which + " is required");
  }
  return **slot;
}

LtiSystem SystemFile::system() const {
  try {
    return LtiSystem(require('A'), require('B'), require('C'));
  } catch (const DimensionError& e) {
    throw InputError(std::string("system file: ") + e.what());
  }
}

cones::SystemCones SystemFile::cones() const {
  const LtiSystem sys = system();
  return {cones::ConeSpec(u_cone, sys.inputs()), cones::ConeSpec(x_cone, sys.states()),
          cones::ConeSpec(z_cone, sys.outputs())};
}

cones::ConeSpec SystemFile::state_cone() const {
  return cones::ConeSpec(x_cone, require('A').rows());
}

SystemFile parse_system_file(std::string_view text) {
  const json j = parse_json(text, "system file");
  if (!j.is_object()) throw InputError("system file: top level must be an object");
  SystemFile f;
  auto count = [&](const char* key) -> std::optional<Eigen::Index> {
    if (!j.contains(key)) return std::nullopt;
    if (!j[key].is_number_integer() || j[key].get<long long>() < 1) {
      throw InputError(std::string("system file: ") + key + " must be a positive integer");
    }
    return static_cast<Eigen::Index>(j[key].get<long long>());
  };
  f.n = count("n");
  f.m = count("m");
  f.p = count("p");
  auto mat = [&](const char* key) -> std::optional<Matrix> {
    if (!j.contains(key)) return std::nullopt;
    return matrix_from_json(j[key], std::string("system file: ") + key);
  };
  f.A = mat("A");
  f.B = mat("B");
  f.C = mat("C");
  f.D = mat("D");
  if (!f.D) f.D = mat("D_matrix");

  auto shape = [](const std::optional<Matrix>& m, std::optional<Eigen::Index> rows,
                  std::optional<Eigen::Index> cols, const char* name) {
    if (!m) return;
    if ((rows && m->rows() != *rows) || (cols && m->cols() != *cols)) {
      std::ostringstream os;
      os << "system file: " << name << " is " << m->rows() << "x" << m->cols()
         << ", which does not match the declared dimensions";
      throw InputError(os.str());
    }
  };
  std::optional<Eigen::Index> n = f.n;
  if (!n && f.A) n = f.A->rows();
  shape(f.A, n, n, "A");
  shape(f.D, n, n, "D");
  shape(f.B, n, f.m, "B");
  shape(f.C, f.p, n, "C");

  if (j.contains("cones")) {
    const json& c = j["cones"];
    if (!c.is_object()) throw InputError("system file: cones must be an object");
    auto kind = [&](const char* key, cones::ConeKind& out) {
      if (!c.contains(key)) return;
      if (!c[key].is_string()) throw InputError(std::string("system file: cone ") + key);
      try {
        out = cones::parse_cone_kind(c[key].get<std::string>());
      } catch (const Error& e) {
        throw InputError(std::string("system file: ") + e.what());
      }
    };
    kind("u", f.u_cone);
    kind("x", f.x_cone);
    kind("z", f.z_cone);
  }
  if (f.x_cone == cones::ConeKind::Lorentz && f.A && f.A->rows() < 2) {
    throw InputError("system file: a Lorentz state cone needs n >= 2");
  }
  return f;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

json to_json(const Tolerances& t) {
  return {{"residual_rtol", t.residual_rtol}, {"axis", t.axis},
          {"cone_slack", t.cone_slack},       {"rcond_min", t.rcond_min},
          {"boundary_band", t.boundary_band}, {"sphere_samples", t.sphere_samples},
          {"sample_seed", t.sample_seed}};
}

Tolerances tolerances_from_json(const json& j, Tolerances t) {
  if (!j.is_object()) throw InputError("tolerance config: expected an object");
  auto real = [&](const char* key, double& out) {
    if (!j.contains(key)) return;
    const double x = number(j[key], std::string("tolerance config: ") + key);
    if (!(x >= 0.0)) throw InputError(std::string("tolerance config: ") + key + " must be >= 0");
    out = x;
  };
  real("residual_rtol", t.residual_rtol);
  real("axis", t.axis);
  real("cone_slack", t.cone_slack);
  real("rcond_min", t.rcond_min);
  real("boundary_band", t.boundary_band);
  if (j.contains("sphere_samples")) {
    if (!j["sphere_samples"].is_number_integer() || j["sphere_samples"].get<long long>() < 1) {
      throw InputError("tolerance config: sphere_samples must be a positive integer");
    }
    t.sphere_samples = j["sphere_samples"].get<int>();
  }
  if (j.contains("sample_seed")) {
    if (!j["sample_seed"].is_number_unsigned()) {
      throw InputError("tolerance config: sample_seed must be a non-negative integer");
    }
    t.sample_seed = j["sample_seed"].get<unsigned long long>();
  }
  return t;
}

json to_json(const cones::MonotonicityReport& r) {
  return {{"monotone", r.monotone},
          {"a_cross_positive", r.a_cross_positive},
          {"b_maps_Ku_to_Kx", r.b_maps_Ku_to_Kx},
          {"c_maps_Kx_to_Kz", r.c_maps_Kx_to_Kz},
          {"a_margin", r.a_margin},
          {"b_margin", r.b_margin},
          {"c_margin", r.c_margin},
          {"sampled", r.sampled},
          {"experimental", r.experimental}};
}

json to_json(const stability::StabilityReport& r) {
  json j = {{"hurwitz", r.hurwitz},
            {"abscissa", r.abscissa},
            {"witness_margin", r.witness_margin},
            {"witness_ax_margin", r.witness_ax_margin},
            {"criteria_agree", r.criteria_agree},
            {"experimental", r.experimental}};
  j["witness_x"] = r.witness_x ? to_json(*r.witness_x) : json(nullptr);
  j["neg_inverse_k_nonneg"] = r.neg_inverse_k_nonneg ? json(*r.neg_inverse_k_nonneg) : json(nullptr);
  return j;
}

json to_json(const stability::SylvesterCertificate& c) {
  json j = {{"status", stability::to_string(c.status)},
            {"feasible", c.feasible()},
            {"mu_sum", c.mu_sum},
            {"p_positive_margin", c.p_positive_margin},
            {"q_negative_margin", c.q_negative_margin},
            {"experimental", c.experimental}};
  j["P"] = c.P.size() ? to_json(c.P) : json(nullptr);
  j["Q"] = c.Q.size() ? to_json(c.Q) : json(nullptr);
  return j;
}

json to_json(const hinf::Verdict& v) {
  json j = {{"holds", v.holds}, {"margin", v.margin}};
  if (!v.diagnostic.empty()) j["diagnostic"] = v.diagnostic;
  return j;
}

json to_json(const hinf::RiccatiSolution& s) {
  return {{"P", to_json(s.P)},
          {"residual_norm", s.residual_norm},
          {"residual_scale", s.residual_scale},
          {"closedloop_abscissa", s.closedloop_abscissa},
          {"dual_closedloop_abscissa", s.dual_closedloop_abscissa},
          {"k_nonneg_margin", s.k_nonneg_margin},
          {"symmetric_defect", s.symmetric_defect},
          {"newton_steps", s.newton_steps}};
}

json to_json(const hinf::InequalityCertificate& c) {
  return {{"P", to_json(c.P)},
          {"sym_part_min_eig", c.sym_part_min_eig},
          {"lhs_max_eig", c.lhs_max_eig},
          {"lhs_symmetry_defect", c.lhs_symmetry_defect},
          {"valid", c.valid}};
}

json to_json(const hinf::ConicWitness& w) {
  return {{"p", to_json(w.p)},
          {"q", to_json(w.q)},
          {"slack1", to_json(w.slack1)},
          {"slack2", to_json(w.slack2)},
          {"p_margin", w.p_margin},
          {"q_margin", w.q_margin},
          {"slack1_margin", w.slack1_margin},
          {"slack2_margin", w.slack2_margin},
          {"lifted", w.lifted},
          {"valid", w.valid}};
}

json to_json(const hinf::BrlReport& r) {
  json j = {{"gamma", r.gamma},
            {"static_gain", r.static_gain},
            {"cond_i", to_json(r.cond_i)},
            {"cond_ii", to_json(r.cond_ii)},
            {"cond_iii", to_json(r.cond_iii)},
            {"cond_iv", to_json(r.cond_iv)},
            {"cond_v", to_json(r.cond_v)},
            {"consistent", r.consistent},
            {"boundary", r.boundary},
            {"experimental", r.experimental}};
  j["riccati"] = r.riccati ? to_json(*r.riccati) : json(nullptr);
  j["inequality"] = r.inequality ? to_json(*r.inequality) : json(nullptr);
  j["witness"] = r.witness ? to_json(*r.witness) : json(nullptr);
  return j;
}

json to_json(const synthesis::SynthesisResult& r) {
  return {{"P_star", to_json(r.P_star)},
          {"K_star", to_json(r.K_star)},
          {"gamma_lower_bound", r.gamma_lower_bound},
          {"achieved_norm", r.achieved_norm},
          {"bisection_norm", r.bisection_norm},
          {"closedloop_monotone", r.closedloop_monotone},
          {"closedloop_stable", r.closedloop_stable},
          {"gain_diagonal", r.gain_diagonal},
          {"no_symmetric_solution", r.no_symmetric_solution},
          {"inequality", to_json(r.inequality)},
          {"optimal", r.optimal}};
}

json to_json(const harness::InstanceRecipe& r) {
  return {{"seed", r.seed},
          {"n", r.n},
          {"m", r.m},
          {"p", r.p},
          {"cones",
           {{"u", cones::to_string(r.input_cone)},
            {"x", cones::to_string(r.state_cone)},
            {"z", cones::to_string(r.output_cone)}}},
          {"stability_margin", r.stability_margin},
          {"density", r.density}};
}

json to_json(const harness::BatteryResult& r) {
  json failures = json::array();
  for (const auto& f : r.failures) {
    failures.push_back({{"seed", f.seed},
                        {"check", f.check},
                        {"diagnostics", f.diagnostics},
                        {"recipe", to_json(f.recipe)}});
  }
  return {{"battery", r.battery},
          {"seed", r.seed},
          {"total", r.total},
          {"passed", r.passed},
          {"skipped", r.skipped},
          {"failures", std::move(failures)},
          {"contrast_total", r.contrast_total},
          {"contrast_argmax_nonzero", r.contrast_argmax_nonzero},
          {"injected_defect", r.injected_defect},
          {"elapsed_seconds", r.elapsed_seconds}};
}

}  // namespace conecert::io
