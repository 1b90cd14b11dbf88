// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "conecert/common.hpp"
#include "conecert/cones.hpp"
#include "conecert/harness.hpp"
#include "conecert/hinf.hpp"
#include "conecert/stability.hpp"
#include "conecert/synthesis.hpp"
#include "conecert/system.hpp"

namespace conecert::io {

using json = nlohmann::json;

/// Malformed or inconsistent user input.
class InputError : public Error {
 public:
  using Error::Error;
};

json to_json(const Matrix& m);
json to_json(const Vector& v);

/// Row-major nested array. A bare number is accepted as a 1 x 1 matrix.
Matrix matrix_from_json(const json& j, std::string_view name);
Vector vector_from_json(const json& j, std::string_view name);

/// {"n","m","p","A","B","C","D","cones":{"u","x","z"}}; every entry optional
/// except what the command needs. "D_matrix" is accepted as an alias of "D".
struct SystemFile {
  std::optional<Eigen::Index> n, m, p;
  std::optional<Matrix> A, B, C, D;
  cones::ConeKind u_cone = cones::ConeKind::Orthant;
  cones::ConeKind x_cone = cones::ConeKind::Orthant;
  cones::ConeKind z_cone = cones::ConeKind::Orthant;

  const Matrix& require(char which) const;
  LtiSystem system() const;
  cones::SystemCones cones() const;
  cones::ConeSpec state_cone() const;
};

SystemFile parse_system_file(std::string_view text);
json parse_json(std::string_view text, std::string_view what);
std::string read_file(const std::string& path);

std::string sha256_hex(std::string_view data);

json to_json(const Tolerances& tol);
/// Overrides fields of `base` with the keys present in `j`.
Tolerances tolerances_from_json(const json& j, Tolerances base);

json to_json(const cones::MonotonicityReport& r);
json to_json(const stability::StabilityReport& r);
json to_json(const stability::SylvesterCertificate& c);
json to_json(const hinf::Verdict& v);
json to_json(const hinf::RiccatiSolution& s);
json to_json(const hinf::InequalityCertificate& c);
json to_json(const hinf::ConicWitness& w);
json to_json(const hinf::BrlReport& r);
json to_json(const synthesis::SynthesisResult& r);
json to_json(const harness::InstanceRecipe& r);
json to_json(const harness::BatteryResult& r);

}  // namespace conecert::io
