// SPDX-License-Identifier: Apache-2.0
#include "conecert/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <optional>

#include "conecert/io.hpp"
#include "conecert/linalg.hpp"

namespace conecert::cli {

using io::json;

namespace {

struct ToleranceFlags {
  std::string config;
  std::optional<double> residual, axis, cone, rcond, boundary;
  std::optional<int> samples;
  std::optional<unsigned long long> sample_seed;

  Tolerances resolve() const {
    Tolerances t;
    if (!config.empty()) {
      t = io::tolerances_from_json(io::parse_json(io::read_file(config), "tolerance config"), t);
    }
    auto set = [](const std::optional<double>& v, double& out, const char* name) {
      if (!v) return;
      if (!(*v >= 0.0) || !std::isfinite(*v)) {
        throw io::InputError(std::string(name) + " must be a finite non-negative number");
      }
      out = *v;
    };
    set(residual, t.residual_rtol, "--tol-residual");
    set(axis, t.axis, "--tol-axis");
    set(cone, t.cone_slack, "--tol-cone");
    set(rcond, t.rcond_min, "--tol-rcond");
    set(boundary, t.boundary_band, "--tol-boundary");
    if (samples) {
      if (*samples < 1) throw io::InputError("--samples must be positive");
      t.sphere_samples = *samples;
    }
    if (sample_seed) t.sample_seed = *sample_seed;
    return t;
  }
};

// Reads every input once so that the digest covers exactly what was analysed.
struct Inputs {
  std::string blob;

  std::string load(const std::string& path) {
    std::string text = io::read_file(path);
    blob += text;
    blob.push_back('\0');
    return text;
  }
  void note(const std::string& s) {
    blob += s;
    blob.push_back('\0');
  }
  std::string digest() const { return "sha256:" + io::sha256_hex(blob); }
};

json envelope(const std::string& command, const Inputs& inputs, const Tolerances& tol,
              bool experimental) {
  return {{"command", command},
          {"tool_version", std::string(kToolVersion)},
          {"inputs_digest", inputs.digest()},
          {"tolerances", io::to_json(tol)},
          {"experimental", experimental}};
}

// Looks for `key` under "result" first, then at the top level.
const json* lookup(const json& j, std::initializer_list<const char*> path) {
  for (const json* root : {j.contains("result") ? &j["result"] : nullptr, &j}) {
    if (root == nullptr) continue;
    const json* node = root;
    bool found = true;
    for (const char* key : path) {
      if (!node->is_object() || !node->contains(key) || (*node)[key].is_null()) {
        found = false;
        break;
      }
      node = &(*node)[key];
    }
    if (found) return node;
  }
  return nullptr;
}

Matrix matrix_from_certificate(const json& j, const char* key) {
  if (j.is_array()) return io::matrix_from_json(j, key);
  const json* node = lookup(j, {key});
  if (node == nullptr) throw io::InputError(std::string("certificate: missing ") + key);
  return io::matrix_from_json(*node, key);
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string output_path;

  void emit(const json& j) const {
    const std::string text = j.dump(2) + "\n";
    if (output_path.empty()) {
      out << text;
    } else {
      std::ofstream f(output_path, std::ios::binary);
      if (!f) throw io::InputError("cannot write " + output_path);
      f << text;
    }
  }
};

int cmd_check_monotone(const Context& ctx, const std::string& file, const Tolerances& tol) {
  Inputs in;
  const auto sf = io::parse_system_file(in.load(file));
  const LtiSystem sys = sf.system();
  const auto report = cones::check_monotone(sys, sf.cones(), tol);
  json j = envelope("check-monotone", in, tol, report.experimental);
  j["result"] = io::to_json(report);
  ctx.emit(j);
  return report.monotone ? kHolds : kFails;
}

int cmd_stability(const Context& ctx, const std::string& file, bool lyapunov,
                  const std::string& verify, const Tolerances& tol) {
  Inputs in;
  const auto sf = io::parse_system_file(in.load(file));
  const Matrix& a = sf.require('A');
  const auto cone = sf.state_cone();
  const bool experimental = !cone.is_orthant();

  if (!verify.empty()) {
    const json cert = io::parse_json(in.load(verify), "certificate");
    json j = envelope("stability --verify", in, tol, experimental);
    bool ok = false;
    if (lyapunov) {
      const auto c = stability::verify_sylvester_certificate(cone, a, a.transpose(),
                                                             matrix_from_certificate(cert, "P"), tol);
      j["result"] = io::to_json(c);
      ok = c.feasible();
    } else {
      const json* node = cert.is_array() ? &cert : lookup(cert, {"witness_x"});
      if (node == nullptr) throw io::InputError("certificate: missing witness_x");
      const Vector x = io::vector_from_json(*node, "witness_x");
      if (x.size() != a.rows()) throw io::InputError("certificate: witness_x has the wrong size");
      const auto xm = cones::member(cone, x, tol);
      const auto axm = cones::member(cone, Vector(-(a * x)), tol);
      ok = xm.interior && axm.interior;
      j["result"] = {{"valid", ok}, {"x_margin", xm.margin}, {"neg_ax_margin", axm.margin}};
    }
    ctx.emit(j);
    return ok ? kHolds : kFails;
  }

  if (lyapunov) {
    const auto c = stability::lyapunov_cone_test(cone, a, tol);
    json j = envelope("stability --lyapunov-cone", in, tol, c.experimental);
    j["result"] = io::to_json(c);
    ctx.emit(j);
    return c.feasible() ? kHolds : kFails;
  }
  const auto r = stability::stability_tests(cone, a, tol);
  json j = envelope("stability", in, tol, r.experimental);
  j["result"] = io::to_json(r);
  ctx.emit(j);
  if (!r.criteria_agree) {
    ctx.err << "stability: the equivalent criteria disagree\n";
    return kInconsistent;
  }
  return r.hurwitz ? kHolds : kFails;
}

int cmd_sylvester(const Context& ctx, const std::string& file, const std::string& verify,
                  const Tolerances& tol) {
  Inputs in;
  const auto sf = io::parse_system_file(in.load(file));
  const Matrix& a = sf.require('A');
  const Matrix& d = sf.require('D');
  const auto cone = sf.state_cone();
  stability::SylvesterCertificate c;
  std::string command = "sylvester";
  if (!verify.empty()) {
    const Matrix p = matrix_from_certificate(io::parse_json(in.load(verify), "certificate"), "P");
    if (p.rows() != a.rows() || p.cols() != a.cols()) {
      throw io::InputError("certificate: P has the wrong shape");
    }
    c = stability::verify_sylvester_certificate(cone, a, d, p, tol);
    command += " --verify";
  } else {
    c = stability::solve_sylvester_cone(cone, a, d, tol);
  }
  json j = envelope(command, in, tol, c.experimental);
  j["result"] = io::to_json(c);
  ctx.emit(j);
  return c.feasible() ? kHolds : kFails;
}

struct HinfFlags {
  bool norm = false;
  bool oracle = false;
  bool report = false;
  std::optional<double> gamma;
  std::string verify;
};

int cmd_hinf(const Context& ctx, const std::string& file, const HinfFlags& f,
             const Tolerances& tol) {
  Inputs in;
  const auto sf = io::parse_system_file(in.load(file));
  const LtiSystem sys = sf.system();
  const auto cones = sf.cones();
  const bool experimental = !cones.x.is_orthant() || !cones.u.is_orthant() || !cones.z.is_orthant();

  if (!f.verify.empty()) {
    const json cert = io::parse_json(in.load(f.verify), "certificate");
    double gamma = 0.0;
    if (f.gamma) {
      gamma = *f.gamma;
    } else if (const json* g = lookup(cert, {"gamma"}); g != nullptr && g->is_number()) {
      gamma = g->get<double>();
    } else {
      throw io::InputError("hinf --verify: gamma is neither given nor in the certificate");
    }
    json j = envelope("hinf --verify", in, tol, experimental);
    j["gamma"] = gamma;
    bool any = false;
    bool ok = true;
    if (const json* p = lookup(cert, {"inequality", "P"})) {
      const auto c = hinf::verify_riccati_inequality(sys, gamma, io::matrix_from_json(*p, "P"), tol);
      j["result"]["inequality"] = io::to_json(c);
      any = true;
      ok = ok && c.valid;
    }
    const json* pv = lookup(cert, {"witness", "p"});
    const json* qv = lookup(cert, {"witness", "q"});
    if (pv != nullptr && qv != nullptr) {
      const auto w = hinf::verify_conic_witness(sys, gamma, cones.x, io::vector_from_json(*pv, "p"),
                                                io::vector_from_json(*qv, "q"), tol);
      j["result"]["witness"] = io::to_json(w);
      any = true;
      ok = ok && w.valid;
    }
    if (!any) throw io::InputError("certificate: no inequality or witness to verify");
    j["result"]["valid"] = ok;
    ctx.emit(j);
    return ok ? kHolds : kFails;
  }

  if (f.norm == f.gamma.has_value()) {
    throw io::InputError("hinf: give exactly one of --norm or --gamma");
  }
  if (f.norm) {
    const auto mono = cones::check_monotone(sys, cones, tol);
    json j = envelope("hinf --norm", in, tol, experimental || mono.experimental);
    json r;
    r["monotone"] = mono.monotone;
    int code = kHolds;
    double norm = 0.0;
    if (mono.monotone) {
      norm = hinf::static_gain_norm(sys, tol);
      r["method"] = "static_gain";
    } else {
      norm = hinf::bisection_hinf_norm(sys, 1e-9, tol);
      r["method"] = "bisection";
    }
    r["norm"] = norm;
    if (f.oracle) {
      const double bis = hinf::bisection_hinf_norm(sys, 1e-6, tol);
      const auto sweep = hinf::frequency_sweep_norm(sys, hinf::default_frequency_grid(),
                                                    hinf::Execution::Parallel, tol);
      const bool agree = std::abs(bis - norm) <= 2e-6 * (1.0 + norm);
      r["oracle"] = {{"bisection", bis},
                     {"bisection_tol", 1e-6},
                     {"sweep_peak", sweep.peak},
                     {"sweep_argmax_frequency", sweep.argmax_frequency},
                     {"agree", agree}};
      if (!agree) code = kInconsistent;
    }
    j["result"] = std::move(r);
    ctx.emit(j);
    return code;
  }

  const auto rep = hinf::brl_report(sys, *f.gamma, cones, {tol, std::nullopt});
  json j = envelope(f.report ? "hinf --report" : "hinf --gamma", in, tol, rep.experimental);
  if (f.report) {
    j["result"] = io::to_json(rep);
  } else {
    j["result"] = {{"gamma", rep.gamma},
                   {"static_gain", rep.static_gain},
                   {"holds", rep.cond_i.holds},
                   {"consistent", rep.consistent},
                   {"boundary", rep.boundary}};
  }
  ctx.emit(j);
  if (!rep.consistent) {
    ctx.err << "hinf: the equivalent bounded-real conditions disagree\n";
    return kInconsistent;
  }
  return rep.cond_i.holds ? kHolds : kFails;
}

int cmd_synthesize(const Context& ctx, const std::string& verify, const Tolerances& tol) {
  Inputs in;
  in.note("synthesize-example");
  const auto prob = synthesis::irrigation_problem();
  if (!verify.empty()) {
    const json cert = io::parse_json(in.load(verify), "certificate");
    const Matrix p = matrix_from_certificate(cert, "P_star");
    const Matrix k = matrix_from_certificate(cert, "K_star");
    if (p.rows() != prob.states() || p.cols() != prob.states()) {
      throw io::InputError("certificate: P_star has the wrong shape");
    }
    const bool ok = synthesis::verify_synthesis_result(prob, p, k, tol);
    json j = envelope("synthesize-example --verify", in, tol, false);
    j["result"] = {{"valid", ok}};
    ctx.emit(j);
    return ok ? kHolds : kFails;
  }
  const auto r = synthesis::run_example(prob, tol);
  json j = envelope("synthesize-example", in, tol, false);
  j["result"] = io::to_json(r);
  ctx.emit(j);
  return (r.optimal && r.closedloop_monotone && r.gain_diagonal) ? kHolds : kFails;
}

struct SelftestFlags {
  std::string battery;
  int count = 50;
  std::uint64_t seed = 2024;
  bool serial = false;
  bool inject_defect = false;
  std::vector<double> factors{0.5, 0.8, 1.2, 2.0};
};

int cmd_selftest(const Context& ctx, const SelftestFlags& f, const Tolerances& tol) {
  Inputs in;
  in.note("selftest " + f.battery + " " + std::to_string(f.count) + " " + std::to_string(f.seed));
  harness::BatteryOptions opt;
  opt.seed = f.seed;
  opt.exec = f.serial ? hinf::Execution::Serial : hinf::Execution::Parallel;
  opt.tol = tol;
  harness::BatteryResult r;
  if (f.battery == "brl") {
    r = harness::run_brl_battery(f.count, f.factors, opt, f.inject_defect);
  } else if (f.battery == "sylvester") {
    r = harness::run_sylvester_battery(f.count, opt);
  } else if (f.battery == "zero-frequency") {
    r = harness::run_zero_frequency_battery(f.count, opt);
  } else {
    throw io::InputError("selftest: unknown battery '" + f.battery +
                         "' (expected brl, sylvester or zero-frequency)");
  }
  json j = envelope("selftest", in, tol, false);
  j["result"] = io::to_json(r);
  ctx.emit(j);
  return r.ok() ? kHolds : kFails;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certification of cone-preserving linear systems", "conecert"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kToolVersion));

  ToleranceFlags tf;
  std::string output;
  app.add_option("--config", tf.config, "JSON file with tolerance overrides");
  app.add_option("--tol-residual", tf.residual, "relative residual tolerance");
  app.add_option("--tol-axis", tf.axis, "imaginary-axis band, relative to the matrix norm");
  app.add_option("--tol-cone", tf.cone, "cone-membership slack");
  app.add_option("--tol-rcond", tf.rcond, "smallest accepted reciprocal condition number");
  app.add_option("--tol-boundary", tf.boundary, "gamma boundary band");
  app.add_option("--samples", tf.samples, "boundary samples for Lorentz checks");
  app.add_option("--sample-seed", tf.sample_seed, "seed for sampled checks");
  app.add_option("-o,--output", output, "write JSON here instead of stdout");

  std::string file;
  std::string verify;
  bool lyapunov = false;
  HinfFlags hf;
  SelftestFlags sf;

  auto* mono = app.add_subcommand("check-monotone", "monotonicity of (A, B, C) for the file cones");
  mono->add_option("file", file, "system file")->required();

  auto* stab = app.add_subcommand("stability", "stability tests for a cross-positive A");
  stab->add_option("file", file, "system file")->required();
  stab->add_flag("--lyapunov-cone", lyapunov, "search a cone-positive Lyapunov certificate");
  stab->add_option("--verify", verify, "re-check a certificate");

  auto* syl = app.add_subcommand("sylvester", "cone Sylvester certificate for the pair (A, D)");
  syl->add_option("file", file, "system file with A and D")->required();
  syl->add_option("--verify", verify, "re-check a supplied P");

  auto* hinf_cmd = app.add_subcommand("hinf", "H-infinity norm and bounded-real conditions");
  hinf_cmd->add_option("file", file, "system file")->required();
  hinf_cmd->add_flag("--norm", hf.norm, "print the H-infinity norm");
  hinf_cmd->add_flag("--oracle", hf.oracle, "cross-check --norm by bisection and a sweep");
  hinf_cmd->add_option("--gamma", hf.gamma, "bound to certify");
  hinf_cmd->add_flag("--report", hf.report, "emit every condition with its witness");
  hinf_cmd->add_option("--verify", hf.verify, "re-check an emitted certificate");

  auto* syn = app.add_subcommand("synthesize-example", "irrigation network state feedback");
  syn->add_option("--verify", verify, "re-check an emitted result");

  auto* self = app.add_subcommand("selftest", "randomized cross-validation batteries");
  self->add_option("--battery", sf.battery, "brl, sylvester or zero-frequency")->required();
  self->add_option("--count", sf.count, "instances");
  self->add_option("--seed", sf.seed, "battery seed");
  self->add_option("--factors", sf.factors, "gamma factors for the brl battery")->delimiter(',');
  self->add_flag("--serial", sf.serial, "evaluate instances on one thread");
  self->add_flag("--inject-defect", sf.inject_defect, "break condition (ii) on purpose");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kHolds : kInputError;
  }

  const Context ctx{out, err, output};
  try {
    const Tolerances tol = tf.resolve();
    if (*mono) return cmd_check_monotone(ctx, file, tol);
    if (*stab) return cmd_stability(ctx, file, lyapunov, verify, tol);
    if (*syl) return cmd_sylvester(ctx, file, verify, tol);
    if (*hinf_cmd) return cmd_hinf(ctx, file, hf, tol);
    if (*syn) return cmd_synthesize(ctx, verify, tol);
    if (*self) return cmd_selftest(ctx, sf, tol);
    err << "error: no command\n";
    return kInputError;
  } catch (const InconsistencyError& e) {
    err << "inconsistency: " << e.what() << "\n";
    return kInconsistent;
  } catch (const InfeasibleError& e) {
    err << "inconsistency: " << e.what() << "\n";
    return kInconsistent;
  } catch (const OrderingError& e) {
    err << "inconsistency: " << e.what() << "\n";
    return kInconsistent;
  } catch (const std::exception& e) {
    // Input, shape, precondition and JSON errors.
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("conecert");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace conecert::cli
