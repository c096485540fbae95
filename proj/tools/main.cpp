#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "polyvar/diffops.hpp"
#include "polyvar/error.hpp"
#include "polyvar/operator.hpp"
#include "polyvar/sobolev.hpp"
#include "polyvar/testfn.hpp"
#include "polyvar/variational.hpp"
#include "runconfig.hpp"

namespace fs = std::filesystem;
using namespace polyvar;
using cli::RunConfig;

namespace {

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case errc::config_error:
    case errc::invalid_params:
    case errc::invalid_spec:
    case errc::geometry_mismatch:
    case errc::order_out_of_range:
    case errc::wrong_geometry:
      return 2;
    case errc::not_coercive:
      return 3;
    case errc::no_convergence:
      return 4;
    case errc::under_resolved:
      return 5;
    default:
      return 1;
  }
}

struct Overrides {
  std::optional<int> n, k;
  std::optional<double> q, gamma, eps;
  std::optional<double> radius;
  std::optional<int> nodes;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, std::string& config_path, Overrides& ov) {
  cmd->add_option("--config", config_path, "experiment config file");
  cmd->add_option("--n", ov.n, "override dimension n");
  cmd->add_option("--k", ov.k, "override operator order k");
  cmd->add_option("--q", ov.q, "override subcritical exponent q");
  cmd->add_option("--gamma", ov.gamma, "override constraint level gamma");
  cmd->add_option("--eps", ov.eps, "override test-function epsilon (single value)");
  cmd->add_option("--radius", ov.radius, "override geometry radius");
  cmd->add_option("--nodes", ov.nodes, "override node count");
  cmd->add_option("--out", ov.out, "override output directory");
}

RunConfig load_config(const std::string& config_path, const Overrides& ov) {
  RunConfig cfg;
  if (!config_path.empty()) cfg = cli::parse_config_file(config_path);
  if (ov.n) cfg.n = *ov.n;
  if (ov.k) {
    cfg.k = *ov.k;
    cfg.lower_order.clear();
    cfg.phi.clear();
  }
  if (ov.q) cfg.q = *ov.q;
  if (ov.gamma) cfg.gamma = *ov.gamma;
  if (ov.eps) cfg.eps_list = {*ov.eps};
  if (ov.radius) cfg.radius = *ov.radius;
  if (ov.nodes) cfg.nodes = *ov.nodes;
  if (ov.out) cfg.directory = *ov.out;
  cfg.finalize();
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  require(os.good(), errc::config_error, "cannot write " + path.string());
  os << text;
}

fs::path prepare_output(const RunConfig& cfg) {
  fs::path dir(cfg.directory);
  if (!dir.empty()) fs::create_directories(dir);
  write_text(dir / "manifest.json", cfg.manifest_json());
  return dir;
}

struct Setup {
  Geometry geometry;
  AssembledOperator op;
};

Setup make_setup(const RunConfig& cfg) {
  Geometry g = build_geometry(cfg.kind, cfg.n, cfg.radius, cfg.nodes);
  OperatorSpec spec{SobolevParams(cfg.n, cfg.k), cfg.lower_order, cfg.f};
  AssembledOperator op = assemble(spec, g);
  return Setup{std::move(g), std::move(op)};
}

BoundaryData boundary_data(const RunConfig& cfg) {
  BoundaryData bd;
  bd.components = cfg.phi;
  return bd;
}

EigenPair pure_eigenpair(const AssembledOperator& op) {
  for (const auto& a : op.spec().lower_order)
    if (!a.is_identically_zero())
      return assemble(OperatorSpec::pure(op.spec().params), op.geometry()).first_eigenpair();
  return op.first_eigenpair();
}

std::string report_line(const std::string& key, double v) {
  return key + "=" + format_double(v) + "\n";
}

int cmd_sobolev(const RunConfig& cfg) {
  prepare_output(cfg);
  const SobolevParams p(cfg.n, cfg.k);
  const Rational ts = critical_exponent(p);
  std::string out;
  out += "two_sharp=" +
         (ts.den == 1 ? std::to_string(ts.num)
                      : std::to_string(ts.num) + "/" + std::to_string(ts.den)) +
         "\n";
  out += report_line("alpha", alpha(p));
  out += report_line("inv_K0", inv_k0(p));
  out += report_line("K0", k0(p));
  std::cout << out;
  return 0;
}

int cmd_rayleigh(const RunConfig& cfg, double radius, int nodes) {
  prepare_output(cfg);
  const SobolevParams p(cfg.n, cfg.k);
  const double q = bubble_rayleigh_quotient(p, radius, nodes);
  const double ref = inv_k0(p);
  std::cout << report_line("rayleigh", q) << report_line("inv_K0", ref)
            << report_line("rel_gap", (q - ref) / ref);
  return 0;
}

int cmd_extend(const RunConfig& cfg) {
  const fs::path dir = prepare_output(cfg);
  Setup s = make_setup(cfg);
  const DiscreteField h = s.op.harmonic_extension(boundary_data(cfg));
  write_field_csv((dir / "extension.csv").string(), h, s.geometry);
  std::cout << report_line("residual", s.op.extension_weak_residual(h));
  return 0;
}

int cmd_eigen(const RunConfig& cfg) {
  const fs::path dir = prepare_output(cfg);
  Setup s = make_setup(cfg);
  const EigenPair pair = pure_eigenpair(s.op);
  write_field_csv((dir / "psi1.csv").string(), pair.psi1, s.geometry);
  std::cout << report_line("lambda1", pair.lambda1);
  return 0;
}

MinimizeOptions options_from(const RunConfig& cfg) {
  MinimizeOptions opts;
  opts.el_tol = cfg.el_tol;
  opts.constraint_tol = cfg.constraint_tol;
  opts.max_iterations = cfg.max_iterations;
  return opts;
}

int cmd_minimize(const RunConfig& cfg) {
  const fs::path dir = prepare_output(cfg);
  require(cfg.q.has_value(), errc::config_error, "minimize needs q in the constraint section");
  Setup s = make_setup(cfg);
  const DiscreteField h = s.op.harmonic_extension(boundary_data(cfg));
  const EigenPair psi = pure_eigenpair(s.op);
  const ConstraintSpec spec = ConstraintSpec::create(*cfg.q, cfg.gamma, h, s.op.f_values(),
                                                     s.geometry, s.op.spec().params.two_sharp());
  if (spec.critical_level_warning)
    std::cerr << "warning: gamma does not exceed the critical-level integral "
                 "(∫ f|h|^{2#} dv >= gamma)\n";
  const MinimizeResult res = minimize(s.op, spec, psi, options_from(cfg));

  nlohmann::json j;
  j["q"] = *cfg.q;
  j["gamma"] = cfg.gamma;
  j["mu"] = res.mu;
  j["lambda"] = res.lambda;
  j["el_residual"] = res.el_residual;
  j["iterations"] = res.iterations;
  j["t_seed"] = res.t_seed;
  j["sign_changes"] = res.sign_changes_of_u;
  j["converged"] = res.converged;
  const std::string text = j.dump(2) + "\n";
  write_text(dir / "result.json", text);
  write_field_csv((dir / "w.csv").string(), res.w, s.geometry);
  std::cout << text;
  return res.converged ? 0 : 4;
}

std::string continuation_csv(const ContinuationResult& res) {
  std::string csv = "q,mu,lambda,el_residual,sign_changes\n";
  for (const auto& r : res.records) {
    csv += format_double(r.q) + "," + format_double(r.mu) + "," + format_double(r.lambda) +
           "," + format_double(r.el_residual) + "," + std::to_string(r.sign_changes) + "\n";
  }
  return csv;
}

int cmd_continue(const RunConfig& cfg) {
  const fs::path dir = prepare_output(cfg);
  require(!cfg.q_schedule.empty(), errc::config_error,
          "continue needs a schedule in the constraint section");
  Setup s = make_setup(cfg);
  const DiscreteField h = s.op.harmonic_extension(boundary_data(cfg));
  const ContinuationResult res =
      continuation(s.op, cfg.gamma, h, cfg.q_schedule, options_from(cfg));
  write_text(dir / "continuation.csv", continuation_csv(res));
  nlohmann::json j;
  j["mu_limit_estimate"] = res.mu_limit_estimate;
  j["condition_holds"] = res.condition_holds;
  j["extrapolated"] = res.extrapolated;
  write_text(dir / "continuation.json", j.dump(2) + "\n");
  std::cout << continuation_csv(res);
  return 0;
}

int cmd_testfn(const RunConfig& cfg) {
  const fs::path dir = prepare_output(cfg);
  Setup s = make_setup(cfg);
  const SobolevParams p = s.op.spec().params;
  TestFunctionSpec tmpl{cfg.eps_list.front(), cfg.delta, cfg.cutoff_order};
  const LimitStudy study = limit_study(cfg.eps_list, tmpl, s.op, p);
  std::string csv = "epsilon,mu,lower_order,gamma,Q,target,gap\n";
  for (const auto& r : study.records) {
    csv += format_double(r.epsilon) + "," + format_double(r.mu) + "," +
           format_double(r.lower_order) + "," + format_double(r.gamma) + "," +
           format_double(r.Q) + "," + format_double(study.target) + "," +
           format_double(r.Q - study.target) + "\n";
  }
  write_text(dir / "testfn.csv", csv);
  nlohmann::json j;
  j["limit"] = study.limit;
  j["target"] = study.target;
  j["gap"] = study.gap;
  j["fit_power"] = study.fit_power;
  j["extrapolated"] = study.extrapolated;
  write_text(dir / "testfn.json", j.dump(2) + "\n");
  std::cout << csv << report_line("limit", study.limit) << report_line("target", study.target);
  return 0;
}

int cmd_check(const RunConfig& cfg) {
  const fs::path dir = prepare_output(cfg);
  require(!cfg.q_schedule.empty(), errc::config_error,
          "check needs a schedule in the constraint section");
  Setup s = make_setup(cfg);
  const SobolevParams p = s.op.spec().params;
  const DiscreteField h = s.op.harmonic_extension(boundary_data(cfg));
  const ContinuationResult res =
      continuation(s.op, cfg.gamma, h, cfg.q_schedule, options_from(cfg));
  const double e = 2.0 / p.two_sharp();
  const double lhs = res.mu_limit_estimate / std::pow(cfg.gamma, e);
  const double rhs = inv_k0(p) / std::pow(s.op.f_max(), e);
  nlohmann::json j;
  j["lhs"] = lhs;
  j["rhs"] = rhs;
  j["mu_limit_estimate"] = res.mu_limit_estimate;
  j["condition_holds"] = res.condition_holds;
  write_text(dir / "check.json", j.dump(2) + "\n");
  write_text(dir / "continuation.csv", continuation_csv(res));
  std::cout << report_line("lhs", lhs) << report_line("rhs", rhs)
            << "verdict=" << (res.condition_holds ? "holds" : "fails") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polyvar: polyharmonic variational solver"};
  app.require_subcommand(1);

  struct Cmd {
    CLI::App* sub;
    std::string config;
    Overrides ov;
  };
  std::map<std::string, Cmd> cmds;
  for (const char* name : {"sobolev", "rayleigh", "extend", "eigen", "minimize", "continue",
                           "testfn", "check"}) {
    Cmd c;
    c.sub = app.add_subcommand(name);
    add_common(c.sub, cmds[name].config, cmds[name].ov);
    cmds[name].sub = c.sub;
  }
  cmds["sobolev"].sub->description("closed-form Sobolev constants for (n, k)");
  cmds["rayleigh"].sub->description("Rayleigh-quotient cross-check of the best constant");
  cmds["extend"].sub->description("harmonic extension of boundary data");
  cmds["eigen"].sub->description("first eigenpair of the pure polyharmonic operator");
  cmds["minimize"].sub->description("constrained subcritical minimization");
  cmds["continue"].sub->description("continuation of minimizers toward the critical exponent");
  cmds["testfn"].sub->description("concentration test-function quotient study");
  cmds["check"].sub->description("continuation plus the strict-inequality verdict");

  CLI11_PARSE(app, argc, argv);

  try {
    for (auto& [name, c] : cmds) {
      if (!c.sub->parsed()) continue;
      const RunConfig cfg = load_config(c.config, c.ov);
      if (name == "sobolev") return cmd_sobolev(cfg);
      if (name == "rayleigh")
        return cmd_rayleigh(cfg, c.ov.radius.value_or(100.0), c.ov.nodes.value_or(20001));
      if (name == "extend") return cmd_extend(cfg);
      if (name == "eigen") return cmd_eigen(cfg);
      if (name == "minimize") return cmd_minimize(cfg);
      if (name == "continue") return cmd_continue(cfg);
      if (name == "testfn") return cmd_testfn(cfg);
      if (name == "check") return cmd_check(cfg);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
