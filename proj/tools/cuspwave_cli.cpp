// Command-line front end. Exit codes: 0 pass, 1 internal error, 2 evolution
// failure (blow-up, R ≤ 0, boundary contact), 3 gate rejection, 4 verdict FAIL.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "cuspwave/config.hpp"
#include "cuspwave/diagnostics.hpp"
#include "cuspwave/errors.hpp"
#include "cuspwave/output.hpp"
#include "cuspwave/run.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cuspwave;

namespace {

enum Exit { kPass = 0, kInternal = 1, kEvolution = 2, kGate = 3, kFail = 4 };

struct Options {
  std::string config;
  std::string out = ".";
  double dx_override = 0.0;
  unsigned long long seed = 1;
  int threads = 1;
  std::vector<double> dx_list;
};

fs::path out_dir(const Options& o) {
  if (const char* env = std::getenv("CUSPWAVE_OUT"); env && *env) return env;
  return o.out;
}

RunConfig load(const Options& o) {
  if (o.config.empty()) throw Error(ErrorKind::InvalidArgument, "--config is required");
  RunConfig cfg = load_config(o.config);
  if (o.dx_override > 0.0) cfg.set_dx(o.dx_override);
  cfg.validate();
  return cfg;
}

int status_exit(const RunResult& r) {
  if (r.status == RunStatus::Completed) return kPass;
  std::cerr << "run stopped (" << to_string(r.status) << "): " << r.message << "\n";
  return kEvolution;
}

json verdict_json(const std::string& command, bool pass) {
  return json{{"command", command}, {"verdict", pass ? "PASS" : "FAIL"}};
}

void write_run_outputs(const Options& o, const RunConfig& cfg, const RunResult& res) {
  const fs::path dir = out_dir(o);
  write_atomic(dir / cfg.output.csv, reports_csv(res.reports));
  if (!res.snapshots.empty()) {
    fs::path snap = dir / cfg.output.csv;
    snap.replace_filename(snap.stem().string() + "_snapshots.csv");
    write_atomic(snap, snapshots_csv(make_model(cfg), res.snapshots));
  }
}

int cmd_run(const Options& o) {
  const RunConfig cfg = load(o);
  const RunResult res = run(cfg);
  write_run_outputs(o, cfg, res);
  json doc = verdict_json("run", res.status == RunStatus::Completed);
  doc["status"] = to_string(res.status);
  doc["dx"] = res.dx;
  doc["dt"] = res.dt;
  doc["samples"] = res.reports.size();
  write_json(out_dir(o) / cfg.output.verdict, doc);
  return status_exit(res);
}

int cmd_verify_background(const Options& o) {
  const auto chk = verify_background(o.seed);
  json doc = verdict_json("verify-background", chk.pass);
  doc["seed"] = o.seed;
  doc["max_residual"] = chk.max_residual;
  doc["max_fd_mismatch"] = chk.max_fd_mismatch;
  doc["max_roundtrip"] = chk.max_roundtrip;
  write_json(out_dir(o) / "verify_background.json", doc);
  std::cout << doc.dump(2) << "\n";
  return chk.pass ? kPass : kFail;
}

int cmd_decay_report(const Options& o) {
  const RunConfig cfg = load(o);
  const RunResult res = run(cfg);
  write_run_outputs(o, cfg, res);
  if (const int code = status_exit(res)) return code;
  const int k = cfg.diagnostics.k;
  std::vector<double> t, M;
  for (const auto& r : res.reports) {
    t.push_back(r.t);
    M.push_back(r.Mtilde[static_cast<std::size_t>(k)]);
  }
  const auto& r0 = res.reports.front();
  const double scale = r0.Mtilde[static_cast<std::size_t>(k)] + r0.m[static_cast<std::size_t>(k)];
  const DecayFit fit = decay_fit(t, M, scale, cfg.diagnostics.window_start);
  const bool pass = fit.lambda <= cfg.diagnostics.lambda_max && fit.C_fit <= cfg.diagnostics.c_max;
  json doc = verdict_json("decay-report", pass);
  doc["k"] = k;
  doc["lambda"] = fit.lambda;
  doc["C_fit"] = fit.C_fit;
  doc["window"] = {fit.t_min, fit.t_max};
  doc["residual"] = fit.residual;
  doc["initial_scale"] = scale;
  doc["thresholds"] = {{"lambda_max", cfg.diagnostics.lambda_max}, {"c_max", cfg.diagnostics.c_max}};
  write_json(out_dir(o) / cfg.output.verdict, doc);
  std::cout << doc.dump(2) << "\n";
  return pass ? kPass : kFail;
}

int cmd_constraint_report(const Options& o) {
  RunConfig cfg = load(o);
  if (cfg.lapse == LapseMode::None) cfg.lapse = LapseMode::Constrained;
  const RunResult res = run(cfg);
  write_run_outputs(o, cfg, res);
  if (const int code = status_exit(res)) return code;
  json reports = json::array();
  double worst = 0.0;
  for (const auto& r : res.reports) {
    reports.push_back({{"t", r.t},
                       {"res_momentum", r.res_momentum},
                       {"res_hamiltonian", r.res_hamiltonian},
                       {"curl_residual", r.curl_residual}});
    worst = std::max({worst, r.res_momentum, r.res_hamiltonian, r.curl_residual});
  }
  const bool pass = worst <= cfg.diagnostics.residual_tol;
  json doc = verdict_json("constraint-report", pass);
  doc["lapse"] = to_string(cfg.lapse);
  doc["max_residual"] = worst;
  doc["residual_tol"] = cfg.diagnostics.residual_tol;
  doc["reports"] = reports;
  write_json(out_dir(o) / cfg.output.verdict, doc);
  std::cout << "max residual " << worst << " (" << (pass ? "PASS" : "FAIL") << ")\n";
  return pass ? kPass : kFail;
}

int cmd_convergence(const Options& o) {
  const RunConfig cfg = load(o);
  std::vector<double> dxs = o.dx_list;
  if (dxs.empty()) {
    const double dx = cfg.grid.dx();
    dxs = {dx, dx / 2.0, dx / 4.0};
  }
  const auto st = convergence_study(cfg, dxs, o.threads);
  const bool fourth = cfg.scheme.stencil_order == 4;
  const double lo = fourth ? 3.5 : 1.8, hi = fourth ? 4.2 : 2.2;
  bool pass = true;
  json qs = json::array();
  for (const auto& q : st.quantities) {
    json jq{{"name", q.name}, {"errors", q.errors}, {"non_monotone", q.non_monotone}};
    if (q.exact) jq["order"] = "EXACT";
    else jq["order"] = q.order;
    qs.push_back(jq);
    if ((q.name == "dW" || q.name == "Mtilde3") && !q.exact)
      pass = pass && !q.non_monotone && q.order >= lo && q.order <= hi;
  }
  json doc = verdict_json("convergence", pass);
  doc["dx"] = st.dx;
  doc["expected_order"] = {lo, hi};
  doc["quantities"] = qs;
  write_json(out_dir(o) / cfg.output.verdict, doc);
  std::cout << doc.dump(2) << "\n";
  return pass ? kPass : kFail;
}

int cmd_isometry_check(const Options& o) {
  RunConfig cfg = load(o);
  if (!cfg.isometry) throw Error(ErrorKind::InvalidArgument, "isometry-check needs an [isometry] section");
  const double drift = isometry_drift(cfg);
  const double dx = cfg.grid.dx();
  const double bound = cfg.diagnostics.drift_constant * dx * dx;
  const bool pass = drift <= bound;
  json doc = verdict_json("isometry-check", pass);
  const auto& m = *cfg.isometry;
  doc["matrix"] = {m.a, m.b, m.c, m.d};
  doc["dx"] = dx;
  doc["t_final"] = cfg.grid.t_final;
  doc["drift"] = drift;
  doc["bound"] = bound;
  write_json(out_dir(o) / cfg.output.verdict, doc);
  std::cout << doc.dump(2) << "\n";
  return pass ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-cusp perturbation simulator"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "Run configuration file");
  app.add_option("--out", o.out, "Output directory (CUSPWAVE_OUT overrides)");
  app.add_option("--dx-override", o.dx_override, "Replace the configured grid spacing");
  app.add_option("--seed", o.seed, "Seed for randomized checks");
  app.add_option("--threads", o.threads, "Worker threads for independent runs")->check(CLI::PositiveNumber);

  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(const Options&);
  };
  const Sub subs[] = {
      {"run", "Evolve a configuration and write the report CSV", cmd_run},
      {"verify-background", "Check the analytic background identities", cmd_verify_background},
      {"decay-report", "Run and fit the decay of the weighted norm", cmd_decay_report},
      {"constraint-report", "Run with a constraint-solved lapse and report residuals", cmd_constraint_report},
      {"convergence", "Self-convergence orders over nested resolutions", cmd_convergence},
      {"isometry-check", "Evolve an isometry image of the background", cmd_isometry_check},
  };
  std::vector<std::pair<CLI::App*, int (*)(const Options&)>> handlers;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->fallthrough();
    if (std::string(s.name) == "convergence")
      sub->add_option("--dx-list", o.dx_list, "Spacings, coarse to fine")->delimiter(',');
    handlers.emplace_back(sub, s.fn);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kInternal;
  }

  try {
    for (const auto& [sub, fn] : handlers)
      if (sub->parsed()) return fn(o);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.kind() == ErrorKind::GateRejected ? kGate : kInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
