// Batch front-end for the multi-time verification scenarios.  Each
// subcommand builds a configuration, runs the measurement, writes
// report.json plus one CSV per scan into --out, and prints the checks.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
// 3 compute error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oneform/report.hpp"
#include "oneform/scenarios.hpp"

namespace {

using namespace oneform;
using namespace oneform::scenarios;

void print_checks(const ScenarioResult& res) {
  std::cout << "scenario " << res.scenario << ":\n";
  for (const Check& c : res.checks) {
    std::cout << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << " = "
              << c.value << " (" << (c.cmp == "le" ? "<=" : ">=") << " "
              << c.tolerance << ")\n";
  }
}

int finish(const std::vector<ScenarioResult>& results, const std::string& out_dir,
           std::uint64_t seed) {
  write_report(out_dir, results, seed);
  bool ok = true;
  for (const ScenarioResult& r : results) {
    print_checks(r);
    ok = ok && r.pass();
  }
  std::cout << (ok ? "all checks passed" : "some checks FAILED") << "; report in "
            << out_dir << "\n";
  return ok ? 0 : 1;
}

// JSON config support: flat {"flag": value} objects become command-line
// arguments of the selected subcommand.
std::vector<std::string> json_config_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse failure: ") + e.what());
  }
  std::vector<std::string> args;
  if (j.contains("scenario")) args.push_back(j["scenario"].get<std::string>());
  for (const auto& [key, value] : j.items()) {
    if (key == "scenario") continue;
    if (value.is_array()) {
      for (const auto& v : value)
        args.push_back("--" + key + "=" + (v.is_string() ? v.get<std::string>() : v.dump()));
    } else {
      args.push_back("--" + key + "=" +
                     (value.is_string() ? value.get<std::string>() : value.dump()));
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oneform-lab: multi-time zero-curvature, path-family and "
               "Gaussian-propagator verification scenarios"};
  app.require_subcommand(0, 1);
  app.fallthrough(true);  // parent options like --out may follow the subcommand
  app.set_config("--config", "", "INI config file (key=value, [subcommand] sections)");

  std::string out_dir = "oneform-report";
  std::uint64_t seed = 1;
  std::string json_config;
  app.add_option("--out", out_dir, "output directory for report.json and CSV scans");
  app.add_option("--seed", seed, "seed for the randomized spot checks");
  app.add_option("--json-config", json_config,
                 "JSON config file; keys map to subcommand flags");

  // --- curvature ---------------------------------------------------------
  auto* curvature = app.add_subcommand("curvature", "zero-curvature residual scan");
  CurvatureConfig ccfg;
  std::string cv_gauge_phi, cv_gauge_gen = "cosq";
  bool cv_nonflat = false;
  curvature->add_option("--builtin", ccfg.hierarchy.builtin,
                        "free | oscillator_pair | function_family | gauge_flat");
  curvature->add_option("--dim", ccfg.hierarchy.dim, "Hilbert dimension");
  curvature->add_option("--basis", ccfg.hierarchy.basis, "grid | oscillator");
  curvature->add_option("--w1", ccfg.hierarchy.w1, "first frequency");
  curvature->add_option("--w2", ccfg.hierarchy.w2, "second frequency");
  curvature->add_option("--orders", ccfg.hierarchy.orders, "free-hierarchy momentum orders");
  curvature->add_option("--gauge-phi", cv_gauge_phi,
                        "gauge phase polynomial over t1..tN, e.g. '0.1*t1+0.05*t2^2'");
  curvature->add_option("--gauge-gen", cv_gauge_gen, "gauge generator: q | p | cosq");
  curvature->add_option("--fd-step", ccfg.fd_step, "finite-difference step");
  curvature->add_option("--tol", ccfg.flat_tol, "flat-residual tolerance");
  curvature->add_flag("--nonflat", cv_nonflat, "expect a nonzero residual");
  curvature->add_option("--grid-points", ccfg.grid_points, "sample grid per axis");

  // --- loop --------------------------------------------------------------
  auto* loop = app.add_subcommand("loop", "Wilson-loop residual on a rectangle");
  LoopConfig lcfg;
  std::string lp_gauge_phi, lp_gauge_gen = "cosq";
  bool lp_nonflat = false;
  loop->add_option("--builtin", lcfg.hierarchy.builtin, "hierarchy builtin");
  loop->add_option("--dim", lcfg.hierarchy.dim, "Hilbert dimension");
  loop->add_option("--basis", lcfg.hierarchy.basis, "grid | oscillator");
  loop->add_option("--w1", lcfg.hierarchy.w1, "first frequency");
  loop->add_option("--w2", lcfg.hierarchy.w2, "second frequency");
  loop->add_option("--gauge-phi", lp_gauge_phi, "gauge phase polynomial");
  loop->add_option("--gauge-gen", lp_gauge_gen, "gauge generator: q | p | cosq");
  loop->add_option("--side", lcfg.side, "rectangle side length");
  loop->add_option("--steps", lcfg.steps_per_unit, "integrator steps per unit time");
  loop->add_option("--tol", lcfg.flat_tol, "flat loop-residual tolerance");
  loop->add_flag("--nonflat", lp_nonflat, "expect the area law instead of flatness");

  // --- paths -------------------------------------------------------------
  auto* paths = app.add_subcommand("paths", "staircase path enumeration and dedup");
  PathsConfig pcfg;
  paths->add_option("--ntimes", pcfg.n_times, "number of time axes (2 or 3)");
  paths->add_option("--N", pcfg.steps, "lattice steps per axis");

  // --- kernel ------------------------------------------------------------
  auto* kernel = app.add_subcommand("kernel", "Gaussian propagators over path families");
  KernelConfig kcfg;
  bool appendix_e = false;
  kernel->add_flag("--appendix-e", appendix_e,
                   "two-oscillator quadratic 1-form scenario (default layout)");
  kernel->add_option("--w1", kcfg.w1, "first frequency");
  kernel->add_option("--w2", kcfg.w2, "second frequency");
  kernel->add_option("--T1", kcfg.T1, "first total duration");
  kernel->add_option("--T2", kcfg.T2, "second total duration");
  kernel->add_option("--N", kcfg.steps, "lattice steps per axis");
  kernel->add_option("--grid-dim", kcfg.grid_dim, "oracle grid dimension");
  kernel->add_option("--grid-length", kcfg.grid_length, "oracle grid length");
  kernel->add_option("--hbar", kcfg.hbars, "hbar values for the ordering-gap scan");
  kernel->add_option("--tol", kcfg.spread_tol, "degenerate-spread tolerance");

  // --- closure -----------------------------------------------------------
  auto* closure = app.add_subcommand("closure", "classical 1-form closure residuals");
  ClosureConfig clcfg;
  closure->add_option("--family", clcfg.family,
                      "symmetric | circular | cosine (reported) | product");
  closure->add_option("--w1", clcfg.w1, "first frequency");
  closure->add_option("--w2", clcfg.w2, "second frequency");
  closure->add_option("--amplitude", clcfg.amplitude, "solution amplitude");
  closure->add_option("--N", clcfg.lattice_steps, "lattice steps for the action spread");
  closure->add_option("--tol", clcfg.residual_tol, "closure-residual tolerance");
  closure->add_option("--grid-points", clcfg.grid_points, "scan grid per axis");

  // --- full-suite --------------------------------------------------------
  auto* full = app.add_subcommand("full-suite", "run every scenario with defaults");

  // JSON config pre-pass: translate to argv and reparse.
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    for (size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--json-config" && i + 1 < args.size()) {
        std::vector<std::string> extra = json_config_args(args[i + 1]);
        args.erase(args.begin() + long(i), args.begin() + long(i) + 2);
        args.insert(args.begin(), extra.begin(), extra.end());
        break;
      }
    }
    std::vector<const char*> cargs{argv[0]};
    for (const std::string& a : args) cargs.push_back(a.c_str());
    app.parse(int(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  std::string active = "none";
  try {
    std::vector<ScenarioResult> results;
    for (const auto* sub : {curvature, loop, paths, kernel, closure, full})
      if (sub->parsed()) active = sub->get_name();
    if (curvature->parsed()) {
      ccfg.hierarchy.gauge_phi = cv_gauge_phi;
      ccfg.hierarchy.gauge_generator = cv_gauge_gen;
      ccfg.hierarchy.expect_flat = !cv_nonflat && ccfg.hierarchy.builtin != "oscillator_pair";
      if (ccfg.hierarchy.builtin == "oscillator_pair" && ccfg.hierarchy.basis == "grid" &&
          !curvature->count("--basis"))
        ccfg.hierarchy.basis = "oscillator";
      ccfg.seed = seed;
      results.push_back(run_curvature(ccfg));
    } else if (loop->parsed()) {
      lcfg.hierarchy.gauge_phi = lp_gauge_phi;
      lcfg.hierarchy.gauge_generator = lp_gauge_gen;
      lcfg.hierarchy.expect_flat = !lp_nonflat && lcfg.hierarchy.builtin != "oscillator_pair";
      if (lcfg.hierarchy.builtin == "oscillator_pair" && !loop->count("--basis"))
        lcfg.hierarchy.basis = "oscillator";
      if (lcfg.hierarchy.builtin == "free" && lcfg.hierarchy.gauge_phi.empty() &&
          !loop->count("--builtin"))
        lcfg.hierarchy = flat_gauge_suite()[0];
      lcfg.seed = seed;
      results.push_back(run_loop(lcfg));
    } else if (paths->parsed()) {
      results.push_back(run_paths(pcfg));
    } else if (kernel->parsed()) {
      kcfg.seed = seed;
      results.push_back(run_kernel(kcfg));
    } else if (closure->parsed()) {
      clcfg.seed = seed;
      results.push_back(run_closure(clcfg));
    } else if (full->parsed()) {
      FullSuiteConfig fcfg;
      fcfg.seed = seed;
      results = run_full_suite(fcfg);
    } else {
      std::cout << app.help();
      return 0;
    }
    return finish(results, out_dir, seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error in scenario '" << active << "': " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "compute error in scenario '" << active << "': " << e.what() << "\n";
    return 3;
  }
}
