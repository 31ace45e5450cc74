#ifndef ONEFORM_SCENARIOS_HPP
#define ONEFORM_SCENARIOS_HPP

// Batch scenario runners behind the CLI: each one builds the configured
// objects, runs the measurement, and returns named checks plus CSV scans.
// Identical config + seed gives byte-identical reports; the parallel scans
// write results by index so the worker count never changes values.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "oneform/closure.hpp"
#include "oneform/evolution.hpp"
#include "oneform/hierarchy.hpp"
#include "oneform/kernel.hpp"
#include "oneform/lattice.hpp"
#include "oneform/report.hpp"

namespace oneform::scenarios {

// Deterministic generator used for seeded spot checks (identical streams on
// every platform).
struct SeededRng {
  std::uint64_t state;
  explicit SeededRng(std::uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (double(next() >> 11) / 9007199254740992.0);
  }
};

// ---------------------------------------------------------------------------
// Hierarchy specification shared by the curvature and loop scenarios.

struct HierarchyConfig {
  std::string builtin = "free";  // free | oscillator_pair | function_family | gauge_flat
  int dim = 32;
  std::string basis = "grid";
  std::vector<int> orders{1, 2};
  double w1 = 1.0, w2 = 2.0;
  std::vector<std::vector<double>> polys{{0.0, 0.5}, {0.0, 0.0, 0.25}};
  std::string gauge_phi;                  // phase polynomial over t1..tN
  std::string gauge_generator = "cosq";   // q | p | cosq
  bool expect_flat = true;
  std::string label;
};

inline Matrix gauge_generator_matrix(const std::string& name, int dim, double length) {
  if (name == "q") return build_grid_operators(dim, length).position;
  if (name == "p") return build_grid_operators(dim, length).momentum;
  if (name == "cosq") {
    GridOperators g = build_grid_operators(dim, length);
    Matrix m = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i)
      m(i, i) = std::cos(2.0 * kPi * g.points[i] / g.length);
    return m;
  }
  throw ConfigError("unknown gauge generator '" + name + "' (expected q, p or cosq)");
}

inline HamiltonianHierarchy build_hierarchy(const HierarchyConfig& cfg) {
  const Basis basis = cfg.basis == "oscillator" ? Basis::oscillator : Basis::grid;
  const double length = double(cfg.dim);
  HamiltonianHierarchy h;
  if (cfg.builtin == "free") {
    h = free_hierarchy(cfg.orders, cfg.dim, basis, length);
  } else if (cfg.builtin == "oscillator_pair") {
    h = oscillator_pair_hierarchy(cfg.w1, cfg.w2, cfg.dim, basis, length);
  } else if (cfg.builtin == "function_family" || cfg.builtin == "gauge_flat") {
    GridOperators g = build_grid_operators(cfg.dim, length);
    h = function_family_hierarchy(g.momentum, cfg.polys,
                                  cfg.label.empty() ? cfg.builtin : cfg.label);
  } else {
    throw ConfigError("unknown builtin hierarchy '" + cfg.builtin + "'");
  }
  if (!cfg.gauge_phi.empty()) {
    TimePolynomial phi = parse_time_polynomial(cfg.gauge_phi, h.n_times);
    Matrix gen = gauge_generator_matrix(cfg.gauge_generator, cfg.dim, length);
    h = gauge_transform(h, make_phase_gauge(phi, gen, cfg.gauge_phi));
  }
  return h;
}

inline Json to_json(const HierarchyConfig& cfg) {
  Json j;
  j["builtin"] = cfg.builtin;
  j["dim"] = cfg.dim;
  j["basis"] = cfg.basis;
  if (cfg.builtin == "free") j["orders"] = cfg.orders;
  if (cfg.builtin == "oscillator_pair") {
    j["w1"] = cfg.w1;
    j["w2"] = cfg.w2;
  }
  if (!cfg.gauge_phi.empty()) {
    j["gauge_phi"] = cfg.gauge_phi;
    j["gauge_generator"] = cfg.gauge_generator;
  }
  j["expect_flat"] = cfg.expect_flat;
  return j;
}

// The three gauge-transformed flat families used by the verification suites.
// Bounded gauge generators and modest base norms keep the second-order loop
// integrator comfortably inside the acceptance tolerances.
inline std::vector<HierarchyConfig> flat_gauge_suite() {
  std::vector<HierarchyConfig> out;
  HierarchyConfig a;
  a.builtin = "gauge_flat";
  a.polys = {{0.0, 0.5}, {0.0, 0.0, 0.25}};
  a.gauge_phi = "0.12*t1 + 0.06*t2^2";
  a.label = "gauge-a";
  out.push_back(a);

  HierarchyConfig b;
  b.builtin = "gauge_flat";
  b.polys = {{0.0, 0.4}, {0.0, 0.1, 0.2}};
  b.gauge_phi = "0.1*t1*t2";
  b.label = "gauge-b";
  out.push_back(b);

  HierarchyConfig c;
  c.builtin = "gauge_flat";
  c.polys = {{0.1, 0.3}, {0.0, 0.0, 0.15}};
  c.gauge_phi = "0.08*t2 + 0.08*t1^2";
  c.label = "gauge-c";
  out.push_back(c);
  return out;
}

// ---------------------------------------------------------------------------
// curvature

struct CurvatureConfig {
  HierarchyConfig hierarchy;
  int grid_points = 5;
  double t_max = 1.0;
  double fd_step = 1e-3;
  double flat_tol = 1e-7;
  double nonflat_min = 0.1;
  int heatmap_points = 9;
  std::uint64_t seed = 1;
};

inline ScenarioResult run_curvature(const CurvatureConfig& cfg) {
  if (cfg.grid_points < 2 || cfg.heatmap_points < 2)
    throw ConfigError("curvature: sample grids need at least 2 points per axis");
  ScenarioResult res;
  res.scenario = "curvature";
  res.config = to_json(cfg.hierarchy);
  res.config["grid_points"] = cfg.grid_points;
  res.config["fd_step"] = cfg.fd_step;

  HamiltonianHierarchy h = build_hierarchy(cfg.hierarchy);
  res.checks.push_back(check_le("generator_hermiticity", hierarchy_hermiticity_defect(h),
                                1e-12));
  if (h.has_analytic_partials())
    res.checks.push_back(
        check_le("partials_fd_consistency", partials_consistency_defect(h, 1e-3), 1e-6));

  const int n = cfg.grid_points;
  std::vector<double> norms(size_t(n) * size_t(n), 0.0);
  parallel_for(n * n, [&](int idx) {
    const int i = idx / n, j = idx % n;
    TimePoint t{cfg.t_max * i / (n - 1.0), cfg.t_max * j / (n - 1.0)};
    norms[size_t(idx)] = zero_curvature_residual(h, 0, 1, t, cfg.fd_step).norm;
  });
  double worst = 0.0;
  for (double v : norms) worst = std::max(worst, v);

  if (cfg.hierarchy.expect_flat)
    res.checks.push_back(check_le("max_residual_norm", worst, cfg.flat_tol));
  else
    res.checks.push_back(check_ge("max_residual_norm", worst, cfg.nonflat_min));

  // antisymmetry spot check at seeded sample points
  SeededRng rng(cfg.seed);
  double antisym = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    TimePoint t{rng.uniform(0.0, cfg.t_max), rng.uniform(0.0, cfg.t_max)};
    Matrix a = zero_curvature_residual(h, 0, 1, t, cfg.fd_step).residual;
    Matrix b = zero_curvature_residual(h, 1, 0, t, cfg.fd_step).residual;
    antisym = std::max(antisym, (a + b).norm());
  }
  res.checks.push_back(check_le("residual_antisymmetry", antisym, 1e-12));

  const int m = cfg.heatmap_points;
  CsvFile heat;
  heat.name = "curvature_heatmap.csv";
  heat.header = {"t1", "t2", "residual"};
  heat.rows.assign(size_t(m) * size_t(m), {});
  parallel_for(m * m, [&](int idx) {
    const int i = idx / m, j = idx % m;
    TimePoint t{cfg.t_max * i / (m - 1.0), cfg.t_max * j / (m - 1.0)};
    const double v = zero_curvature_residual(h, 0, 1, t, cfg.fd_step).norm;
    heat.rows[size_t(idx)] = {t[0], t[1], v};
  });
  res.csvs.push_back(heat);

  res.details["max_residual_norm"] = worst;
  res.details["label"] = h.label;
  return res;
}

// ---------------------------------------------------------------------------
// loop

struct LoopConfig {
  HierarchyConfig hierarchy;
  std::vector<double> corner{0.0, 0.0};
  double side = 1.0;
  int steps_per_unit = 200;
  std::vector<double> lambdas{1.0, 0.5, 0.25};
  double flat_tol = 1e-6;
  double ratio_lo = 0.5, ratio_hi = 2.0;
  std::uint64_t seed = 1;
};

inline ScenarioResult run_loop(const LoopConfig& cfg) {
  ScenarioResult res;
  res.scenario = "loop";
  res.config = to_json(cfg.hierarchy);
  res.config["side"] = cfg.side;
  res.config["steps_per_unit"] = cfg.steps_per_unit;

  HamiltonianHierarchy h = build_hierarchy(cfg.hierarchy);
  TimePoint corner = cfg.corner;

  std::vector<double> lam_res(cfg.lambdas.size(), 0.0);
  parallel_for(int(cfg.lambdas.size()), [&](int i) {
    const double s = cfg.side * cfg.lambdas[size_t(i)];
    lam_res[size_t(i)] = loop_residual(h, corner, 0, 1, s, s, cfg.steps_per_unit);
  });

  CsvFile scaling;
  scaling.name = "loop_scaling.csv";
  scaling.header = {"lambda", "residual"};
  for (size_t i = 0; i < cfg.lambdas.size(); ++i)
    scaling.rows.push_back({cfg.lambdas[i], lam_res[i]});
  res.csvs.push_back(scaling);

  const double base = lam_res[0];
  res.details["loop_residual"] = base;

  // exported evolution record for the forward leg of the base rectangle
  StaircasePath forward = parse_path("(0,0);t1:1,t2:1");
  EvolutionResult ev = evolve_path(h, forward, {cfg.side, cfg.side}, cfg.steps_per_unit);
  Json evj = oneform::to_json(ev);
  evj["residuals"] = lam_res;
  res.details["evolution"] = evj;
  res.checks.push_back(check_le("unitarity_defect", ev.unitarity_defect,
                                1e-10 * ev.segment_count));

  if (cfg.hierarchy.expect_flat) {
    res.checks.push_back(check_le("loop_residual", base, cfg.flat_tol));
    // 2nd-order convergence until the flatness floor
    const double coarse =
        loop_residual(h, corner, 0, 1, cfg.side, cfg.side, cfg.steps_per_unit / 2);
    const double ratio = coarse / std::max(base, 1e-15);
    res.details["convergence_ratio"] = ratio;
    if (base > 1e-12) {
      res.checks.push_back(check_ge("convergence_ratio", ratio, 2.5));
      res.checks.push_back(check_le("convergence_ratio_upper", ratio, 6.0));
    }
    CsvFile conv;
    conv.name = "loop_convergence.csv";
    conv.header = {"steps_per_unit", "residual"};
    conv.rows.push_back({double(cfg.steps_per_unit / 2), coarse});
    conv.rows.push_back({double(cfg.steps_per_unit), base});
    res.csvs.push_back(conv);
  } else {
    // area law: residual within [lo, hi] x area * ||Z(center)|| per lambda
    for (size_t i = 0; i < cfg.lambdas.size(); ++i) {
      const double s = cfg.side * cfg.lambdas[i];
      TimePoint center = corner;
      center[0] += s / 2.0;
      center[1] += s / 2.0;
      const double z = zero_curvature_residual(h, 0, 1, center, 1e-3).norm;
      const double expect = s * s * z;
      const double ratio = lam_res[i] / expect;
      const std::string tag = "area_law_ratio_lambda" + std::to_string(i);
      res.checks.push_back(check_ge(tag + "_lower", ratio, cfg.ratio_lo));
      res.checks.push_back(check_le(tag + "_upper", ratio, cfg.ratio_hi));
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// paths

struct PathsConfig {
  int n_times = 2;
  int steps = 4;
};

inline ScenarioResult run_paths(const PathsConfig& cfg) {
  ScenarioResult res;
  res.scenario = "paths";
  res.config["n_times"] = cfg.n_times;
  res.config["steps"] = cfg.steps;

  LatticeSpec spec(cfg.n_times, cfg.steps);
  std::vector<StaircasePath> paths = enumerate_paths(spec);
  std::vector<StaircasePath> again = enumerate_paths(spec);

  const double count_gap =
      std::abs(double(paths.size()) - double(count_paths(spec)));
  res.checks.push_back(check_le("count_matches_closed_form", count_gap, 0.0));

  bool deterministic = paths.size() == again.size();
  for (size_t i = 0; deterministic && i < paths.size(); ++i)
    deterministic = paths[i] == again[i];
  res.checks.push_back(check_ge("deterministic_order", deterministic ? 1.0 : 0.0, 1.0));

  bool shape_ok = true;
  std::vector<int> target(size_t(cfg.n_times), cfg.steps);
  for (const StaircasePath& p : paths)
    shape_ok = shape_ok && p.is_monotone() && p.end() == target &&
               canonical(p) == p;
  res.checks.push_back(check_ge("paths_monotone_canonical", shape_ok ? 1.0 : 0.0, 1.0));

  std::vector<RawFamily> families;
  if (cfg.n_times == 2) {
    families.push_back(constrained_family_2d(spec, 0));
    families.push_back(constrained_family_2d(spec, 1));
  } else {
    for (int axis = 0; axis < 3; ++axis)
      families.push_back(raw_3d_two_order_family(spec, axis));
  }
  DedupReport dd = dedup_report(families);
  bool all_ones = true, weights = true;
  int raw_members = 0;
  for (const FamilyDedup& fd : dd.families) {
    raw_members += fd.raw_members;
    weights = weights && fd.weights_resolve;
    if (cfg.n_times == 2) all_ones = all_ones && fd.all_ones;
  }
  if (cfg.n_times == 2)
    res.checks.push_back(check_ge("dedup_histogram_all_ones", all_ones ? 1.0 : 0.0, 1.0));
  res.checks.push_back(
      check_ge("permutation_weights_resolve", weights ? 1.0 : 0.0, 1.0));

  res.details["n_paths"] = paths.size();
  res.details["raw_family_members"] = raw_members;
  if (paths.size() <= 128) {
    Json listing = Json::array();
    for (const StaircasePath& p : paths) listing.push_back(to_string(p));
    res.details["paths"] = listing;
  }

  CsvFile csv;
  csv.name = "paths.csv";
  csv.header = {"index", "corners", "length"};
  for (size_t i = 0; i < paths.size(); ++i)
    csv.rows.push_back({double(i), double(paths[i].moves.size()),
                        double(paths[i].total_length())});
  res.csvs.push_back(csv);
  return res;
}

// ---------------------------------------------------------------------------
// kernel

struct KernelConfig {
  double w1 = 1.0, w2 = 1.0;
  double T1 = 0.4, T2 = 0.4;
  int steps = 2;
  std::vector<double> hbars{1.0, 0.5, 0.25};
  int grid_dim = 256;
  double grid_length = 24.0;
  double spread_tol = 1e-10;
  double oracle_tol = 1e-6;
  double vv_tol = 1e-9;
  int mode_cutoff = 40;
  int mode_trials = 10;
  std::uint64_t seed = 1;
};

inline ScenarioResult run_kernel(const KernelConfig& cfg) {
  if (cfg.steps < 1) throw ConfigError("kernel: lattice needs at least one step");
  if (!(cfg.T1 > 0.0) || !(cfg.T2 > 0.0))
    throw ConfigError("kernel: durations must be positive");
  ScenarioResult res;
  res.scenario = "kernel";
  res.config["w1"] = cfg.w1;
  res.config["w2"] = cfg.w2;
  res.config["T1"] = cfg.T1;
  res.config["T2"] = cfg.T2;
  res.config["steps"] = cfg.steps;
  res.config["grid_dim"] = cfg.grid_dim;

  QuadraticOneForm form = two_oscillator_form(cfg.w1, cfg.w2);
  LatticeSpec spec(2, cfg.steps, {cfg.T1 / cfg.steps, cfg.T2 / cfg.steps});

  PathFamilySum sum = sum_over_path_families(form, spec);
  res.details["n_paths"] = sum.n_paths;
  res.details["coefficient_spread"] = sum.coefficient_spread;
  res.details["amplitude_spread"] = sum.amplitude_spread;
  res.details["average_kernel"] = oneform::to_json(sum.average);

  const bool degenerate = std::abs(cfg.w1 - cfg.w2) < 1e-12;
  if (degenerate) {
    res.checks.push_back(check_le("kernel_spread", sum.coefficient_spread, cfg.spread_tol));
    KernelComponent semigroup = ho_kernel_component(cfg.w1, cfg.T1 + cfg.T2);
    const double gap = std::abs(sum.average.components[0].a - semigroup.a) +
                       std::abs(sum.average.components[0].b - semigroup.b) +
                       std::abs(sum.average.components[0].c - semigroup.c) +
                       std::abs(sum.average.components[0].amplitude - semigroup.amplitude);
    res.checks.push_back(check_le("semigroup_average", gap, 1e-10));
  } else {
    res.checks.push_back(check_ge("kernel_spread_positive", sum.coefficient_spread, 1e-12));
    // hbar scan: the phase-level spread against the ordering estimate
    CsvFile scan;
    scan.name = "hbar_scan.csv";
    scan.header = {"hbar", "phase_spread", "ordering_estimate", "ratio"};
    std::vector<double> ratios;
    std::vector<double> hbars = cfg.hbars;
    std::sort(hbars.begin(), hbars.end());
    for (double hbar : hbars) {
      PathFamilySum s = sum_over_path_families(form, spec, hbar);
      const double est = ordering_gap_estimate(form, cfg.T1, cfg.T2, 64,
                                               cfg.grid_length, hbar);
      const double ratio = s.phase_spread / est;
      ratios.push_back(ratio);
      scan.rows.push_back({hbar, s.phase_spread, est, ratio});
    }
    res.csvs.push_back(scan);
    const double lo = *std::min_element(ratios.begin(), ratios.end());
    const double hi = *std::max_element(ratios.begin(), ratios.end());
    res.checks.push_back(check_ge("hbar_scan_ratio_positive", lo, 1e-12));
    res.checks.push_back(check_le("hbar_scan_ratio_stability", hi / lo, 3.0));
    res.details["hbar_ratio_lo"] = lo;
    res.details["hbar_ratio_hi"] = hi;
  }

  // independent grid-operator oracle on the two extreme bracketings
  StaircasePath path_a, path_b;
  path_a.start = {0, 0};
  path_a.moves = {{0, cfg.steps}, {1, cfg.steps}};
  path_b.start = {0, 0};
  path_b.moves = {{1, cfg.steps}, {0, cfg.steps}};
  const std::vector<std::pair<std::string, StaircasePath>> oracle_paths{{"A", path_a},
                                                                        {"B", path_b}};
  Json kernel_records = Json::array();
  for (const auto& [name, path] : oracle_paths) {
    OracleComparison cmp = kernel_vs_operator(form, path, spec.widths, cfg.grid_dim,
                                              cfg.grid_length);
    res.checks.push_back(check_le("oracle_gap_path_" + name, cmp.rel_gap, cfg.oracle_tol));
    res.checks.push_back(
        check_le("boundary_amplitude_path_" + name, cmp.boundary_amplitude, 1e-8));
    Json rec = oneform::to_json(kernel_along_path(form, path, spec.widths));
    rec["path"] = to_string(path);
    rec["oracle_gap"] = cmp.rel_gap;
    kernel_records.push_back(rec);
  }
  res.details["path_kernels"] = kernel_records;

  // van Vleck consistency through the composed classical action
  double vv_worst = 0.0;
  std::vector<StaircasePath> vv_paths = enumerate_paths(spec);
  for (const StaircasePath& p : vv_paths) {
    GaussianKernel k = kernel_along_path(form, p, spec.widths);
    auto segs = segments_of_path(form, p, spec.widths);
    const double fd = 1e-3;
    auto s = [&](double a, double b) { return composed_bvp_action(segs, a, b); };
    const double mixed =
        (s(fd, fd) - s(fd, -fd) - s(-fd, fd) + s(-fd, -fd)) / (4.0 * fd * fd);
    const Complex pref =
        van_vleck_prefactor(Complex(mixed, 0.0), 1.0, k.components[0].phase_index);
    vv_worst = std::max(vv_worst, std::abs(pref - k.components[0].amplitude) /
                                      std::abs(k.components[0].amplitude));
  }
  res.checks.push_back(check_le("van_vleck_consistency", vv_worst, cfg.vv_tol));
  res.details["van_vleck_paths"] = vv_paths.size();

  // fluctuation mode sums coincide across the three bracketings
  SeededRng rng(cfg.seed);
  double mode_worst = 0.0;
  for (int trial = 0; trial < cfg.mode_trials; ++trial) {
    const double T1 = rng.uniform(0.3, 2.3), T2 = rng.uniform(0.3, 2.3);
    const double w1 = rng.uniform(0.0, 3.0), w2 = rng.uniform(0.0, 3.0);
    const double tau = T1 * rng.uniform(0.1, 0.9);
    auto a = mode_eigenvalues(ModePath::A, T1, T2, w1, w2, cfg.mode_cutoff);
    auto b = mode_eigenvalues(ModePath::B, T1, T2, w1, w2, cfg.mode_cutoff);
    auto c = mode_eigenvalues(ModePath::C, T1, T2, w1, w2, cfg.mode_cutoff, tau);
    for (int n = 0; n < cfg.mode_cutoff; ++n) {
      const double scale = std::max(1.0, std::abs(a[size_t(n)]));
      mode_worst = std::max(mode_worst, std::abs(a[size_t(n)] - b[size_t(n)]) / scale);
      mode_worst = std::max(mode_worst, std::abs(a[size_t(n)] - c[size_t(n)]) / scale);
    }
  }
  res.checks.push_back(check_le("mode_sum_equality", mode_worst, 1e-14));
  return res;
}

// ---------------------------------------------------------------------------
// closure

struct ClosureConfig {
  double w1 = 1.0, w2 = 2.0;
  std::string family = "circular";  // symmetric | circular | product
  double amplitude = 0.8;
  int grid_points = 9;
  double t_max = 1.0;
  double fd_step = 1e-4;
  double residual_tol = 1e-6;
  double loop_tol = 1e-8;
  double action_pair_tol = 1e-7;
  int lattice_steps = 4;
  std::vector<double> widths{0.3, 0.2};
  std::uint64_t seed = 1;
};

inline ScenarioResult run_closure(const ClosureConfig& cfg) {
  if (cfg.grid_points < 2)
    throw ConfigError("closure: the scan grid needs at least 2 points per axis");
  ScenarioResult res;
  res.scenario = "closure";
  res.config["family"] = cfg.family;
  res.config["w1"] = cfg.w1;
  res.config["w2"] = cfg.w2;

  std::vector<double> omegas{cfg.w1, cfg.w2};
  MultiTimeSolution sol;
  LagrangianOneForm form;
  bool expect_closure = true;
  bool report_only = false;  // residuals reported without assertions
  if (cfg.family == "symmetric") {
    if (std::abs(cfg.w1 - cfg.w2) > 1e-12)
      throw ConfigError("closure: the symmetric family needs w1 == w2");
    sol = cosine_solution(cfg.amplitude, omegas);
    form = quadratic_one_form(omegas, 1);
  } else if (cfg.family == "circular") {
    sol = circular_solution(cfg.amplitude, omegas);
    form = quadratic_one_form(omegas, 2);
  } else if (cfg.family == "cosine") {
    // single-component real cosine with split frequencies: a true solution
    // of both oscillator equations whose on-shell closure residual is a
    // measured quantity, not an asserted one
    sol = cosine_solution(cfg.amplitude, omegas);
    form = quadratic_one_form(omegas, 1);
    report_only = std::abs(cfg.w1 - cfg.w2) > 1e-12;
  } else if (cfg.family == "product") {
    sol = product_field();
    form = quadratic_one_form(omegas, 1);
    expect_closure = false;
  } else {
    throw ConfigError("closure: unknown solution family '" + cfg.family + "'");
  }

  const int n = cfg.grid_points;
  CsvFile scan;
  scan.name = "closure_scan.csv";
  scan.header = {"t1", "t2", "residual"};
  scan.rows.assign(size_t(n) * size_t(n), {});
  std::vector<double> values(size_t(n) * size_t(n), 0.0);
  parallel_for(n * n, [&](int idx) {
    const int i = idx / n, j = idx % n;
    TimePoint t{cfg.t_max * i / (n - 1.0), cfg.t_max * j / (n - 1.0)};
    const double v = closure_residual(form, sol, 0, 1, t, cfg.fd_step);
    values[size_t(idx)] = v;
    scan.rows[size_t(idx)] = {t[0], t[1], v};
  });
  res.csvs.push_back(scan);
  double worst = 0.0;
  for (double v : values) worst = std::max(worst, v);
  res.details["max_closure_residual"] = worst;

  const double circulation = loop_action(form, sol, {0.0, 0.0}, 0, 1, 1.0, 1.0, 128);
  res.details["loop_action"] = circulation;

  if (report_only) {
    // measurement run: equation of motion still asserted, closure reported
    double eom_worst = 0.0;
    SeededRng rng(cfg.seed);
    for (int trial = 0; trial < 5; ++trial) {
      TimePoint t{rng.uniform(0.0, cfg.t_max), rng.uniform(0.0, cfg.t_max)};
      for (double v : eom_residual(sol, omegas, t, 5e-4)) eom_worst = std::max(eom_worst, v);
    }
    res.checks.push_back(check_le("eom_residual", eom_worst, 1e-6));
    res.details["closure_residual_reported_only"] = true;
    return res;
  }

  if (expect_closure) {
    res.checks.push_back(check_le("max_closure_residual", worst, cfg.residual_tol));
    res.checks.push_back(check_le("loop_action", std::abs(circulation), cfg.loop_tol));

    // equation of motion on the solution manifold; the central-difference
    // error scales like A w^4 h^2 / 12, so h = 5e-4 keeps w = 2 inside tol
    double eom_worst = 0.0;
    SeededRng rng(cfg.seed);
    for (int trial = 0; trial < 5; ++trial) {
      TimePoint t{rng.uniform(0.0, cfg.t_max), rng.uniform(0.0, cfg.t_max)};
      for (double v : eom_residual(sol, omegas, t, 5e-4)) eom_worst = std::max(eom_worst, v);
    }
    res.checks.push_back(check_le("eom_residual", eom_worst, 1e-6));

    // action path independence over the whole enumerated family
    LatticeSpec spec(2, cfg.lattice_steps, cfg.widths);
    std::vector<StaircasePath> paths = enumerate_paths(spec);
    std::vector<double> actions(paths.size(), 0.0);
    parallel_for(int(paths.size()), [&](int i) {
      actions[size_t(i)] = action_along_path(form, sol, paths[size_t(i)], cfg.widths, 200);
    });
    double lo = actions[0], hi = actions[0];
    for (double a : actions) {
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
    res.checks.push_back(check_le("action_pair_spread", hi - lo, cfg.action_pair_tol));
    res.details["action_spread"] = hi - lo;
  } else {
    res.checks.push_back(check_ge("offshell_residual",
                                  closure_residual(form, sol, 0, 1, {1.0, 1.0}, cfg.fd_step),
                                  0.1));
    const double area =
        closure_area_integral(form, sol, {0.0, 0.0}, 0, 1, 1.0, 1.0, 64, cfg.fd_step);
    res.checks.push_back(check_le("green_identity_gap", std::abs(circulation - area), 1e-6));
    res.checks.push_back(check_ge("loop_action_magnitude", std::abs(circulation), 0.1));
    res.details["green_area_integral"] = area;
  }
  return res;
}

// ---------------------------------------------------------------------------
// full suite

struct FullSuiteConfig {
  std::uint64_t seed = 1;
};

inline std::vector<ScenarioResult> run_full_suite(const FullSuiteConfig& cfg) {
  std::vector<ScenarioResult> out;

  CurvatureConfig free_cfg;
  free_cfg.seed = cfg.seed;
  out.push_back(run_curvature(free_cfg));

  for (const HierarchyConfig& hc : flat_gauge_suite()) {
    CurvatureConfig c;
    c.hierarchy = hc;
    c.seed = cfg.seed;
    out.push_back(run_curvature(c));
  }

  CurvatureConfig osc;
  osc.hierarchy.builtin = "oscillator_pair";
  osc.hierarchy.basis = "oscillator";
  osc.hierarchy.dim = 16;
  osc.hierarchy.expect_flat = false;
  osc.seed = cfg.seed;
  out.push_back(run_curvature(osc));

  LoopConfig flat_loop;
  flat_loop.hierarchy = flat_gauge_suite()[0];
  flat_loop.seed = cfg.seed;
  out.push_back(run_loop(flat_loop));

  LoopConfig osc_loop;
  osc_loop.hierarchy = osc.hierarchy;
  osc_loop.hierarchy.dim = 8;
  osc_loop.side = 0.3;
  osc_loop.lambdas = {1.0, 0.5, 0.25};
  out.push_back(run_loop(osc_loop));

  PathsConfig p2;
  out.push_back(run_paths(p2));
  PathsConfig p3;
  p3.n_times = 3;
  p3.steps = 2;
  out.push_back(run_paths(p3));

  KernelConfig deg;
  deg.seed = cfg.seed;
  out.push_back(run_kernel(deg));
  KernelConfig split;
  split.w2 = 2.0;
  split.seed = cfg.seed;
  out.push_back(run_kernel(split));

  ClosureConfig circ;
  circ.seed = cfg.seed;
  out.push_back(run_closure(circ));
  ClosureConfig sym;
  sym.family = "symmetric";
  sym.w1 = sym.w2 = 1.3;
  sym.amplitude = 1.0;
  sym.seed = cfg.seed;
  out.push_back(run_closure(sym));
  ClosureConfig prod;
  prod.family = "product";
  prod.seed = cfg.seed;
  out.push_back(run_closure(prod));

  return out;
}

}  // namespace oneform::scenarios

#endif
