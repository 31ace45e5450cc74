// Acceptance suite: one criterion per section, each printed as a PASS/FAIL
// line with its measured values and tolerances.  Exit code is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "oneform/report.hpp"
#include "oneform/scenarios.hpp"

using namespace oneform;
using namespace oneform::scenarios;

namespace {

struct Criterion {
  std::string name;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool pass() const {
    for (const Check& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

class Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// brute-force oracle: distinct permutations of the unit-step multiset
std::uint64_t brute_force_count(int n_times, int steps) {
  std::vector<int> seq;
  for (int a = 0; a < n_times; ++a)
    for (int s = 0; s < steps; ++s) seq.push_back(a);
  std::sort(seq.begin(), seq.end());
  std::uint64_t count = 0;
  do {
    ++count;
  } while (std::next_permutation(seq.begin(), seq.end()));
  return count;
}

Criterion criterion_zero_curvature() {
  Timer timer;
  Criterion c;
  c.name = "1. zero-curvature residuals";

  CurvatureConfig free_cfg;
  ScenarioResult free_res = run_curvature(free_cfg);
  for (const Check& ch : free_res.checks)
    if (ch.name == "max_residual_norm")
      c.checks.push_back({"free d=32 max residual", ch.value, 1e-7, "le", ch.value <= 1e-7});

  for (const HierarchyConfig& hc : flat_gauge_suite()) {
    CurvatureConfig g;
    g.hierarchy = hc;
    ScenarioResult res = run_curvature(g);
    for (const Check& ch : res.checks)
      if (ch.name == "max_residual_norm")
        c.checks.push_back(
            {hc.label + " max residual", ch.value, 1e-7, "le", ch.value <= 1e-7});
  }

  HamiltonianHierarchy osc = oscillator_pair_hierarchy(1.0, 2.0, 16);
  double osc_min = 1e300;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      osc_min = std::min(osc_min,
                         zero_curvature_residual(osc, 0, 1, {i / 4.0, j / 4.0}).norm);
  c.checks.push_back({"oscillator pair (1,2) d=16 min residual", osc_min, 0.1, "ge",
                      osc_min >= 0.1});
  c.seconds = timer.seconds();
  return c;
}

Criterion criterion_wilson_loop() {
  Timer timer;
  Criterion c;
  c.name = "2. Wilson-loop identity";

  for (const HierarchyConfig& hc : flat_gauge_suite()) {
    HamiltonianHierarchy h = build_hierarchy(hc);
    const double r200 = loop_residual(h, {0.0, 0.0}, 0, 1, 1.0, 1.0, 200);
    const double r100 = loop_residual(h, {0.0, 0.0}, 0, 1, 1.0, 1.0, 100);
    c.checks.push_back({hc.label + " loop residual @200", r200, 1e-6, "le", r200 <= 1e-6});
    const double ratio = r100 / std::max(r200, 1e-15);
    c.checks.push_back({hc.label + " halving ratio", ratio, 2.5, "ge",
                        ratio >= 2.5 && ratio <= 6.0});
  }

  HamiltonianHierarchy osc = oscillator_pair_hierarchy(1.0, 2.0, 8);
  for (double side : {0.3, 0.2, 0.1}) {
    TimePoint center{side / 2.0, side / 2.0};
    const double z = zero_curvature_residual(osc, 0, 1, center).norm;
    const double r = loop_residual(osc, {0.0, 0.0}, 0, 1, side, side, 200);
    const double ratio = r / (side * side * z);
    char label[96];
    std::snprintf(label, sizeof label, "oscillator area law, area=%.4f", side * side);
    c.checks.push_back({label, ratio, 2.0, "le", ratio >= 0.5 && ratio <= 2.0});
  }
  c.seconds = timer.seconds();
  return c;
}

Criterion criterion_path_combinatorics() {
  Timer timer;
  Criterion c;
  c.name = "3. path combinatorics";

  const std::vector<std::uint64_t> frozen{2, 6, 20, 70, 252, 924, 3432, 12870};
  bool counts_ok = true;
  for (int s = 1; s <= 8; ++s) {
    LatticeSpec spec(2, s);
    const auto n = enumerate_paths(spec).size();
    counts_ok = counts_ok && n == frozen[size_t(s) - 1] && n == count_paths(spec) &&
                n == brute_force_count(2, s);
  }
  c.checks.push_back({"2D counts N=1..8 (enumeration = closed form = brute force)",
                      counts_ok ? 1.0 : 0.0, 1.0, "ge", counts_ok});

  bool counts3_ok = true;
  for (int s = 1; s <= 3; ++s) {
    LatticeSpec spec(3, s);
    const auto n = enumerate_paths(spec).size();
    counts3_ok = counts3_ok && n == count_paths(spec) && n == brute_force_count(3, s);
  }
  c.checks.push_back({"3D counts N=1..3", counts3_ok ? 1.0 : 0.0, 1.0, "ge", counts3_ok});

  ScenarioResult paths4 = run_paths({2, 4});
  for (const Check& ch : paths4.checks)
    if (ch.name == "dedup_histogram_all_ones" || ch.name == "deterministic_order")
      c.checks.push_back({ch.name + " (2D N=4)", ch.value, 1.0, "ge", ch.pass});
  ScenarioResult paths3 = run_paths({3, 2});
  for (const Check& ch : paths3.checks)
    if (ch.name == "permutation_weights_resolve" || ch.name == "deterministic_order")
      c.checks.push_back({ch.name + " (3D N=2)", ch.value, 1.0, "ge", ch.pass});
  c.seconds = timer.seconds();
  return c;
}

Criterion criterion_mode_sums() {
  Timer timer;
  Criterion c;
  c.name = "4. two-oscillator mode sums and degenerate path independence";

  SeededRng rng(2024);
  double mode_worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const double T1 = rng.uniform(0.3, 2.3), T2 = rng.uniform(0.3, 2.3);
    const double w1 = rng.uniform(0.0, 3.0), w2 = rng.uniform(0.0, 3.0);
    const double tau = T1 * rng.uniform(0.1, 0.9);
    auto a = mode_eigenvalues(ModePath::A, T1, T2, w1, w2, 60);
    auto b = mode_eigenvalues(ModePath::B, T1, T2, w1, w2, 60);
    auto cc = mode_eigenvalues(ModePath::C, T1, T2, w1, w2, 60, tau);
    for (int n = 0; n < 60; ++n) {
      const double scale = std::max(1.0, std::abs(a[size_t(n)]));
      mode_worst = std::max({mode_worst, std::abs(a[size_t(n)] - b[size_t(n)]) / scale,
                             std::abs(a[size_t(n)] - cc[size_t(n)]) / scale});
    }
  }
  c.checks.push_back({"mode lists A=B=C over 10 random tuples", mode_worst, 1e-14, "le",
                      mode_worst <= 1e-14});

  QuadraticOneForm form = two_oscillator_form(1.1, 1.1);
  LatticeSpec spec(2, 4, {0.1, 0.1});
  PathFamilySum sum = sum_over_path_families(form, spec);
  c.checks.push_back({"degenerate kernel spread over 70 paths", sum.coefficient_spread,
                      1e-10, "le", sum.coefficient_spread <= 1e-10});
  KernelComponent semi = ho_kernel_component(1.1, 0.8);
  const double gap = std::abs(sum.average.components[0].a - semi.a) +
                     std::abs(sum.average.components[0].b - semi.b) +
                     std::abs(sum.average.components[0].c - semi.c) +
                     std::abs(sum.average.components[0].amplitude - semi.amplitude);
  c.checks.push_back({"average equals the semigroup kernel", gap, 1e-10, "le",
                      gap <= 1e-10});
  c.seconds = timer.seconds();
  return c;
}

Criterion criterion_kernel_oracle() {
  Timer timer;
  Criterion c;
  c.name = "5. kernel vs grid-operator oracle (d=256)";

  struct Case {
    const char* label;
    double w1, w2;
    const char* path;
    std::vector<double> widths;
    double tol;
  };
  const std::vector<Case> cases{
      {"single segment w=1 T=0.8", 1.0, 1.0, "(0,0);t1:1", {0.8, 0.8}, 1e-6},
      {"free segment (exact Fourier)", 0.0, 0.0, "(0,0);t1:1", {0.8, 0.8}, 1e-8},
      {"path A w=(1,2) T=(0.4,0.4)", 1.0, 2.0, "(0,0);t1:1,t2:1", {0.4, 0.4}, 1e-6},
      {"staircase w=(1,2) 4 segments", 1.0, 2.0, "(0,0);t1:1,t2:1,t1:1,t2:1",
       {0.35, 0.25}, 1e-6},
      {"staircase w=(0.6,1.7)", 0.6, 1.7, "(0,0);t2:1,t1:2,t2:1", {0.45, 0.3}, 1e-6},
  };
  for (const Case& k : cases) {
    OracleComparison cmp = kernel_vs_operator(two_oscillator_form(k.w1, k.w2),
                                              parse_path(k.path), k.widths, 256, 24.0);
    c.checks.push_back({k.label, cmp.rel_gap, k.tol, "le",
                        cmp.rel_gap <= k.tol && !cmp.grid_too_coarse});
  }
  c.seconds = timer.seconds();
  return c;
}

Criterion criterion_van_vleck() {
  Timer timer;
  Criterion c;
  c.name = "6. van Vleck prefactor vs end-to-end classical action";

  struct Case {
    double w1, w2, T1, T2;
    int steps;
  };
  std::vector<std::pair<QuadraticOneForm, std::pair<StaircasePath, std::vector<double>>>>
      runs;
  // six paths from the N=2 family at w=(1,2)
  {
    QuadraticOneForm form = two_oscillator_form(1.0, 2.0);
    LatticeSpec spec(2, 2, {0.2, 0.2});
    for (const StaircasePath& p : enumerate_paths(spec))
      runs.push_back({form, {p, spec.widths}});
  }
  // two more frequencies, N=1 family
  {
    QuadraticOneForm form = two_oscillator_form(0.6, 1.7);
    LatticeSpec spec(2, 1, {0.8, 0.5});
    for (const StaircasePath& p : enumerate_paths(spec))
      runs.push_back({form, {p, spec.widths}});
  }
  // one segment crossing a caustic (Maslov index 1), one long free-ish leg
  {
    QuadraticOneForm form = two_oscillator_form(2.0, 0.3);
    runs.push_back({form, {parse_path("(0,0);t1:1"), {1.8, 1.0}}});
    runs.push_back({form, {parse_path("(0,0);t2:1,t1:1"), {1.8, 1.2}}});
  }

  double worst = 0.0;
  for (const auto& [form, pw] : runs) {
    GaussianKernel k = kernel_along_path(form, pw.first, pw.second);
    auto segs = segments_of_path(form, pw.first, pw.second);
    const double fd = 1e-3;
    auto s = [&](double a, double b) { return composed_bvp_action(segs, a, b); };
    const double mixed =
        (s(fd, fd) - s(fd, -fd) - s(-fd, fd) + s(-fd, -fd)) / (4.0 * fd * fd);
    const Complex pref =
        van_vleck_prefactor(Complex(mixed, 0.0), 1.0, k.components[0].phase_index);
    worst = std::max(worst, std::abs(pref - k.components[0].amplitude) /
                                std::abs(k.components[0].amplitude));
  }
  char label[96];
  std::snprintf(label, sizeof label, "amplitude agreement over %d caustic-free paths",
                int(runs.size()));
  c.checks.push_back({label, worst, 1e-9, "le", worst <= 1e-9});
  c.seconds = timer.seconds();
  return c;
}

Criterion criterion_classical_closure() {
  Timer timer;
  Criterion c;
  c.name = "7. classical closure and action path independence";

  ClosureConfig sym;
  sym.family = "symmetric";
  sym.w1 = sym.w2 = 1.3;
  sym.amplitude = 1.0;
  ScenarioResult sym_res = run_closure(sym);
  for (const Check& ch : sym_res.checks)
    c.checks.push_back({"symmetric: " + ch.name, ch.value, ch.tolerance, ch.cmp, ch.pass});

  ClosureConfig circ;
  circ.family = "circular";
  ScenarioResult circ_res = run_closure(circ);
  for (const Check& ch : circ_res.checks)
    c.checks.push_back({"circular: " + ch.name, ch.value, ch.tolerance, ch.cmp, ch.pass});

  ClosureConfig prod;
  prod.family = "product";
  ScenarioResult prod_res = run_closure(prod);
  for (const Check& ch : prod_res.checks)
    c.checks.push_back({"off-shell: " + ch.name, ch.value, ch.tolerance, ch.cmp, ch.pass});

  c.seconds = timer.seconds();
  return c;
}

Criterion criterion_gap_measurement() {
  Timer timer;
  Criterion c;
  c.name = "8. ordering-gap measurement across the hbar scan";

  QuadraticOneForm form = two_oscillator_form(1.0, 2.0);
  LatticeSpec spec(2, 2, {0.2, 0.2});
  std::vector<double> ratios;
  double gap_at_1 = 0.0;
  for (double hbar : {1.0, 0.5, 0.25}) {
    PathFamilySum sum = sum_over_path_families(form, spec, hbar);
    const double est = ordering_gap_estimate(form, 0.4, 0.4, 256, 24.0, hbar);
    ratios.push_back(sum.phase_spread / est);
    if (hbar == 1.0) gap_at_1 = sum.coefficient_spread;
  }
  c.checks.push_back({"path gap nonzero at w=(1,2), T=(0.4,0.4)", gap_at_1, 1e-12, "ge",
                      gap_at_1 >= 1e-12});
  const double lo = *std::min_element(ratios.begin(), ratios.end());
  const double hi = *std::max_element(ratios.begin(), ratios.end());
  c.checks.push_back({"ratio to ||[H1,H2]|| T1 T2 / hbar stable (max/min)", hi / lo, 3.0,
                      "le", hi / lo <= 3.0 && lo > 0.0});
  c.seconds = timer.seconds();
  return c;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria{
      criterion_zero_curvature(),    criterion_wilson_loop(),
      criterion_path_combinatorics(), criterion_mode_sums(),
      criterion_kernel_oracle(),     criterion_van_vleck(),
      criterion_classical_closure(), criterion_gap_measurement(),
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const bool ok = c.pass();
    if (!ok) ++failures;
    std::printf("[%s] %s  (%.2f s)\n", ok ? "PASS" : "FAIL", c.name.c_str(), c.seconds);
    for (const Check& ch : c.checks) {
      std::printf("    %s %-58s %.3e %s %.0e\n", ch.pass ? "ok  " : "FAIL",
                  ch.name.c_str(), ch.value, ch.cmp == "le" ? "<=" : ">=", ch.tolerance);
    }
  }
  std::printf("%d/%d criteria passed\n", int(criteria.size()) - failures,
              int(criteria.size()));
  return failures;
}
