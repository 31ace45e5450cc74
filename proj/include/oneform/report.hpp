#ifndef ONEFORM_REPORT_HPP
#define ONEFORM_REPORT_HPP

// Report primitives shared by the CLI and the scenario runners: named
// checks with tolerances, CSV payloads, JSON serialization of the domain
// types, and a bounded worker pool for the embarrassingly parallel scans.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "oneform/evolution.hpp"
#include "oneform/kernel.hpp"
#include "oneform/lattice.hpp"

namespace oneform {

using Json = nlohmann::ordered_json;

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string cmp = "le";  // "le": value <= tolerance, "ge": value >= tolerance
  bool pass = false;
};

inline Check check_le(const std::string& name, double value, double tol) {
  return {name, value, tol, "le", value <= tol};
}

inline Check check_ge(const std::string& name, double value, double tol) {
  return {name, value, tol, "ge", value >= tol};
}

struct CsvFile {
  std::string name;  // file name without directory, e.g. "loop_scaling.csv"
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct ScenarioResult {
  std::string scenario;
  Json config;
  Json details;
  std::vector<Check> checks;
  std::vector<CsvFile> csvs;

  bool pass() const {
    for (const Check& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

inline Json to_json(const Check& c) {
  Json j;
  j["name"] = c.name;
  j["value"] = c.value;
  j["tolerance"] = c.tolerance;
  j["cmp"] = c.cmp;
  j["pass"] = c.pass;
  return j;
}

inline Json to_json(const KernelComponent& k) {
  Json j;
  j["a_re"] = k.a.real();
  j["a_im"] = k.a.imag();
  j["b_re"] = k.b.real();
  j["b_im"] = k.b.imag();
  j["c_re"] = k.c.real();
  j["c_im"] = k.c.imag();
  j["A_re"] = k.amplitude.real();
  j["A_im"] = k.amplitude.imag();
  j["phase_index"] = k.phase_index;
  return j;
}

inline Json to_json(const GaussianKernel& k) {
  Json j;
  j["n_dof"] = k.n_dof;
  j["hbar"] = k.hbar;
  Json comps = Json::array();
  for (const KernelComponent& c : k.components) comps.push_back(to_json(c));
  j["per_dof"] = comps;
  return j;
}

inline Json to_json(const EvolutionResult& r) {
  Json j;
  j["path"] = to_string(r.path);
  j["steps_per_unit"] = r.steps_per_unit;
  j["segments"] = r.segment_count;
  j["unitarity_defect"] = r.unitarity_defect;
  return j;
}

inline Json to_json(const ScenarioResult& r) {
  Json j;
  j["scenario"] = r.scenario;
  j["config"] = r.config;
  Json checks = Json::array();
  for (const Check& c : r.checks) checks.push_back(to_json(c));
  j["checks"] = checks;
  j["pass"] = r.pass();
  j["details"] = r.details;
  return j;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file " + path.string());
  out << text;
}

inline void write_csv(const std::filesystem::path& dir, const CsvFile& csv) {
  std::ostringstream os;
  for (size_t i = 0; i < csv.header.size(); ++i) os << (i ? "," : "") << csv.header[i];
  os << "\n";
  os.precision(17);
  for (const auto& row : csv.rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  write_text_file(dir / csv.name, os.str());
}

// Writes report.json plus one CSV per scan into out_dir.  Multi-scenario
// runs prefix each CSV with the scenario index so repeated scenarios do
// not overwrite each other's scans.
inline void write_report(const std::filesystem::path& out_dir,
                         const std::vector<ScenarioResult>& results,
                         std::uint64_t seed) {
  std::filesystem::create_directories(out_dir);
  Json j;
  j["seed"] = seed;
  Json arr = Json::array();
  bool all = true;
  for (const ScenarioResult& r : results) {
    arr.push_back(to_json(r));
    all = all && r.pass();
  }
  j["scenarios"] = arr;
  j["pass"] = all;
  write_text_file(out_dir / "report.json", j.dump(2) + "\n");
  for (size_t i = 0; i < results.size(); ++i)
    for (const CsvFile& csv : results[i].csvs) {
      CsvFile named = csv;
      if (results.size() > 1) {
        char prefix[8];
        std::snprintf(prefix, sizeof prefix, "%02d_", int(i));
        named.name = prefix + named.name;
      }
      write_csv(out_dir, named);
    }
}

// Worker count: hardware concurrency capped by ONEFORM_LAB_THREADS.
inline int worker_count() {
  int n = int(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("ONEFORM_LAB_THREADS")) {
    try {
      int cap = std::stoi(env);
      if (cap >= 1) n = std::min(n, cap);
    } catch (...) {
      // ignore malformed values, keep the default
    }
  }
  return n;
}

// Index-parallel loop with deterministic result placement.
inline void parallel_for(int n, const std::function<void(int)>& body) {
  const int workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (std::thread& t : pool) t.join();
}

}  // namespace oneform

#endif
