// Command-line front end: simulate one scenario, benchmark a suite, or plot traces.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geovo/plot.hpp"
#include "geovo/scenario.hpp"
#include "geovo/simulation.hpp"
#include "geovo/suite.hpp"
#include "geovo/trace_io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

std::vector<geovo::Scenario> load_suite(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<geovo::Scenario> out;
  for (const auto& f : files) out.push_back(geovo::load_scenario(f.string()));
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"GeoPro-VO receding-horizon planner and scenario simulator"};
  app.require_subcommand(1);

  std::string scenario_path, method_name = "geopro-vo", out_dir;
  int horizon = 0;
  long long seed = 0;
  bool no_timing = false;
  int grid_n = 41;
  auto* sim = app.add_subcommand("simulate", "run one closed-loop simulation");
  sim->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  sim->add_option("--method", method_name, "geopro-vo | geopro-ed | reactive-vo | minlp-oracle");
  sim->add_option("--horizon", horizon, "prediction horizon N (default: scenario params.N)");
  sim->add_option("--out", out_dir, "output directory")->required();
  auto* seed_opt = sim->add_option("--seed", seed, "override the scenario seed");
  sim->add_flag("--no-timing", no_timing, "write solve_ms as 0 so outputs are byte-reproducible");
  sim->add_option("--grid", grid_n, "reactive-vo lattice size (odd)");

  std::string suite_dir, bench_out;
  std::vector<std::string> methods_raw, horizons_raw;
  auto* bench = app.add_subcommand("bench", "run scenario x method x horizon and tabulate");
  bench->add_option("--suite", suite_dir, "directory of scenario JSON files")->required();
  bench->add_option("--methods", methods_raw, "comma-separated methods")->required();
  bench->add_option("--horizons", horizons_raw, "comma-separated horizons")->required();
  bench->add_option("--out", bench_out, "output directory")->required();

  std::vector<std::string> trace_files;
  std::string svg_out;
  auto* plot = app.add_subcommand("plot", "render CSV traces to SVG");
  plot->add_option("--traces", trace_files, "trace CSV files (with .json sidecars)")->required();
  plot->add_option("--out", svg_out, "output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (*sim) {
      geovo::Scenario sc = geovo::load_scenario(scenario_path);
      if (*seed_opt) sc.seed = seed;
      geovo::SimConfig cfg;
      if (horizon > 0) cfg.horizon = horizon;
      cfg.record_timing = !no_timing;
      cfg.grid_n = grid_n;
      const geovo::SimTrace trace = geovo::run_closed_loop(sc, geovo::parse_method(method_name), cfg);
      geovo::write_run_outputs(trace, out_dir);
      std::cout << geovo::summary_table_header() << geovo::summary_table_row(trace);
      return trace.summary.solver_failures > 0 ? kExitSolver : 0;
    }
    if (*bench) {
      std::vector<geovo::Method> methods;
      for (const auto& m : split_list(methods_raw)) methods.push_back(geovo::parse_method(m));
      std::vector<int> horizons;
      for (const auto& h : split_list(horizons_raw)) horizons.push_back(std::stoi(h));
      const auto report = geovo::run_suite(load_suite(suite_dir), methods, horizons, bench_out);
      std::cout << report.table();
      const bool failed = std::any_of(report.entries.begin(), report.entries.end(), [](const auto& e) { return !e.ok; });
      return failed ? kExitSolver : 0;
    }
    if (*plot) {
      std::vector<geovo::SimTrace> traces;
      for (const auto& f : trace_files) traces.push_back(geovo::load_trace(f));
      geovo::emit_plot(traces, svg_out);
      return 0;
    }
  } catch (const geovo::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const geovo::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const geovo::InvalidParameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const geovo::NumericalFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
