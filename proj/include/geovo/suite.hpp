#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "geovo/plot.hpp"
#include "geovo/simulation.hpp"
#include "geovo/trace_io.hpp"

namespace geovo {

struct SuiteEntry {
  std::string scenario;
  Method method = Method::GeoProVo;
  int horizon = 1;
  bool ok = false;
  std::string error;
  SimTrace trace;  // valid when ok
};

struct SuiteReport {
  std::vector<SuiteEntry> entries;

  std::string table() const {
    std::string out = summary_table_header();
    for (const auto& e : entries) {
      if (e.ok) {
        out += summary_table_row(e.trace);
      } else {
        out += e.scenario + " " + to_string(e.method) + " N=" + std::to_string(e.horizon) + " FAILED: " + e.error + "\n";
      }
    }
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& e : entries) {
      if (e.ok) {
        runs.push_back(summary_to_json(e.trace));
      } else {
        runs.push_back({{"scenario", e.scenario}, {"method", to_string(e.method)}, {"horizon", e.horizon}, {"error", e.error}});
      }
    }
    return {{"runs", runs}};
  }
};

inline std::string run_dir_name(const std::string& scenario, Method m, int horizon) {
  return scenario + "_" + to_string(m) + "_N" + std::to_string(horizon);
}

/// Runs scenario x method x horizon in order, persisting each trace under
/// out_dir/<scenario>_<method>_N<h>/ and the aggregate as report.txt/report.json.
/// A failing run is recorded and the suite continues.
inline SuiteReport run_suite(const std::vector<Scenario>& scenarios, const std::vector<Method>& methods,
                             const std::vector<int>& horizons, const std::filesystem::path& out_dir,
                             const SimConfig& base = {}) {
  std::filesystem::create_directories(out_dir);
  SuiteReport report;
  for (const auto& sc : scenarios) {
    for (Method m : methods) {
      for (int h : horizons) {
        SuiteEntry e;
        e.scenario = sc.name;
        e.method = m;
        e.horizon = h;
        try {
          SimConfig cfg = base;
          cfg.horizon = h;
          e.trace = run_closed_loop(sc, m, cfg);
          write_run_outputs(e.trace, out_dir / run_dir_name(sc.name, m, h));
          e.ok = true;
        } catch (const std::exception& ex) {
          e.error = ex.what();
        }
        report.entries.push_back(std::move(e));
      }
    }
  }
  detail::write_text(out_dir / "report.txt", report.table());
  detail::write_text(out_dir / "report.json", report.to_json().dump(2) + "\n");
  return report;
}

} // namespace geovo
