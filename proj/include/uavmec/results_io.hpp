#pragma once

// Per-slot CSV, JSON run summary and trajectory CSV. Numbers are written in
// shortest round-trip form with '.' as decimal separator regardless of locale.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>  // nlohmann/json (vendor/)

#include "uavmec/config.hpp"
#include "uavmec/engine.hpp"

#ifndef UAVMEC_GIT_COMMIT
#define UAVMEC_GIT_COMMIT "unknown"
#endif

namespace uavmec {

inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
  return {buf, res.ptr};
}

/// Quotes a field when it contains a comma, quote or line break.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::vector<std::string> slot_csv_header(std::size_t num_suavs) {
  std::vector<std::string> h{"slot", "approach", "seed", "cost", "latency", "ud_energy"};
  for (std::size_t n = 1; n <= num_suavs; ++n) h.push_back("suav_energy_" + std::to_string(n));
  for (std::size_t n = 1; n <= num_suavs; ++n) h.push_back("q_c_" + std::to_string(n));
  for (std::size_t n = 1; n <= num_suavs; ++n) h.push_back("q_p_" + std::to_string(n));
  for (std::size_t n = 1; n <= num_suavs; ++n) {
    h.push_back("x_" + std::to_string(n));
    h.push_back("y_" + std::to_string(n));
  }
  h.push_back("deadline_violations");
  return h;
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_field(fields[i]);
  }
  os << "\r\n";
}

/// One header row, then one row per slot of every run, in the given order.
inline void write_slot_csv(std::ostream& os, const std::vector<RunResult>& runs, std::size_t num_suavs) {
  write_csv_row(os, slot_csv_header(num_suavs));
  for (const auto& run : runs) {
    for (const auto& r : run.rows) {
      std::vector<std::string> f{std::to_string(r.slot), to_string(run.approach), std::to_string(run.seed),
                                 format_number(r.cost), format_number(r.latency), format_number(r.ud_energy)};
      for (double e : r.suav_energy) f.push_back(format_number(e));
      for (double q : r.queue_compute) f.push_back(format_number(q));
      for (double q : r.queue_propulsion) f.push_back(format_number(q));
      for (const auto& p : r.positions) {
        f.push_back(format_number(p.x));
        f.push_back(format_number(p.y));
      }
      f.push_back(std::to_string(r.deadline_violations));
      write_csv_row(os, f);
    }
  }
}

/// Rows of (slot, approach, seed, kind, id, x, y) for UDs (when recorded) and SUAVs.
inline void write_trajectory_csv(std::ostream& os, const std::vector<RunResult>& runs) {
  write_csv_row(os, {"slot", "approach", "seed", "kind", "id", "x", "y"});
  for (const auto& run : runs) {
    for (std::size_t t = 0; t < run.rows.size(); ++t) {
      const auto& r = run.rows[t];
      for (std::size_t n = 0; n < r.positions.size(); ++n) {
        write_csv_row(os, {std::to_string(r.slot), to_string(run.approach), std::to_string(run.seed), "suav",
                           std::to_string(n + 1), format_number(r.positions[n].x), format_number(r.positions[n].y)});
      }
      if (t < run.ud_positions.size()) {
        for (std::size_t m = 0; m < run.ud_positions[t].size(); ++m) {
          const auto& p = run.ud_positions[t][m];
          write_csv_row(os, {std::to_string(r.slot), to_string(run.approach), std::to_string(run.seed), "ud",
                             std::to_string(m + 1), format_number(p.x), format_number(p.y)});
        }
      }
    }
  }
}

inline nlohmann::json aggregates_json(const Aggregates& a) {
  return {{"time_avg_cost", a.time_avg_cost},
          {"avg_latency", a.avg_latency},
          {"cumulative_ud_energy", a.cumulative_ud_energy},
          {"time_avg_suav_energy", a.time_avg_suav_energy},
          {"deadline_violations", a.deadline_violations},
          {"mean_suav_energy", a.mean_suav_energy},
          {"final_queue_compute", a.final_queue_compute},
          {"final_queue_propulsion", a.final_queue_propulsion}};
}

inline Aggregates aggregates_from_json(const nlohmann::json& j) {
  Aggregates a;
  a.time_avg_cost = j.at("time_avg_cost").get<double>();
  a.avg_latency = j.at("avg_latency").get<double>();
  a.cumulative_ud_energy = j.at("cumulative_ud_energy").get<double>();
  a.time_avg_suav_energy = j.at("time_avg_suav_energy").get<double>();
  a.deadline_violations = j.at("deadline_violations").get<std::size_t>();
  a.mean_suav_energy = j.at("mean_suav_energy").get<std::vector<double>>();
  a.final_queue_compute = j.at("final_queue_compute").get<std::vector<double>>();
  a.final_queue_propulsion = j.at("final_queue_propulsion").get<std::vector<double>>();
  return a;
}

inline nlohmann::json summary_json(const ScenarioConfig& config, const std::vector<RunResult>& runs) {
  nlohmann::json j;
  j["config"] = to_json(config);
  j["metadata"] = {{"git_commit", UAVMEC_GIT_COMMIT}, {"generator", "uavmec"}};
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : runs) {
    list.push_back({{"approach", to_string(r.approach)},
                    {"seed", r.seed},
                    {"slots", r.rows.size()},
                    {"metrics", aggregates_json(r.summary)},
                    {"audit_failures", r.audit_failures},
                    {"sca_iteration_cap_hits", r.sca_cap_hits},
                    {"forced_edge_choices", r.forced_choices}});
  }
  j["runs"] = std::move(list);
  return j;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << content;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace uavmec
