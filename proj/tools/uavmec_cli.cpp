// Command-line front end: simulate, verify, sweep.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "uavmec/uavmec.hpp"

namespace {

using namespace uavmec;

// "0-9", "1,4,7" or a mix such as "0-2,5".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(std::stoull(part));
    } else {
      const auto a = std::stoull(part.substr(0, dash));
      const auto b = std::stoull(part.substr(dash + 1));
      if (b < a) throw std::invalid_argument("bad seed range " + part);
      for (auto s = a; s <= b; ++s) out.push_back(s);
    }
  }
  if (out.empty()) throw std::invalid_argument("no seeds given");
  return out;
}

std::vector<ApproachId> parse_approaches(const std::string& text) {
  if (text == "all" || text == "ALL") return {std::begin(kAllApproaches), std::end(kAllApproaches)};
  std::vector<ApproachId> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(parse_approach(part));
  return out;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(std::stod(part));
  return out;
}

struct Common {
  std::string config_path;
  std::string profile = "desk";
  std::string approaches = "OJTRTA";
  std::string seeds = "0";
  std::size_t slots = 0;
  std::string out = "results";
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON config; missing keys come from the profile");
  cmd->add_option("--profile", c.profile, "Base profile")->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--approach", c.approaches, "OJTRTA, EO, ERA, FLP, OCQ, a comma list, or all");
  cmd->add_option("--seeds", c.seeds, "Seed list, e.g. 0-9 or 0,3,5");
  cmd->add_option("--slots", c.slots, "Number of slots (overrides the config)");
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
}

ScenarioConfig resolve_config(const Common& c) {
  auto base = profile_by_name(c.profile);
  auto cfg = c.config_path.empty() ? base : load_config(c.config_path, base);
  if (c.slots) cfg.num_slots = c.slots;
  cfg.validate();
  return cfg;
}

std::size_t count_audit_failures(const std::vector<RunResult>& runs, std::ostream& err) {
  std::size_t bad = 0;
  for (const auto& r : runs) {
    for (const auto& msg : r.audit_failures) {
      if (bad < 20) err << "audit " << to_string(r.approach) << " seed " << r.seed << " " << msg << "\n";
      ++bad;
    }
  }
  return bad;
}

void print_summary(const std::vector<RunResult>& runs) {
  std::map<ApproachId, std::vector<const RunResult*>> by;
  for (const auto& r : runs) by[r.approach].push_back(&r);
  std::cout << "approach  runs  TAC  latency_s  ud_energy_J  suav_energy_J\n";
  for (const auto& [a, list] : by) {
    double tac = 0, lat = 0, ude = 0, se = 0;
    for (const auto* r : list) {
      tac += r->summary.time_avg_cost;
      lat += r->summary.avg_latency;
      ude += r->summary.cumulative_ud_energy;
      se += r->summary.time_avg_suav_energy;
    }
    const double k = static_cast<double>(list.size());
    std::cout << to_string(a) << "  " << list.size() << "  " << tac / k << "  " << lat / k << "  " << ude / k << "  "
              << se / k << "\n";
  }
}

int cmd_simulate(const Common& c, bool trace, bool trajectories) {
  const auto cfg = resolve_config(c);
  const auto seeds = parse_seeds(c.seeds);
  const auto approaches = parse_approaches(c.approaches);
  std::vector<RunResult> runs;
  std::filesystem::create_directories(c.out);
  if (trace || trajectories) {
    std::ofstream log;
    if (trace) log.open(std::filesystem::path(c.out) / "trace.log");
    for (auto a : approaches) {
      for (auto s : seeds) {
        runs.push_back(run_simulation(cfg, a, s, {.trace = trace ? &log : nullptr, .record_ud_positions = trajectories}));
      }
    }
  } else {
    std::vector<RunSpec> jobs;
    for (auto a : approaches) {
      for (auto s : seeds) jobs.push_back({a, s});
    }
    runs = run_many(cfg, jobs, c.threads);
  }
  std::ostringstream csv;
  write_slot_csv(csv, runs, cfg.num_suavs);
  write_file(std::filesystem::path(c.out) / "slots.csv", csv.str());
  write_file(std::filesystem::path(c.out) / "summary.json", summary_json(cfg, runs).dump(2) + "\n");
  if (trajectories) {
    std::ostringstream tr;
    write_trajectory_csv(tr, runs);
    write_file(std::filesystem::path(c.out) / "trajectory.csv", tr.str());
  }
  print_summary(runs);
  const auto bad = count_audit_failures(runs, std::cerr);
  if (bad) {
    std::cerr << bad << " constraint audit failures\n";
    return 1;
  }
  return 0;
}

int cmd_verify() {
  const SuiteResult suites[] = {allocation_suite(), potential_suite(), poa_suite(), sca_suite()};
  bool ok = true;
  for (const auto& s : suites) {
    std::cout << (s.passed ? "PASS " : "FAIL ") << s.name << ": " << s.detail << " (" << s.seconds << " s)\n";
    ok = ok && s.passed;
  }
  return ok ? 0 : 1;
}

void apply_param(ScenarioConfig& cfg, const std::string& name, double value) {
  if (name == "V") cfg.lyapunov_v = value;
  else if (name == "energy_budget") cfg.suav_energy_budget = value;
  else if (name == "num_uds") cfg.num_uds = static_cast<std::size_t>(std::llround(value));
  else if (name == "suav_max_speed") cfg.suav_max_speed = value;
  else if (name == "min_separation") cfg.min_separation = value;
  else throw std::invalid_argument("unknown sweep parameter " + name);
}

int cmd_sweep(const Common& c, const std::string& param, const std::string& values) {
  const auto base = resolve_config(c);
  const auto seeds = parse_seeds(c.seeds);
  const auto approaches = parse_approaches(c.approaches);
  std::ostringstream csv;
  write_csv_row(csv, {"param", "value", "approach", "seeds", "tac_mean", "tac_std", "latency_mean", "suav_energy_mean",
                      "final_backlog_mean"});
  std::size_t bad = 0;
  for (double v : parse_values(values)) {
    auto cfg = base;
    apply_param(cfg, param, v);
    cfg.validate();
    std::vector<RunSpec> jobs;
    for (auto a : approaches) {
      for (auto s : seeds) jobs.push_back({a, s});
    }
    const auto runs = run_many(cfg, jobs, c.threads);
    bad += count_audit_failures(runs, std::cerr);
    for (auto a : approaches) {
      double sum = 0, sq = 0, lat = 0, se = 0, backlog = 0, k = 0;
      for (const auto& r : runs) {
        if (r.approach != a) continue;
        const double t = r.summary.time_avg_cost;
        sum += t;
        sq += t * t;
        lat += r.summary.avg_latency;
        se += r.summary.time_avg_suav_energy;
        for (std::size_t n = 0; n < cfg.num_suavs; ++n) {
          backlog += (r.summary.final_queue_compute[n] + r.summary.final_queue_propulsion[n]) /
                     static_cast<double>(cfg.num_suavs);
        }
        ++k;
      }
      const double mean = sum / k;
      const double sd = k > 1 ? std::sqrt(std::max(0.0, (sq - k * mean * mean) / (k - 1))) : 0.0;
      write_csv_row(csv, {param, format_number(v), to_string(a), std::to_string(static_cast<std::size_t>(k)),
                          format_number(mean), format_number(sd), format_number(lat / k), format_number(se / k),
                          format_number(backlog / k)});
    }
  }
  write_file(std::filesystem::path(c.out) / "sweep.csv", csv.str());
  std::cout << csv.str();
  if (bad) {
    std::cerr << bad << " constraint audit failures\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-UAV edge computing simulator"};
  app.require_subcommand(1);

  Common sim_opts;
  bool trace = false;
  bool trajectories = false;
  auto* sim = app.add_subcommand("simulate", "Run approaches over seeds and write CSV/JSON results");
  add_common(sim, sim_opts);
  sim->add_flag("--trace", trace, "Write per-move and per-iteration lines to <out>/trace.log");
  sim->add_flag("--trajectories", trajectories, "Also write UD and SUAV positions to <out>/trajectory.csv");

  auto* verify = app.add_subcommand("verify", "Run the oracle suites");

  Common sweep_opts;
  std::string param = "V";
  std::string values;
  auto* sweep = app.add_subcommand("sweep", "Repeat runs over values of one parameter");
  add_common(sweep, sweep_opts);
  sweep->add_option("--param", param, "V, energy_budget, num_uds, suav_max_speed or min_separation");
  sweep->add_option("--values", values, "Comma-separated values")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (sim->parsed()) return cmd_simulate(sim_opts, trace, trajectories);
    if (verify->parsed()) return cmd_verify();
    if (sweep->parsed()) return cmd_sweep(sweep_opts, param, values);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
