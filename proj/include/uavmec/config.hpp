#pragma once

// Static scenario description. A default-constructed ScenarioConfig is the
// full-size evaluation setup (60 UDs, 4 SUAVs, 100 slots on 1 km x 1 km);
// desk_profile() is a reduced setup that runs in seconds.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>  // nlohmann/json (vendor/)

#include "uavmec/compute_model.hpp"
#include "uavmec/geometry.hpp"

namespace uavmec {

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

struct Range {
  double min = 0.0;
  double max = 0.0;
  friend bool operator==(const Range&, const Range&) = default;
};

/// Per-slot channels draw Nakagami amplitudes, or use the mean amplitude sqrt(p̄).
enum class FadingMode { sampled, expected };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ScenarioConfig {
  // Area and population.
  double area_width = 1000.0;
  double area_height = 1000.0;
  std::size_t num_uds = 60;
  std::size_t num_suavs = 4;
  std::size_t num_slots = 100;
  double slot_duration = 1.0;

  // Aerial layer.
  double suav_altitude = 100.0;
  double luav_altitude = 300.0;
  Vec2 luav_position{500.0, 500.0};
  std::vector<Vec2> suav_initial_positions{{100.0, 100.0}, {100.0, 900.0}, {900.0, 900.0}, {900.0, 100.0}};
  double suav_max_speed = 25.0;
  double min_separation = 10.0;
  double suav_compute = 20e9;
  double luav_compute = 30e9;
  double suav_bandwidth = 5e6;
  double luav_bandwidth = 10e6;

  // Radio.
  double ud_tx_power = dbm_to_watts(20.0);
  double noise_power = dbm_to_watts(-98.0);
  double los_c1 = 10.0;
  double los_c2 = 0.6;
  double carrier_frequency = 2e9;
  double nakagami_los = 3.0;
  double nakagami_nlos = 1.0;
  double mean_rx_power = 1.0;
  double attenuation_los = db_to_linear(1.0);
  double attenuation_nlos = db_to_linear(20.0);
  FadingMode fading_mode = FadingMode::sampled;

  // Energy and cost.
  double cpu_capacitance = 1e-28;
  double suav_energy_per_cycle = 8.2e-9;
  PropulsionParams propulsion{};
  double weight_delay = 0.7;
  double weight_energy = 0.3;

  // Lyapunov control. The per-slot SUAV budget is split into a propulsion part
  // equal to hover energy over one slot and a compute part taking the rest.
  double lyapunov_v = 1000.0;
  double suav_energy_budget = 180.0;

  // UD mobility (Gauss-Markov).
  double mobility_memory = 0.9;
  Vec2 mean_velocity{1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2};
  double velocity_stddev = 2.0;

  // Task generation.
  Range task_size{0.2e6, 1e6};
  Range task_intensity{500.0, 1500.0};
  Range task_deadline{1.0, 1.0};
  std::vector<double> ud_compute_options{1e9, 1.5e9, 2e9};

  // Solver knobs.
  double sca_tolerance = 0.01;
  std::size_t sca_max_iterations = 50;
  std::size_t sca_extra_starts = 8;
  std::size_t stage1_sweep_factor = 10;

  std::uint64_t rng_seed = 0;

  double propulsion_budget() const { return hover_power(propulsion) * slot_duration; }
  double compute_budget() const { return suav_energy_budget - propulsion_budget(); }

  void validate() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

inline ScenarioConfig paper_profile() { return ScenarioConfig{}; }

/// 20 UDs, 2 SUAVs, 50 slots on 500 m x 500 m.
inline ScenarioConfig desk_profile() {
  ScenarioConfig c;
  c.area_width = 500.0;
  c.area_height = 500.0;
  c.num_uds = 20;
  c.num_suavs = 2;
  c.num_slots = 50;
  c.luav_position = {250.0, 250.0};
  c.suav_initial_positions = {{100.0, 100.0}, {400.0, 400.0}};
  return c;
}

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid config: " + what);
}

}  // namespace detail

inline void ScenarioConfig::validate() const {
  using detail::require;
  require(num_uds >= 1, "M >= 1");
  require(num_suavs >= 1, "N >= 1");
  require(num_slots >= 1, "T >= 1");
  require(slot_duration > 0, "slot duration > 0");
  require(area_width > 0 && area_height > 0, "area dimensions > 0");
  require(suav_altitude > 0 && luav_altitude > 0, "altitudes > 0");
  require(suav_initial_positions.size() == num_suavs, "one initial position per SUAV");
  require(suav_max_speed >= 0, "SUAV max speed >= 0");
  require(min_separation > 0, "d_min > 0");
  for (std::size_t i = 0; i < num_suavs; ++i) {
    for (std::size_t j = i + 1; j < num_suavs; ++j) {
      require(distance(suav_initial_positions[i], suav_initial_positions[j]) >= min_separation,
              "initial SUAV positions " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                  " are closer than d_min");
    }
  }
  require(suav_compute > 0 && luav_compute > 0, "server compute capacities > 0");
  require(suav_bandwidth > 0 && luav_bandwidth > 0, "bandwidths > 0");
  require(ud_tx_power > 0 && noise_power > 0, "powers > 0");
  require(carrier_frequency > 0, "carrier frequency > 0");
  require(nakagami_los >= 0.5 && nakagami_nlos >= 0.5, "Nakagami shape >= 0.5");
  require(mean_rx_power > 0, "mean received power > 0");
  require(attenuation_los > 0 && attenuation_nlos > 0, "attenuation factors > 0");
  require(cpu_capacitance > 0 && suav_energy_per_cycle > 0, "energy coefficients > 0");
  propulsion.validate();
  require(weight_delay >= 0 && weight_energy >= 0, "cost weights >= 0");
  require(weight_delay > 0 || weight_energy > 0, "cost weights not both 0");
  require(lyapunov_v > 0, "V > 0");
  require(compute_budget() > 0, "energy budget must exceed hover energy per slot");
  require(mobility_memory >= 0 && mobility_memory <= 1, "0 <= alpha <= 1");
  require(velocity_stddev >= 0, "velocity std dev >= 0");
  require(task_size.min >= 0 && task_size.max >= task_size.min, "task size range");
  require(task_intensity.min > 0 && task_intensity.max >= task_intensity.min, "task intensity range");
  require(task_deadline.min > 0 && task_deadline.max >= task_deadline.min, "task deadline range");
  require(!ud_compute_options.empty(), "UD compute options non-empty");
  for (double f : ud_compute_options) require(f > 0, "UD compute options > 0");
  require(sca_tolerance > 0, "SCA tolerance > 0");
  require(sca_max_iterations >= 1, "SCA iteration cap >= 1");
  require(stage1_sweep_factor >= 1, "stage-1 sweep factor >= 1");
}

// ---------------------------------------------------------------------------
// JSON document <-> ScenarioConfig. Powers are given in dBm and attenuation
// factors in dB in the document; everything else is SI.

namespace detail {

inline nlohmann::json vec_json(const Vec2& v) { return nlohmann::json::array({v.x, v.y}); }

inline Vec2 json_vec(const nlohmann::json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("config key '" + key + "' must be a 2-element array");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Range json_range(const nlohmann::json& j, const std::string& key) {
  if (j.is_number()) return {j.get<double>(), j.get<double>()};
  if (!j.is_array() || j.size() != 2) throw ConfigError("config key '" + key + "' must be [min, max]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline nlohmann::json to_json(const ScenarioConfig& c) {
  using detail::vec_json;
  nlohmann::json suavs = nlohmann::json::array();
  for (const auto& p : c.suav_initial_positions) suavs.push_back(vec_json(p));
  return {
      {"area_width", c.area_width},
      {"area_height", c.area_height},
      {"num_uds", c.num_uds},
      {"num_suavs", c.num_suavs},
      {"num_slots", c.num_slots},
      {"slot_duration", c.slot_duration},
      {"suav_altitude", c.suav_altitude},
      {"luav_altitude", c.luav_altitude},
      {"luav_position", vec_json(c.luav_position)},
      {"suav_initial_positions", suavs},
      {"suav_max_speed", c.suav_max_speed},
      {"min_separation", c.min_separation},
      {"suav_compute", c.suav_compute},
      {"luav_compute", c.luav_compute},
      {"suav_bandwidth", c.suav_bandwidth},
      {"luav_bandwidth", c.luav_bandwidth},
      {"ud_tx_power_dbm", watts_to_dbm(c.ud_tx_power)},
      {"noise_power_dbm", watts_to_dbm(c.noise_power)},
      {"los_c1", c.los_c1},
      {"los_c2", c.los_c2},
      {"carrier_frequency", c.carrier_frequency},
      {"nakagami_los", c.nakagami_los},
      {"nakagami_nlos", c.nakagami_nlos},
      {"mean_rx_power", c.mean_rx_power},
      {"attenuation_los_db", linear_to_db(c.attenuation_los)},
      {"attenuation_nlos_db", linear_to_db(c.attenuation_nlos)},
      {"fading_mode", c.fading_mode == FadingMode::sampled ? "sampled" : "expected"},
      {"cpu_capacitance", c.cpu_capacitance},
      {"suav_energy_per_cycle", c.suav_energy_per_cycle},
      {"propulsion",
       {{"c1", c.propulsion.c1},
        {"c2", c.propulsion.c2},
        {"c3", c.propulsion.c3},
        {"c4", c.propulsion.c4},
        {"tip_speed", c.propulsion.tip_speed}}},
      {"weight_delay", c.weight_delay},
      {"weight_energy", c.weight_energy},
      {"lyapunov_v", c.lyapunov_v},
      {"suav_energy_budget", c.suav_energy_budget},
      {"mobility_memory", c.mobility_memory},
      {"mean_velocity", vec_json(c.mean_velocity)},
      {"velocity_stddev", c.velocity_stddev},
      {"task_size", {c.task_size.min, c.task_size.max}},
      {"task_intensity", {c.task_intensity.min, c.task_intensity.max}},
      {"task_deadline", {c.task_deadline.min, c.task_deadline.max}},
      {"ud_compute_options", c.ud_compute_options},
      {"sca_tolerance", c.sca_tolerance},
      {"sca_max_iterations", c.sca_max_iterations},
      {"sca_extra_starts", c.sca_extra_starts},
      {"stage1_sweep_factor", c.stage1_sweep_factor},
      {"rng_seed", c.rng_seed},
  };
}

/// Overlays the keys present in `j` on top of `base`. Unknown keys are rejected
/// so that typos do not silently fall back to defaults. When `num_suavs`
/// changes and no initial positions are given, SUAVs are placed on a circle
/// around the area center.
inline ScenarioConfig config_from_json(const nlohmann::json& j, ScenarioConfig base = {}) {
  using detail::json_range;
  using detail::json_vec;
  if (!j.is_object()) throw ConfigError("config document must be a JSON object");
  ScenarioConfig c = std::move(base);
  bool positions_given = false;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "area_width") c.area_width = v.get<double>();
      else if (key == "area_height") c.area_height = v.get<double>();
      else if (key == "num_uds") c.num_uds = v.get<std::size_t>();
      else if (key == "num_suavs") c.num_suavs = v.get<std::size_t>();
      else if (key == "num_slots") c.num_slots = v.get<std::size_t>();
      else if (key == "slot_duration") c.slot_duration = v.get<double>();
      else if (key == "suav_altitude") c.suav_altitude = v.get<double>();
      else if (key == "luav_altitude") c.luav_altitude = v.get<double>();
      else if (key == "luav_position") c.luav_position = json_vec(v, key);
      else if (key == "suav_initial_positions") {
        c.suav_initial_positions.clear();
        for (const auto& p : v) c.suav_initial_positions.push_back(json_vec(p, key));
        positions_given = true;
      } else if (key == "suav_max_speed") c.suav_max_speed = v.get<double>();
      else if (key == "min_separation") c.min_separation = v.get<double>();
      else if (key == "suav_compute") c.suav_compute = v.get<double>();
      else if (key == "luav_compute") c.luav_compute = v.get<double>();
      else if (key == "suav_bandwidth") c.suav_bandwidth = v.get<double>();
      else if (key == "luav_bandwidth") c.luav_bandwidth = v.get<double>();
      else if (key == "ud_tx_power_dbm") c.ud_tx_power = dbm_to_watts(v.get<double>());
      else if (key == "noise_power_dbm") c.noise_power = dbm_to_watts(v.get<double>());
      else if (key == "los_c1") c.los_c1 = v.get<double>();
      else if (key == "los_c2") c.los_c2 = v.get<double>();
      else if (key == "carrier_frequency") c.carrier_frequency = v.get<double>();
      else if (key == "nakagami_los") c.nakagami_los = v.get<double>();
      else if (key == "nakagami_nlos") c.nakagami_nlos = v.get<double>();
      else if (key == "mean_rx_power") c.mean_rx_power = v.get<double>();
      else if (key == "attenuation_los_db") c.attenuation_los = db_to_linear(v.get<double>());
      else if (key == "attenuation_nlos_db") c.attenuation_nlos = db_to_linear(v.get<double>());
      else if (key == "fading_mode") {
        const auto mode = v.get<std::string>();
        if (mode == "sampled") c.fading_mode = FadingMode::sampled;
        else if (mode == "expected") c.fading_mode = FadingMode::expected;
        else throw ConfigError("fading_mode must be 'sampled' or 'expected'");
      } else if (key == "cpu_capacitance") c.cpu_capacitance = v.get<double>();
      else if (key == "suav_energy_per_cycle") c.suav_energy_per_cycle = v.get<double>();
      else if (key == "propulsion") {
        for (const auto& [pk, pv] : v.items()) {
          if (pk == "c1") c.propulsion.c1 = pv.get<double>();
          else if (pk == "c2") c.propulsion.c2 = pv.get<double>();
          else if (pk == "c3") c.propulsion.c3 = pv.get<double>();
          else if (pk == "c4") c.propulsion.c4 = pv.get<double>();
          else if (pk == "tip_speed") c.propulsion.tip_speed = pv.get<double>();
          else throw ConfigError("unknown propulsion key '" + pk + "'");
        }
      } else if (key == "weight_delay") c.weight_delay = v.get<double>();
      else if (key == "weight_energy") c.weight_energy = v.get<double>();
      else if (key == "lyapunov_v") c.lyapunov_v = v.get<double>();
      else if (key == "suav_energy_budget") c.suav_energy_budget = v.get<double>();
      else if (key == "mobility_memory") c.mobility_memory = v.get<double>();
      else if (key == "mean_velocity") c.mean_velocity = json_vec(v, key);
      else if (key == "velocity_stddev") c.velocity_stddev = v.get<double>();
      else if (key == "task_size") c.task_size = json_range(v, key);
      else if (key == "task_intensity") c.task_intensity = json_range(v, key);
      else if (key == "task_deadline") c.task_deadline = json_range(v, key);
      else if (key == "ud_compute_options") c.ud_compute_options = v.get<std::vector<double>>();
      else if (key == "sca_tolerance") c.sca_tolerance = v.get<double>();
      else if (key == "sca_max_iterations") c.sca_max_iterations = v.get<std::size_t>();
      else if (key == "sca_extra_starts") c.sca_extra_starts = v.get<std::size_t>();
      else if (key == "stage1_sweep_factor") c.stage1_sweep_factor = v.get<std::size_t>();
      else if (key == "rng_seed") c.rng_seed = v.get<std::uint64_t>();
      else throw ConfigError("unknown config key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
  if (!positions_given && c.suav_initial_positions.size() != c.num_suavs) {
    c.suav_initial_positions.clear();
    const Vec2 center{c.area_width / 2.0, c.area_height / 2.0};
    const double radius = 0.4 * std::min(c.area_width, c.area_height);
    for (std::size_t n = 0; n < c.num_suavs; ++n) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(c.num_suavs);
      c.suav_initial_positions.push_back(center + Vec2{radius * std::cos(angle), radius * std::sin(angle)});
    }
  }
  c.validate();
  return c;
}

inline ScenarioConfig profile_by_name(const std::string& name) {
  if (name == "paper") return paper_profile();
  if (name == "desk") return desk_profile();
  throw ConfigError("unknown profile '" + name + "' (expected desk|paper)");
}

inline ScenarioConfig load_config(const std::string& path, ScenarioConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j, std::move(base));
}

}  // namespace uavmec
