#pragma once

// Entity state and its per-slot evolution: Gauss-Markov UD mobility, task
// arrivals, and world construction from a config and a seed.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "uavmec/compute_model.hpp"
#include "uavmec/config.hpp"
#include "uavmec/geometry.hpp"
#include "uavmec/random.hpp"

namespace uavmec {

struct UdState {
  std::size_t id = 0;
  Vec2 position;
  Vec2 velocity;
  double compute = 1e9;  // cycles/s, fixed for the run
  TaskSpec task;

  friend bool operator==(const UdState&, const UdState&) = default;
};

struct SuavState {
  std::size_t id = 0;
  Vec2 position;
  double altitude = 100.0;
  double compute = 20e9;

  friend bool operator==(const SuavState&, const SuavState&) = default;
};

struct LuavState {
  Vec2 position;
  double altitude = 300.0;
  double compute = 30e9;

  friend bool operator==(const LuavState&, const LuavState&) = default;
};

struct World {
  ScenarioConfig config;
  std::vector<UdState> uds;
  std::vector<SuavState> suavs;
  LuavState luav;
  RngStreams rng;
  std::size_t slot = 1;

  friend bool operator==(const World&, const World&) = default;
};

namespace detail {

inline double uniform_in(const Range& r, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  return r.min + (r.max - r.min) * u;
}

// Keeps a coordinate inside [0, limit]; the velocity component is turned
// back toward the interior when the boundary is hit.
inline void reflect(double& pos, double& vel, double limit) {
  if (pos < 0.0) {
    pos = 0.0;
    vel = std::abs(vel);
  } else if (pos > limit) {
    pos = limit;
    vel = -std::abs(vel);
  }
}

}  // namespace detail

inline TaskSpec sample_task(const ScenarioConfig& config, Rng& rng) {
  TaskSpec t;
  t.data_size = detail::uniform_in(config.task_size, rng);
  t.intensity = detail::uniform_in(config.task_intensity, rng);
  t.deadline = detail::uniform_in(config.task_deadline, rng);
  return t;
}

/// One Gauss-Markov step. The position advances with the current velocity and
/// the velocity is then refreshed; both are reflected at the area boundary.
inline UdState step_mobility(const UdState& ud, const ScenarioConfig& config, Rng& rng) {
  const double alpha = config.mobility_memory;
  std::normal_distribution<double> noise(0.0, config.velocity_stddev);
  const Vec2 w{noise(rng), noise(rng)};

  UdState next = ud;
  next.velocity = alpha * ud.velocity + (1.0 - alpha) * config.mean_velocity + std::sqrt(1.0 - alpha * alpha) * w;
  next.position = ud.position + ud.velocity * config.slot_duration;
  detail::reflect(next.position.x, next.velocity.x, config.area_width);
  detail::reflect(next.position.y, next.velocity.y, config.area_height);
  return next;
}

/// Builds the initial world. UDs are placed uniformly at random, start at the
/// mean velocity and draw their compute capability once from the option set.
inline World build_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  World w{.config = config, .uds = {}, .suavs = {}, .luav = {}, .rng = RngStreams(seed), .slot = 1};
  w.config.rng_seed = seed;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, config.ud_compute_options.size() - 1);
  w.uds.reserve(config.num_uds);
  for (std::size_t m = 0; m < config.num_uds; ++m) {
    UdState ud;
    ud.id = m;
    ud.position = {unit(w.rng.mobility) * config.area_width, unit(w.rng.mobility) * config.area_height};
    ud.velocity = config.mean_velocity;
    ud.compute = config.ud_compute_options[pick(w.rng.tasks)];
    w.uds.push_back(ud);
  }
  for (auto& ud : w.uds) ud.task = sample_task(config, w.rng.tasks);

  w.suavs.reserve(config.num_suavs);
  for (std::size_t n = 0; n < config.num_suavs; ++n) {
    w.suavs.push_back({.id = n,
                       .position = config.suav_initial_positions[n],
                       .altitude = config.suav_altitude,
                       .compute = config.suav_compute});
  }
  w.luav = {.position = config.luav_position, .altitude = config.luav_altitude, .compute = config.luav_compute};
  return w;
}

/// Moves every UD one slot forward and draws the next slot's tasks.
inline void advance_uds(World& w) {
  for (auto& ud : w.uds) ud = step_mobility(ud, w.config, w.rng.mobility);
  for (auto& ud : w.uds) ud.task = sample_task(w.config, w.rng.tasks);
  ++w.slot;
}

}  // namespace uavmec
