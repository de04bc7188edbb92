#pragma once

// Delay, energy and propulsion formulas for local computing, edge computing
// and SUAV flight, plus the weighted per-UD cost.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include "uavmec/geometry.hpp"

namespace uavmec {

/// One computing task: input size in bits, cycles per bit, deadline in seconds.
struct TaskSpec {
  double data_size = 0.0;
  double intensity = 1.0;
  double deadline = 1.0;

  double cycles() const { return data_size * intensity; }
  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

/// Rotary-wing propulsion constants. c1: blade profile power (W), c2: induced
/// power coefficient, c3: fourth power of the mean rotor induced velocity in
/// hover (m^4/s^4), c4: parasite coefficient (kg/m), tip_speed in m/s.
struct PropulsionParams {
  double c1 = 79.86;
  double c2 = 21.99;
  double c3 = 263.85;
  double c4 = 0.00924;
  double tip_speed = 120.0;

  void validate() const {
    if (!(c1 > 0 && c2 > 0 && c3 > 0 && c4 > 0 && tip_speed > 0)) {
      throw std::invalid_argument("propulsion constants must all be > 0");
    }
  }
  friend bool operator==(const PropulsionParams&, const PropulsionParams&) = default;
};

enum class ExecutionMode { local, suav, luav };

struct ExecutionOutcome {
  double delay = 0.0;
  double ud_energy = 0.0;
  double suav_compute_energy = 0.0;  // 0 unless executed on a SUAV
  ExecutionMode mode = ExecutionMode::local;
};

inline double local_delay(const TaskSpec& task, double ud_compute) {
  if (!(ud_compute > 0)) throw std::invalid_argument("UD compute capability must be > 0");
  return task.cycles() / ud_compute;
}

inline double local_energy(const TaskSpec& task, double ud_compute, double capacitance) {
  if (!(ud_compute > 0)) throw std::invalid_argument("UD compute capability must be > 0");
  return capacitance * ud_compute * ud_compute * task.cycles();
}

/// Transmission plus execution delay. `rate` is the allocated uplink rate in
/// bit/s and `compute` the allocated cycles/s.
inline double edge_delay(const TaskSpec& task, double rate, double compute) {
  if (!(rate > 0)) throw std::invalid_argument("edge_delay: allocated rate must be > 0");
  if (!(compute > 0)) throw std::invalid_argument("edge_delay: allocated compute must be > 0");
  if (task.data_size == 0.0) return 0.0;
  return task.data_size / rate + task.cycles() / compute;
}

inline double edge_ud_energy(const TaskSpec& task, double rate, double tx_power) {
  if (!(rate > 0)) throw std::invalid_argument("edge_ud_energy: allocated rate must be > 0");
  return tx_power * task.data_size / rate;
}

inline double suav_compute_energy(const TaskSpec& task, double energy_per_cycle) {
  if (!(energy_per_cycle > 0)) throw std::invalid_argument("energy per cycle must be > 0");
  return energy_per_cycle * task.cycles();
}

/// Induced-power slack sqrt(sqrt(c3 + v^4/4) - v^2/2). Written in the
/// cancellation-free form c3 / (sqrt(c3 + v^4/4) + v^2/2) under the outer root.
inline double induced_velocity_term(double speed, double c3) {
  const double v2 = speed * speed;
  const double root = std::sqrt(c3 + v2 * v2 / 4.0);
  return std::sqrt(c3 / (root + v2 / 2.0));
}

inline double propulsion_power(double speed, const PropulsionParams& p) {
  if (speed < 0) throw std::invalid_argument("speed must be >= 0");
  const double v2 = speed * speed;
  return p.c1 * (1.0 + 3.0 * v2 / (p.tip_speed * p.tip_speed)) +
         p.c2 * induced_velocity_term(speed, p.c3) + p.c4 * v2 * speed;
}

inline double hover_power(const PropulsionParams& p) { return propulsion_power(0.0, p); }

struct SuavSlotEnergy {
  double compute = 0.0;
  double propulsion = 0.0;
  double total() const { return compute + propulsion; }
};

/// Energy of one SUAV over a slot: compute energy of its assigned tasks plus
/// propulsion energy for flying from `from` to `to` in `slot_duration`.
inline SuavSlotEnergy slot_suav_energy(std::span<const TaskSpec> assigned, const Vec2& from, const Vec2& to,
                                       double slot_duration, double max_speed, double energy_per_cycle,
                                       const PropulsionParams& prop) {
  const double speed = distance(from, to) / slot_duration;
  if (speed > max_speed * (1.0 + 1e-9)) {
    throw std::domain_error("SUAV speed " + std::to_string(speed) + " m/s exceeds limit " +
                            std::to_string(max_speed) + " m/s");
  }
  SuavSlotEnergy e;
  for (const auto& task : assigned) e.compute += suav_compute_energy(task, energy_per_cycle);
  e.propulsion = propulsion_power(speed, prop) * slot_duration;
  return e;
}

inline double ud_cost(const ExecutionOutcome& outcome, double weight_delay, double weight_energy) {
  return weight_delay * outcome.delay + weight_energy * outcome.ud_energy;
}

}  // namespace uavmec
