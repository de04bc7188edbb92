#pragma once

// Virtual energy queues and the drift-plus-penalty quantities.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "uavmec/compute_model.hpp"
#include "uavmec/config.hpp"

namespace uavmec {

/// Per-SUAV compute and propulsion energy backlogs (J) with their per-slot
/// budgets. Both queues start empty.
struct QueueState {
  std::vector<double> compute;
  std::vector<double> propulsion;
  double compute_budget = 0.0;
  double propulsion_budget = 0.0;

  static QueueState empty(std::size_t num_suavs, double compute_budget, double propulsion_budget) {
    return {std::vector<double>(num_suavs, 0.0), std::vector<double>(num_suavs, 0.0), compute_budget,
            propulsion_budget};
  }
  static QueueState empty(const ScenarioConfig& c) {
    return empty(c.num_suavs, c.compute_budget(), c.propulsion_budget());
  }

  std::size_t size() const { return compute.size(); }
  friend bool operator==(const QueueState&, const QueueState&) = default;
};

inline QueueState update_queues(const QueueState& q, std::span<const double> compute_energy,
                                std::span<const double> propulsion_energy) {
  if (compute_energy.size() != q.size() || propulsion_energy.size() != q.size()) {
    throw std::invalid_argument("update_queues: one energy value per SUAV required");
  }
  QueueState next = q;
  for (std::size_t n = 0; n < q.size(); ++n) {
    if (compute_energy[n] < 0 || propulsion_energy[n] < 0) {
      throw std::invalid_argument("update_queues: energies must be >= 0");
    }
    next.compute[n] = std::max(q.compute[n] + compute_energy[n] - q.compute_budget, 0.0);
    next.propulsion[n] = std::max(q.propulsion[n] + propulsion_energy[n] - q.propulsion_budget, 0.0);
  }
  return next;
}

/// Queue-weighted SUAV energy plus V times the total UD cost of one slot.
inline double dpp_objective(std::span<const double> compute_energy, std::span<const double> propulsion_energy,
                            const QueueState& q, double v, std::span<const double> ud_costs) {
  if (compute_energy.size() != q.size() || propulsion_energy.size() != q.size()) {
    throw std::invalid_argument("dpp_objective: one energy value per SUAV required");
  }
  double drift = 0.0;
  for (std::size_t n = 0; n < q.size(); ++n) {
    drift += q.compute[n] * compute_energy[n] + q.propulsion[n] * propulsion_energy[n];
  }
  return drift + v * std::accumulate(ud_costs.begin(), ud_costs.end(), 0.0);
}

/// Constant of the per-slot drift-plus-penalty upper bound for given per-slot
/// energy maxima.
inline double drift_bound_constant(std::span<const double> compute_budgets, std::span<const double> propulsion_budgets,
                                   double max_compute_energy, double max_propulsion_energy) {
  double w = 0.0;
  for (double b : compute_budgets) w += 0.5 * std::max(b * b, (max_compute_energy - b) * (max_compute_energy - b));
  for (double b : propulsion_budgets) {
    w += 0.5 * std::max(b * b, (max_propulsion_energy - b) * (max_propulsion_energy - b));
  }
  return w;
}

/// Same constant with the maxima taken from the config: every UD sends a
/// largest-possible task to one SUAV, and the SUAV flies at the speed with the
/// highest power on [0, v_max] (one of the two endpoints, since P(v) first
/// falls and then rises).
inline double drift_bound_constant(const ScenarioConfig& c) {
  const double max_compute =
      c.suav_energy_per_cycle * static_cast<double>(c.num_uds) * c.task_size.max * c.task_intensity.max;
  const double max_power = std::max(propulsion_power(0.0, c.propulsion), propulsion_power(c.suav_max_speed, c.propulsion));
  const double max_propulsion = max_power * c.slot_duration;
  const std::vector<double> bc(c.num_suavs, c.compute_budget());
  const std::vector<double> bp(c.num_suavs, c.propulsion_budget());
  return drift_bound_constant(bc, bp, max_compute, max_propulsion);
}

}  // namespace uavmec
