#pragma once

// Slot loop of the online controller and its baselines.
//
// Per slot: draw fading for every (UD, server) pair in a fixed order, settle
// offloading and shares at the current SUAV positions, pick next positions,
// realize delays and energies at the current positions, update the virtual
// queues from the pre-update snapshot, then move UDs and SUAVs.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <future>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "uavmec/allocation.hpp"
#include "uavmec/channel.hpp"
#include "uavmec/compute_model.hpp"
#include "uavmec/config.hpp"
#include "uavmec/game_context.hpp"
#include "uavmec/lyapunov.hpp"
#include "uavmec/offload_game.hpp"
#include "uavmec/scenario.hpp"
#include "uavmec/trajectory.hpp"

namespace uavmec {

enum class ApproachId { ojtrta, eo, era, flp, ocq };

inline constexpr ApproachId kAllApproaches[] = {ApproachId::ojtrta, ApproachId::eo, ApproachId::era, ApproachId::flp,
                                                ApproachId::ocq};

inline std::string to_string(ApproachId a) {
  switch (a) {
    case ApproachId::ojtrta: return "OJTRTA";
    case ApproachId::eo: return "EO";
    case ApproachId::era: return "ERA";
    case ApproachId::flp: return "FLP";
    case ApproachId::ocq: return "OCQ";
  }
  return "?";
}

inline ApproachId parse_approach(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (auto a : kAllApproaches) {
    if (to_string(a) == s) return a;
  }
  throw std::invalid_argument("unknown approach '" + s + "' (expected OJTRTA, EO, ERA, FLP or OCQ)");
}

struct UdSlotOutcome {
  Choice choice = kLocal;
  double delay = 0.0;
  double ud_energy = 0.0;
  double cost = 0.0;
  double compute_share = 0.0;
  double bandwidth_share = 0.0;
  bool deadline_met = true;
};

/// Everything decided and realized in one slot.
struct SlotDecision {
  std::size_t slot = 0;
  StrategyProfile profile;
  AllocationResult allocation;
  std::vector<Vec2> positions;       // q_n(t), where the slot's service happens
  std::vector<Vec2> next_positions;  // q_n(t+1)
  std::vector<UdSlotOutcome> outcomes;
  std::vector<double> compute_energy;     // E_n^c(t)
  std::vector<double> propulsion_energy;  // E_n^p(t)
  double luav_compute_energy = 0.0;
  QueueState queues_before;
  QueueState queues_after;
  std::size_t stage1_sweeps = 0;
  std::size_t forced_choices = 0;  // EO choices with no deadline-feasible server
  std::size_t sca_iterations = 0;
  bool sca_hit_cap = false;
};

struct SlotRecord {
  std::size_t slot = 0;
  double cost = 0.0;       // sum_m C_m(t)
  double latency = 0.0;    // mean_m T_m(t)
  double ud_energy = 0.0;  // sum_m E_m(t)
  std::vector<double> suav_energy;
  std::vector<double> queue_compute;     // after the slot's update
  std::vector<double> queue_propulsion;
  std::vector<Vec2> positions;           // q_n(t)
  std::size_t deadline_violations = 0;
};

struct Aggregates {
  double time_avg_cost = 0.0;
  double avg_latency = 0.0;
  double cumulative_ud_energy = 0.0;
  double time_avg_suav_energy = 0.0;
  std::size_t deadline_violations = 0;
  std::vector<double> mean_suav_energy;  // per SUAV, over all slots
  std::vector<double> final_queue_compute;
  std::vector<double> final_queue_propulsion;
};

/// Folds per-slot rows into the four reported metrics.
inline Aggregates aggregate(const std::vector<SlotRecord>& rows, std::size_t num_suavs) {
  Aggregates a;
  a.mean_suav_energy.assign(num_suavs, 0.0);
  a.final_queue_compute.assign(num_suavs, 0.0);
  a.final_queue_propulsion.assign(num_suavs, 0.0);
  if (rows.empty()) return a;
  const double T = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    a.time_avg_cost += r.cost;
    a.avg_latency += r.latency;
    a.cumulative_ud_energy += r.ud_energy;
    double s = 0.0;
    for (std::size_t n = 0; n < num_suavs; ++n) {
      s += r.suav_energy[n];
      a.mean_suav_energy[n] += r.suav_energy[n];
    }
    a.time_avg_suav_energy += num_suavs ? s / static_cast<double>(num_suavs) : 0.0;
    a.deadline_violations += r.deadline_violations;
  }
  a.time_avg_cost /= T;
  a.avg_latency /= T;
  a.time_avg_suav_energy /= T;
  for (auto& e : a.mean_suav_energy) e /= T;
  a.final_queue_compute = rows.back().queue_compute;
  a.final_queue_propulsion = rows.back().queue_propulsion;
  return a;
}

struct RunOptions {
  std::ostream* trace = nullptr;  // structured per-move / per-iteration lines
  bool record_ud_positions = false;
};

struct RunResult {
  ScenarioConfig config;
  ApproachId approach = ApproachId::ojtrta;
  std::uint64_t seed = 0;
  std::vector<SlotRecord> rows;
  Aggregates summary;
  std::vector<std::string> audit_failures;
  std::vector<std::vector<Vec2>> ud_positions;  // per slot, when recorded
  std::size_t sca_cap_hits = 0;
  std::size_t forced_choices = 0;
};

/// Checks the per-slot constraints: valid choices, edge deadlines, share
/// bounds and sums, initial positions, speed and separation. Returns one
/// message per violation.
inline std::vector<std::string> audit_slot(const SlotDecision& d, const ScenarioConfig& c, ApproachId approach) {
  std::vector<std::string> bad;
  auto fail = [&](const std::string& what) {
    bad.push_back("slot " + std::to_string(d.slot) + ": " + what);
  };
  const auto S = static_cast<Choice>(c.num_suavs + 1);
  std::vector<double> zsum(static_cast<std::size_t>(S), 0.0), wsum(static_cast<std::size_t>(S), 0.0);
  for (std::size_t m = 0; m < d.outcomes.size(); ++m) {
    const auto& o = d.outcomes[m];
    if (o.choice < kLocal || o.choice >= S) fail("UD " + std::to_string(m) + " has an invalid offloading choice");
    if (o.choice == kLocal) continue;
    if (approach != ApproachId::eo && !o.deadline_met) fail("UD " + std::to_string(m) + " misses its edge deadline");
    if (o.compute_share < 0 || o.compute_share > 1 + 1e-12) fail("compute share outside [0,1]");
    if (o.bandwidth_share < 0 || o.bandwidth_share > 1 + 1e-12) fail("bandwidth share outside [0,1]");
    zsum[static_cast<std::size_t>(o.choice)] += o.compute_share;
    wsum[static_cast<std::size_t>(o.choice)] += o.bandwidth_share;
  }
  for (Choice s = 0; s < S; ++s) {
    if (zsum[static_cast<std::size_t>(s)] > 1 + 1e-12) fail("server " + std::to_string(s) + " compute over capacity");
    if (wsum[static_cast<std::size_t>(s)] > 1 + 1e-12) fail("server " + std::to_string(s) + " bandwidth over capacity");
  }
  if (d.slot == 1) {
    for (std::size_t n = 0; n < c.num_suavs; ++n) {
      if (!(d.positions[n] == c.suav_initial_positions[n])) fail("SUAV " + std::to_string(n) + " not at its start");
    }
  }
  const double reach = c.suav_max_speed * c.slot_duration;
  for (std::size_t n = 0; n < c.num_suavs; ++n) {
    if (distance(d.next_positions[n], d.positions[n]) > reach * (1 + 1e-9) + 1e-12) {
      fail("SUAV " + std::to_string(n) + " exceeds its speed limit");
    }
    for (std::size_t j = n + 1; j < c.num_suavs; ++j) {
      if (distance(d.positions[n], d.positions[j]) < c.min_separation - 1e-6 ||
          distance(d.next_positions[n], d.next_positions[j]) < c.min_separation - 1e-6) {
        fail("SUAVs " + std::to_string(n) + " and " + std::to_string(j) + " closer than the minimum separation");
      }
    }
  }
  return bad;
}

class Simulator {
 public:
  Simulator(const ScenarioConfig& config, ApproachId approach, std::uint64_t seed, RunOptions options = {})
      : world_(build_scenario(config, seed)),
        queues_(QueueState::empty(config)),
        approach_(approach),
        options_(options) {}

  const World& world() const { return world_; }
  const QueueState& queues() const { return queues_; }
  ApproachId approach() const { return approach_; }

  /// Runs one slot and advances the world.
  SlotDecision step() {
    const auto& c = world_.config;
    const std::size_t M = c.num_uds;
    const std::size_t N = c.num_suavs;

    SlotDecision d;
    d.slot = world_.slot;
    d.queues_before = queues_;
    for (const auto& s : world_.suavs) d.positions.push_back(s.position);

    // Fading for all pairs, UD-major, SUAVs then the LUAV.
    std::vector<std::vector<ChannelDraw>> draws(M, std::vector<ChannelDraw>(N + 1));
    for (std::size_t m = 0; m < M; ++m) {
      for (std::size_t s = 0; s <= N; ++s) draws[m][s] = channel_for(m, s);
    }

    const GameContext ctx = build_context(draws);
    Stage1Options s1;
    s1.tie_break = &world_.rng.decisions;
    s1.max_sweeps = c.stage1_sweep_factor * std::max<std::size_t>(M, 1);
    s1.throw_on_cap = ctx.rule == AllocationRule::optimal && ctx.allow_local;
    if (options_.trace) {
      s1.on_move = [&](const MoveRecord& r) {
        *options_.trace << "stage1 approach=" << to_string(approach_) << " seed=" << c.rng_seed
                        << " slot=" << d.slot << " sweep=" << r.sweep << " ud=" << r.ud
                        << " from=" << choice_label(r.from, N) << " to=" << choice_label(r.to, N)
                        << " dU=" << r.delta_utility << " dF=" << r.delta_potential << "\n";
      };
    }
    const auto stage1 = run_stage1(ctx, s1);
    d.profile = stage1.profile;
    d.allocation = stage1.allocation;
    d.stage1_sweeps = stage1.sweeps;
    d.forced_choices = stage1.forced_choices;

    // Stage 2.
    if (approach_ == ApproachId::flp) {
      d.next_positions = d.positions;
    } else {
      const auto problem = build_trajectory_problem(d.profile, d.allocation, draws);
      std::function<void(const Stage2Iteration&)> trace;
      if (options_.trace) {
        trace = [&](const Stage2Iteration& it) {
          *options_.trace << "stage2 approach=" << to_string(approach_) << " seed=" << c.rng_seed
                          << " slot=" << d.slot << " iter=" << it.iteration << " G=" << it.surrogate_objective
                          << " objective=" << it.true_objective << " step=" << it.step_norm << "\n";
        };
      }
      const auto stage2 = run_stage2(problem, trace);
      d.next_positions = stage2.positions;
      d.sca_iterations = stage2.history.size();
      d.sca_hit_cap = stage2.hit_iteration_cap;
    }

    // Realization at the current positions.
    const auto realized = evaluate_profile(d.profile, ctx);
    d.outcomes.resize(M);
    d.compute_energy.assign(N, 0.0);
    std::vector<std::vector<TaskSpec>> assigned(N);
    for (std::size_t m = 0; m < M; ++m) {
      auto& o = d.outcomes[m];
      o.choice = d.profile[m];
      o.delay = realized[m].delay;
      o.ud_energy = realized[m].ud_energy;
      o.compute_share = realized[m].compute_share;
      o.bandwidth_share = realized[m].bandwidth_share;
      o.cost = c.weight_delay * o.delay + c.weight_energy * o.ud_energy;
      o.deadline_met = meets_deadline(ctx.players[m], o.delay);
      if (o.choice == kLocal) continue;
      const auto s = static_cast<std::size_t>(o.choice);
      if (s < N) {
        assigned[s].push_back(world_.uds[m].task);
      } else {
        d.luav_compute_energy += suav_compute_energy(world_.uds[m].task, c.suav_energy_per_cycle);
      }
    }
    d.propulsion_energy.assign(N, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
      const auto e = slot_suav_energy(assigned[n], d.positions[n], d.next_positions[n], c.slot_duration,
                                      c.suav_max_speed, c.suav_energy_per_cycle, c.propulsion);
      d.compute_energy[n] = e.compute;
      d.propulsion_energy[n] = e.propulsion;
    }
    queues_ = update_queues(queues_, d.compute_energy, d.propulsion_energy);
    d.queues_after = queues_;

    advance_uds(world_);
    for (std::size_t n = 0; n < N; ++n) world_.suavs[n].position = d.next_positions[n];
    return d;
  }

 private:
  ChannelDraw channel_for(std::size_t m, std::size_t s) {
    const auto& c = world_.config;
    const bool suav = s < c.num_suavs;
    const Vec2 air = suav ? world_.suavs[s].position : world_.luav.position;
    const double alt = suav ? world_.suavs[s].altitude : world_.luav.altitude;
    const auto geom = LinkGeometry::between(world_.uds[m].position, air, alt);
    if (c.fading_mode == FadingMode::sampled) return draw_channel(geom, c, world_.rng.fading);
    ChannelDraw d;
    d.los_prob = los_probability(geom, c.los_c1, c.los_c2);
    d.h_los = d.h_nlos = std::sqrt(c.mean_rx_power);
    d.gain = composite_gain(d.los_prob, d.h_los, d.h_nlos, large_scale_loss(geom, c.carrier_frequency, c.attenuation_los),
                            large_scale_loss(geom, c.carrier_frequency, c.attenuation_nlos));
    return d;
  }

  bool ignores_queues() const { return approach_ == ApproachId::ocq; }

  GameContext build_context(const std::vector<std::vector<ChannelDraw>>& draws) const {
    const auto& c = world_.config;
    GameContext ctx;
    ctx.cpu_capacitance = c.cpu_capacitance;
    ctx.energy_per_cycle = c.suav_energy_per_cycle;
    ctx.rule = approach_ == ApproachId::era ? AllocationRule::equal : AllocationRule::optimal;
    ctx.allow_local = approach_ != ApproachId::eo;
    for (std::size_t n = 0; n < c.num_suavs; ++n) {
      ctx.servers.push_back({.compute_capacity = world_.suavs[n].compute,
                             .bandwidth = c.suav_bandwidth,
                             .is_suav = true,
                             .queue_weight = ignores_queues() ? 0.0 : queues_.compute[n] / c.lyapunov_v});
    }
    ctx.servers.push_back(
        {.compute_capacity = world_.luav.compute, .bandwidth = c.luav_bandwidth, .is_suav = false, .queue_weight = 0.0});
    for (std::size_t m = 0; m < c.num_uds; ++m) {
      PlayerInfo p;
      p.task = world_.uds[m].task;
      p.local_compute = world_.uds[m].compute;
      p.tx_power = c.ud_tx_power;
      p.weight_delay = c.weight_delay;
      p.weight_energy = c.weight_energy;
      for (std::size_t s = 0; s < ctx.servers.size(); ++s) {
        p.full_rate.push_back(transmission_rate(1.0, ctx.servers[s].bandwidth, c.ud_tx_power, draws[m][s].gain,
                                                c.noise_power));
      }
      ctx.players.push_back(std::move(p));
    }
    return ctx;
  }

  TrajectoryProblem build_trajectory_problem(const StrategyProfile& profile, const AllocationResult& alloc,
                                             const std::vector<std::vector<ChannelDraw>>& draws) const {
    const auto& c = world_.config;
    TrajectoryProblem p;
    p.altitude = c.suav_altitude;
    p.slot_duration = c.slot_duration;
    p.max_speed = c.suav_max_speed;
    p.min_separation = c.min_separation;
    p.propulsion = c.propulsion;
    p.tolerance = c.sca_tolerance;
    p.max_iterations = c.sca_max_iterations;
    p.extra_starts = c.sca_extra_starts;
    for (std::size_t n = 0; n < c.num_suavs; ++n) {
      TrajectorySuav s;
      s.position = world_.suavs[n].position;
      s.propulsion_weight = ignores_queues() ? 0.0 : queues_.propulsion[n];
      for (std::size_t m = 0; m < c.num_uds; ++m) {
        if (profile[m] != static_cast<Choice>(n)) continue;
        const auto& task = world_.uds[m].task;
        if (!(task.data_size > 0)) continue;
        const double w = alloc.bandwidth_share[m];
        const auto& dr = draws[m][n];
        s.members.push_back(
            {.position = world_.uds[m].position,
             .rate_weight = c.lyapunov_v * (c.weight_delay * task.data_size + c.weight_energy * c.ud_tx_power * task.data_size) /
                            (w * c.suav_bandwidth),
             .snr_constant = snr_distance_constant(dr.los_prob, dr.h_los * dr.h_los, dr.h_nlos * dr.h_nlos, c)});
      }
      p.suavs.push_back(std::move(s));
    }
    return p;
  }

  World world_;
  QueueState queues_;
  ApproachId approach_;
  RunOptions options_;
};

inline SlotRecord make_record(const SlotDecision& d) {
  SlotRecord r;
  r.slot = d.slot;
  for (const auto& o : d.outcomes) {
    r.cost += o.cost;
    r.latency += o.delay;
    r.ud_energy += o.ud_energy;
    if (!o.deadline_met) ++r.deadline_violations;
  }
  if (!d.outcomes.empty()) r.latency /= static_cast<double>(d.outcomes.size());
  for (std::size_t n = 0; n < d.compute_energy.size(); ++n) {
    r.suav_energy.push_back(d.compute_energy[n] + d.propulsion_energy[n]);
  }
  r.queue_compute = d.queues_after.compute;
  r.queue_propulsion = d.queues_after.propulsion;
  r.positions = d.positions;
  return r;
}

/// Full run of `config.num_slots` slots. Errors are rethrown with the slot.
inline RunResult run_simulation(const ScenarioConfig& config, ApproachId approach, std::uint64_t seed,
                                RunOptions options = {}) {
  RunResult r;
  r.approach = approach;
  r.seed = seed;
  Simulator sim(config, approach, seed, options);
  r.config = sim.world().config;
  for (std::size_t t = 0; t < config.num_slots; ++t) {
    if (options.record_ud_positions) {
      std::vector<Vec2> pos;
      for (const auto& ud : sim.world().uds) pos.push_back(ud.position);
      r.ud_positions.push_back(std::move(pos));
    }
    SlotDecision d;
    try {
      d = sim.step();
    } catch (const std::exception& e) {
      throw std::runtime_error("slot " + std::to_string(t + 1) + ": " + e.what());
    }
    for (auto& msg : audit_slot(d, config, approach)) r.audit_failures.push_back(std::move(msg));
    if (d.sca_hit_cap) ++r.sca_cap_hits;
    r.forced_choices += d.forced_choices;
    r.rows.push_back(make_record(d));
  }
  r.summary = aggregate(r.rows, config.num_suavs);
  return r;
}

struct RunSpec {
  ApproachId approach;
  std::uint64_t seed;
};

/// Runs independent (approach, seed) jobs on up to `threads` workers and
/// returns results in job order.
inline std::vector<RunResult> run_many(const ScenarioConfig& config, const std::vector<RunSpec>& jobs,
                                       unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<RunResult> out(jobs.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> workers;
  for (unsigned w = 0; w < std::min<std::size_t>(threads, jobs.size()); ++w) {
    workers.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) {
        out[i] = run_simulation(config, jobs[i].approach, jobs[i].seed);
      }
    }));
  }
  for (auto& f : workers) f.get();
  return out;
}

}  // namespace uavmec
