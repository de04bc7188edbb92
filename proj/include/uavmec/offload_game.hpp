#pragma once

// Multi-UD offloading game: utilities under optimal (or equal) resource
// shares, best responses restricted to deadline-feasible choices, the
// Gauss-Seidel best-response dynamics, the exact potential, Nash checks and
// exhaustive price-of-anarchy measurement.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavmec/allocation.hpp"
#include "uavmec/compute_model.hpp"
#include "uavmec/game_context.hpp"
#include "uavmec/random.hpp"

namespace uavmec {

/// Realized quantities of one UD under a profile.
struct MemberOutcome {
  double delay = 0.0;
  double ud_energy = 0.0;
  double suav_energy = 0.0;  // E^c contribution, 0 unless on a SUAV
  double utility = 0.0;
  double compute_share = 0.0;
  double bandwidth_share = 0.0;
};

inline MemberOutcome local_outcome(const GameContext& ctx, std::size_t m) {
  const auto& p = ctx.players[m];
  MemberOutcome o;
  o.delay = local_delay(p.task, p.local_compute);
  o.ud_energy = local_energy(p.task, p.local_compute, ctx.cpu_capacitance);
  o.utility = p.weight_delay * o.delay + p.weight_energy * o.ud_energy;
  return o;
}

/// Outcomes of all `members` of `server` with shares from the context's rule.
inline std::vector<MemberOutcome> evaluate_server(const GameContext& ctx, std::size_t server,
                                                  std::span<const std::size_t> members) {
  std::vector<MemberOutcome> out(members.size());
  if (members.empty()) return out;
  const auto shares = server_shares(ctx, server, members);
  const auto& srv = ctx.servers[server];
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& p = ctx.players[members[i]];
    auto& o = out[i];
    o.compute_share = shares.compute[i];
    o.bandwidth_share = shares.bandwidth[i];
    if (p.task.data_size > 0) {
      const double rate = o.bandwidth_share * p.full_rate[server];
      const double compute = o.compute_share * srv.compute_capacity;
      const double inf = std::numeric_limits<double>::infinity();
      o.delay = (rate > 0 ? p.task.data_size / rate : inf) + (compute > 0 ? p.task.cycles() / compute : inf);
      o.ud_energy = rate > 0 ? edge_ud_energy(p.task, rate, p.tx_power) : inf;
    }
    // Written through the share weights so that a zero weight never meets a
    // zero share.
    const double a = compute_weight(p, srv);
    const double b = bandwidth_weight(p, server);
    o.utility = (a > 0 ? a / o.compute_share : 0.0) + (b > 0 ? b / o.bandwidth_share : 0.0);
    if (srv.is_suav) {
      o.suav_energy = suav_compute_energy(p.task, ctx.energy_per_cycle);
      o.utility += srv.queue_weight * o.suav_energy;
    }
  }
  return out;
}

inline bool meets_deadline(const PlayerInfo& p, double delay) { return delay <= p.task.deadline + 1e-9; }

/// Per-UD outcomes of a whole profile.
inline std::vector<MemberOutcome> evaluate_profile(const StrategyProfile& profile, const GameContext& ctx) {
  std::vector<MemberOutcome> out(profile.size());
  for (std::size_t m = 0; m < profile.size(); ++m) {
    if (profile[m] == kLocal) out[m] = local_outcome(ctx, m);
  }
  for (std::size_t s = 0; s < ctx.num_servers(); ++s) {
    const auto members = profile.members(static_cast<Choice>(s));
    const auto res = evaluate_server(ctx, s, members);
    for (std::size_t i = 0; i < members.size(); ++i) out[members[i]] = res[i];
  }
  return out;
}

/// Every offloaded task meets its deadline. Local execution is always legal.
inline bool profile_feasible(const StrategyProfile& profile, const GameContext& ctx) {
  const auto out = evaluate_profile(profile, ctx);
  for (std::size_t m = 0; m < profile.size(); ++m) {
    if (profile[m] != kLocal && !meets_deadline(ctx.players[m], out[m].delay)) return false;
  }
  return true;
}

inline double total_utility(const StrategyProfile& profile, const GameContext& ctx) {
  double total = 0.0;
  for (const auto& o : evaluate_profile(profile, ctx)) total += o.utility;
  return total;
}

/// Utility of UD m when it plays `choice` and everyone else keeps `profile`.
/// `feasible` (optional) receives whether the move keeps every member of the
/// target server that met its deadline before within its deadline, m included.
inline double utility(std::size_t m, Choice choice, const StrategyProfile& profile, const GameContext& ctx,
                      bool* feasible = nullptr) {
  if (choice == kLocal) {
    if (feasible) *feasible = true;
    return local_outcome(ctx, m).utility;
  }
  const auto s = static_cast<std::size_t>(choice);
  std::vector<std::size_t> before;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (i != m && profile[i] == choice) before.push_back(i);
  }
  std::vector<std::size_t> after = before;
  after.insert(std::upper_bound(after.begin(), after.end(), m), m);
  const auto res = evaluate_server(ctx, s, after);
  double u = 0.0;
  bool ok = true;
  std::vector<MemberOutcome> prior;
  if (feasible) prior = evaluate_server(ctx, s, before);
  for (std::size_t i = 0, k = 0; i < after.size(); ++i) {
    const auto& p = ctx.players[after[i]];
    if (after[i] == m) {
      u = res[i].utility;
      if (feasible) ok = ok && meets_deadline(p, res[i].delay);
    } else {
      if (feasible && meets_deadline(p, prior[k].delay) && !meets_deadline(p, res[i].delay)) ok = false;
      ++k;
    }
  }
  if (feasible) *feasible = ok;
  return u;
}

struct BestResponse {
  std::vector<Choice> choices;        // all minimizers
  double value = 0.0;
  bool forced = false;                // no feasible edge option and local disallowed
  std::vector<Choice> candidates;     // feasible strategies considered
  std::vector<double> candidate_utility;
};

inline double tie_tolerance(double v) { return 1e-12 * std::max(1.0, std::abs(v)); }

inline BestResponse best_response(std::size_t m, const StrategyProfile& profile, const GameContext& ctx) {
  BestResponse br;
  std::vector<Choice> infeasible;
  std::vector<double> infeasible_u;
  if (ctx.allow_local) {
    br.candidates.push_back(kLocal);
    br.candidate_utility.push_back(utility(m, kLocal, profile, ctx));
  }
  for (std::size_t s = 0; s < ctx.num_servers(); ++s) {
    const auto c = static_cast<Choice>(s);
    bool ok = false;
    const double u = utility(m, c, profile, ctx, &ok);
    // Staying put is always allowed; the profile got here legally.
    if (ok || profile[m] == c) {
      br.candidates.push_back(c);
      br.candidate_utility.push_back(u);
    } else {
      infeasible.push_back(c);
      infeasible_u.push_back(u);
    }
  }
  if (br.candidates.empty()) {
    br.forced = true;
    br.candidates = infeasible;
    br.candidate_utility = infeasible_u;
  }
  br.value = *std::min_element(br.candidate_utility.begin(), br.candidate_utility.end());
  for (std::size_t i = 0; i < br.candidates.size(); ++i) {
    if (br.candidate_utility[i] <= br.value + tie_tolerance(br.value)) br.choices.push_back(br.candidates[i]);
  }
  return br;
}

/// Exact potential. With optimal shares the per-member utility is
/// beta_i * sum(beta) + phi_i * sum(phi) over the server's members, so the
/// ordered double sum below changes by exactly the deviator's utility change.
inline double potential(const StrategyProfile& profile, const GameContext& ctx) {
  double f = 0.0;
  std::vector<double> beta_sum(ctx.num_servers(), 0.0);
  std::vector<double> phi_sum(ctx.num_servers(), 0.0);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const auto& p = ctx.players[i];
    if (profile[i] == kLocal) {
      f += local_outcome(ctx, i).utility;
      continue;
    }
    const auto s = static_cast<std::size_t>(profile[i]);
    const double beta = std::sqrt(compute_weight(p, ctx.servers[s]));
    const double phi = std::sqrt(bandwidth_weight(p, s));
    beta_sum[s] += beta;
    phi_sum[s] += phi;
    f += beta * beta_sum[s] + phi * phi_sum[s];
    if (ctx.servers[s].is_suav) f += ctx.servers[s].queue_weight * suav_compute_energy(p.task, ctx.energy_per_cycle);
  }
  return f;
}

struct MoveRecord {
  std::size_t sweep = 0;
  std::size_t ud = 0;
  Choice from = kLocal;
  Choice to = kLocal;
  double delta_utility = 0.0;
  double delta_potential = 0.0;
};

struct Stage1Options {
  Rng* tie_break = nullptr;  // null: lowest-index minimizer
  std::size_t max_sweeps = 0;  // 0: 10 * M
  bool throw_on_cap = true;
  std::function<void(const MoveRecord&)> on_move;
};

struct Stage1Result {
  StrategyProfile profile;
  AllocationResult allocation;
  std::size_t sweeps = 0;
  std::size_t moves = 0;
  bool converged = false;
  std::size_t forced_choices = 0;
};

/// Best-response dynamics from the all-local profile, UDs in index order,
/// changes applied immediately, until a full sweep changes nothing.
inline Stage1Result run_stage1(const GameContext& ctx, const Stage1Options& opt = {}) {
  ctx.validate();
  const std::size_t M = ctx.num_players();
  const std::size_t cap = opt.max_sweeps ? opt.max_sweeps : 10 * std::max<std::size_t>(M, 1);
  Stage1Result r;
  r.profile = StrategyProfile(M, kLocal);
  const bool track = static_cast<bool>(opt.on_move);
  while (r.sweeps < cap) {
    ++r.sweeps;
    bool changed = false;
    r.forced_choices = 0;
    for (std::size_t m = 0; m < M; ++m) {
      const Choice current = r.profile[m];
      const auto br = best_response(m, r.profile, ctx);
      if (br.forced) ++r.forced_choices;
      if (std::find(br.choices.begin(), br.choices.end(), current) != br.choices.end()) continue;
      Choice next = br.choices.front();
      if (opt.tie_break && br.choices.size() > 1) {
        std::uniform_int_distribution<std::size_t> pick(0, br.choices.size() - 1);
        next = br.choices[pick(*opt.tie_break)];
      }
      MoveRecord rec{.sweep = r.sweeps, .ud = m, .from = current, .to = next};
      double f_before = 0.0;
      if (track) {
        f_before = potential(r.profile, ctx);
        rec.delta_utility = br.value - utility(m, current, r.profile, ctx);
      }
      r.profile[m] = next;
      if (track) {
        rec.delta_potential = potential(r.profile, ctx) - f_before;
        opt.on_move(rec);
      }
      ++r.moves;
      changed = true;
    }
    if (!changed) {
      r.converged = true;
      break;
    }
  }
  if (!r.converged && opt.throw_on_cap) {
    throw std::runtime_error("FIP violation: best-response dynamics did not settle within " +
                             std::to_string(cap) + " sweeps");
  }
  r.allocation = allocate(r.profile, ctx);
  return r;
}

struct NashCheck {
  bool is_nash = true;
  std::size_t ud = 0;   // witness, valid when !is_nash
  Choice better = kLocal;
  double gain = 0.0;
};

/// No UD has a strictly improving feasible unilateral deviation.
inline NashCheck is_nash(const StrategyProfile& profile, const GameContext& ctx) {
  for (std::size_t m = 0; m < profile.size(); ++m) {
    const double now = utility(m, profile[m], profile, ctx);
    const auto br = best_response(m, profile, ctx);
    if (br.value < now - tie_tolerance(now)) {
      return {.is_nash = false, .ud = m, .better = br.choices.front(), .gain = now - br.value};
    }
  }
  return {};
}

struct PoaReport {
  double poa = 1.0;
  double bound = 3.0;
  double optimum = 0.0;
  double worst_equilibrium = 0.0;
  StrategyProfile optimal_profile;
  StrategyProfile worst_profile;
  std::size_t feasible_profiles = 0;
  std::size_t equilibria = 0;
};

/// Queue-weighted SUAV compute energy of a profile (the G terms of the bound).
inline double queue_energy_term(const StrategyProfile& profile, const GameContext& ctx) {
  double g = 0.0;
  for (std::size_t m = 0; m < profile.size(); ++m) {
    if (profile[m] == kLocal) continue;
    const auto& s = ctx.servers[static_cast<std::size_t>(profile[m])];
    if (s.is_suav) g += s.queue_weight * suav_compute_energy(ctx.players[m].task, ctx.energy_per_cycle);
  }
  return g;
}

/// Exhaustive enumeration of all (N+2)^M profiles.
inline PoaReport poa_measure(const GameContext& ctx, std::size_t max_profiles = 1'000'000) {
  ctx.validate();
  const std::size_t M = ctx.num_players();
  const std::size_t k = ctx.num_servers() + 1;
  double count = 1.0;
  for (std::size_t i = 0; i < M; ++i) count *= static_cast<double>(k);
  if (count > static_cast<double>(max_profiles)) {
    throw std::length_error("poa_measure: " + std::to_string(static_cast<long long>(count)) +
                            " profiles exceed the enumeration budget");
  }
  PoaReport rep;
  bool have_opt = false;
  bool have_ne = false;
  std::vector<std::size_t> digit(M, 0);
  StrategyProfile prof(M, kLocal);
  for (;;) {
    for (std::size_t i = 0; i < M; ++i) prof[i] = static_cast<Choice>(digit[i]) - 1;
    if (profile_feasible(prof, ctx)) {
      ++rep.feasible_profiles;
      const double u = total_utility(prof, ctx);
      if (!have_opt || u < rep.optimum) {
        rep.optimum = u;
        rep.optimal_profile = prof;
        have_opt = true;
      }
      if (is_nash(prof, ctx).is_nash) {
        ++rep.equilibria;
        if (!have_ne || u > rep.worst_equilibrium) {
          rep.worst_equilibrium = u;
          rep.worst_profile = prof;
          have_ne = true;
        }
      }
    }
    std::size_t i = 0;
    while (i < M && ++digit[i] == k) digit[i++] = 0;
    if (i == M) break;
  }
  if (!have_ne) throw std::logic_error("poa_measure: no equilibrium among feasible profiles");
  if (rep.optimum > 0) {
    rep.poa = rep.worst_equilibrium / rep.optimum;
    rep.bound = 3.0 - (queue_energy_term(rep.worst_profile, ctx) + queue_energy_term(rep.optimal_profile, ctx)) /
                          rep.optimum;
  }
  return rep;
}

}  // namespace uavmec
