#pragma once

// Randomized oracle suites: closed-form shares against the numeric
// minimizer, the potential identity and Nash property against brute force,
// the price-of-anarchy sandwich, and the trajectory surrogates and SCA loop
// against sampling and grid search.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "uavmec/allocation.hpp"
#include "uavmec/compute_model.hpp"
#include "uavmec/game_context.hpp"
#include "uavmec/offload_game.hpp"
#include "uavmec/random.hpp"
#include "uavmec/trajectory.hpp"

namespace uavmec {

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::string detail;
  double seconds = 0.0;
};

struct InstanceShape {
  std::size_t num_players = 3;
  std::size_t num_suavs = 1;
  double deadline_min = 0.2;
  double deadline_max = 1.0;
  double max_queue_weight = 0.05;
};

/// Random game snapshot with Table-1-like magnitudes and randomized weights,
/// capacities, spectral efficiencies and queue weights.
inline GameContext random_game_context(Rng& rng, const InstanceShape& shape) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto in = [&](double a, double b) { return a + (b - a) * u(rng); };
  GameContext ctx;
  for (std::size_t n = 0; n < shape.num_suavs; ++n) {
    ctx.servers.push_back({.compute_capacity = in(5e9, 30e9),
                           .bandwidth = in(2e6, 10e6),
                           .is_suav = true,
                           .queue_weight = in(0.0, shape.max_queue_weight)});
  }
  ctx.servers.push_back({.compute_capacity = in(10e9, 40e9), .bandwidth = in(5e6, 20e6), .is_suav = false});
  const double options[] = {1e9, 1.5e9, 2e9};
  for (std::size_t m = 0; m < shape.num_players; ++m) {
    PlayerInfo p;
    p.task = {.data_size = in(0.2e6, 1e6), .intensity = in(500, 1500), .deadline = in(shape.deadline_min, shape.deadline_max)};
    p.local_compute = options[static_cast<std::size_t>(u(rng) * 3.0) % 3];
    p.tx_power = 0.1;
    p.weight_delay = in(0.2, 0.9);
    p.weight_energy = 1.0 - p.weight_delay;
    for (const auto& s : ctx.servers) p.full_rate.push_back(s.bandwidth * in(0.5, 10.0));
    ctx.players.push_back(std::move(p));
  }
  return ctx;
}

inline StrategyProfile random_profile(Rng& rng, const GameContext& ctx) {
  std::uniform_int_distribution<int> pick(-1, static_cast<int>(ctx.num_servers()) - 1);
  StrategyProfile p(ctx.num_players());
  for (std::size_t m = 0; m < p.size(); ++m) p[m] = pick(rng);
  return p;
}

/// Brute-force Nash test over jointly deadline-feasible unilateral deviations.
inline bool brute_force_nash(const StrategyProfile& profile, const GameContext& ctx) {
  const auto base = evaluate_profile(profile, ctx);
  for (std::size_t m = 0; m < profile.size(); ++m) {
    for (Choice c = kLocal; c < static_cast<Choice>(ctx.num_servers()); ++c) {
      if (c == profile[m] || (c == kLocal && !ctx.allow_local)) continue;
      StrategyProfile dev = profile;
      dev[m] = c;
      if (!profile_feasible(dev, ctx)) continue;
      const double u = evaluate_profile(dev, ctx)[m].utility;
      if (u < base[m].utility - 1e-12 * std::max(1.0, std::abs(base[m].utility))) return false;
    }
  }
  return true;
}

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

inline SuiteResult allocation_suite(std::size_t trials = 100, std::uint64_t seed = 11) {
  detail::Stopwatch clock;
  SuiteResult r{.name = "allocation closed form vs numeric minimizer"};
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> members(1, 6);
  double worst_share = 0.0;
  double worst_objective = -1e300;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto k = members(rng);
    auto ctx = random_game_context(rng, {.num_players = k, .num_suavs = 1});
    const StrategyProfile all_on_suav(k, 0);
    const auto closed = allocate(all_on_suav, ctx);
    const auto numeric = allocation_oracle(all_on_suav, ctx);
    for (std::size_t m = 0; m < k; ++m) {
      worst_share = std::max({worst_share, std::abs(closed.compute_share[m] - numeric.compute_share[m]),
                              std::abs(closed.bandwidth_share[m] - numeric.bandwidth_share[m])});
    }
    worst_objective = std::max(worst_objective, allocation_objective(all_on_suav, ctx, closed) -
                                                    allocation_objective(all_on_suav, ctx, numeric));
  }
  r.passed = worst_share <= 1e-6 && worst_objective <= 1e-9;
  std::ostringstream os;
  os << trials << " instances, max share gap " << worst_share << ", max objective excess " << worst_objective;
  r.detail = os.str();
  r.seconds = clock.seconds();
  return r;
}

inline SuiteResult potential_suite(std::size_t identity_trials = 200, std::size_t nash_trials = 100,
                                   std::uint64_t seed = 23) {
  detail::Stopwatch clock;
  SuiteResult r{.name = "potential identity, Nash fixed point, potential descent"};
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> players(1, 5), suavs(1, 2);
  double worst_identity = 0.0;
  for (std::size_t t = 0; t < identity_trials; ++t) {
    const auto ctx = random_game_context(rng, {.num_players = players(rng), .num_suavs = suavs(rng)});
    auto prof = random_profile(rng, ctx);
    std::uniform_int_distribution<std::size_t> who(0, ctx.num_players() - 1);
    std::uniform_int_distribution<int> alt(-1, static_cast<int>(ctx.num_servers()) - 1);
    const auto m = who(rng);
    auto dev = prof;
    dev[m] = alt(rng);
    const double du = evaluate_profile(prof, ctx)[m].utility - evaluate_profile(dev, ctx)[m].utility;
    const double df = potential(prof, ctx) - potential(dev, ctx);
    worst_identity = std::max(worst_identity, std::abs(du - df));
  }
  std::size_t not_nash = 0;
  std::size_t rising_moves = 0;
  std::size_t moves = 0;
  for (std::size_t t = 0; t < nash_trials; ++t) {
    const auto ctx = random_game_context(rng, {.num_players = players(rng), .num_suavs = suavs(rng)});
    Stage1Options opt;
    opt.tie_break = &rng;
    opt.on_move = [&](const MoveRecord& mv) {
      ++moves;
      if (!(mv.delta_potential < 0)) ++rising_moves;
    };
    const auto res = run_stage1(ctx, opt);
    if (!brute_force_nash(res.profile, ctx) || !profile_feasible(res.profile, ctx)) ++not_nash;
  }
  r.passed = worst_identity <= 1e-9 && not_nash == 0 && rising_moves == 0;
  std::ostringstream os;
  os << "max |dU - dF| " << worst_identity << " over " << identity_trials << " deviations; " << not_nash << "/"
     << nash_trials << " fixed points not Nash; " << rising_moves << "/" << moves << " moves without potential decrease";
  r.detail = os.str();
  r.seconds = clock.seconds();
  return r;
}

inline SuiteResult poa_suite(std::size_t trials = 50, std::uint64_t seed = 37, double* max_poa = nullptr) {
  detail::Stopwatch clock;
  SuiteResult r{.name = "price of anarchy within [1, bound]"};
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> players(1, 5), suavs(1, 2);
  double worst = 1.0;
  double tightest = 1e300;
  std::size_t violations = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto ctx = random_game_context(
        rng, {.num_players = players(rng), .num_suavs = suavs(rng), .max_queue_weight = 0.02});
    const auto rep = poa_measure(ctx);
    if (rep.poa < 1.0 - 1e-12 || rep.poa > rep.bound + 1e-12) ++violations;
    worst = std::max(worst, rep.poa);
    tightest = std::min(tightest, rep.bound - rep.poa);
  }
  if (max_poa) *max_poa = worst;
  r.passed = violations == 0;
  std::ostringstream os;
  os << trials << " instances, max PoA " << worst << ", smallest bound slack " << tightest << ", " << violations
     << " violations";
  r.detail = os.str();
  r.seconds = clock.seconds();
  return r;
}

/// Random stage-2 problem around an area of `side` meters.
inline TrajectoryProblem random_trajectory_problem(Rng& rng, std::size_t num_suavs, std::size_t members_per_suav,
                                                   double side = 500.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TrajectoryProblem p;
  p.min_separation = 10.0 + 40.0 * u(rng);
  for (std::size_t n = 0; n < num_suavs; ++n) {
    TrajectorySuav s;
    // Spread SUAVs on a line so the initial separation holds.
    s.position = {side * 0.1 + static_cast<double>(n) * (p.min_separation + 5.0 + 30.0 * u(rng)), side * u(rng)};
    s.propulsion_weight = u(rng) < 0.2 ? 0.0 : 5.0 * u(rng);
    for (std::size_t k = 0; k < members_per_suav; ++k) {
      s.members.push_back({.position = {side * u(rng), side * u(rng)},
                           .rate_weight = 100.0 * (0.1 + u(rng)),
                           .snr_constant = std::pow(10.0, 7.0 + 3.0 * u(rng))});
    }
    p.suavs.push_back(std::move(s));
  }
  return p;
}

inline SuiteResult sca_suite(std::size_t samples = 1000, std::size_t sca_trials = 30, std::size_t grid_trials = 10,
                             std::uint64_t seed = 53) {
  detail::Stopwatch clock;
  SuiteResult r{.name = "surrogate bounds, SCA descent, grid oracle"};
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const PropulsionParams prop;
  const double dt = 1.0;
  double tangency = 0.0;
  double excess = -1e300;
  // f: xi^2 + v^2
  for (std::size_t i = 0; i < samples; ++i) {
    const Vec2 qn{500 * u(rng), 500 * u(rng)};
    const Vec2 ql = qn + Vec2{50 * u(rng) - 25, 50 * u(rng) - 25};
    const double xil = propulsion_slack(distance(ql, qn) / dt, prop.c3);
    const Vec2 q = qn + Vec2{60 * u(rng) - 30, 60 * u(rng) - 30};
    const double xi = 0.01 + 10 * u(rng);
    const double exact_l = xil * xil + squared_norm(ql - qn) / (dt * dt);
    tangency = std::max(tangency, std::abs(surrogate_f(ql, xil, qn, ql, xil, dt) - exact_l) / std::max(1.0, exact_l));
    excess = std::max(excess, surrogate_f(q, xi, qn, ql, xil, dt) - (xi * xi + squared_norm(q - qn) / (dt * dt)));
  }
  // g: log2(1 + phi / (H^2 + d^2))
  for (std::size_t i = 0; i < samples; ++i) {
    const Vec2 qm{500 * u(rng), 500 * u(rng)};
    const Vec2 ql{500 * u(rng), 500 * u(rng)};
    const Vec2 q{500 * u(rng), 500 * u(rng)};
    const double phi = std::pow(10.0, 4.0 + 6.0 * u(rng));
    const double h = 50.0 + 150.0 * u(rng);
    const double exact_l = spectral_efficiency(phi, h, squared_norm(ql - qm));
    tangency = std::max(tangency, std::abs(surrogate_g(ql, ql, qm, phi, h) - exact_l) / std::max(1.0, exact_l));
    excess = std::max(excess, surrogate_g(q, ql, qm, phi, h) - spectral_efficiency(phi, h, squared_norm(q - qm)));
  }
  // h: |qi - qj|^2
  for (std::size_t i = 0; i < samples; ++i) {
    const Vec2 il{500 * u(rng), 500 * u(rng)}, jl{500 * u(rng), 500 * u(rng)};
    const Vec2 qi{500 * u(rng), 500 * u(rng)}, qj{500 * u(rng), 500 * u(rng)};
    const double exact_l = squared_norm(il - jl);
    tangency = std::max(tangency, std::abs(surrogate_h(il, jl, il, jl) - exact_l) / std::max(1.0, exact_l));
    excess = std::max(excess, surrogate_h(qi, qj, il, jl) - squared_norm(qi - qj));
  }

  double worst_rise = 0.0;
  std::size_t separation_bad = 0;
  std::size_t speed_bad = 0;
  for (std::size_t t = 0; t < sca_trials; ++t) {
    std::uniform_int_distribution<std::size_t> ns(1, 3), ms(0, 4);
    const auto p = random_trajectory_problem(rng, ns(rng), ms(rng));
    const auto res = run_stage2(p);
    double prev = trajectory_objective(p, [&] {
      std::vector<Vec2> q;
      for (const auto& s : p.suavs) q.push_back(s.position);
      return q;
    }());
    for (const auto& it : res.history) {
      worst_rise = std::max(worst_rise, (it.true_objective - prev) / std::max(1.0, std::abs(prev)));
      prev = it.true_objective;
    }
    for (std::size_t n = 0; n < p.suavs.size(); ++n) {
      if (distance(res.positions[n], p.suavs[n].position) > p.max_speed * p.slot_duration * (1 + 1e-9)) ++speed_bad;
      for (std::size_t j = n + 1; j < p.suavs.size(); ++j) {
        if (distance(res.positions[n], res.positions[j]) < p.min_separation - 1e-6) ++separation_bad;
      }
    }
  }

  double worst_gap = -1e300;
  for (std::size_t t = 0; t < grid_trials; ++t) {
    auto p = random_trajectory_problem(rng, 1, 1);
    // Keep the UD within a few reach radii so the rate term matters.
    const double ang = 2.0 * std::numbers::pi * u(rng);
    const double dist = 100.0 * u(rng);
    p.suavs[0].members[0].position = p.suavs[0].position + Vec2{dist * std::cos(ang), dist * std::sin(ang)};
    const auto res = run_stage2(p);
    const auto grid = grid_search_single(p, 200);
    worst_gap = std::max(worst_gap, (res.objective - grid.objective) / std::abs(grid.objective));
  }

  r.passed = tangency <= 1e-12 && excess <= 1e-9 && worst_rise <= 1e-6 && worst_gap <= 0.01 && separation_bad == 0 &&
             speed_bad == 0;
  std::ostringstream os;
  os << "tangency " << tangency << ", max bound excess " << excess << ", max objective rise " << worst_rise
     << ", max gap to grid " << worst_gap << ", separation/speed violations " << separation_bad << "/" << speed_bad;
  r.detail = os.str();
  r.seconds = clock.seconds();
  return r;
}

}  // namespace uavmec
