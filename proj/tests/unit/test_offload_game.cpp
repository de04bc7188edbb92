#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "uavmec/offload_game.hpp"
#include "uavmec/verification.hpp"

using namespace uavmec;

namespace {

PlayerInfo player(double bits, double intensity, double deadline, std::vector<double> rates, double f = 1e9) {
  PlayerInfo p;
  p.task = {bits, intensity, deadline};
  p.local_compute = f;
  p.full_rate = std::move(rates);
  return p;
}

ServerInfo suav(double f = 20e9, double q = 0.0) {
  return {.compute_capacity = f, .bandwidth = 5e6, .is_suav = true, .queue_weight = q};
}
ServerInfo luav() { return {.compute_capacity = 30e9, .bandwidth = 10e6, .is_suav = false, .queue_weight = 0}; }

// Utility of every UD rebuilt from the delay/energy formulas with locally
// computed square-root shares.
std::vector<double> rederived_utilities(const StrategyProfile& prof, const GameContext& ctx) {
  std::vector<double> u(prof.size());
  for (std::size_t m = 0; m < prof.size(); ++m) {
    const auto& p = ctx.players[m];
    if (prof[m] == kLocal) {
      u[m] = p.weight_delay * local_delay(p.task, p.local_compute) +
             p.weight_energy * local_energy(p.task, p.local_compute, ctx.cpu_capacitance);
      continue;
    }
    const auto s = static_cast<std::size_t>(prof[m]);
    double zs = 0, ws = 0;
    for (std::size_t i = 0; i < prof.size(); ++i) {
      if (prof[i] != prof[m]) continue;
      const auto& q = ctx.players[i];
      zs += std::sqrt(q.weight_delay * q.task.cycles() / ctx.servers[s].compute_capacity);
      ws += std::sqrt((q.weight_delay * q.task.data_size + q.weight_energy * q.tx_power * q.task.data_size) /
                      q.full_rate[s]);
    }
    const double z = std::sqrt(p.weight_delay * p.task.cycles() / ctx.servers[s].compute_capacity) / zs;
    const double w = std::sqrt((p.weight_delay * p.task.data_size + p.weight_energy * p.tx_power * p.task.data_size) /
                               p.full_rate[s]) /
                     ws;
    const double rate = w * p.full_rate[s];
    u[m] = p.weight_delay * edge_delay(p.task, rate, z * ctx.servers[s].compute_capacity) +
           p.weight_energy * edge_ud_energy(p.task, rate, p.tx_power);
    if (ctx.servers[s].is_suav) u[m] += ctx.servers[s].queue_weight * suav_compute_energy(p.task, ctx.energy_per_cycle);
  }
  return u;
}

}  // namespace

TEST(Utility, ZeroTaskCostsNothing) {
  GameContext ctx;
  ctx.servers = {suav(20e9, 0.3), luav()};
  ctx.players = {player(0, 1000, 1, {1e7, 2e7}), player(5e5, 1000, 1, {1e7, 2e7})};
  const StrategyProfile prof(std::vector<Choice>{kLocal, 0});
  for (Choice c : {kLocal, Choice{0}, Choice{1}}) EXPECT_DOUBLE_EQ(utility(0, c, prof, ctx), 0.0);
}

TEST(Utility, AloneOnSuav) {
  GameContext ctx;
  ctx.servers = {suav(), luav()};
  ctx.players = {player(6e5, 800, 1, {8e6, 9e6})};
  const StrategyProfile prof(std::vector<Choice>{kLocal});
  const auto& p = ctx.players[0];
  const double expect = 0.7 * (6e5 / 8e6 + 800 * 6e5 / 20e9) + 0.3 * p.tx_power * 6e5 / 8e6;
  EXPECT_NEAR(utility(0, 0, prof, ctx), expect, 1e-12);
}

TEST(Utility, MatchesRederivation) {
  Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    const auto ctx = random_game_context(rng, {.num_players = 3, .num_suavs = 2});
    const auto prof = random_profile(rng, ctx);
    const auto got = evaluate_profile(prof, ctx);
    const auto want = rederived_utilities(prof, ctx);
    for (std::size_t m = 0; m < 3; ++m) {
      EXPECT_NEAR(got[m].utility, want[m], 1e-9 * std::max(1.0, want[m]));
      EXPECT_NEAR(utility(m, prof[m], prof, ctx), want[m], 1e-9 * std::max(1.0, want[m]));
    }
  }
}

TEST(BestResponse, AllEdgeInfeasibleFallsBackToLocal) {
  GameContext ctx;
  ctx.servers = {suav(), luav()};
  ctx.players = {player(1e6, 1000, 1e-4, {1e6, 1e6})};
  const auto br = best_response(0, StrategyProfile(1), ctx);
  EXPECT_EQ(br.choices, std::vector<Choice>{kLocal});
  EXPECT_FALSE(br.forced);
}

TEST(BestResponse, DominantSuav) {
  GameContext ctx;
  ctx.servers = {suav(1e13), suav(1e9), luav()};
  ctx.players = {player(1e6, 1000, 1.0, {1e10, 1e6, 1e6}, 1e8)};
  const auto br = best_response(0, StrategyProfile(1), ctx);
  EXPECT_EQ(br.choices, std::vector<Choice>{0});
  // Exhaustive comparison.
  for (std::size_t i = 0; i < br.candidates.size(); ++i) {
    EXPECT_GE(br.candidate_utility[i], br.value);
  }
}

TEST(BestResponse, IdenticalSuavsTie) {
  GameContext ctx;
  ctx.servers = {suav(), suav(), luav()};
  ctx.players = {player(5e5, 1000, 1.0, {5e7, 5e7, 1e5}, 1e8)};
  const auto br = best_response(0, StrategyProfile(1), ctx);
  EXPECT_EQ(br.choices.size(), 2u);
}

TEST(BestResponse, EoForcedWhenNothingFeasible) {
  GameContext ctx;
  ctx.allow_local = false;
  ctx.servers = {suav(), luav()};
  ctx.players = {player(1e6, 1000, 1e-4, {1e6, 2e6})};
  const auto br = best_response(0, StrategyProfile(1), ctx);
  EXPECT_TRUE(br.forced);
  ASSERT_EQ(br.choices.size(), 1u);
  EXPECT_EQ(br.choices[0], 1);
}

TEST(Stage1, SinglePlayerPicksBest) {
  GameContext ctx;
  ctx.servers = {suav(1e13), luav()};
  ctx.players = {player(1e6, 1000, 1.0, {1e10, 1e6}, 1e8)};
  const auto r = run_stage1(ctx);
  EXPECT_EQ(r.profile[0], 0);
  EXPECT_LE(r.sweeps, 2u);
  EXPECT_DOUBLE_EQ(r.allocation.compute_share[0], 1.0);
}

TEST(Stage1, NoFeasibleEdgeStaysLocal) {
  GameContext ctx;
  ctx.servers = {suav(), luav()};
  for (int i = 0; i < 4; ++i) ctx.players.push_back(player(1e6, 1000, 1e-4, {1e6, 1e6}));
  const auto r = run_stage1(ctx);
  EXPECT_EQ(r.profile, StrategyProfile(4));
  EXPECT_EQ(r.sweeps, 1u);
}

TEST(Stage1, ToyFixedPointIsBruteForceNash) {
  Rng rng(32);
  for (int t = 0; t < 100; ++t) {
    const auto ctx = random_game_context(rng, {.num_players = 3, .num_suavs = 1});
    const auto r = run_stage1(ctx);
    EXPECT_TRUE(r.converged);
    EXPECT_TRUE(brute_force_nash(r.profile, ctx));
    EXPECT_TRUE(is_nash(r.profile, ctx).is_nash);
  }
}

TEST(Stage1, TerminatesFeasibleAndDescendsOnLargerInstances) {
  Rng rng(33);
  std::uniform_int_distribution<std::size_t> players(1, 20), suavs(1, 4);
  std::size_t rises = 0, mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto ctx = random_game_context(rng, {.num_players = players(rng), .num_suavs = suavs(rng)});
    Rng ties(t);
    Stage1Options opt;
    opt.tie_break = &ties;
    opt.on_move = [&](const MoveRecord& mv) {
      if (!(mv.delta_potential < 0)) ++rises;
      if (std::abs(mv.delta_potential - mv.delta_utility) > 1e-9 * std::max(1.0, std::abs(mv.delta_utility))) {
        ++mismatches;
      }
    };
    const auto r = run_stage1(ctx, opt);
    ASSERT_TRUE(r.converged);
    ASSERT_TRUE(profile_feasible(r.profile, ctx));
    if (ctx.num_players() <= 8) ASSERT_TRUE(is_nash(r.profile, ctx).is_nash);
  }
  EXPECT_EQ(rises, 0u);
  EXPECT_EQ(mismatches, 0u);
}

TEST(Potential, AllLocalIsSumOfLocalUtilities) {
  Rng rng(34);
  const auto ctx = random_game_context(rng, {.num_players = 5, .num_suavs = 2});
  const StrategyProfile prof(5);
  double s = 0;
  for (std::size_t m = 0; m < 5; ++m) s += local_outcome(ctx, m).utility;
  EXPECT_NEAR(potential(prof, ctx), s, 1e-12);
}

TEST(Potential, ZeroTasksGiveZero) {
  GameContext ctx;
  ctx.servers = {suav(20e9, 0.5), luav()};
  for (int i = 0; i < 3; ++i) ctx.players.push_back(player(0, 1000, 1, {1e7, 1e7}));
  EXPECT_EQ(potential(StrategyProfile(std::vector<Choice>{kLocal, 0, 1}), ctx), 0.0);
}

TEST(Potential, UnilateralDeviationIdentity) {
  Rng rng(35);
  std::uniform_int_distribution<std::size_t> players(1, 5), suavs(1, 2);
  for (int t = 0; t < 200; ++t) {
    const auto ctx = random_game_context(rng, {.num_players = players(rng), .num_suavs = suavs(rng)});
    const auto prof = random_profile(rng, ctx);
    std::uniform_int_distribution<std::size_t> who(0, ctx.num_players() - 1);
    std::uniform_int_distribution<int> to(-1, static_cast<int>(ctx.num_servers()) - 1);
    const auto m = who(rng);
    auto dev = prof;
    dev[m] = to(rng);
    const double du = rederived_utilities(prof, ctx)[m] - rederived_utilities(dev, ctx)[m];
    const double df = potential(prof, ctx) - potential(dev, ctx);
    EXPECT_NEAR(du, df, 1e-9);
  }
}

TEST(Nash, AllLocalWithDominantSuavHasWitness) {
  GameContext ctx;
  ctx.servers = {suav(1e13), luav()};
  ctx.players = {player(1e6, 1000, 1.0, {1e10, 1e6}, 1e8), player(1e6, 1000, 1.0, {1e10, 1e6}, 1e8)};
  const auto chk = is_nash(StrategyProfile(2), ctx);
  EXPECT_FALSE(chk.is_nash);
  EXPECT_EQ(chk.better, 0);
  EXPECT_GT(chk.gain, 0.0);
}

TEST(Nash, SinglePlayerNashIffBestResponse) {
  Rng rng(36);
  for (int t = 0; t < 50; ++t) {
    const auto ctx = random_game_context(rng, {.num_players = 1, .num_suavs = 2});
    for (Choice c = kLocal; c < static_cast<Choice>(ctx.num_servers()); ++c) {
      const StrategyProfile prof(std::vector<Choice>{c});
      if (!profile_feasible(prof, ctx)) continue;
      const auto br = best_response(0, prof, ctx);
      const bool in_b = std::find(br.choices.begin(), br.choices.end(), c) != br.choices.end();
      EXPECT_EQ(is_nash(prof, ctx).is_nash, in_b);
    }
  }
}

TEST(Poa, SingleUdIsOne) {
  Rng rng(37);
  for (int t = 0; t < 20; ++t) {
    const auto ctx = random_game_context(rng, {.num_players = 1, .num_suavs = 2});
    EXPECT_NEAR(poa_measure(ctx).poa, 1.0, 1e-12);
  }
}

TEST(Poa, SymmetricPairIsOne) {
  GameContext ctx;
  ctx.servers = {suav(20e9), luav()};
  ctx.players = {player(5e5, 1000, 1.0, {2e7, 1e5}), player(5e5, 1000, 1.0, {2e7, 1e5})};
  const auto rep = poa_measure(ctx);
  EXPECT_NEAR(rep.poa, 1.0, 1e-12);
}

TEST(Poa, SandwichOnRandomInstances) {
  Rng rng(38);
  std::uniform_int_distribution<std::size_t> players(1, 5), suavs(1, 2);
  for (int t = 0; t < 50; ++t) {
    const auto ctx = random_game_context(rng, {.num_players = players(rng), .num_suavs = suavs(rng)});
    const auto rep = poa_measure(ctx);
    EXPECT_GE(rep.poa, 1.0 - 1e-12);
    EXPECT_LE(rep.poa, rep.bound + 1e-12);
  }
}

TEST(Poa, EnumerationBudgetEnforced) {
  Rng rng(39);
  const auto ctx = random_game_context(rng, {.num_players = 12, .num_suavs = 2});
  EXPECT_THROW(poa_measure(ctx, 1000), std::length_error);
}
