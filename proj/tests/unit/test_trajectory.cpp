#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "uavmec/trajectory.hpp"
#include "uavmec/verification.hpp"

using namespace uavmec;

namespace {

double exact_f(const Vec2& q, double xi, const Vec2& qn, double dt) { return xi * xi + squared_norm(q - qn) / (dt * dt); }

double exact_g(const Vec2& q, const Vec2& qm, double phi, double h) {
  return std::log2(1.0 + phi / (h * h + squared_norm(q - qm)));
}

double min_power_speed(const PropulsionParams& p, double vmax) {
  double best_v = 0, best = 1e300;
  for (double v = 0; v <= vmax; v += 1e-4) {
    const double w = propulsion_power(v, p);
    if (w < best) {
      best = w;
      best_v = v;
    }
  }
  return best_v;
}

TrajectoryProblem single(const Vec2& pos, double prop_weight) {
  TrajectoryProblem p;
  p.suavs.push_back({.position = pos, .propulsion_weight = prop_weight, .members = {}});
  return p;
}

}  // namespace

TEST(SurrogateF, TangentAndBelow) {
  Rng rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const PropulsionParams prop;
  for (int i = 0; i < 1000; ++i) {
    const double dt = 0.5 + u(rng);
    const Vec2 qn{500 * u(rng), 500 * u(rng)};
    const Vec2 ql = qn + Vec2{40 * u(rng) - 20, 40 * u(rng) - 20};
    const double xil = propulsion_slack(distance(ql, qn) / dt, prop.c3);
    const double at = exact_f(ql, xil, qn, dt);
    EXPECT_NEAR(surrogate_f(ql, xil, qn, ql, xil, dt), at, 1e-12 * std::max(1.0, at));
    const Vec2 q = qn + Vec2{80 * u(rng) - 40, 80 * u(rng) - 40};
    const double xi = 1e-3 + 20 * u(rng);
    EXPECT_LE(surrogate_f(q, xi, qn, ql, xil, dt), exact_f(q, xi, qn, dt) + 1e-9);
  }
}

TEST(SurrogateF, StationaryExpansionHasNoPositionTerm) {
  const Vec2 qn{10, 20};
  const double xil = std::pow(263.85, 0.25);
  const double a = surrogate_f({10, 20}, 3.0, qn, qn, xil, 1.0);
  const double b = surrogate_f({30, -5}, 3.0, qn, qn, xil, 1.0);
  EXPECT_DOUBLE_EQ(a, b);
  EXPECT_DOUBLE_EQ(propulsion_slack(0.0, 263.85), xil);
}

TEST(SurrogateG, TangentAndBelow) {
  Rng rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 qm{500 * u(rng), 500 * u(rng)}, ql{500 * u(rng), 500 * u(rng)}, q{500 * u(rng), 500 * u(rng)};
    const double phi = std::pow(10.0, 3.0 + 8.0 * u(rng));
    const double h = 30.0 + 200.0 * u(rng);
    const double at = exact_g(ql, qm, phi, h);
    EXPECT_NEAR(surrogate_g(ql, ql, qm, phi, h), at, 1e-12 * std::max(1.0, at));
    EXPECT_LE(surrogate_g(q, ql, qm, phi, h), exact_g(q, qm, phi, h) + 1e-9);
  }
}

TEST(SurrogateG, VanishesWithPhi) {
  const Vec2 qm{0, 0}, ql{30, 40}, q{10, 10};
  EXPECT_NEAR(exact_g(q, qm, 1e-12, 100), 0.0, 1e-15);
  EXPECT_NEAR(surrogate_g(q, ql, qm, 1e-12, 100), 0.0, 1e-15);
}

TEST(SurrogateH, TangentAndBelow) {
  Rng rng(43);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 il{500 * u(rng), 500 * u(rng)}, jl{500 * u(rng), 500 * u(rng)};
    const Vec2 qi{500 * u(rng), 500 * u(rng)}, qj{500 * u(rng), 500 * u(rng)};
    const double at = squared_norm(il - jl);
    EXPECT_NEAR(surrogate_h(il, jl, il, jl), at, 1e-12 * std::max(1.0, at));
    EXPECT_LE(surrogate_h(qi, qj, il, jl), squared_norm(qi - qj) + 1e-9);
  }
  EXPECT_EQ(surrogate_h({1, 2}, {7, 7}, {3, 3}, {3, 3}), 0.0);
}

TEST(Stage2, EmptyAssignmentFliesAtMinimumPowerSpeed) {
  auto p = single({250, 250}, 2.0);
  const double target = min_power_speed(p.propulsion, p.max_speed);
  const auto r = run_stage2(p);
  const double v = distance(r.positions[0], p.suavs[0].position) / p.slot_duration;
  EXPECT_NEAR(v, target, 0.1);
  EXPECT_NEAR(r.objective, 2.0 * propulsion_power(target, p.propulsion), 1e-3 * r.objective);
}

TEST(Stage2, EmptyAssignmentCappedBySpeedLimit) {
  auto p = single({250, 250}, 2.0);
  p.max_speed = 6.0;
  const auto r = run_stage2(p);
  EXPECT_NEAR(distance(r.positions[0], p.suavs[0].position), 6.0, 1e-3);
  EXPECT_LE(distance(r.positions[0], p.suavs[0].position), 6.0 * (1 + 1e-9));
}

TEST(Stage2, NothingToDoConvergesQuickly) {
  auto p = single({250, 250}, 0.0);
  const auto r = run_stage2(p);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.history.size(), 2u);
  EXPECT_EQ(r.objective, 0.0);
}

TEST(Stage2, MovesTowardReachableUd) {
  for (double w : {0.0, 1.0}) {
    auto p = single({100, 100}, w);
    const Vec2 ud{160, 130};
    p.suavs[0].members.push_back({.position = ud, .rate_weight = 200.0, .snr_constant = 1e9});
    const auto r = run_stage2(p);
    EXPECT_LT(distance(r.positions[0], ud), distance(p.suavs[0].position, ud));
    EXPECT_LT(r.objective, trajectory_objective(p, {p.suavs[0].position}));
  }
}

TEST(Stage2, ZeroSpeedKeepsPosition) {
  auto p = single({100, 100}, 1.5);
  p.max_speed = 0.0;
  p.suavs[0].members.push_back({.position = {300, 300}, .rate_weight = 50.0, .snr_constant = 1e9});
  const auto r = run_stage2(p);
  EXPECT_EQ(r.positions[0], p.suavs[0].position);
  const double rate_cost = 50.0 / exact_g({100, 100}, {300, 300}, 1e9, p.altitude);
  EXPECT_NEAR(r.objective, 1.5 * hover_power(p.propulsion) + rate_cost, 1e-9 * r.objective);
}

TEST(Stage2, SqueezedPairKeepsSeparation) {
  TrajectoryProblem p;
  p.min_separation = 60.0;
  const Vec2 ud{250, 250};
  p.suavs.push_back({.position = {215, 250}, .propulsion_weight = 0.2, .members = {}});
  p.suavs.push_back({.position = {285, 250}, .propulsion_weight = 0.2, .members = {}});
  for (auto& s : p.suavs) s.members.push_back({.position = ud, .rate_weight = 500.0, .snr_constant = 1e9});
  const auto r = run_stage2(p);
  EXPECT_GE(distance(r.positions[0], r.positions[1]), p.min_separation - 1e-6);
  for (int n = 0; n < 2; ++n) {
    EXPECT_LE(distance(r.positions[n], p.suavs[n].position), p.max_speed * p.slot_duration * (1 + 1e-9));
  }
}

TEST(Stage2, TrueObjectiveNonIncreasingAndFeasible) {
  Rng rng(44);
  std::uniform_int_distribution<std::size_t> suavs(1, 3), members(0, 4);
  for (int t = 0; t < 30; ++t) {
    const auto p = random_trajectory_problem(rng, suavs(rng), members(rng));
    const auto r = run_stage2(p);
    for (std::size_t l = 1; l < r.history.size(); ++l) {
      const double prev = r.history[l - 1].true_objective;
      EXPECT_LE(r.history[l].true_objective, prev + 1e-6 * std::max(1.0, std::abs(prev)));
    }
    for (std::size_t i = 0; i < p.suavs.size(); ++i) {
      EXPECT_LE(distance(r.positions[i], p.suavs[i].position), p.max_speed * p.slot_duration * (1 + 1e-9));
      for (std::size_t j = i + 1; j < p.suavs.size(); ++j) {
        EXPECT_GE(distance(r.positions[i], r.positions[j]), p.min_separation - 1e-6);
      }
    }
  }
}

TEST(Stage2, WithinOnePercentOfGridSearch) {
  Rng rng(45);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    auto p = random_trajectory_problem(rng, 1, 1);
    const double ang = 2 * std::numbers::pi * u(rng);
    const double dist = 120 * u(rng);
    p.suavs[0].members[0].position = p.suavs[0].position + Vec2{dist * std::cos(ang), dist * std::sin(ang)};
    const auto r = run_stage2(p);
    // Test-local grid over the reachable disk.
    const double rad = p.max_speed * p.slot_duration;
    double best = trajectory_objective(p, {p.suavs[0].position});
    for (int i = 0; i < 200; ++i) {
      for (int j = 0; j < 200; ++j) {
        const Vec2 off{-rad + 2 * rad * i / 199.0, -rad + 2 * rad * j / 199.0};
        if (squared_norm(off) > rad * rad) continue;
        best = std::min(best, trajectory_objective(p, {p.suavs[0].position + off}));
      }
    }
    EXPECT_LE(r.objective, best * 1.01) << "trial " << t;
  }
}

TEST(Subproblem, SolverContractAndSlackIdentity) {
  Rng rng(46);
  for (int t = 0; t < 20; ++t) {
    auto p = random_trajectory_problem(rng, 2, 2);
    for (auto& s : p.suavs) s.propulsion_weight = 0.5 + 2.0 * (t % 3);
    const auto r = run_stage2(p);
    ASSERT_TRUE(r.converged);
    // Expanding at the converged point reproduces it.
    const auto sol = solve_convex_subproblem(p, r.positions);
    EXPECT_LE(sol.kkt_residual, 1e-6);
    EXPECT_LE(sol.max_constraint, 1e-8);
    for (std::size_t n = 0; n < p.suavs.size(); ++n) {
      const double xi = sol.xi[n];
      const double v = distance(sol.positions[n], p.suavs[n].position) / p.slot_duration;
      const double lhs = p.propulsion.c3 / (xi * xi);
      const double rhs = xi * xi + v * v;
      EXPECT_LE(lhs, rhs * (1 + 1e-4));
      EXPECT_NEAR(lhs / rhs, 1.0, 1e-4);
    }
  }
}

TEST(Problem, RejectsBadInputs) {
  auto p = single({0, 0}, -1.0);
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = single({0, 0}, 1.0);
  p.tolerance = 0.0;
  EXPECT_THROW(run_stage2(p), std::invalid_argument);
}
