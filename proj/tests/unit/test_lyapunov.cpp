#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "uavmec/config.hpp"
#include "uavmec/lyapunov.hpp"

using namespace uavmec;

TEST(Queues, UpdateExamples) {
  auto q = QueueState::empty(1, 4.0, 4.0);
  q.compute = {5.0};
  q.propulsion = {1.0};
  const std::vector<double> ec{3.0}, ep{0.0};
  const auto next = update_queues(q, ec, ep);
  EXPECT_DOUBLE_EQ(next.compute[0], 4.0);
  EXPECT_DOUBLE_EQ(next.propulsion[0], 0.0);

  const auto empty = QueueState::empty(1, 4.0, 4.0);
  const std::vector<double> zero{0.0};
  EXPECT_EQ(update_queues(empty, zero, zero), empty);
}

TEST(Queues, StartEmptyWithSplitBudget) {
  const auto c = desk_profile();
  const auto q = QueueState::empty(c);
  EXPECT_EQ(q.size(), c.num_suavs);
  for (std::size_t n = 0; n < q.size(); ++n) {
    EXPECT_EQ(q.compute[n], 0.0);
    EXPECT_EQ(q.propulsion[n], 0.0);
  }
  EXPECT_NEAR(q.compute_budget + q.propulsion_budget, c.suav_energy_budget, 1e-12);
}

TEST(Queues, NeverNegativeAndIdleWithinBudget) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  auto q = QueueState::empty(3, 5.0, 5.0);
  auto calm = q;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> ec(3), ep(3), within(3);
    for (int n = 0; n < 3; ++n) {
      ec[n] = u(rng);
      ep[n] = u(rng);
      within[n] = u(rng) / 2.0;
    }
    q = update_queues(q, ec, ep);
    calm = update_queues(calm, within, within);
    for (int n = 0; n < 3; ++n) {
      ASSERT_GE(q.compute[n], 0.0);
      ASSERT_GE(q.propulsion[n], 0.0);
      ASSERT_EQ(calm.compute[n], 0.0);
      ASSERT_EQ(calm.propulsion[n], 0.0);
    }
  }
}

TEST(Queues, RejectsNegativeEnergyAndSizeMismatch) {
  const auto q = QueueState::empty(2, 1.0, 1.0);
  const std::vector<double> bad{-1.0, 0.0}, ok{0.0, 0.0}, short_{0.0};
  EXPECT_THROW(update_queues(q, bad, ok), std::invalid_argument);
  EXPECT_THROW(update_queues(q, short_, ok), std::invalid_argument);
}

TEST(DriftPlusPenalty, Examples) {
  auto q = QueueState::empty(1, 1.0, 1.0);
  q.compute = {2.0};
  const std::vector<double> ec{3.0}, ep{7.0}, costs{2.0, 3.0};
  EXPECT_DOUBLE_EQ(dpp_objective(ec, ep, q, 1.0, costs), 11.0);
  const auto zero = QueueState::empty(1, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(dpp_objective(ec, ep, zero, 50.0, costs), 250.0);
  q.propulsion = {0.5};
  EXPECT_DOUBLE_EQ(dpp_objective(ec, ep, q, 0.0, costs), 6.0 + 3.5);
}

TEST(DriftBound, SymmetricAndZeroBudgets) {
  const double emc = 8.0, emp = 6.0;
  const std::vector<double> bc{emc / 2}, bp{emp / 2};
  EXPECT_DOUBLE_EQ(drift_bound_constant(bc, bp, emc, emp), 0.5 * 16.0 + 0.5 * 9.0);
  const std::vector<double> z{0.0};
  EXPECT_DOUBLE_EQ(drift_bound_constant(z, z, emc, emp), 0.5 * 64.0 + 0.5 * 36.0);
  const double w = drift_bound_constant(paper_profile());
  EXPECT_TRUE(std::isfinite(w));
  EXPECT_GT(w, 0.0);
}
