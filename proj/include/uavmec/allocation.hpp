#pragma once

// Computing and bandwidth shares for a fixed offloading profile. The
// per-server problem min sum_i a_i/z_i + b_i/w_i over two simplices has the
// square-root-proportional solution z_i ~ sqrt(a_i), w_i ~ sqrt(b_i).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <span>
#include <vector>

#include "uavmec/game_context.hpp"

namespace uavmec {

/// Shares indexed by UD; both are 0 for UDs that compute locally.
struct AllocationResult {
  std::vector<double> compute_share;    // z_{s,m} = F_{s,m} / F_s^max
  std::vector<double> bandwidth_share;  // w_{s,m}
};

/// Weight of the execution-delay term: gamma^T * eta * D / F_s^max.
inline double compute_weight(const PlayerInfo& p, const ServerInfo& s) {
  return p.weight_delay * p.task.cycles() / s.compute_capacity;
}

/// Weight of the transmission term: (gamma^T D + gamma^E p D) / r_{s,m}.
inline double bandwidth_weight(const PlayerInfo& p, std::size_t server) {
  return (p.weight_delay * p.task.data_size + p.weight_energy * p.tx_power * p.task.data_size) /
         p.full_rate[server];
}

/// sqrt(w_i) / sum_j sqrt(w_j); uniform when every weight is zero.
inline std::vector<double> sqrt_proportional_shares(std::span<const double> weights) {
  std::vector<double> shares(weights.size(), 0.0);
  if (weights.empty()) return shares;
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    shares[i] = std::sqrt(weights[i]);
    total += shares[i];
  }
  if (total > 0.0) {
    for (auto& s : shares) s /= total;
  } else {
    for (auto& s : shares) s = 1.0 / static_cast<double>(weights.size());
  }
  return shares;
}

struct ServerShares {
  std::vector<double> compute;
  std::vector<double> bandwidth;
};

/// Shares of server `server` among `members` under the context's rule.
inline ServerShares server_shares(const GameContext& ctx, std::size_t server, std::span<const std::size_t> members) {
  ServerShares out;
  if (members.empty()) return out;
  if (ctx.rule == AllocationRule::equal) {
    const double share = 1.0 / static_cast<double>(members.size());
    out.compute.assign(members.size(), share);
    out.bandwidth.assign(members.size(), share);
    return out;
  }
  std::vector<double> a(members.size());
  std::vector<double> b(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& p = ctx.players[members[i]];
    a[i] = compute_weight(p, ctx.servers[server]);
    b[i] = bandwidth_weight(p, server);
  }
  out.compute = sqrt_proportional_shares(a);
  out.bandwidth = sqrt_proportional_shares(b);
  return out;
}

inline AllocationResult allocate(const StrategyProfile& profile, const GameContext& ctx) {
  AllocationResult r;
  r.compute_share.assign(profile.size(), 0.0);
  r.bandwidth_share.assign(profile.size(), 0.0);
  for (std::size_t s = 0; s < ctx.num_servers(); ++s) {
    const auto members = profile.members(static_cast<Choice>(s));
    const auto shares = server_shares(ctx, s, members);
    for (std::size_t i = 0; i < members.size(); ++i) {
      r.compute_share[members[i]] = shares.compute[i];
      r.bandwidth_share[members[i]] = shares.bandwidth[i];
    }
  }
  return r;
}

/// Resource-allocation objective of one server for given shares.
inline double allocation_objective(const GameContext& ctx, std::size_t server, std::span<const std::size_t> members,
                                   std::span<const double> compute, std::span<const double> bandwidth) {
  double total = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& p = ctx.players[members[i]];
    const double a = compute_weight(p, ctx.servers[server]);
    const double b = bandwidth_weight(p, server);
    if (a > 0) total += a / compute[i];
    if (b > 0) total += b / bandwidth[i];
  }
  return total;
}

/// Sum of allocation_objective over all servers.
inline double allocation_objective(const StrategyProfile& profile, const GameContext& ctx,
                                   const AllocationResult& alloc) {
  double total = 0.0;
  for (std::size_t s = 0; s < ctx.num_servers(); ++s) {
    const auto members = profile.members(static_cast<Choice>(s));
    std::vector<double> z, w;
    for (auto m : members) {
      z.push_back(alloc.compute_share[m]);
      w.push_back(alloc.bandwidth_share[m]);
    }
    total += allocation_objective(ctx, s, members, z, w);
  }
  return total;
}

/// Euclidean projection onto the probability simplex.
inline std::vector<double> project_to_simplex(std::vector<double> y) {
  std::vector<double> u = y;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumulative += u[i];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0) theta = t;
  }
  for (auto& v : y) v = std::max(v - theta, 0.0);
  return y;
}

/// Minimizes sum_i a_i / x_i over the simplex with damped Newton steps on
/// sum(x) = 1. Stops when the gradient is equal across the support to
/// relative precision `tol`.
inline std::vector<double> minimize_inverse_sum(std::span<const double> a, double tol = 1e-11,
                                                std::size_t max_iterations = 500) {
  const std::size_t k = a.size();
  std::vector<double> x(k, k ? 1.0 / static_cast<double>(k) : 0.0);
  if (k <= 1) return x;
  std::vector<std::size_t> act;
  for (std::size_t i = 0; i < k; ++i) {
    if (a[i] > 0) act.push_back(i);
  }
  if (act.empty()) return x;
  // Zero weights cost nothing, so all mass goes to the positive ones.
  std::fill(x.begin(), x.end(), 0.0);
  for (auto i : act) x[i] = 1.0 / static_cast<double>(act.size());
  auto value = [&](const std::vector<double>& z) {
    double f = 0.0;
    for (auto i : act) {
      if (!(z[i] > 0)) return std::numeric_limits<double>::infinity();
      f += a[i] / z[i];
    }
    return f;
  };
  double fx = value(x);
  std::vector<double> g(k), hinv(k), dx(k), y(k);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (auto i : act) {
      g[i] = -a[i] / (x[i] * x[i]);
      hinv[i] = x[i] * x[i] * x[i] / (2.0 * a[i]);
      lo = std::min(lo, g[i]);
      hi = std::max(hi, g[i]);
    }
    if (hi - lo <= tol * std::abs(lo)) return x;
    // Newton step on the affine set sum(x) = 1.
    double num = 0.0, den = 0.0;
    for (auto i : act) {
      num += hinv[i] * g[i];
      den += hinv[i];
    }
    const double nu = -num / den;
    for (auto i : act) dx[i] = -hinv[i] * (g[i] + nu);
    double step = 1.0;
    for (auto i : act) {
      if (dx[i] < 0) step = std::min(step, -0.99 * x[i] / dx[i]);
    }
    double slope = 0.0;
    for (auto i : act) slope += g[i] * dx[i];
    for (;;) {
      for (auto i : act) y[i] = x[i] + step * dx[i];
      const double fy = value(y);
      if (fy <= fx + 0.25 * step * slope) {
        x.swap(y);
        fx = fy;
        break;
      }
      step *= 0.5;
      // Round-off floor: the step no longer changes f measurably.
      if (step < 1e-20) {
        if (hi - lo <= 1e3 * tol * std::abs(lo)) return x;
        throw std::runtime_error("minimize_inverse_sum: line search failed");
      }
    }
  }
  throw std::runtime_error("minimize_inverse_sum: no convergence within iteration cap");
}

/// Numeric counterpart of allocate(): each server's two simplex problems are
/// minimized independently of the closed form. Meant for small member counts.
inline AllocationResult allocation_oracle(const StrategyProfile& profile, const GameContext& ctx) {
  AllocationResult r;
  r.compute_share.assign(profile.size(), 0.0);
  r.bandwidth_share.assign(profile.size(), 0.0);
  for (std::size_t s = 0; s < ctx.num_servers(); ++s) {
    const auto members = profile.members(static_cast<Choice>(s));
    if (members.empty()) continue;
    std::vector<double> a, b;
    for (auto m : members) {
      a.push_back(compute_weight(ctx.players[m], ctx.servers[s]));
      b.push_back(bandwidth_weight(ctx.players[m], s));
    }
    const auto z = minimize_inverse_sum(a);
    const auto w = minimize_inverse_sum(b);
    for (std::size_t i = 0; i < members.size(); ++i) {
      r.compute_share[members[i]] = z[i];
      r.bandwidth_share[members[i]] = w[i];
    }
  }
  return r;
}

}  // namespace uavmec
