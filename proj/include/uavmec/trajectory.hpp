#pragma once

// Next-slot SUAV positions. Propulsion and rate terms are moved into slack
// variables; the resulting non-convex constraints are replaced by first-order
// lower bounds around the previous iterate and the convex problem is solved
// jointly for all SUAVs until the surrogate optimum settles.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "uavmec/barrier_solver.hpp"
#include "uavmec/compute_model.hpp"
#include "uavmec/geometry.hpp"

namespace uavmec {

struct TrajectoryMember {
  Vec2 position;
  double rate_weight = 0.0;   // V (gamma^T D + gamma^E p D) / (w* B_n)
  double snr_constant = 0.0;  // SNR times squared slant distance
};

struct TrajectorySuav {
  Vec2 position;                 // q_n(t)
  double propulsion_weight = 0;  // Q_n^p
  std::vector<TrajectoryMember> members;
};

struct TrajectoryProblem {
  std::vector<TrajectorySuav> suavs;
  double altitude = 100.0;
  double slot_duration = 1.0;
  double max_speed = 25.0;
  double min_separation = 10.0;
  PropulsionParams propulsion;
  double tolerance = 0.01;
  std::size_t max_iterations = 50;
  std::size_t extra_starts = 8;

  void validate() const {
    if (!(altitude > 0) || !(slot_duration > 0) || max_speed < 0 || !(min_separation > 0) || !(tolerance > 0)) {
      throw std::invalid_argument("TrajectoryProblem: invalid scalar parameter");
    }
    for (const auto& s : suavs) {
      if (s.propulsion_weight < 0) throw std::invalid_argument("TrajectoryProblem: queue weight must be >= 0");
      for (const auto& m : s.members) {
        if (!(m.snr_constant > 0) || m.rate_weight < 0) {
          throw std::invalid_argument("TrajectoryProblem: member constants must be positive");
        }
      }
    }
  }
};

inline double spectral_efficiency(double snr_constant, double altitude, double squared_distance) {
  return std::log2(1.0 + snr_constant / (altitude * altitude + squared_distance));
}

/// Induced-power slack value at a given speed.
inline double propulsion_slack(double speed, double c3) { return induced_velocity_term(speed, c3); }

/// Lower bound of xi^2 + v^2 around (q_l, xi_l); v = |q - q_n| / dt.
inline double surrogate_f(const Vec2& q, double xi, const Vec2& q_n, const Vec2& q_l, double xi_l, double dt) {
  const Vec2 d = q - q_n;
  const Vec2 dl = q_l - q_n;
  return xi_l * xi_l + 2.0 * xi_l * (xi - xi_l) + (2.0 * dot(dl, d) - squared_norm(dl)) / (dt * dt);
}

/// Lower bound of log2(1 + phi / (H^2 + |q - q_m|^2)), linear in the squared
/// distance around q_l.
inline double surrogate_g(const Vec2& q, const Vec2& q_l, const Vec2& q_m, double snr_constant, double altitude) {
  const double base = altitude * altitude + squared_norm(q_l - q_m);
  const double slope = snr_constant * std::numbers::log2e / ((snr_constant + base) * base);
  return spectral_efficiency(snr_constant, altitude, squared_norm(q_l - q_m)) -
         slope * (squared_norm(q - q_m) - squared_norm(q_l - q_m));
}

/// Lower bound of |q_i - q_j|^2 around (qi_l, qj_l).
inline double surrogate_h(const Vec2& qi, const Vec2& qj, const Vec2& qi_l, const Vec2& qj_l) {
  const Vec2 dl = qi_l - qj_l;
  return 2.0 * dot(dl, (qi - qi_l) - (qj - qj_l)) + squared_norm(dl);
}

/// Stage-2 objective at candidate next positions.
inline double trajectory_objective(const TrajectoryProblem& p, const std::vector<Vec2>& next) {
  double total = 0.0;
  for (std::size_t n = 0; n < p.suavs.size(); ++n) {
    const auto& s = p.suavs[n];
    for (const auto& m : s.members) {
      total += m.rate_weight / spectral_efficiency(m.snr_constant, p.altitude, squared_norm(next[n] - m.position));
    }
    const double v = distance(next[n], s.position) / p.slot_duration;
    total += s.propulsion_weight * propulsion_power(v, p.propulsion) * p.slot_duration;
  }
  return total;
}

struct SubproblemSolution {
  std::vector<Vec2> positions;
  std::vector<double> xi;                  // NaN when the SUAV has no propulsion weight
  std::vector<std::vector<double>> zeta;
  double objective = 0.0;                  // surrogate-problem optimum
  double kkt_residual = 0.0;
  double max_constraint = 0.0;
};

namespace detail {

class TrajectorySubproblem final : public BarrierProblem {
 public:
  TrajectorySubproblem(const TrajectoryProblem& p, const std::vector<Vec2>& expansion) : p_(p), exp_(expansion) {
    const std::size_t N = p.suavs.size();
    int next = static_cast<int>(2 * N);
    xi_.assign(N, -1);
    xi_l_.assign(N, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
      if (p.suavs[n].propulsion_weight > 0) {
        xi_[n] = next++;
        xi_l_[n] = propulsion_slack(distance(exp_[n], p.suavs[n].position) / p.slot_duration, p.propulsion.c3);
      }
    }
    zeta_.resize(N);
    for (std::size_t n = 0; n < N; ++n) {
      for (const auto& m : p.suavs[n].members) {
        zeta_[n].push_back(next++);
        const double base = p.altitude * p.altitude + squared_norm(exp_[n] - m.position);
        rows_.push_back({Row::rate, n, zeta_[n].size() - 1, 0});
        rate_g_.push_back(spectral_efficiency(m.snr_constant, p.altitude, squared_norm(exp_[n] - m.position)));
        rate_slope_.push_back(m.snr_constant * std::numbers::log2e / ((m.snr_constant + base) * base));
        rows_.push_back({Row::positive, n, zeta_[n].size() - 1, 0});
      }
    }
    dim_ = next;
    for (std::size_t n = 0; n < N; ++n) {
      if (xi_[n] >= 0) rows_.push_back({Row::propulsion, n, 0, 0});
      rows_.push_back({Row::speed, n, 0, 0});
    }
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = i + 1; j < N; ++j) rows_.push_back({Row::separation, i, 0, j});
    }
  }

  int dimension() const override { return dim_; }
  int num_constraints() const override { return static_cast<int>(rows_.size()); }

  double objective(const Eigen::VectorXd& x, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const override {
    if (grad) grad->setZero(dim_);
    if (hess) hess->setZero(dim_, dim_);
    const double dt = p_.slot_duration;
    const auto& pp = p_.propulsion;
    double f = 0.0;
    for (std::size_t n = 0; n < p_.suavs.size(); ++n) {
      const auto& s = p_.suavs[n];
      for (std::size_t k = 0; k < s.members.size(); ++k) {
        const int z = zeta_[n][k];
        const double c = s.members[k].rate_weight;
        f += c / x(z);
        if (grad) (*grad)(z) = -c / (x(z) * x(z));
        if (hess) (*hess)(z, z) = 2.0 * c / (x(z) * x(z) * x(z));
      }
      if (xi_[n] < 0) continue;
      // w * dt * (C1 (1 + 3 |d|^2 / (U^2 dt^2)) + C2 xi + C4 |d|^3 / dt^3)
      const double w = s.propulsion_weight * dt;
      const Eigen::Vector2d d(x(2 * n) - s.position.x, x(2 * n + 1) - s.position.y);
      const double r = d.norm();
      const double a2 = 3.0 * pp.c1 / (pp.tip_speed * pp.tip_speed * dt * dt);
      const double a3 = pp.c4 / (dt * dt * dt);
      f += w * (pp.c1 + a2 * r * r + pp.c2 * x(xi_[n]) + a3 * r * r * r);
      if (grad) {
        grad->segment<2>(2 * n) += w * (2.0 * a2 * d + 3.0 * a3 * r * d);
        (*grad)(xi_[n]) = w * pp.c2;
      }
      if (hess) {
        Eigen::Matrix2d h = 2.0 * a2 * Eigen::Matrix2d::Identity();
        h += 3.0 * a3 * r * Eigen::Matrix2d::Identity();
        if (r > 0) h += 3.0 * a3 * d * d.transpose() / r;
        hess->block<2, 2>(2 * n, 2 * n) += w * h;
      }
    }
    return f;
  }

  void constraint(int i, const Eigen::VectorXd& x, LocalTerm& out, bool derivatives) const override {
    const Row& row = rows_[static_cast<std::size_t>(i)];
    const std::size_t n = row.n;
    const int qx = static_cast<int>(2 * n);
    const Eigen::Vector2d q(x(qx), x(qx + 1));
    const Vec2 qn = p_.suavs[n].position;
    out.size = 0;
    if (derivatives) {
      out.grad.setZero();
      out.hess.setZero();
    }
    switch (row.kind) {
      case Row::rate: {
        // zeta - g_l + slope (|q - q_m|^2 - |q_l - q_m|^2) < 0
        const auto& m = p_.suavs[n].members[row.k];
        const std::size_t idx = rate_index(n, row.k);
        const int z = zeta_[n][row.k];
        const Eigen::Vector2d dm(q(0) - m.position.x, q(1) - m.position.y);
        const double slope = rate_slope_[idx];
        out.value = x(z) - rate_g_[idx] + slope * (dm.squaredNorm() - squared_norm(exp_[n] - m.position));
        if (derivatives) {
          out.size = 3;
          out.vars = {qx, qx + 1, z, 0, 0};
          out.grad.head<2>() = 2.0 * slope * dm;
          out.grad(2) = 1.0;
          out.hess(0, 0) = out.hess(1, 1) = 2.0 * slope;
        }
        break;
      }
      case Row::positive: {
        const int z = zeta_[n][row.k];
        out.value = -x(z);
        if (derivatives) {
          out.size = 1;
          out.vars[0] = z;
          out.grad(0) = -1.0;
        }
        break;
      }
      case Row::propulsion: {
        // C3 / xi^2 - f_l(q, xi) < 0
        const int k = xi_[n];
        const double xi = x(k);
        const double dt2 = p_.slot_duration * p_.slot_duration;
        const Vec2 dl = exp_[n] - qn;
        const double c3 = p_.propulsion.c3;
        out.value = c3 / (xi * xi) - surrogate_f({q(0), q(1)}, xi, qn, exp_[n], xi_l_[n], p_.slot_duration);
        if (derivatives) {
          out.size = 3;
          out.vars = {qx, qx + 1, k, 0, 0};
          out.grad(0) = -2.0 * dl.x / dt2;
          out.grad(1) = -2.0 * dl.y / dt2;
          out.grad(2) = -2.0 * c3 / (xi * xi * xi) - 2.0 * xi_l_[n];
          out.hess(2, 2) = 6.0 * c3 / (xi * xi * xi * xi);
        }
        break;
      }
      case Row::speed: {
        const double r = p_.max_speed * p_.slot_duration;
        const Eigen::Vector2d d(q(0) - qn.x, q(1) - qn.y);
        out.value = d.squaredNorm() - r * r;
        if (derivatives) {
          out.size = 2;
          out.vars = {qx, qx + 1, 0, 0, 0};
          out.grad.head<2>() = 2.0 * d;
          out.hess(0, 0) = out.hess(1, 1) = 2.0;
        }
        break;
      }
      case Row::separation: {
        const std::size_t j = row.other;
        const int qj = static_cast<int>(2 * j);
        const Vec2 dl = exp_[n] - exp_[j];
        out.value = p_.min_separation * p_.min_separation -
                    surrogate_h({q(0), q(1)}, {x(qj), x(qj + 1)}, exp_[n], exp_[j]);
        if (derivatives) {
          out.size = 4;
          out.vars = {qx, qx + 1, qj, qj + 1, 0};
          out.grad(0) = -2.0 * dl.x;
          out.grad(1) = -2.0 * dl.y;
          out.grad(2) = 2.0 * dl.x;
          out.grad(3) = 2.0 * dl.y;
        }
        break;
      }
    }
  }

  bool in_domain(const Eigen::VectorXd& x) const override {
    for (std::size_t n = 0; n < xi_.size(); ++n) {
      if (xi_[n] >= 0 && !(x(xi_[n]) > 0)) return false;
      for (int z : zeta_[n]) {
        if (!(x(z) > 0)) return false;
      }
    }
    return x.allFinite();
  }

  Eigen::VectorXd start() const {
    Eigen::VectorXd x(dim_);
    for (std::size_t n = 0; n < p_.suavs.size(); ++n) {
      x(2 * n) = exp_[n].x;
      x(2 * n + 1) = exp_[n].y;
      if (xi_[n] >= 0) x(xi_[n]) = 1.01 * xi_l_[n] + 1e-6;
      for (std::size_t k = 0; k < zeta_[n].size(); ++k) x(zeta_[n][k]) = 0.5 * rate_g_[rate_index(n, k)];
    }
    return x;
  }

  SubproblemSolution unpack(const BarrierResult& r) const {
    SubproblemSolution s;
    for (std::size_t n = 0; n < p_.suavs.size(); ++n) {
      s.positions.push_back({r.x(2 * n), r.x(2 * n + 1)});
      s.xi.push_back(xi_[n] >= 0 ? r.x(xi_[n]) : std::numeric_limits<double>::quiet_NaN());
      std::vector<double> z;
      for (int k : zeta_[n]) z.push_back(r.x(k));
      s.zeta.push_back(std::move(z));
    }
    s.objective = r.objective;
    s.kkt_residual = r.kkt_residual;
    s.max_constraint = r.max_constraint;
    return s;
  }

 private:
  struct Row {
    enum Kind { rate, positive, propulsion, speed, separation } kind;
    std::size_t n;
    std::size_t k;
    std::size_t other;
  };

  std::size_t rate_index(std::size_t n, std::size_t k) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i) idx += zeta_[i].size();
    return idx + k;
  }

  const TrajectoryProblem& p_;
  std::vector<Vec2> exp_;
  std::vector<int> xi_;
  std::vector<double> xi_l_;
  std::vector<std::vector<int>> zeta_;
  std::vector<double> rate_g_;
  std::vector<double> rate_slope_;
  std::vector<Row> rows_;
  int dim_ = 0;
};

}  // namespace detail

/// One convex surrogate problem around `expansion`, which must satisfy the
/// speed and separation limits.
inline SubproblemSolution solve_convex_subproblem(const TrajectoryProblem& p, const std::vector<Vec2>& expansion,
                                                  const BarrierOptions& opt = {}) {
  if (expansion.size() != p.suavs.size()) throw std::invalid_argument("one expansion point per SUAV required");
  detail::TrajectorySubproblem sub(p, expansion);
  const auto r = solve_barrier(sub, sub.start(), opt);
  return sub.unpack(r);
}

struct Stage2Iteration {
  std::size_t iteration = 0;
  double surrogate_objective = 0.0;
  double true_objective = 0.0;
  double step_norm = 0.0;
};

struct Stage2Result {
  std::vector<Vec2> positions;
  std::vector<Stage2Iteration> history;
  bool converged = false;
  bool hit_iteration_cap = false;
  double objective = 0.0;  // stage-2 objective at `positions`
};

namespace detail {

inline Stage2Result run_sca(const TrajectoryProblem& p, std::vector<Vec2> current,
                            const std::function<void(const Stage2Iteration&)>& trace) {
  Stage2Result r;
  double previous_g = 0.0;
  std::vector<Vec2> best = current;
  double best_value = trajectory_objective(p, current);
  for (std::size_t l = 1; l <= p.max_iterations; ++l) {
    const auto sol = solve_convex_subproblem(p, current);
    double step = 0.0;
    for (std::size_t n = 0; n < current.size(); ++n) step = std::max(step, distance(sol.positions[n], current[n]));
    current = sol.positions;
    const Stage2Iteration it{l, sol.objective, trajectory_objective(p, current), step};
    r.history.push_back(it);
    if (trace) trace(it);
    if (it.true_objective < best_value) {
      best_value = it.true_objective;
      best = current;
    }
    if (std::abs(sol.objective - previous_g) < p.tolerance) {
      r.converged = true;
      break;
    }
    previous_g = sol.objective;
  }
  if (r.converged) {
    r.positions = current;
    r.objective = r.history.back().true_objective;
  } else {
    r.hit_iteration_cap = true;
    r.positions = best;
    r.objective = best_value;
  }
  return r;
}

}  // namespace detail

/// SCA from the current positions, plus `extra_starts` runs whose first
/// expansion point shifts every SUAV by the same vector (half the reachable
/// radius, evenly spaced headings). Hovering is a stationary point of the
/// propulsion model, so a single run can stall there. The run with the lowest
/// true objective wins; ties keep the unshifted run.
inline Stage2Result run_stage2(const TrajectoryProblem& p,
                               const std::function<void(const Stage2Iteration&)>& trace = {}) {
  p.validate();
  std::vector<Vec2> start;
  for (const auto& s : p.suavs) start.push_back(s.position);
  if (p.suavs.empty() || p.max_speed * p.slot_duration == 0.0) {
    Stage2Result r;
    r.positions = start;
    r.objective = trajectory_objective(p, start);
    r.converged = true;
    return r;
  }
  auto best = detail::run_sca(p, start, trace);
  const double radius = 0.5 * p.max_speed * p.slot_duration;
  for (std::size_t k = 0; k < p.extra_starts; ++k) {
    const double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(p.extra_starts);
    const Vec2 shift{radius * std::cos(ang), radius * std::sin(ang)};
    auto shifted = start;
    for (auto& q : shifted) q = q + shift;
    auto r = detail::run_sca(p, shifted, trace);
    if (r.objective < best.objective - 1e-12 * std::abs(best.objective)) best = std::move(r);
  }
  return best;
}

struct GridSearchResult {
  Vec2 position;
  double objective = std::numeric_limits<double>::infinity();
};

/// Brute-force stage-2 optimum of a single-SUAV problem over a
/// `resolution` x `resolution` grid covering the reachable disk.
inline GridSearchResult grid_search_single(const TrajectoryProblem& p, std::size_t resolution = 200) {
  if (p.suavs.size() != 1) throw std::invalid_argument("grid_search_single: exactly one SUAV required");
  const double radius = p.max_speed * p.slot_duration;
  const Vec2 c = p.suavs[0].position;
  GridSearchResult best{c, trajectory_objective(p, {c})};
  if (resolution < 2) return best;
  for (std::size_t i = 0; i < resolution; ++i) {
    for (std::size_t j = 0; j < resolution; ++j) {
      const Vec2 off{-radius + 2.0 * radius * static_cast<double>(i) / static_cast<double>(resolution - 1),
                     -radius + 2.0 * radius * static_cast<double>(j) / static_cast<double>(resolution - 1)};
      if (squared_norm(off) > radius * radius) continue;
      const Vec2 q = c + off;
      const double v = trajectory_objective(p, {q});
      if (v < best.objective) best = {q, v};
    }
  }
  return best;
}

}  // namespace uavmec
