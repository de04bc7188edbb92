#pragma once

// Small dense log-barrier interior-point solver for smooth convex problems
//   min f0(x)  s.t.  g_i(x) < 0.
// Each constraint touches at most four variables and reports its local
// gradient and Hessian; the objective fills full dense derivatives.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavmec {

// Room for four problem variables plus the phase-one slack.
struct LocalTerm {
  static constexpr int kCapacity = 5;
  double value = 0.0;
  int size = 0;
  std::array<int, kCapacity> vars{};
  Eigen::Matrix<double, kCapacity, 1> grad = Eigen::Matrix<double, kCapacity, 1>::Zero();
  Eigen::Matrix<double, kCapacity, kCapacity> hess = Eigen::Matrix<double, kCapacity, kCapacity>::Zero();
};

class BarrierProblem {
 public:
  virtual ~BarrierProblem() = default;
  virtual int dimension() const = 0;
  virtual int num_constraints() const = 0;
  /// Objective value; when non-null, `grad` and `hess` are overwritten.
  virtual double objective(const Eigen::VectorXd& x, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const = 0;
  virtual void constraint(int i, const Eigen::VectorXd& x, LocalTerm& out, bool derivatives) const = 0;
  virtual bool in_domain(const Eigen::VectorXd&) const { return true; }
};

struct BarrierOptions {
  double t0 = 1.0;
  double mu = 20.0;
  double relative_gap = 1e-10;
  double newton_tolerance = 1e-12;
  int max_newton_per_center = 200;
  int max_outer = 200;
};

struct BarrierResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  double max_constraint = 0.0;
  double duality_gap = 0.0;
  double kkt_residual = 0.0;
  int newton_steps = 0;
  bool converged = false;
};

class InfeasibleStart : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Value of t*f0 - sum log(-g_i); +inf outside the strict interior.
inline double barrier_value(const BarrierProblem& p, const Eigen::VectorXd& x, double t) {
  if (!p.in_domain(x)) return std::numeric_limits<double>::infinity();
  LocalTerm term;
  double phi = 0.0;
  for (int i = 0; i < p.num_constraints(); ++i) {
    p.constraint(i, x, term, false);
    if (!(term.value < 0)) return std::numeric_limits<double>::infinity();
    phi -= std::log(-term.value);
  }
  const double f = p.objective(x, nullptr, nullptr);
  if (!std::isfinite(f)) return std::numeric_limits<double>::infinity();
  return t * f + phi;
}

inline void barrier_derivatives(const BarrierProblem& p, const Eigen::VectorXd& x, double t, Eigen::VectorXd& g,
                                Eigen::MatrixXd& h) {
  const int n = p.dimension();
  Eigen::VectorXd fg(n);
  Eigen::MatrixXd fh(n, n);
  p.objective(x, &fg, &fh);
  g = t * fg;
  h = t * fh;
  LocalTerm term;
  for (int i = 0; i < p.num_constraints(); ++i) {
    p.constraint(i, x, term, true);
    const double inv = -1.0 / term.value;
    for (int a = 0; a < term.size; ++a) {
      g(term.vars[a]) += inv * term.grad(a);
      for (int b = 0; b < term.size; ++b) {
        h(term.vars[a], term.vars[b]) += inv * term.hess(a, b) + inv * inv * term.grad(a) * term.grad(b);
      }
    }
  }
}

inline double max_constraint(const BarrierProblem& p, const Eigen::VectorXd& x) {
  LocalTerm term;
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < p.num_constraints(); ++i) {
    p.constraint(i, x, term, false);
    worst = std::max(worst, term.value);
  }
  return worst;
}

// Damped Newton on the barrier function for fixed t. Returns steps taken.
// `stop` is polled after every step and ends centering early when true.
template <class Stop>
int center(const BarrierProblem& p, Eigen::VectorXd& x, double t, const BarrierOptions& opt, Stop&& stop) {
  const int n = p.dimension();
  Eigen::VectorXd g(n);
  Eigen::MatrixXd h(n, n);
  double value = barrier_value(p, x, t);
  int steps = 0;
  for (; steps < opt.max_newton_per_center; ++steps) {
    barrier_derivatives(p, x, t, g, h);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    Eigen::VectorXd dx = ldlt.solve(-g);
    if (ldlt.info() != Eigen::Success || !dx.allFinite() || g.dot(dx) >= 0) {
      const double reg = 1e-10 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
      h.diagonal().array() += reg;
      dx = h.ldlt().solve(-g);
      if (!dx.allFinite() || g.dot(dx) >= 0) dx = -g;
    }
    const double decrement = -g.dot(dx);
    if (decrement / 2.0 <= opt.newton_tolerance) break;
    double step = 1.0;
    double next = barrier_value(p, x + dx, t);
    while (!(next <= value - 0.25 * step * decrement)) {
      step *= 0.5;
      if (step < 1e-20) return steps;
      next = barrier_value(p, x + step * dx, t);
    }
    x += step * dx;
    value = next;
    if (stop(x)) return steps + 1;
  }
  return steps;
}

// Phase one: min s  s.t. g_i(x) - s < 0, stopped as soon as x is strictly
// feasible for the original constraints.
class PhaseOne final : public BarrierProblem {
 public:
  explicit PhaseOne(const BarrierProblem& inner) : inner_(inner) {}
  int dimension() const override { return inner_.dimension() + 1; }
  int num_constraints() const override { return inner_.num_constraints(); }
  double objective(const Eigen::VectorXd& x, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const override {
    const int n = dimension();
    if (grad) {
      grad->setZero(n);
      (*grad)(n - 1) = 1.0;
    }
    if (hess) hess->setZero(n, n);
    return x(n - 1);
  }
  void constraint(int i, const Eigen::VectorXd& x, LocalTerm& out, bool derivatives) const override {
    inner_.constraint(i, x.head(inner_.dimension()), out, derivatives);
    out.value -= x(dimension() - 1);
    if (derivatives) {
      if (out.size >= LocalTerm::kCapacity) throw std::logic_error("phase one needs a free variable slot in LocalTerm");
      out.vars[out.size] = dimension() - 1;
      out.grad(out.size) = -1.0;
      out.hess.row(out.size).setZero();
      out.hess.col(out.size).setZero();
      ++out.size;
    }
  }
  bool in_domain(const Eigen::VectorXd& x) const override { return inner_.in_domain(x.head(inner_.dimension())); }

 private:
  const BarrierProblem& inner_;
};

}  // namespace detail

/// Finds a strictly feasible point near `x0` (returned unchanged if it
/// already is). Throws InfeasibleStart when none is found.
inline Eigen::VectorXd find_strictly_feasible(const BarrierProblem& p, const Eigen::VectorXd& x0,
                                              const BarrierOptions& opt = {}) {
  if (!p.in_domain(x0)) throw InfeasibleStart("starting point outside the objective domain");
  const double worst = detail::max_constraint(p, x0);
  if (worst < 0) return x0;
  detail::PhaseOne phase(p);
  Eigen::VectorXd y(x0.size() + 1);
  y.head(x0.size()) = x0;
  y(x0.size()) = worst + 1.0 + std::abs(worst);
  auto feasible = [&](const Eigen::VectorXd& z) { return detail::max_constraint(p, z.head(x0.size())) < 0; };
  double t = opt.t0;
  for (int outer = 0; outer < opt.max_outer; ++outer) {
    detail::center(phase, y, t, opt, feasible);
    if (feasible(y)) return y.head(x0.size());
    if (static_cast<double>(phase.num_constraints()) / t < 1e-14) break;
    t *= opt.mu;
  }
  throw InfeasibleStart("no strictly feasible point found; smallest max constraint " +
                        std::to_string(detail::max_constraint(p, y.head(x0.size()))));
}

/// Max of stationarity, complementarity and infeasibility at `x`. Multipliers
/// are fitted by nonnegative least squares over constraints whose barrier
/// multiplier 1/(t*slack) is not negligible.
inline double kkt_residual(const BarrierProblem& p, const Eigen::VectorXd& x, double t) {
  const int n = p.dimension();
  const int m = p.num_constraints();
  Eigen::VectorXd fg(n);
  Eigen::MatrixXd fh(n, n);
  p.objective(x, &fg, &fh);
  LocalTerm term;
  std::vector<int> rows;
  std::vector<double> slack;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, m);
  double infeasible = 0.0;
  const double scale = std::max(1.0, fg.cwiseAbs().maxCoeff());
  for (int i = 0; i < m; ++i) {
    p.constraint(i, x, term, true);
    infeasible = std::max(infeasible, term.value);
    for (int a = 0; a < term.size; ++a) jac(term.vars[a], i) = term.grad(a);
    if (-term.value * t * 1e-8 * scale < 1.0) {
      rows.push_back(i);
      slack.push_back(-term.value);
    }
  }
  std::vector<bool> keep(rows.size(), true);
  Eigen::VectorXd lambda;
  std::vector<int> used;
  for (;;) {
    used.clear();
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (keep[k]) used.push_back(static_cast<int>(k));
    }
    Eigen::MatrixXd a(n, used.size());
    for (std::size_t k = 0; k < used.size(); ++k) a.col(k) = jac.col(rows[used[k]]);
    lambda = used.empty() ? Eigen::VectorXd() : Eigen::VectorXd(a.colPivHouseholderQr().solve(-fg));
    int worst = -1;
    for (int k = 0; k < lambda.size(); ++k) {
      if (lambda(k) < 0 && (worst < 0 || lambda(k) < lambda(worst))) worst = k;
    }
    if (worst < 0) break;
    keep[used[worst]] = false;
  }
  Eigen::VectorXd stat = fg;
  double comp = 0.0;
  for (std::size_t k = 0; k < used.size(); ++k) {
    stat += lambda(k) * jac.col(rows[used[k]]);
    comp = std::max(comp, lambda(k) * slack[used[k]]);
  }
  return std::max({stat.cwiseAbs().maxCoeff(), comp, infeasible});
}

inline BarrierResult solve_barrier(const BarrierProblem& p, const Eigen::VectorXd& x0, const BarrierOptions& opt = {}) {
  BarrierResult r;
  r.x = find_strictly_feasible(p, x0, opt);
  const double m = static_cast<double>(p.num_constraints());
  double t = opt.t0;
  auto never = [](const Eigen::VectorXd&) { return false; };
  for (int outer = 0; outer < opt.max_outer; ++outer) {
    r.newton_steps += detail::center(p, r.x, t, opt, never);
    const double f = p.objective(r.x, nullptr, nullptr);
    if (m == 0 || m / t < opt.relative_gap * std::max(1.0, std::abs(f))) {
      r.converged = true;
      break;
    }
    t *= opt.mu;
  }
  r.kkt_residual = kkt_residual(p, r.x, t);
  r.objective = p.objective(r.x, nullptr, nullptr);
  r.max_constraint = detail::max_constraint(p, r.x);
  r.duality_gap = m / t;
  return r;
}

}  // namespace uavmec
