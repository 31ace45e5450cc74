#ifndef ONEFORM_CLOSURE_HPP
#define ONEFORM_CLOSURE_HPP

// Classical Lagrangian 1-form layer: multi-time solutions, closure-relation
// residuals, action integrals along staircase paths, rectangular loop
// actions, and the classical boundary-value action that feeds the van Vleck
// prefactor.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "oneform/lattice.hpp"
#include "oneform/types.hpp"

namespace oneform {

// L = sum_j L_j dt_j with L_j = (1/2)(dq/dt_j)^2 - w_j^2 q^2 / 2 summed over
// degrees of freedom (quadratic fast path); a generic evaluator may override.
struct LagrangianOneForm {
  int n_times = 2;
  int n_dof = 1;
  std::vector<double> omegas;
  std::function<double(int axis, const Eigen::VectorXd& q, const Eigen::VectorXd& dq_axis,
                       const TimePoint& t)>
      evaluator;

  double component(int axis, const Eigen::VectorXd& q, const Eigen::VectorXd& dq_axis,
                   const TimePoint& t) const {
    if (evaluator) return evaluator(axis, q, dq_axis, t);
    const double w = omegas[size_t(axis)];
    double s = 0.0;
    for (int i = 0; i < n_dof; ++i)
      s += 0.5 * dq_axis[i] * dq_axis[i] - 0.5 * w * w * q[i] * q[i];
    return s;
  }
};

inline LagrangianOneForm quadratic_one_form(std::vector<double> omegas, int n_dof = 1) {
  LagrangianOneForm f;
  f.n_times = int(omegas.size());
  f.n_dof = n_dof;
  f.omegas = std::move(omegas);
  return f;
}

// A classical field q(t_1..t_N) with its first partials.
struct MultiTimeSolution {
  int n_dof = 1;
  int n_times = 2;
  std::function<Eigen::VectorXd(const TimePoint&)> q;
  std::function<Eigen::MatrixXd(const TimePoint&)> dq;  // n_dof rows, n_times cols
  std::string label;
};

// q = A cos(sum_j w_j t_j + phase), one degree of freedom.
inline MultiTimeSolution cosine_solution(double amplitude, std::vector<double> omegas,
                                         double phase = 0.0) {
  MultiTimeSolution s;
  s.n_dof = 1;
  s.n_times = int(omegas.size());
  s.label = "cosine";
  auto theta = [omegas, phase](const TimePoint& t) {
    double th = phase;
    for (size_t j = 0; j < omegas.size(); ++j) th += omegas[j] * t[j];
    return th;
  };
  s.q = [amplitude, theta](const TimePoint& t) {
    Eigen::VectorXd v(1);
    v[0] = amplitude * std::cos(theta(t));
    return v;
  };
  s.dq = [amplitude, omegas, theta](const TimePoint& t) {
    Eigen::MatrixXd m(1, int(omegas.size()));
    const double sn = std::sin(theta(t));
    for (size_t j = 0; j < omegas.size(); ++j) m(0, int(j)) = -amplitude * omegas[j] * sn;
    return m;
  };
  return s;
}

// q = A (cos theta, sin theta), theta = sum_j w_j t_j.  Both components
// solve every oscillator equation and all L_j are constant on the solution.
inline MultiTimeSolution circular_solution(double amplitude, std::vector<double> omegas) {
  MultiTimeSolution s;
  s.n_dof = 2;
  s.n_times = int(omegas.size());
  s.label = "circular";
  auto theta = [omegas](const TimePoint& t) {
    double th = 0.0;
    for (size_t j = 0; j < omegas.size(); ++j) th += omegas[j] * t[j];
    return th;
  };
  s.q = [amplitude, theta](const TimePoint& t) {
    Eigen::VectorXd v(2);
    const double th = theta(t);
    v[0] = amplitude * std::cos(th);
    v[1] = amplitude * std::sin(th);
    return v;
  };
  s.dq = [amplitude, omegas, theta](const TimePoint& t) {
    Eigen::MatrixXd m(2, int(omegas.size()));
    const double th = theta(t);
    for (size_t j = 0; j < omegas.size(); ++j) {
      m(0, int(j)) = -amplitude * omegas[j] * std::sin(th);
      m(1, int(j)) = amplitude * omegas[j] * std::cos(th);
    }
    return m;
  };
  return s;
}

// Off-shell witness q = t_1 t_2.
inline MultiTimeSolution product_field() {
  MultiTimeSolution s;
  s.n_dof = 1;
  s.n_times = 2;
  s.label = "product";
  s.q = [](const TimePoint& t) {
    Eigen::VectorXd v(1);
    v[0] = t[0] * t[1];
    return v;
  };
  s.dq = [](const TimePoint& t) {
    Eigen::MatrixXd m(1, 2);
    m(0, 0) = t[1];
    m(0, 1) = t[0];
    return m;
  };
  return s;
}

// |d^2 q / dt_j^2 + w_j^2 q| per axis (max over dof), by central differences.
inline std::vector<double> eom_residual(const MultiTimeSolution& sol,
                                        const std::vector<double>& omegas,
                                        const TimePoint& t, double fd_step) {
  if (fd_step < 1e-6) throw StepTooSmall("eom_residual: step below cancellation guard");
  std::vector<double> out;
  Eigen::VectorXd q0 = sol.q(t);
  for (size_t j = 0; j < omegas.size(); ++j) {
    TimePoint tp = t, tm = t;
    tp[j] += fd_step;
    tm[j] -= fd_step;
    Eigen::VectorXd second = (sol.q(tp) - 2.0 * q0 + sol.q(tm)) / (fd_step * fd_step);
    double worst = 0.0;
    for (int i = 0; i < sol.n_dof; ++i)
      worst = std::max(worst, std::abs(second[i] + omegas[j] * omegas[j] * q0[i]));
    out.push_back(worst);
  }
  return out;
}

namespace detail {

// Total derivative d/dt_k of the on-solution composite L_l(q(t), d_l q(t), t).
inline double lagrangian_total_derivative(const LagrangianOneForm& form,
                                          const MultiTimeSolution& sol, int l, int k,
                                          const TimePoint& t, double fd_step) {
  auto value = [&](double off) {
    TimePoint u = t;
    u[size_t(k)] += off;
    Eigen::VectorXd q = sol.q(u);
    Eigen::VectorXd dql = sol.dq(u).col(l);
    return form.component(l, q, dql, u);
  };
  return (value(fd_step) - value(-fd_step)) / (2.0 * fd_step);
}

}  // namespace detail

// Signed closure density dL_l/dt_k - dL_k/dt_l along the solution.
inline double closure_density(const LagrangianOneForm& form, const MultiTimeSolution& sol,
                              int l, int k, const TimePoint& t, double fd_step) {
  if (l == k) throw IndexOutOfRange("closure_density: need l != k");
  if (fd_step < 1e-8) throw StepTooSmall("closure_density: step below cancellation guard");
  return detail::lagrangian_total_derivative(form, sol, l, k, t, fd_step) -
         detail::lagrangian_total_derivative(form, sol, k, l, t, fd_step);
}

inline double closure_residual(const LagrangianOneForm& form, const MultiTimeSolution& sol,
                               int l, int k, const TimePoint& t, double fd_step) {
  return std::abs(closure_density(form, sol, l, k, t, fd_step));
}

namespace detail {

// Composite Simpson of f over [0, len] with an even number of intervals.
template <class F>
double simpson(F&& f, double len, int intervals) {
  if (len == 0.0) return 0.0;
  int n = std::max(2, intervals);
  if (n % 2) ++n;
  const double h = len / n;
  double s = f(0.0) + f(len);
  for (int i = 1; i < n; ++i) s += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double segment_action(const LagrangianOneForm& form, const MultiTimeSolution& sol,
                             int axis, const TimePoint& t0, double duration,
                             int points_per_unit) {
  auto integrand = [&](double s) {
    TimePoint u = t0;
    u[size_t(axis)] += s;
    return form.component(axis, sol.q(u), sol.dq(u).col(axis), u);
  };
  const int intervals = std::max(2, int(std::ceil(std::abs(duration) * points_per_unit)));
  return simpson(integrand, duration, intervals);
}

}  // namespace detail

// Integral of the 1-form along a staircase path (composite Simpson per move).
inline double action_along_path(const LagrangianOneForm& form, const MultiTimeSolution& sol,
                                const StaircasePath& path, const std::vector<double>& widths,
                                int points_per_unit = 64) {
  TimePoint t(size_t(form.n_times), 0.0);
  for (int a = 0; a < form.n_times; ++a)
    t[size_t(a)] = path.start[size_t(a)] * widths[size_t(a)];
  double action = 0.0;
  for (const Move& m : path.moves) {
    const double dt = m.length * widths[size_t(m.axis)];
    if (dt == 0.0) continue;
    action += detail::segment_action(form, sol, m.axis, t, dt, points_per_unit);
    t[size_t(m.axis)] += dt;
  }
  return action;
}

// Counterclockwise circulation of the 1-form around an axis-aligned
// rectangle in the (l,k) plane.  By the Green identity it equals the area
// integral of (dL_k/dt_l - dL_l/dt_k).
inline double loop_action(const LagrangianOneForm& form, const MultiTimeSolution& sol,
                          const TimePoint& corner, int l, int k, double side_l,
                          double side_k, int points_per_unit = 64) {
  if (l == k) throw IndexOutOfRange("loop_action: need l != k");
  if (side_l == 0.0 || side_k == 0.0) return 0.0;
  TimePoint c_l = corner, c_k = corner;
  c_l[size_t(l)] += side_l;
  c_k[size_t(k)] += side_k;
  const double bottom = detail::segment_action(form, sol, l, corner, side_l, points_per_unit);
  const double right = detail::segment_action(form, sol, k, c_l, side_k, points_per_unit);
  const double top = detail::segment_action(form, sol, l, c_k, side_l, points_per_unit);
  const double left = detail::segment_action(form, sol, k, corner, side_k, points_per_unit);
  return bottom + right - top - left;
}

// Area integral of the signed closure density over the same rectangle
// (2D composite Simpson); used as the Green-identity cross check.
inline double closure_area_integral(const LagrangianOneForm& form,
                                    const MultiTimeSolution& sol, const TimePoint& corner,
                                    int l, int k, double side_l, double side_k,
                                    int grid_points = 32, double fd_step = 1e-4) {
  auto density = [&](double u, double v) {
    TimePoint t = corner;
    t[size_t(l)] += u;
    t[size_t(k)] += v;
    // Green orientation: circulation = integral of dL_k/dt_l - dL_l/dt_k
    return -closure_density(form, sol, l, k, t, fd_step);
  };
  auto inner = [&](double u) {
    return detail::simpson([&](double v) { return density(u, v); }, side_k, grid_points);
  };
  return detail::simpson(inner, side_l, grid_points);
}

// ---------------------------------------------------------------------------
// Classical boundary-value action for a single oscillator segment,
//   S(x', x''; T) = (w / 2 sin wT) [ (x'^2 + x''^2) cos wT - 2 x' x'' ],
// with the free limit (x'' - x')^2 / (2T) as w T -> 0.

inline double classical_bvp_action(double omega, double T, double x0, double x1) {
  if (!(T > 0.0)) throw Caustic("classical_bvp_action: need T > 0");
  const double wt = omega * T;
  if (std::abs(wt) < 1e-6) {
    const double d = x1 - x0;
    // expansion of the exact action to O((wT)^2)
    return d * d / (2.0 * T) - omega * wt * (x0 * x0 + x0 * x1 + x1 * x1) / 6.0;
  }
  const double s = std::sin(wt);
  if (std::abs(s) < 1e-12) throw Caustic("classical_bvp_action: sin(wT) ~ 0");
  return omega / (2.0 * s) * ((x0 * x0 + x1 * x1) * std::cos(wt) - 2.0 * x0 * x1);
}

// Shooting + quadrature validation route: integrate the two fundamental
// solutions of qdd = -w^2 q with RK4, match the endpoints, then Simpson the
// Lagrangian over the stored nodes.
inline double classical_bvp_action_shooting(double omega, double T, double x0, double x1,
                                            int steps = 4000) {
  if (steps % 2) ++steps;
  const double h = T / steps;
  struct State {
    double q, v;
  };
  auto accel = [omega](double q) { return -omega * omega * q; };
  auto rk4 = [&](State s) {
    const double k1q = s.v, k1v = accel(s.q);
    const double k2q = s.v + 0.5 * h * k1v, k2v = accel(s.q + 0.5 * h * k1q);
    const double k3q = s.v + 0.5 * h * k2v, k3v = accel(s.q + 0.5 * h * k2q);
    const double k4q = s.v + h * k3v, k4v = accel(s.q + h * k3q);
    return State{s.q + h / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q),
                 s.v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)};
  };
  std::vector<State> u(size_t(steps) + 1), w(size_t(steps) + 1);
  u[0] = {1.0, 0.0};
  w[0] = {0.0, 1.0};
  for (int i = 0; i < steps; ++i) {
    u[size_t(i) + 1] = rk4(u[size_t(i)]);
    w[size_t(i) + 1] = rk4(w[size_t(i)]);
  }
  if (std::abs(w[size_t(steps)].q) < 1e-12)
    throw Caustic("classical_bvp_action_shooting: boundary-value problem degenerate");
  const double v0 = (x1 - x0 * u[size_t(steps)].q) / w[size_t(steps)].q;
  auto lagrangian = [&](size_t i) {
    const double q = x0 * u[i].q + v0 * w[i].q;
    const double v = x0 * u[i].v + v0 * w[i].v;
    return 0.5 * v * v - 0.5 * omega * omega * q * q;
  };
  double s = lagrangian(0) + lagrangian(size_t(steps));
  for (int i = 1; i < steps; ++i) s += lagrangian(size_t(i)) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// End-to-end classical action of a chain of oscillator segments: the
// interior junction positions are eliminated at stationarity (a tridiagonal
// linear solve), leaving a function of the two end positions.
inline double composed_bvp_action(const std::vector<std::pair<double, double>>& segments,
                                  double x0, double x1) {
  const int m = int(segments.size());
  if (m == 0) throw IdentityKernel("composed_bvp_action: empty segment list");
  if (m == 1) return classical_bvp_action(segments[0].first, segments[0].second, x0, x1);
  // per segment S_i(y_{i-1}, y_i) = a_i y_i^2 + 2 b_i y_i y_{i-1} + c_i y_{i-1}^2
  std::vector<double> a(size_t(m), 0.0), b(size_t(m), 0.0), c(size_t(m), 0.0);
  for (int i = 0; i < m; ++i) {
    const double w = segments[size_t(i)].first, T = segments[size_t(i)].second;
    const double wt = w * T;
    if (std::abs(wt) < 1e-6) {
      a[size_t(i)] = c[size_t(i)] = 1.0 / (2.0 * T);
      b[size_t(i)] = -1.0 / (2.0 * T);
    } else {
      const double s = std::sin(wt);
      if (std::abs(s) < 1e-12) throw Caustic("composed_bvp_action: segment at caustic");
      a[size_t(i)] = c[size_t(i)] = w * std::cos(wt) / (2.0 * s);
      b[size_t(i)] = -w / (2.0 * s);
    }
  }
  // stationarity in y_1..y_{m-1}: (a_i + c_{i+1}) y_i + b_i y_{i-1} + b_{i+1} y_{i+1} = 0
  const int n = m - 1;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int i = 1; i <= n; ++i) {
    M(i - 1, i - 1) = a[size_t(i - 1)] + c[size_t(i)];
    if (i - 2 >= 0) M(i - 1, i - 2) = b[size_t(i - 1)];
    if (i < n) M(i - 1, i) = b[size_t(i)];
  }
  rhs[0] -= b[0] * x0;
  rhs[n - 1] -= b[size_t(m - 1)] * x1;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible())
    throw DegenerateComposition("composed_bvp_action: stationarity system singular");
  Eigen::VectorXd y = lu.solve(rhs);
  std::vector<double> pts(size_t(m) + 1);
  pts[0] = x0;
  pts[size_t(m)] = x1;
  for (int i = 1; i <= n; ++i) pts[size_t(i)] = y[i - 1];
  double s = 0.0;
  for (int i = 0; i < m; ++i)
    s += a[size_t(i)] * pts[size_t(i) + 1] * pts[size_t(i) + 1] +
         2.0 * b[size_t(i)] * pts[size_t(i) + 1] * pts[size_t(i)] +
         c[size_t(i)] * pts[size_t(i)] * pts[size_t(i)];
  return s;
}

}  // namespace oneform

#endif
