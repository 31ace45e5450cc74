#ifndef ONEFORM_EVOLUTION_HPP
#define ONEFORM_EVOLUTION_HPP

// Time-ordered unitary evolution along staircase paths, rectangular loop
// residuals, and the mixed-partial compatibility measurement.  The segment
// integrator is a midpoint-sampled product of exponentials (2nd order);
// later segments act on the left.

#include <cmath>

#include "oneform/hierarchy.hpp"
#include "oneform/hilbert.hpp"
#include "oneform/lattice.hpp"
#include "oneform/types.hpp"

namespace oneform {

// Ordered product prod_{j=steps..1} exp(-i H_axis(t_j*) dt/steps) with
// midpoint sampling; exact for autonomous generators at any step count.
inline Matrix evolve_segment(const HamiltonianHierarchy& h, int axis,
                             const TimePoint& t_start, double dt, int steps) {
  if (axis < 0 || axis >= h.n_times) throw IndexOutOfRange("evolve_segment: axis");
  if (dt < 0.0) throw NegativeDuration("evolve_segment: monotone paths only");
  if (steps < 1) throw StepTooSmall("evolve_segment: need steps >= 1");
  Matrix u = Matrix::Identity(h.dim, h.dim);
  if (dt == 0.0) return u;
  const double hstep = dt / steps;
  for (int j = 0; j < steps; ++j) {
    TimePoint tm = t_start;
    tm[size_t(axis)] += (j + 0.5) * hstep;
    u = matexp(h.generator(axis, tm), -kImag * hstep) * u;
  }
  return u;
}

struct EvolutionResult {
  StaircasePath path;
  std::vector<double> widths;
  int steps_per_unit = 1;
  Matrix unitary;
  double unitarity_defect = 0.0;
  int segment_count = 0;
};

// Wilson line along a staircase path: the segments are composed in strict
// path order without assuming any commutation.
inline EvolutionResult evolve_path(const HamiltonianHierarchy& h,
                                   const StaircasePath& path,
                                   const std::vector<double>& widths,
                                   int steps_per_unit) {
  if (int(widths.size()) != h.n_times || path.n_axes() != h.n_times)
    throw DimMismatch("evolve_path: axis count mismatch");
  if (!path.is_monotone()) throw NegativeDuration("evolve_path: monotone paths only");
  EvolutionResult res;
  res.path = path;
  res.widths = widths;
  res.steps_per_unit = steps_per_unit;
  res.unitary = Matrix::Identity(h.dim, h.dim);
  TimePoint t(size_t(h.n_times), 0.0);
  for (int a = 0; a < h.n_times; ++a)
    t[size_t(a)] = path.start[size_t(a)] * widths[size_t(a)];
  for (const Move& m : path.moves) {
    if (m.length == 0) continue;
    const double dt = m.length * widths[size_t(m.axis)];
    res.unitary = evolve_segment(h, m.axis, t, dt, steps_per_unit * m.length) * res.unitary;
    t[size_t(m.axis)] += dt;
    res.segment_count += 1;
  }
  res.unitarity_defect = unitarity_defect(res.unitary);
  return res;
}

// Adjoint composition of the reversed path; equals evolve_path(path)^dag up
// to rounding.
inline Matrix evolve_path_backward(const HamiltonianHierarchy& h,
                                   const StaircasePath& path,
                                   const std::vector<double>& widths,
                                   int steps_per_unit) {
  Matrix u = Matrix::Identity(h.dim, h.dim);
  TimePoint t(size_t(h.n_times), 0.0);
  for (int a = 0; a < h.n_times; ++a)
    t[size_t(a)] = path.start[size_t(a)] * widths[size_t(a)];
  std::vector<std::pair<Move, TimePoint>> legs;
  for (const Move& m : path.moves) {
    if (m.length == 0) continue;
    legs.emplace_back(m, t);
    t[size_t(m.axis)] += m.length * widths[size_t(m.axis)];
  }
  for (auto it = legs.rbegin(); it != legs.rend(); ++it) {
    const auto& [m, t0] = *it;
    const double dt = m.length * widths[size_t(m.axis)];
    u = evolve_segment(h, m.axis, t0, dt, steps_per_unit * m.length).adjoint() * u;
  }
  return u;
}

// ||U_loop - I|| for the axis-aligned rectangle in the (l,k) plane with the
// given corner and side lengths; U_loop = U_{Gamma'}^dag U_Gamma where Gamma
// runs l-leg then k-leg and Gamma' runs k-leg then l-leg.
inline double loop_residual(const HamiltonianHierarchy& h, const TimePoint& corner,
                            int l, int k, double side_l, double side_k,
                            int steps_per_unit) {
  if (l == k) throw IndexOutOfRange("loop_residual: need distinct axes");
  const int steps_l = std::max(1, int(std::ceil(side_l * steps_per_unit)));
  const int steps_k = std::max(1, int(std::ceil(side_k * steps_per_unit)));
  TimePoint after_l = corner, after_k = corner;
  after_l[size_t(l)] += side_l;
  after_k[size_t(k)] += side_k;
  Matrix fwd = evolve_segment(h, k, after_l, side_k, steps_k) *
               evolve_segment(h, l, corner, side_l, steps_l);
  Matrix bwd = evolve_segment(h, l, after_k, side_l, steps_l) *
               evolve_segment(h, k, corner, side_k, steps_k);
  Matrix loop = bwd.adjoint() * fwd;
  return (loop - Matrix::Identity(h.dim, h.dim)).norm();
}

// State transported from the origin along the canonical lexicographic path
// (all of t_1 first, then t_2, ...).  Coordinates must be non-negative.
inline CVector evolve_canonical(const HamiltonianHierarchy& h, const CVector& psi0,
                                const TimePoint& t, int steps_per_unit) {
  CVector psi = psi0;
  TimePoint cur(size_t(h.n_times), 0.0);
  for (int a = 0; a < h.n_times; ++a) {
    const double dt = t[size_t(a)];
    if (dt < 0.0) throw NegativeDuration("evolve_canonical: monotone paths only");
    if (dt == 0.0) continue;
    const int steps = std::max(1, int(std::ceil(dt * steps_per_unit)));
    psi = evolve_segment(h, a, cur, dt, steps) * psi;
    cur[size_t(a)] = dt;
  }
  return psi;
}

// Compatibility residual || D_lk Psi - D_kl Psi || on a 3x3 stencil.  The
// outer derivative moves the canonical-path state, the inner one evolves
// locally along the remaining axis, so the two orders reach each stencil
// corner along different paths; the residual is O(step^2) iff the flows are
// compatible.
inline double mixed_partial_residual(const HamiltonianHierarchy& h, const CVector& psi0,
                                     const TimePoint& t, int l, int k, double fd_step,
                                     int steps_per_unit = 64, int local_steps = 4) {
  if (l == k || l < 0 || k < 0 || l >= h.n_times || k >= h.n_times)
    throw IndexOutOfRange("mixed_partial_residual: need distinct axes in range");
  if (fd_step < 1e-8) throw StepTooSmall("mixed_partial_residual: fd_step too small");

  auto canonical_state = [&](double dl, double dk) {
    TimePoint u = t;
    u[size_t(l)] += dl;
    u[size_t(k)] += dk;
    return evolve_canonical(h, psi0, u, steps_per_unit);
  };
  // local derivative along `axis` at u, using forward/backward unit evolution
  auto local_derivative = [&](const CVector& psi, const TimePoint& u, int axis) {
    Matrix fwd = evolve_segment(h, axis, u, fd_step, local_steps);
    TimePoint before = u;
    before[size_t(axis)] -= fd_step;
    Matrix bwd = evolve_segment(h, axis, before, fd_step, local_steps);
    return ((fwd * psi - bwd.adjoint() * psi) / (2.0 * fd_step)).eval();
  };

  auto mixed = [&](int outer, int inner) {
    TimePoint up = t, dn = t;
    up[size_t(outer)] += fd_step;
    dn[size_t(outer)] -= fd_step;
    CVector psi_up = canonical_state(outer == l ? fd_step : 0.0, outer == k ? fd_step : 0.0);
    CVector psi_dn = canonical_state(outer == l ? -fd_step : 0.0, outer == k ? -fd_step : 0.0);
    CVector d_up = local_derivative(psi_up, up, inner);
    CVector d_dn = local_derivative(psi_dn, dn, inner);
    return ((d_up - d_dn) / (2.0 * fd_step)).eval();
  };

  return (mixed(l, k) - mixed(k, l)).norm();
}

}  // namespace oneform

#endif
