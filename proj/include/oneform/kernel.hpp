#ifndef ONEFORM_KERNEL_HPP
#define ONEFORM_KERNEL_HPP

// Exact Gaussian propagators for quadratic 1-forms:
//   K(x'', x') = A exp( (i/hbar) (a x''^2 + 2 b x'' x' + c x'^2) )
// per degree of freedom, with closed-form composition (exact Fresnel
// integral over the junction), van Vleck prefactors, the two-oscillator
// fluctuation mode sums, and an independent grid-operator oracle that
// compares both propagators acting on a family of localized wavepackets.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "oneform/closure.hpp"
#include "oneform/hilbert.hpp"
#include "oneform/lattice.hpp"
#include "oneform/types.hpp"

namespace oneform {

struct KernelComponent {
  Complex a{0.0, 0.0};
  Complex b{0.0, 0.0};
  Complex c{0.0, 0.0};
  Complex amplitude{0.0, 0.0};
  int phase_index = 0;  // Maslov counter: each caustic crossing adds exp(-i pi/2)
};

struct GaussianKernel {
  int n_dof = 1;
  double hbar = 1.0;
  std::vector<KernelComponent> components;
};

// One quadratic Lagrangian component per time axis; mass fixed to 1.
struct QuadraticOneForm {
  int n_times = 2;
  int n_dof = 1;
  std::vector<double> omegas;
};

inline QuadraticOneForm two_oscillator_form(double w1, double w2, int n_dof = 1) {
  QuadraticOneForm f;
  f.n_times = 2;
  f.n_dof = n_dof;
  f.omegas = {w1, w2};
  return f;
}

// Harmonic-oscillator kernel for one segment of duration T:
//   a = c = w cos(wT) / (2 sin wT),  b = -w / (2 sin wT),
//   |A| = sqrt(w / (2 pi hbar |sin wT|)),
// branch continued from the free limit; the amplitude phase is
// -pi/4 - (pi/2) floor(wT/pi).
inline KernelComponent ho_kernel_component(double omega, double T, double hbar = 1.0) {
  if (!(T > 0.0)) throw Caustic("ho_kernel: need T > 0");
  KernelComponent k;
  const double wt = omega * T;
  if (std::abs(wt) < 1e-6) {
    k.a = k.c = Complex(1.0 / (2.0 * T), 0.0);
    k.b = Complex(-1.0 / (2.0 * T), 0.0);
    k.amplitude = std::sqrt(1.0 / (2.0 * kPi * hbar * T)) *
                  std::exp(Complex(0.0, -kPi / 4.0));
    k.phase_index = 0;
    return k;
  }
  const double s = std::sin(wt), cs = std::cos(wt);
  if (std::abs(s) < 1e-12) throw Caustic("ho_kernel: sin(wT) below caustic tolerance");
  k.a = k.c = Complex(omega * cs / (2.0 * s), 0.0);
  k.b = Complex(-omega / (2.0 * s), 0.0);
  k.phase_index = int(std::floor(wt / kPi));
  const double mag = std::sqrt(omega / (2.0 * kPi * hbar * std::abs(s)));
  k.amplitude = mag * std::exp(Complex(0.0, -kPi / 4.0 - k.phase_index * kPi / 2.0));
  return k;
}

inline GaussianKernel ho_kernel(double omega, double T, int n_dof = 1, double hbar = 1.0) {
  GaussianKernel k;
  k.n_dof = n_dof;
  k.hbar = hbar;
  k.components.assign(size_t(n_dof), ho_kernel_component(omega, T, hbar));
  return k;
}

// Exact Gaussian integral over the junction point:
//   int dy exp( (i/h) [ (a1 + c2) y^2 + 2 (b1 x' + b2 x'') y ] )
//     = sqrt(i pi h / (a1 + c2)) exp( -(i/h)(b1 x' + b2 x'')^2 / (a1 + c2) ).
inline KernelComponent compose(const KernelComponent& k2, const KernelComponent& k1,
                               double hbar) {
  const Complex den = k1.a + k2.c;
  if (std::abs(den) < 1e-12)
    throw DegenerateComposition("compose: a1 + c2 ~ 0 (stationary Gaussian not invertible)");
  KernelComponent r;
  r.a = k2.a - k2.b * k2.b / den;
  r.c = k1.c - k1.b * k1.b / den;
  r.b = -k1.b * k2.b / den;
  r.amplitude = k1.amplitude * k2.amplitude *
                std::sqrt(kImag * kPi * hbar / den);
  r.phase_index = k1.phase_index + k2.phase_index + (den.real() < 0.0 ? 1 : 0);
  return r;
}

inline GaussianKernel compose(const GaussianKernel& k2, const GaussianKernel& k1) {
  if (k1.n_dof != k2.n_dof) throw DimMismatch("compose: dof mismatch");
  GaussianKernel r;
  r.n_dof = k1.n_dof;
  r.hbar = k1.hbar;
  for (int i = 0; i < r.n_dof; ++i)
    r.components.push_back(compose(k2.components[size_t(i)], k1.components[size_t(i)],
                                   r.hbar));
  return r;
}

// Relative defect of the unitarity normalization |A| = sqrt(|b| / (pi hbar)).
inline double amplitude_consistency_defect(const GaussianKernel& k) {
  double worst = 0.0;
  for (const KernelComponent& c : k.components) {
    if (std::abs(c.b) < 1e-12) throw Caustic("amplitude consistency: b ~ 0");
    const double expect = std::sqrt(std::abs(c.b) / (kPi * k.hbar));
    worst = std::max(worst, std::abs(std::abs(c.amplitude) - expect) / expect);
  }
  return worst;
}

// (omega, duration) per move of a staircase path.
inline std::vector<std::pair<double, double>> segments_of_path(
    const QuadraticOneForm& form, const StaircasePath& path,
    const std::vector<double>& widths) {
  std::vector<std::pair<double, double>> segs;
  for (const Move& m : path.moves) {
    if (m.length == 0) continue;
    segs.emplace_back(form.omegas[size_t(m.axis)], m.length * widths[size_t(m.axis)]);
  }
  return segs;
}

inline GaussianKernel kernel_along_path(const QuadraticOneForm& form,
                                        const StaircasePath& path,
                                        const std::vector<double>& widths,
                                        double hbar = 1.0) {
  if (!path.is_monotone()) throw NegativeDuration("kernel_along_path: monotone paths only");
  auto segs = segments_of_path(form, path, widths);
  if (segs.empty())
    throw IdentityKernel("kernel_along_path: zero-length path has a delta kernel");
  GaussianKernel k;
  bool first = true;
  for (size_t i = 0; i < segs.size(); ++i) {
    GaussianKernel seg;
    try {
      seg = ho_kernel(segs[i].first, segs[i].second, form.n_dof, hbar);
    } catch (const Caustic& e) {
      throw Caustic("segment " + std::to_string(i) + ": " + e.what());
    }
    if (first) {
      k = seg;
      first = false;
    } else {
      try {
        k = compose(seg, k);
      } catch (const DegenerateComposition& e) {
        throw DegenerateComposition("segment " + std::to_string(i) + ": " + e.what());
      }
    }
  }
  return k;
}

// Semiclassical amplitude from the mixed second derivative of the classical
// action, (i S_mixed / (2 pi hbar))^(1/2) per degree of freedom, with the
// branch fixed by the Maslov counter.
inline Complex van_vleck_prefactor(Complex s_mixed, double hbar = 1.0, int maslov = 0) {
  if (std::abs(s_mixed) < 1e-12)
    throw CausticDeterminant("van_vleck_prefactor: |S_mixed| below caustic tolerance");
  const double mag = std::sqrt(std::abs(s_mixed) / (2.0 * kPi * hbar));
  return mag * std::exp(Complex(0.0, -kPi / 4.0 - maslov * kPi / 2.0));
}

// ---------------------------------------------------------------------------
// Fluctuation mode sums for the two-oscillator 1-form.
// All three bracketing paths share the same spectrum,
//   lambda_n = -w1^2 - w2^2 + (n pi / T1)^2 + (n pi / T2)^2.

enum class ModePath { A, B, C };

inline std::vector<double> mode_eigenvalues(ModePath path, double T1, double T2,
                                            double w1, double w2, int cutoff,
                                            double tau = 0.0) {
  if (cutoff < 1) throw TooLarge("mode_eigenvalues: need cutoff >= 1");
  if (!(T1 > 0.0) || !(T2 > 0.0)) throw Caustic("mode_eigenvalues: need T1, T2 > 0");
  if (path == ModePath::C && !(tau > 0.0 && tau < T1))
    throw IndexOutOfRange("mode_eigenvalues: C-path switch time must lie in (0, T1)");
  std::vector<double> out;
  out.reserve(size_t(cutoff));
  for (int n = 1; n <= cutoff; ++n) {
    const double k1 = n * kPi / T1, k2 = n * kPi / T2;
    double lambda = 0.0;
    switch (path) {
      case ModePath::A:
        lambda = -w1 * w1 - w2 * w2 + k1 * k1 + k2 * k2;
        break;
      case ModePath::B:
        lambda = -w2 * w2 - w1 * w1 + k2 * k2 + k1 * k1;
        break;
      case ModePath::C:
        // piecewise basis along the intermediate switch; tau cancels
        lambda = (k1 * k1 - w1 * w1) + (k2 * k2 - w2 * w2);
        break;
    }
    out.push_back(lambda);
  }
  return out;
}

// Smallest n with lambda_n < 0, or 0 when the spectrum is positive.
inline int first_negative_mode_index(const std::vector<double>& lambdas) {
  for (size_t n = 0; n < lambdas.size(); ++n)
    if (lambdas[n] < 0.0) return int(n) + 1;
  return 0;
}

// ---------------------------------------------------------------------------
// Grid-operator oracle.  Both propagators act on a family of Gaussian
// wavepackets localized well inside the box; the comparison is meaningful
// only while every initial and evolved packet stays negligible at the
// boundary, which the boundary_amplitude diagnostic tracks.

struct WavepacketFamily {
  std::vector<double> centers{-2.0, -1.0, 0.0, 1.0, 2.0};
  std::vector<double> momenta{-2.0, -1.0, 0.0, 1.0, 2.0};
  double sigma = 1.0;
};

inline Matrix packet_matrix(const GridOperators& grid, const WavepacketFamily& fam) {
  const int d = grid.dim;
  Matrix w(d, int(fam.centers.size() * fam.momenta.size()));
  int col = 0;
  for (double x0 : fam.centers)
    for (double p0 : fam.momenta) {
      CVector psi(d);
      for (int j = 0; j < d; ++j) {
        const double x = grid.points[j];
        psi[j] = std::exp(Complex(-(x - x0) * (x - x0) / (2.0 * fam.sigma * fam.sigma),
                                  p0 * x));
      }
      w.col(col++) = psi / psi.norm();
    }
  return w;
}

// Ordered product of exp(-i H_axis dt / hbar) along the path on the grid.
inline Matrix operator_along_path(const QuadraticOneForm& form, const StaircasePath& path,
                                  const std::vector<double>& widths,
                                  const GridOperators& grid, double hbar = 1.0) {
  Matrix kin = grid.momentum * grid.momentum / 2.0;
  Matrix q2 = grid.position * grid.position;
  Matrix u = Matrix::Identity(grid.dim, grid.dim);
  for (const Move& m : path.moves) {
    if (m.length == 0) continue;
    const double w = form.omegas[size_t(m.axis)];
    const double dt = m.length * widths[size_t(m.axis)];
    Matrix h = kin + 0.5 * w * w * q2;
    u = matexp(h, -kImag * dt / hbar) * u;
  }
  return u;
}

// Sample one kernel component as a grid integral operator (uniform weights
// on the periodic grid).
inline Matrix kernel_matrix(const GridOperators& grid, const KernelComponent& k,
                            double hbar) {
  const int d = grid.dim;
  const double dx = grid.length / d;
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    const double x2 = grid.points[i];
    for (int j = 0; j < d; ++j) {
      const double x1 = grid.points[j];
      const Complex phase = (k.a * x2 * x2 + 2.0 * k.b * x2 * x1 + k.c * x1 * x1) / hbar;
      m(i, j) = k.amplitude * std::exp(kImag * phase) * dx;
    }
  }
  return m;
}

struct OracleComparison {
  double rel_gap = 0.0;             // ||(U - K) W||_F / ||U W||_F
  double boundary_amplitude = 0.0;  // worst packet magnitude at the box edge
  bool grid_too_coarse = false;     // heuristic warning, boundary_amplitude > 1e-8
};

inline OracleComparison kernel_vs_operator(const QuadraticOneForm& form,
                                           const StaircasePath& path,
                                           const std::vector<double>& widths,
                                           int grid_dim, double grid_length,
                                           double hbar = 1.0,
                                           const WavepacketFamily& fam = {}) {
  GridOperators grid = build_grid_operators(grid_dim, grid_length);
  Matrix w = packet_matrix(grid, fam);
  Matrix u = operator_along_path(form, path, widths, grid, hbar);
  GaussianKernel k = kernel_along_path(form, path, widths, hbar);
  Matrix km = kernel_matrix(grid, k.components[0], hbar);

  OracleComparison cmp;
  Matrix uw = u * w, kw = km * w;
  cmp.rel_gap = (uw - kw).norm() / uw.norm();
  for (int col = 0; col < w.cols(); ++col) {
    cmp.boundary_amplitude = std::max({cmp.boundary_amplitude, std::abs(w(0, col)),
                                       std::abs(w(grid.dim - 1, col)),
                                       std::abs(uw(0, col)),
                                       std::abs(uw(grid.dim - 1, col))});
  }
  cmp.grid_too_coarse = cmp.boundary_amplitude > 1e-8;
  return cmp;
}

// ---------------------------------------------------------------------------
// Sum over the enumerated path family.

// Quadratic-coefficient distance between two kernels (hbar-independent).
inline double coefficient_distance(const GaussianKernel& k1, const GaussianKernel& k2) {
  double s = 0.0;
  for (int i = 0; i < k1.n_dof; ++i) {
    const KernelComponent &a = k1.components[size_t(i)], &b = k2.components[size_t(i)];
    s += std::norm(a.a - b.a) + 2.0 * std::norm(a.b - b.b) + std::norm(a.c - b.c);
  }
  return std::sqrt(s);
}

struct PathKernel {
  StaircasePath path;
  GaussianKernel kernel;
};

struct PathFamilySum {
  int n_paths = 0;
  GaussianKernel average;        // coefficient-space uniform average, weight 1/|B|
  double coefficient_spread = 0; // max over path pairs (hbar-independent)
  double phase_spread = 0;       // coefficient_spread / hbar
  double amplitude_spread = 0;   // max relative |A| deviation over pairs
  std::vector<PathKernel> kernels;
};

inline PathFamilySum sum_over_path_families(const QuadraticOneForm& form,
                                            const LatticeSpec& spec, double hbar = 1.0) {
  PathFamilySum out;
  std::vector<StaircasePath> paths = enumerate_paths(spec);
  for (const StaircasePath& p : paths)
    out.kernels.push_back({p, kernel_along_path(form, p, spec.widths, hbar)});
  out.n_paths = int(out.kernels.size());

  out.average.n_dof = form.n_dof;
  out.average.hbar = hbar;
  out.average.components.assign(size_t(form.n_dof), KernelComponent{});
  for (const PathKernel& pk : out.kernels)
    for (int i = 0; i < form.n_dof; ++i) {
      KernelComponent& avg = out.average.components[size_t(i)];
      const KernelComponent& c = pk.kernel.components[size_t(i)];
      avg.a += c.a / double(out.n_paths);
      avg.b += c.b / double(out.n_paths);
      avg.c += c.c / double(out.n_paths);
      avg.amplitude += c.amplitude / double(out.n_paths);
    }
  if (!out.kernels.empty())
    out.average.components[0].phase_index = out.kernels[0].kernel.components[0].phase_index;

  for (size_t i = 0; i < out.kernels.size(); ++i)
    for (size_t j = i + 1; j < out.kernels.size(); ++j) {
      out.coefficient_spread = std::max(
          out.coefficient_spread,
          coefficient_distance(out.kernels[i].kernel, out.kernels[j].kernel));
      for (int dof = 0; dof < form.n_dof; ++dof) {
        const double ai = std::abs(out.kernels[i].kernel.components[size_t(dof)].amplitude);
        const double aj = std::abs(out.kernels[j].kernel.components[size_t(dof)].amplitude);
        out.amplitude_spread =
            std::max(out.amplitude_spread, std::abs(ai - aj) / std::max(ai, aj));
      }
    }
  out.phase_spread = out.coefficient_spread / hbar;
  return out;
}

// First-order operator-ordering scale ||[H1, H2]||_F T1 T2 / hbar on the grid.
inline double ordering_gap_estimate(const QuadraticOneForm& form, double T1, double T2,
                                    int grid_dim, double grid_length, double hbar = 1.0) {
  GridOperators grid = build_grid_operators(grid_dim, grid_length);
  Matrix kin = grid.momentum * grid.momentum / 2.0;
  Matrix q2 = grid.position * grid.position;
  Matrix h1 = kin + 0.5 * form.omegas[0] * form.omegas[0] * q2;
  Matrix h2 = kin + 0.5 * form.omegas[1] * form.omegas[1] * q2;
  return commutator(h1, h2).norm() * T1 * T2 / hbar;
}

}  // namespace oneform

#endif
