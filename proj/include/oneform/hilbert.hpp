#ifndef ONEFORM_HILBERT_HPP
#define ONEFORM_HILBERT_HPP

// Finite-dimensional Hilbert-space primitives: dense complex operators,
// Hermiticity/unitarity checks, commutators, matrix exponentials, and the
// two canonical operator constructions used throughout (periodic position
// grid with DFT momentum, truncated oscillator ladder basis).

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "oneform/types.hpp"

namespace oneform {

inline double frobenius(const Matrix& m) { return m.norm(); }

// Largest singular value.  Frobenius is the default metric everywhere; this
// is the optional sharper alternative.
inline double spectral_norm(const Matrix& m) {
  return m.jacobiSvd().singularValues()(0);
}

// ||A - A^dag||_F, optionally relative to ||A||_F.
inline double hermiticity_defect(const Matrix& a, bool relative = false) {
  double d = (a - a.adjoint().eval()).norm();
  if (relative) {
    double n = a.norm();
    return n > 0 ? d / n : d;
  }
  return d;
}

// ||A^dag A - I||_F.
inline double unitarity_defect(const Matrix& a) {
  return (a.adjoint() * a - Matrix::Identity(a.rows(), a.cols())).norm();
}

inline bool is_hermitian(const Matrix& a, double tol = 1e-12) {
  return hermiticity_defect(a, true) <= tol;
}

inline bool is_unitary(const Matrix& a, double tol = 1e-12) {
  return unitarity_defect(a) <= tol;
}

// exp(scalar * A) by scaling-and-squaring with a Pade approximant;
// relative accuracy ~1e-13 for ||scalar*A|| up to ~50.
inline Matrix matexp(const Matrix& a, Complex scalar = Complex{1.0, 0.0}) {
  if (a.rows() != a.cols()) throw DimMismatch("matexp: matrix not square");
  if (a.rows() < 1) throw DimMismatch("matexp: empty matrix");
  if (!all_finite(a)) throw NonFinite("matexp: input has NaN/Inf entries");
  Matrix scaled = scalar * a;
  Matrix result = scaled.exp();
  if (!all_finite(result)) throw NonFinite("matexp: overflow during squaring");
  return result;
}

// AB - BA; anti-Hermitian when A and B are both Hermitian.
inline Matrix commutator(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimMismatch("commutator: dimension mismatch");
  return a * b - b * a;
}

inline Matrix anticommutator(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimMismatch("anticommutator: dimension mismatch");
  return a * b + b * a;
}

struct GridOperators {
  int dim = 0;
  double length = 0.0;
  RVector points;       // x_j = -L/2 + j*L/d
  RVector wavenumbers;  // signed DFT wavenumbers k_j
  Matrix position;      // diag(x_j)
  Matrix momentum;      // F^dag diag(k_j) F, Hermitian
  Matrix dft;           // unitary DFT matrix F
};

// Periodic position grid over [-length/2, length/2) with the momentum
// operator diagonalized exactly by the discrete Fourier transform.
inline GridOperators build_grid_operators(int d, double length) {
  if (d < 2) throw DimMismatch("build_grid_operators: need d >= 2");
  if (!(length > 0.0))
    throw std::invalid_argument("build_grid_operators: need length > 0");
  GridOperators g;
  g.dim = d;
  g.length = length;
  g.points.resize(d);
  g.wavenumbers.resize(d);
  double dx = length / d;
  for (int j = 0; j < d; ++j) {
    g.points[j] = -length / 2.0 + j * dx;
    int signed_j = (j < (d + 1) / 2) ? j : j - d;
    g.wavenumbers[j] = 2.0 * kPi * signed_j / length;
  }
  g.dft.resize(d, d);
  const double s = 1.0 / std::sqrt(double(d));
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      g.dft(j, k) = s * std::exp(Complex(0.0, -2.0 * kPi * j * k / d));
  g.position = g.points.cast<Complex>().asDiagonal();
  Matrix kdiag = g.wavenumbers.cast<Complex>().asDiagonal();
  g.momentum = g.dft.adjoint() * kdiag * g.dft;
  // enforce exact Hermiticity against rounding in the DFT products
  g.momentum = 0.5 * (g.momentum + g.momentum.adjoint().eval());
  return g;
}

struct LadderOperators {
  int dim = 0;
  Matrix lowering;  // a
  Matrix raising;   // a^dag
  Matrix q;         // (a + a^dag)/sqrt(2)
  Matrix p;         // i (a^dag - a)/sqrt(2)
};

// Truncated harmonic-oscillator ladder basis.  [q,p] = i holds except in
// the last diagonal corner, a known truncation artifact.
inline LadderOperators build_oscillator_operators(int d) {
  if (d < 2) throw DimMismatch("build_oscillator_operators: need d >= 2");
  LadderOperators l;
  l.dim = d;
  l.lowering = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) l.lowering(n - 1, n) = std::sqrt(double(n));
  l.raising = l.lowering.adjoint();
  const double s = 1.0 / std::sqrt(2.0);
  l.q = s * (l.lowering + l.raising);
  l.p = kImag * s * (l.raising - l.lowering);
  return l;
}

// Normalized state helpers.
inline CVector normalized(const CVector& v) {
  double n = v.norm();
  if (!(n > 0.0)) throw NonFinite("normalized: zero or non-finite norm");
  return v / n;
}

inline double norm_deviation(const CVector& v) { return std::abs(v.norm() - 1.0); }

}  // namespace oneform

#endif
