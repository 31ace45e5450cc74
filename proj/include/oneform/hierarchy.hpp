#ifndef ONEFORM_HIERARCHY_HPP
#define ONEFORM_HIERARCHY_HPP

// Multi-time Hamiltonian hierarchies {H_1..H_N}, the zero-curvature residual
//   Z_lk = dH_k/dt_l - dH_l/dt_k - i [H_k, H_l]        (hbar = 1)
// and a gauge-transform generator of nontrivial exactly-flat hierarchies,
//   H_k' = V H_k V^dag + i (dV/dt_k) V^dag,  Z'_lk = V Z_lk V^dag.

#include <cctype>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "oneform/hilbert.hpp"
#include "oneform/types.hpp"

namespace oneform {

using OperatorMap = std::function<Matrix(const TimePoint&)>;

struct HamiltonianHierarchy {
  int dim = 0;
  int n_times = 0;
  std::vector<OperatorMap> generators;                 // H_k(t)
  std::vector<std::vector<OperatorMap>> partials;      // partials[k][l] = dH_k/dt_l, empty if FD only
  std::string label;

  bool has_analytic_partials() const { return !partials.empty(); }

  Matrix generator(int k, const TimePoint& t) const {
    if (k < 0 || k >= n_times) throw IndexOutOfRange("hierarchy: generator index");
    return generators[size_t(k)](t);
  }

  // dH_k/dt_l, analytic when available, else 4th-order central differences.
  Matrix partial(int k, int l, const TimePoint& t, double fd_step) const {
    if (k < 0 || k >= n_times || l < 0 || l >= n_times)
      throw IndexOutOfRange("hierarchy: partial index");
    if (has_analytic_partials()) return partials[size_t(k)][size_t(l)](t);
    if (fd_step < 1e-10) throw StepTooSmall("hierarchy: fd_step below cancellation guard");
    auto at = [&](double off) {
      TimePoint s = t;
      s[size_t(l)] += off;
      return generators[size_t(k)](s);
    };
    return (-at(2 * fd_step) + 8.0 * at(fd_step) - 8.0 * at(-fd_step) + at(-2 * fd_step)) /
           (12.0 * fd_step);
  }
};

struct CurvatureResidual {
  int l = 0, k = 0;
  TimePoint at;
  Matrix residual;
  double norm = 0.0;
  bool analytic = false;
  double fd_step = 0.0;
};

inline CurvatureResidual zero_curvature_residual(const HamiltonianHierarchy& h, int l,
                                                 int k, const TimePoint& t,
                                                 double fd_step = 1e-3) {
  if (l < 0 || l >= h.n_times || k < 0 || k >= h.n_times || l == k)
    throw IndexOutOfRange("zero_curvature_residual: need distinct indices in range");
  if (!h.has_analytic_partials() && fd_step < 1e-10)
    throw StepTooSmall("zero_curvature_residual: fd_step below cancellation guard");
  CurvatureResidual r;
  r.l = l;
  r.k = k;
  r.at = t;
  r.analytic = h.has_analytic_partials();
  r.fd_step = fd_step;
  Matrix hk = h.generator(k, t), hl = h.generator(l, t);
  r.residual = h.partial(k, l, t, fd_step) - h.partial(l, k, t, fd_step) -
               kImag * commutator(hk, hl);
  r.norm = r.residual.norm();
  return r;
}

// Deterministic sample points used by the construction-time checks.
inline std::vector<TimePoint> hierarchy_check_points(int n_times) {
  std::vector<TimePoint> pts;
  pts.push_back(TimePoint(size_t(n_times), 0.5));
  TimePoint a(size_t(n_times), 0.3), b(size_t(n_times), 0.7);
  for (int i = 0; i < n_times; ++i) {
    TimePoint m(size_t(n_times), 0.3);
    m[size_t(i)] = 0.7;
    pts.push_back(m);
  }
  pts.push_back(a);
  pts.push_back(b);
  return pts;
}

// Max Hermiticity defect of every generator over the check points.
inline double hierarchy_hermiticity_defect(const HamiltonianHierarchy& h) {
  double worst = 0.0;
  for (const TimePoint& t : hierarchy_check_points(h.n_times))
    for (int k = 0; k < h.n_times; ++k)
      worst = std::max(worst, hermiticity_defect(h.generator(k, t), true));
  return worst;
}

// Max deviation between analytic partials and 4th-order central differences.
inline double partials_consistency_defect(const HamiltonianHierarchy& h,
                                          double fd_step = 1e-3) {
  if (!h.has_analytic_partials()) return 0.0;
  HamiltonianHierarchy fd = h;
  fd.partials.clear();
  double worst = 0.0;
  for (const TimePoint& t : hierarchy_check_points(h.n_times))
    for (int k = 0; k < h.n_times; ++k)
      for (int l = 0; l < h.n_times; ++l)
        worst = std::max(worst,
                         (h.partial(k, l, t, fd_step) - fd.partial(k, l, t, fd_step)).norm());
  return worst;
}

// ---------------------------------------------------------------------------
// Gauge maps.

struct GaugeMap {
  int n_times = 0;
  OperatorMap value;                                  // V(t), unitary
  std::vector<OperatorMap> d1;                        // dV/dt_k
  std::vector<std::vector<OperatorMap>> d2;           // d2V/dt_k dt_l (optional)
  std::string label;
};

// H_k' = V H_k V^dag + i (dV/dt_k) V^dag.  Flatness is preserved exactly:
// the curvature transforms covariantly, Z' = V Z V^dag.
inline HamiltonianHierarchy gauge_transform(const HamiltonianHierarchy& h,
                                            const GaugeMap& gauge) {
  if (gauge.n_times != h.n_times)
    throw DimMismatch("gauge_transform: time dimension mismatch");
  if (int(gauge.d1.size()) != h.n_times)
    throw InconsistentDerivative("gauge_transform: gauge map must carry all first derivatives");

  for (const TimePoint& t : hierarchy_check_points(h.n_times)) {
    Matrix v = gauge.value(t);
    if (unitarity_defect(v) > 1e-12 * std::sqrt(double(h.dim)))
      throw NotUnitary("gauge_transform: V(t) fails the unitarity check");
    const double step = 1e-4;
    for (int k = 0; k < h.n_times; ++k) {
      TimePoint tp = t, tm = t;
      tp[size_t(k)] += step;
      tm[size_t(k)] -= step;
      Matrix fd = (gauge.value(tp) - gauge.value(tm)) / (2.0 * step);
      Matrix an = gauge.d1[size_t(k)](t);
      if ((fd - an).norm() > 1e-5 * (1.0 + an.norm()))
        throw InconsistentDerivative("gauge_transform: dV inconsistent with V");
    }
  }

  HamiltonianHierarchy out;
  out.dim = h.dim;
  out.n_times = h.n_times;
  out.label = h.label + "|gauge:" + gauge.label;
  for (int k = 0; k < h.n_times; ++k) {
    auto gen = [g = gauge, base = h.generators[size_t(k)], k](const TimePoint& t) {
      Matrix v = g.value(t);
      return (v * base(t) * v.adjoint() + kImag * g.d1[size_t(k)](t) * v.adjoint()).eval();
    };
    out.generators.push_back(gen);
  }
  if (h.has_analytic_partials() && !gauge.d2.empty()) {
    out.partials.resize(size_t(h.n_times));
    for (int k = 0; k < h.n_times; ++k) {
      for (int l = 0; l < h.n_times; ++l) {
        auto dp = [g = gauge, base = h.generators[size_t(k)],
                   dbase = h.partials[size_t(k)][size_t(l)], k, l](const TimePoint& t) {
          Matrix v = g.value(t);
          Matrix vd = v.adjoint();
          Matrix dvl = g.d1[size_t(l)](t);
          Matrix dvk = g.d1[size_t(k)](t);
          Matrix d2v = g.d2[size_t(k)][size_t(l)](t);
          Matrix hk = base(t);
          return (dvl * hk * vd + v * dbase(t) * vd + v * hk * dvl.adjoint() +
                  kImag * d2v * vd + kImag * dvk * dvl.adjoint())
              .eval();
        };
        out.partials[size_t(k)].push_back(dp);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Time polynomials: the small expression grammar used to specify gauge
// phases over {t_1..t_N}, e.g. "0.12*t1 + 0.06*t2^2" or "0.1*t1*t2".

struct TimePolynomial {
  struct Term {
    double coeff = 0.0;
    std::vector<int> expo;  // exponent per time axis
  };
  int n_times = 0;
  std::vector<Term> terms;

  double eval(const TimePoint& t) const {
    double s = 0.0;
    for (const Term& term : terms) {
      double v = term.coeff;
      for (int i = 0; i < n_times; ++i)
        for (int e = 0; e < term.expo[size_t(i)]; ++e) v *= t[size_t(i)];
      s += v;
    }
    return s;
  }

  TimePolynomial partial(int axis) const {
    TimePolynomial d;
    d.n_times = n_times;
    for (const Term& term : terms) {
      int e = term.expo[size_t(axis)];
      if (e == 0) continue;
      Term t = term;
      t.coeff *= e;
      t.expo[size_t(axis)] -= 1;
      d.terms.push_back(t);
    }
    return d;
  }
};

inline TimePolynomial parse_time_polynomial(const std::string& text, int n_times) {
  TimePolynomial poly;
  poly.n_times = n_times;
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) return poly;

  size_t pos = 0;
  while (pos < s.size()) {
    double sign = 1.0;
    while (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
      if (s[pos] == '-') sign = -sign;
      ++pos;
    }
    size_t end = pos;
    while (end < s.size()) {
      // '+'/'-' split terms except inside scientific-notation coefficients
      if ((s[end] == '+' || s[end] == '-') &&
          !(end > 0 && (s[end - 1] == 'e' || s[end - 1] == 'E')))
        break;
      ++end;
    }
    std::string termtext = s.substr(pos, end - pos);
    if (termtext.empty()) throw ConfigError("time polynomial: empty term in '" + text + "'");
    TimePolynomial::Term term;
    term.coeff = sign;
    term.expo.assign(size_t(n_times), 0);
    size_t fpos = 0;
    while (fpos < termtext.size()) {
      size_t fend = termtext.find('*', fpos);
      if (fend == std::string::npos) fend = termtext.size();
      std::string factor = termtext.substr(fpos, fend - fpos);
      if (factor.empty()) throw ConfigError("time polynomial: empty factor in '" + text + "'");
      if (factor[0] == 't') {
        size_t caret = factor.find('^');
        std::string idx = caret == std::string::npos ? factor.substr(1)
                                                     : factor.substr(1, caret - 1);
        int axis = std::stoi(idx) - 1;
        if (axis < 0 || axis >= n_times)
          throw ConfigError("time polynomial: axis out of range in '" + factor + "'");
        int e = caret == std::string::npos ? 1 : std::stoi(factor.substr(caret + 1));
        if (e < 0) throw ConfigError("time polynomial: negative exponent");
        term.expo[size_t(axis)] += e;
      } else {
        term.coeff *= std::stod(factor);
      }
      fpos = fend + 1;
    }
    poly.terms.push_back(term);
    pos = end;
  }
  return poly;
}

// Phase gauge V(t) = exp(-i phi(t) G) with G Hermitian; G commutes with V,
// so all derivatives are analytic:
//   dV/dt_k   = -i (d_k phi) G V
//   d2V/dkdl  = (-i (d_kl phi) G - (d_k phi)(d_l phi) G^2) V
inline GaugeMap make_phase_gauge(const TimePolynomial& phi, const Matrix& generator,
                                 const std::string& label = "phase") {
  if (!is_hermitian(generator, 1e-10))
    throw NotUnitary("make_phase_gauge: generator must be Hermitian");
  GaugeMap g;
  g.n_times = phi.n_times;
  g.label = label;
  Matrix G = generator;
  g.value = [phi, G](const TimePoint& t) { return matexp(G, -kImag * phi.eval(t)); };
  for (int k = 0; k < phi.n_times; ++k) {
    TimePolynomial dk = phi.partial(k);
    g.d1.push_back([phi, dk, G](const TimePoint& t) {
      return (-kImag * dk.eval(t) * G * matexp(G, -kImag * phi.eval(t))).eval();
    });
  }
  g.d2.resize(size_t(phi.n_times));
  for (int k = 0; k < phi.n_times; ++k) {
    TimePolynomial dk = phi.partial(k);
    for (int l = 0; l < phi.n_times; ++l) {
      TimePolynomial dl = phi.partial(l);
      TimePolynomial dkl = dk.partial(l);
      g.d2[size_t(k)].push_back([phi, dk, dl, dkl, G](const TimePoint& t) {
        Matrix v = matexp(G, -kImag * phi.eval(t));
        return ((-kImag * dkl.eval(t)) * G * v -
                (dk.eval(t) * dl.eval(t)) * (G * G) * v)
            .eval();
      });
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Built-in hierarchies.

enum class Basis { grid, oscillator };

namespace detail {

inline Matrix matrix_power(const Matrix& m, int e) {
  Matrix r = Matrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < e; ++i) r = r * m;
  return r;
}

inline Matrix poly_of(const Matrix& m, const std::vector<double>& coeffs) {
  // coeffs[j] multiplies m^j
  Matrix r = Matrix::Zero(m.rows(), m.cols());
  for (int j = int(coeffs.size()) - 1; j >= 0; --j) r = (r * m).eval() + coeffs[size_t(j)] * Matrix::Identity(m.rows(), m.cols());
  return r;
}

inline std::pair<Matrix, Matrix> basis_qp(int dim, Basis basis, double length) {
  if (basis == Basis::grid) {
    GridOperators g = build_grid_operators(dim, length);
    return {g.position, g.momentum};
  }
  LadderOperators l = build_oscillator_operators(dim);
  return {l.q, l.p};
}

inline HamiltonianHierarchy autonomous_hierarchy(int dim, std::vector<Matrix> mats,
                                                 std::string label) {
  HamiltonianHierarchy h;
  h.dim = dim;
  h.n_times = int(mats.size());
  h.label = std::move(label);
  for (const Matrix& m : mats)
    h.generators.push_back([m](const TimePoint&) { return m; });
  Matrix zero = Matrix::Zero(dim, dim);
  h.partials.assign(size_t(h.n_times),
                    std::vector<OperatorMap>(size_t(h.n_times),
                                             [zero](const TimePoint&) { return zero; }));
  return h;
}

}  // namespace detail

// H_k = p^{o_k} / o_k on the chosen basis.  Exactly flat on the grid basis
// (functions of one operator); truncation-affected on the oscillator basis.
inline HamiltonianHierarchy free_hierarchy(const std::vector<int>& orders, int dim,
                                           Basis basis = Basis::grid,
                                           double length = 0.0) {
  if (orders.empty()) throw UnsupportedCombination("free_hierarchy: need orders");
  if (length <= 0.0) length = double(dim);
  auto [q, p] = detail::basis_qp(dim, basis, length);
  std::vector<Matrix> mats;
  for (int o : orders) {
    if (o < 1) throw UnsupportedCombination("free_hierarchy: orders must be >= 1");
    mats.push_back(detail::matrix_power(p, o) / double(o));
  }
  std::string label = "free";
  if (basis == Basis::oscillator) label += "(truncation-affected)";
  return detail::autonomous_hierarchy(dim, mats, label);
}

// H_j = p^2/2 + w_j^2 q^2/2; non-flat whenever w_1 != w_2.
inline HamiltonianHierarchy oscillator_pair_hierarchy(double w1, double w2, int dim,
                                                      Basis basis = Basis::oscillator,
                                                      double length = 0.0) {
  if (length <= 0.0) length = double(dim);
  auto [q, p] = detail::basis_qp(dim, basis, length);
  Matrix kin = p * p / 2.0;
  std::vector<Matrix> mats{kin + 0.5 * w1 * w1 * q * q, kin + 0.5 * w2 * w2 * q * q};
  return detail::autonomous_hierarchy(dim, mats, "oscillator_pair");
}

// H_k = f_k(H) for user polynomials f_k; polynomials of one Hermitian
// operator commute, so the hierarchy is exactly flat.
inline HamiltonianHierarchy function_family_hierarchy(
    const Matrix& H, const std::vector<std::vector<double>>& polys,
    const std::string& label = "function_family") {
  if (polys.empty()) throw UnsupportedCombination("function_family_hierarchy: need polynomials");
  if (!is_hermitian(H, 1e-10))
    throw UnsupportedCombination("function_family_hierarchy: base operator must be Hermitian");
  std::vector<Matrix> mats;
  for (const auto& c : polys) mats.push_back(detail::poly_of(H, c));
  return detail::autonomous_hierarchy(int(H.rows()), mats, label);
}

}  // namespace oneform

#endif
