#ifndef ONEFORM_LATTICE_HPP
#define ONEFORM_LATTICE_HPP

// Staircase paths on an N-dimensional time lattice: the multi-index
// parameterization of the path families, exact enumeration for N = 2, 3,
// closed-form counts, and the redundancy analysis of the raw (unconstrained)
// families together with the permutation-factor bookkeeping that resolves it.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "oneform/types.hpp"

namespace oneform {

struct LatticeSpec {
  int n_times = 2;              // N
  int steps = 1;                // lattice cells per axis (symmetric)
  std::vector<double> widths;   // cell widths eps_1..eps_N

  LatticeSpec() = default;
  LatticeSpec(int n, int s, std::vector<double> w = {})
      : n_times(n), steps(s), widths(std::move(w)) {
    if (widths.empty()) widths.assign(n_times, 1.0);
  }
};

struct Move {
  int axis = 0;
  int length = 0;
  friend bool operator==(const Move&, const Move&) = default;
};

// Monotone axis-aligned lattice path.  Canonical form has no zero-length
// moves and no two consecutive moves on the same axis; two paths describe
// the same curve iff their canonical forms are equal.
struct StaircasePath {
  std::vector<int> start;
  std::vector<Move> moves;

  int n_axes() const { return int(start.size()); }

  std::vector<int> end() const {
    std::vector<int> e = start;
    for (const Move& m : moves) e[m.axis] += m.length;
    return e;
  }

  int total_length() const {
    int s = 0;
    for (const Move& m : moves) s += m.length;
    return s;
  }

  bool is_monotone() const {
    for (const Move& m : moves)
      if (m.length < 0 || m.axis < 0 || m.axis >= n_axes()) return false;
    return true;
  }

  friend bool operator==(const StaircasePath&, const StaircasePath&) = default;
};

inline StaircasePath canonical(const StaircasePath& p) {
  StaircasePath c;
  c.start = p.start;
  for (const Move& m : p.moves) {
    if (m.length == 0) continue;
    if (!c.moves.empty() && c.moves.back().axis == m.axis)
      c.moves.back().length += m.length;
    else
      c.moves.push_back(m);
  }
  return c;
}

// Compact text form, e.g. "(0,0);t1:2,t2:1,t1:1,t2:3".
inline std::string to_string(const StaircasePath& p) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < p.start.size(); ++i)
    os << (i ? "," : "") << p.start[i];
  os << ')' << ';';
  for (size_t i = 0; i < p.moves.size(); ++i) {
    if (i) os << ',';
    os << 't' << (p.moves[i].axis + 1) << ':' << p.moves[i].length;
  }
  return os.str();
}

inline StaircasePath parse_path(const std::string& text) {
  StaircasePath p;
  size_t pos = 0;
  if (pos < text.size() && text[pos] == '(') {
    size_t close = text.find(')', pos);
    if (close == std::string::npos)
      throw ConfigError("parse_path: unterminated start point");
    std::string inside = text.substr(1, close - 1);
    std::istringstream is(inside);
    std::string tok;
    while (std::getline(is, tok, ',')) p.start.push_back(std::stoi(tok));
    pos = close + 1;
    if (pos < text.size() && text[pos] == ';') ++pos;
  }
  std::istringstream is(text.substr(pos));
  std::string tok;
  int max_axis = -1;
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) continue;
    size_t colon = tok.find(':');
    if (tok[0] != 't' || colon == std::string::npos)
      throw ConfigError("parse_path: bad move token '" + tok + "'");
    Move m;
    m.axis = std::stoi(tok.substr(1, colon - 1)) - 1;
    m.length = std::stoi(tok.substr(colon + 1));
    max_axis = std::max(max_axis, m.axis);
    p.moves.push_back(m);
  }
  if (p.start.empty()) p.start.assign(size_t(max_axis + 1), 0);
  return p;
}

inline bool path_less(const StaircasePath& a, const StaircasePath& b) {
  if (a.start != b.start) return a.start < b.start;
  auto key = [](const StaircasePath& p) {
    std::vector<int> k;
    for (const Move& m : p.moves) {
      k.push_back(m.axis);
      k.push_back(m.length);
    }
    return k;
  };
  return key(a) < key(b);
}

// ---------------------------------------------------------------------------
// Counting helpers (exact 64-bit integer arithmetic; ranges here stay tiny).

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * std::uint64_t(n - k + i) / std::uint64_t(i);
  return r;
}

// Number of monotone staircase paths from the origin to (steps,...,steps).
inline std::uint64_t count_paths(const LatticeSpec& spec) {
  const int n = spec.n_times, s = spec.steps;
  if (n == 2) return binomial(2 * s, s);
  if (n == 3) return binomial(3 * s, s) * binomial(2 * s, s);
  throw TooLarge("count_paths: only N in {2,3} is supported");
}

// ---------------------------------------------------------------------------
// Multi-index parameterization.
//
// 2D, starting axis t_a: the path takes unit steps along t_a at transverse
// heights m_0 <= m_1 <= ... <= m_{steps-1} with m_0 = 0, then closes along
// the transverse axis.  `values` stores m_1..m_{steps-1}.
//
// 3D, primary axis t_a with transverse axes (u, v): between consecutive
// primary unit steps the path walks a monotone staircase in the (u, v)
// plane from (m_{i-1}, l_{i-1}) to (m_i, l_i); `corner_shuffles` stores the
// lexicographic rank of each such interleaving.

struct PathMultiIndex {
  int starting_axis = 0;
  std::vector<int> values;           // m_1..m_{steps-1}
  std::vector<int> values2;          // 3D only: l_1..l_{steps-1}
  std::vector<int> corner_shuffles;  // 3D only: one rank per corner (steps entries)
};

inline bool weakly_increasing(const std::vector<int>& v, int lo, int hi) {
  int prev = lo;
  for (int x : v) {
    if (x < prev || x > hi) return false;
    prev = x;
  }
  return true;
}

namespace detail {

// Lexicographically unrank an interleaving of du steps on axis u and dv
// steps on axis v ('u' ordered before 'v').  Appends unit moves to out.
inline void unrank_shuffle(int du, int dv, std::uint64_t rank, int axis_u,
                           int axis_v, std::vector<Move>& out) {
  while (du > 0 || dv > 0) {
    if (du == 0) {
      out.push_back({axis_v, 1});
      --dv;
      continue;
    }
    if (dv == 0) {
      out.push_back({axis_u, 1});
      --du;
      continue;
    }
    std::uint64_t with_u = binomial(du - 1 + dv, dv);
    if (rank < with_u) {
      out.push_back({axis_u, 1});
      --du;
    } else {
      rank -= with_u;
      out.push_back({axis_v, 1});
      --dv;
    }
  }
}

inline void transverse_axes(int n_times, int primary, int& u, int& v) {
  u = -1;
  v = -1;
  for (int a = 0; a < n_times; ++a) {
    if (a == primary) continue;
    if (u < 0)
      u = a;
    else
      v = a;
  }
}

}  // namespace detail

inline StaircasePath path_from_multiindex(const LatticeSpec& spec,
                                          const PathMultiIndex& idx) {
  const int n = spec.n_times, s = spec.steps;
  if (idx.starting_axis < 0 || idx.starting_axis >= n)
    throw InvalidMultiIndex("path_from_multiindex: starting axis out of range");
  if (int(idx.values.size()) != s - 1)
    throw InvalidMultiIndex("path_from_multiindex: need steps-1 index values");
  if (!weakly_increasing(idx.values, 0, s))
    throw InvalidMultiIndex("path_from_multiindex: values must be weakly increasing in [0,steps]");

  StaircasePath p;
  p.start.assign(size_t(n), 0);

  if (n == 2) {
    const int a = idx.starting_axis;
    const int b = 1 - a;
    int height = 0;
    p.moves.push_back({a, 1});
    for (int i = 1; i < s; ++i) {
      p.moves.push_back({b, idx.values[i - 1] - height});
      height = idx.values[i - 1];
      p.moves.push_back({a, 1});
    }
    p.moves.push_back({b, s - height});
    return canonical(p);
  }

  if (n == 3) {
    if (int(idx.values2.size()) != s - 1 || int(idx.corner_shuffles.size()) != s)
      throw InvalidMultiIndex("path_from_multiindex: 3D index needs a second sequence and one shuffle per corner");
    if (!weakly_increasing(idx.values2, 0, s))
      throw InvalidMultiIndex("path_from_multiindex: second sequence must be weakly increasing in [0,steps]");
    int u, v;
    detail::transverse_axes(3, idx.starting_axis, u, v);
    int mu = 0, lv = 0;
    for (int i = 1; i <= s; ++i) {
      p.moves.push_back({idx.starting_axis, 1});
      const int mi = (i < s) ? idx.values[i - 1] : s;
      const int li = (i < s) ? idx.values2[i - 1] : s;
      const int du = mi - mu, dv = li - lv;
      const std::uint64_t n_shuffles = binomial(du + dv, du);
      const int rank = idx.corner_shuffles[i - 1];
      if (rank < 0 || std::uint64_t(rank) >= n_shuffles)
        throw InvalidMultiIndex("path_from_multiindex: shuffle rank out of range");
      detail::unrank_shuffle(du, dv, std::uint64_t(rank), u, v, p.moves);
      mu = mi;
      lv = li;
    }
    return canonical(p);
  }

  throw TooLarge("path_from_multiindex: only N in {2,3} is supported");
}

// Inverse of path_from_multiindex for N = 2; the parameterization is a
// bijection per starting axis, and the two families partition all monotone
// paths by the axis of the first move.
inline PathMultiIndex multiindex_from_path(const LatticeSpec& spec,
                                           const StaircasePath& path) {
  const int s = spec.steps;
  if (spec.n_times != 2)
    throw TooLarge("multiindex_from_path: only N = 2 is supported");
  StaircasePath c = canonical(path);
  if (c.moves.empty()) throw InvalidMultiIndex("multiindex_from_path: empty path");
  PathMultiIndex idx;
  idx.starting_axis = c.moves.front().axis;
  const int a = idx.starting_axis;
  std::vector<int> heights;  // transverse coordinate at each unit step along a
  int height = 0;
  for (const Move& m : c.moves) {
    if (m.axis == a)
      for (int j = 0; j < m.length; ++j) heights.push_back(height);
    else
      height += m.length;
  }
  if (int(heights.size()) != s || heights.front() != 0)
    throw InvalidMultiIndex("multiindex_from_path: path is not a (steps x steps) staircase of the family");
  idx.values.assign(heights.begin() + 1, heights.end());
  return idx;
}

// ---------------------------------------------------------------------------
// Enumeration.  Deterministic order: starting axis first, then the
// lexicographic order of the multi-index (and, in 3D, of the second
// sequence and the corner shuffle ranks).

namespace detail {

inline void weakly_increasing_sequences(int len, int lo, int hi,
                                        std::vector<std::vector<int>>& out) {
  std::vector<int> cur(size_t(len), 0);
  auto rec = [&](auto&& self, int pos, int floor_val) -> void {
    if (pos == len) {
      out.push_back(cur);
      return;
    }
    for (int v = floor_val; v <= hi; ++v) {
      cur[size_t(pos)] = v;
      self(self, pos + 1, v);
    }
  };
  rec(rec, 0, lo);
  if (len == 0) out.assign(1, {});
}

}  // namespace detail

inline std::vector<StaircasePath> enumerate_paths(const LatticeSpec& spec) {
  const int n = spec.n_times, s = spec.steps;
  if (n != 2 && n != 3) throw TooLarge("enumerate_paths: only N in {2,3}");
  if ((n == 2 && s > 8) || (n == 3 && s > 4))
    throw TooLarge("enumerate_paths: lattice too large (caps: steps<=8 in 2D, <=4 in 3D)");
  if (s < 1) throw TooLarge("enumerate_paths: need steps >= 1");

  std::vector<StaircasePath> out;
  std::vector<std::vector<int>> seqs;
  detail::weakly_increasing_sequences(s - 1, 0, s, seqs);

  if (n == 2) {
    for (int axis = 0; axis < 2; ++axis)
      for (const auto& m : seqs) {
        PathMultiIndex idx;
        idx.starting_axis = axis;
        idx.values = m;
        out.push_back(path_from_multiindex(spec, idx));
      }
    return out;
  }

  for (int axis = 0; axis < 3; ++axis) {
    for (const auto& m : seqs) {
      for (const auto& l : seqs) {
        // mixed-radix iteration over the corner shuffle ranks
        std::vector<int> radix(size_t(s), 0);
        int mu = 0, lv = 0;
        for (int i = 1; i <= s; ++i) {
          const int mi = (i < s) ? m[size_t(i - 1)] : s;
          const int li = (i < s) ? l[size_t(i - 1)] : s;
          radix[size_t(i - 1)] = int(binomial(mi - mu + li - lv, mi - mu));
          mu = mi;
          lv = li;
        }
        std::vector<int> rank(size_t(s), 0);
        bool done = false;
        while (!done) {
          PathMultiIndex idx;
          idx.starting_axis = axis;
          idx.values = m;
          idx.values2 = l;
          idx.corner_shuffles = rank;
          out.push_back(path_from_multiindex(spec, idx));
          done = true;
          for (int i = s - 1; i >= 0; --i) {
            if (++rank[size_t(i)] < radix[size_t(i)]) {
              done = false;
              break;
            }
            rank[size_t(i)] = 0;
          }
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Redundancy analysis of the raw path families.
//
// The raw K3/K5-style families below reproduce the unconstrained sums (free
// slice positions n_i, free m-ranges): they overcount geometric paths.  The
// constrained family (unit horizontal slices, weakly increasing m) is the
// bijective parameterization used by enumerate_paths.  In 3D each corner of
// the raw family carries both transverse orderings weighted by
// 1/P(N-1, r_j) with P(n, r) = n!/(n-r)! and r_j counting stalled axes;
// collision classes then resolve to total weight exactly 1.

struct RawFamilyMember {
  StaircasePath path;    // as parameterized (not canonicalized)
  double weight = 1.0;   // product of the inverse permutation factors
};

struct RawFamily {
  std::string name;
  std::vector<RawFamilyMember> members;
};

inline int permutation_factor(int n, int r) {
  int v = 1;
  for (int i = 0; i < r; ++i) v *= (n - i);
  return v;  // P(n, r) = n!/(n-r)!
}

// K3-shaped 2D family with free n1 in [1,steps-1] and m1 in [0,steps].
inline RawFamily raw_k3_family(const LatticeSpec& spec) {
  const int s = spec.steps;
  RawFamily fam;
  fam.name = "raw-k3";
  for (int n1 = 1; n1 <= s - 1; ++n1)
    for (int m1 = 0; m1 <= s; ++m1) {
      StaircasePath p;
      p.start = {0, 0};
      p.moves = {{0, n1}, {1, m1}, {0, s - n1}, {1, s - m1}};
      fam.members.push_back({p, 1.0});
    }
  return fam;
}

// K5-shaped 2D family with free 1 <= n1 < n2 <= steps-1 and
// 0 <= m1 <= m2 <= steps.
inline RawFamily raw_k5_family(const LatticeSpec& spec) {
  const int s = spec.steps;
  RawFamily fam;
  fam.name = "raw-k5";
  for (int n1 = 1; n1 <= s - 2; ++n1)
    for (int n2 = n1 + 1; n2 <= s - 1; ++n2)
      for (int m1 = 0; m1 <= s; ++m1)
        for (int m2 = m1; m2 <= s; ++m2) {
          StaircasePath p;
          p.start = {0, 0};
          p.moves = {{0, n1}, {1, m1},      {0, n2 - n1},
                     {1, m2 - m1}, {0, s - n2}, {1, s - m2}};
          fam.members.push_back({p, 1.0});
        }
  return fam;
}

// Constrained 2D family: unit slices (n_i = i), weakly increasing m.
// This is exactly the image of path_from_multiindex for one starting axis.
inline RawFamily constrained_family_2d(const LatticeSpec& spec, int axis) {
  RawFamily fam;
  fam.name = axis == 0 ? "constrained-t1" : "constrained-t2";
  std::vector<std::vector<int>> seqs;
  detail::weakly_increasing_sequences(spec.steps - 1, 0, spec.steps, seqs);
  for (const auto& m : seqs) {
    PathMultiIndex idx;
    idx.starting_axis = axis;
    idx.values = m;
    fam.members.push_back({path_from_multiindex(spec, idx), 1.0});
  }
  return fam;
}

// 3D family with primary-axis unit slices and per-corner transverse legs in
// BOTH orderings, each weighted by 1/P(2, r) with r the number of stalled
// transverse axes at that corner.
inline RawFamily raw_3d_two_order_family(const LatticeSpec& spec, int primary) {
  const int s = spec.steps;
  RawFamily fam;
  fam.name = "raw-3d-axis-t" + std::to_string(primary + 1);
  int u, v;
  detail::transverse_axes(3, primary, u, v);
  std::vector<std::vector<int>> seqs;
  detail::weakly_increasing_sequences(s - 1, 0, s, seqs);
  for (const auto& m : seqs)
    for (const auto& l : seqs) {
      // order vector: bit i says corner i runs axis v before axis u
      for (int bits = 0; bits < (1 << s); ++bits) {
        StaircasePath p;
        p.start = {0, 0, 0};
        double weight = 1.0;
        int mu = 0, lv = 0;
        for (int i = 1; i <= s; ++i) {
          p.moves.push_back({primary, 1});
          const int mi = (i < s) ? m[size_t(i - 1)] : s;
          const int li = (i < s) ? l[size_t(i - 1)] : s;
          const int du = mi - mu, dv = li - lv;
          const int r = (du == 0 ? 1 : 0) + (dv == 0 ? 1 : 0);
          weight /= permutation_factor(2, r);
          if (bits & (1 << (i - 1))) {
            p.moves.push_back({v, dv});
            p.moves.push_back({u, du});
          } else {
            p.moves.push_back({u, du});
            p.moves.push_back({v, dv});
          }
          mu = mi;
          lv = li;
        }
        fam.members.push_back({p, weight});
      }
    }
  return fam;
}

struct FamilyDedup {
  std::string family;
  int raw_members = 0;
  int distinct_paths = 0;
  int max_multiplicity = 0;
  bool all_ones = false;        // every collision class has multiplicity 1
  bool weights_resolve = false; // per-class weight sums are all exactly 1
  std::map<std::string, int> histogram;         // canonical path -> multiplicity
  std::map<std::string, double> weight_sums;    // canonical path -> summed weight
};

struct DedupReport {
  std::vector<FamilyDedup> families;
};

inline DedupReport dedup_report(const std::vector<RawFamily>& families) {
  DedupReport rep;
  for (const RawFamily& fam : families) {
    FamilyDedup fd;
    fd.family = fam.name;
    fd.raw_members = int(fam.members.size());
    for (const RawFamilyMember& mem : fam.members) {
      std::string key = to_string(canonical(mem.path));
      fd.histogram[key] += 1;
      fd.weight_sums[key] += mem.weight;
    }
    fd.distinct_paths = int(fd.histogram.size());
    fd.all_ones = true;
    fd.weights_resolve = true;
    for (const auto& [key, mult] : fd.histogram) {
      fd.max_multiplicity = std::max(fd.max_multiplicity, mult);
      if (mult != 1) fd.all_ones = false;
      if (std::abs(fd.weight_sums[key] - 1.0) > 1e-12) fd.weights_resolve = false;
    }
    rep.families.push_back(std::move(fd));
  }
  return rep;
}

}  // namespace oneform

#endif
