#pragma once

// Norms on M(A): exact norms of graded components, the distance-formula
// (limit) norms, the seminorm |||.|||_J and the power-method estimator of the
// C*-norm through the 0-diagonal projection.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "xprod/matcalc.hpp"

namespace xprod {

/// Edge b <- i iff block i occurs in delta(.)_b.
class ReachabilityDigraph {
 public:
  using BoolMatrix = std::vector<std::vector<bool>>;

  explicit ReachabilityDigraph(const Endomorphism& d) : adj_(d.num_blocks(), std::vector<bool>(d.num_blocks())) {
    for (std::size_t b = 0; b < d.num_blocks(); ++b)
      for (std::size_t i = 0; i < d.num_blocks(); ++i) adj_[b][i] = d.mult(b, i) > 0;
  }

  std::size_t size() const { return adj_.size(); }
  const BoolMatrix& adjacency() const { return adj_; }

  /// R * S in the boolean semiring.
  static BoolMatrix compose(const BoolMatrix& r, const BoolMatrix& s) {
    const std::size_t n = r.size();
    BoolMatrix out(n, std::vector<bool>(n, false));
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t l = 0; l < n; ++l)
        if (r[b][l])
          for (std::size_t i = 0; i < n; ++i)
            if (s[l][i]) out[b][i] = true;
    return out;
  }

  /// nu'_b = max{nu_i : R[b][i]}
  static std::vector<double> propagate(const BoolMatrix& r, const std::vector<double>& nu) {
    std::vector<double> out(nu.size(), 0.0);
    for (std::size_t b = 0; b < nu.size(); ++b)
      for (std::size_t i = 0; i < nu.size(); ++i)
        if (r[b][i]) out[b] = std::max(out[b], nu[i]);
    return out;
  }

 private:
  BoolMatrix adj_;
};

/// The orbit m -> delta^m(x), m >= 1, seen through block norms. The powers
/// R^m become periodic from m = transient on with the given period.
struct OrbitSummary {
  double sup_distance = 0.0;  // sup_{m>=1} d(delta^m(x), J)
  double tail_norm = 0.0;     // lim_m ||delta^m(x)||, a nonincreasing sequence
  int transient = 0;
  int period = 0;
};

inline std::vector<double> block_norms(const Element& x) {
  std::vector<double> nu;
  for (const auto& b : x.blocks()) nu.push_back(operator_norm(b));
  return nu;
}

inline OrbitSummary orbit_summary(const Element& x, const Ideal& J, const Endomorphism& d) {
  const ReachabilityDigraph g(d);
  const std::vector<double> nu = block_norms(x);
  auto dist = [&](const std::vector<double>& v) {
    double m = 0.0;
    for (std::size_t b = 0; b < v.size(); ++b)
      if (!J.contains(b)) m = std::max(m, v[b]);
    return m;
  };
  auto full = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double a : v) m = std::max(m, a);
    return m;
  };

  OrbitSummary out;
  std::map<ReachabilityDigraph::BoolMatrix, int> seen;
  ReachabilityDigraph::BoolMatrix r = g.adjacency();
  for (int m = 1;; ++m) {
    auto [it, fresh] = seen.emplace(r, m);
    if (!fresh) {
      out.transient = it->second;
      out.period = m - it->second;
      break;
    }
    const std::vector<double> v = ReachabilityDigraph::propagate(r, nu);
    out.sup_distance = std::max(out.sup_distance, dist(v));
    out.tail_norm = full(v);
    r = ReachabilityDigraph::compose(g.adjacency(), r);
  }
  return out;
}

inline double pushforward_sup(const Element& x, const Ideal& J, const Endomorphism& d) {
  return orbit_summary(x, J, d).sup_distance;
}

namespace detail {

// Coefficients of a k-diagonal as a k >= 0 sequence; negative diagonals are
// replaced by their adjoints, which have the same norm.
inline std::map<Index, Element> forward_coefficients(const KDiagonal& d) {
  if (d.k >= 0) return d.coeffs;
  std::map<Index, Element> out;
  for (const auto& [n, a] : d.coeffs) out.emplace(n, a.adjoint());
  return out;
}

// s_i = sum_{j<=i} delta^{i-j}(a_j) for i = 0..N.
inline std::vector<Element> partial_sums(const Endomorphism& d, const std::map<Index, Element>& coeffs) {
  std::vector<Element> s;
  if (coeffs.empty()) return s;
  const Index N = coeffs.rbegin()->first;
  Element acc = Element::zero(d.algebra());
  for (Index i = 0; i <= N; ++i) {
    if (i > 0) acc = d(acc);
    auto it = coeffs.find(i);
    if (it != coeffs.end()) acc = acc + it->second;
    s.push_back(acc);
  }
  return s;
}

}  // namespace detail

/// Norm of the element of B_k given by a k-diagonal:
/// max( max_{i=0..N} d(s_i, J), d(s_N, I) ).
inline double bk_norm_exact(const KDiagonal& dg, const Ideal& J) {
  const Endomorphism& d = dg.sys->endo;
  require_orthogonal(d, J);
  const auto s = detail::partial_sums(d, detail::forward_coefficients(dg));
  if (s.empty()) return 0.0;
  double v = distance_to_ideal(s.back(), kernel(d));
  for (const auto& si : s) v = std::max(v, distance_to_ideal(si, J));
  return v;
}

struct LimitNorm {
  double value = 0.0;
  int transient = 0;
  int period = 0;
};

/// The same norm as the limit over n of the distance formula, with every
/// term past the support evaluated through the orbit of s_N.
inline LimitNorm bk_norm_limit_report(const KDiagonal& dg, const Ideal& J) {
  const Endomorphism& d = dg.sys->endo;
  require_orthogonal(d, J);
  const auto s = detail::partial_sums(d, detail::forward_coefficients(dg));
  if (s.empty()) return {};
  double v = 0.0;
  for (const auto& si : s) v = std::max(v, distance_to_ideal(si, J));
  const OrbitSummary orbit = orbit_summary(s.back(), J, d);
  return {std::max({v, orbit.sup_distance, orbit.tail_norm}), orbit.transient, orbit.period};
}

inline double bk_norm_limit(const KDiagonal& dg, const Ideal& J) { return bk_norm_limit_report(dg, J).value; }

/// |||x|||_J = sum_k ||x_k||.
inline double seminorm(const CPMatrix& x, const Ideal& J) {
  require_orthogonal(x.system().endo, J);
  double s = 0.0;
  for (int k : x.diagonals()) s += bk_norm_limit(diagonal(x, k), J);
  return s;
}

enum class Schedule { linear, doubling };

inline std::string to_string(Schedule s) { return s == Schedule::linear ? "linear" : "doubling"; }
inline Schedule parse_schedule(const std::string& s) {
  if (s == "linear") return Schedule::linear;
  if (s == "doubling") return Schedule::doubling;
  throw ParseError("unknown schedule '" + s + "' (expected linear or doubling)");
}

struct EstimateConfig {
  int kmax = 6;
  Schedule schedule = Schedule::linear;
  std::size_t support_cap = 10000;
};

struct NormReport {
  std::string method;
  std::vector<double> values;
  std::vector<long> k_schedule;  // the power of x x^* used for each value
  int transient = 0;
  int period = 0;
};

/// e_k = ||N_0((x x^*)^n)||^{1/(2n)} with n = 2k (linear) or n = 2^k (doubling).
///
/// The powers are taken of (x x^*)/s with s = ||N_0(x x^*)||, then rescaled,
/// so that tol-pruning of entries acts on normalised magnitudes.
inline NormReport csnorm_estimate(const CPMatrix& x, const Ideal& J, const EstimateConfig& cfg = {}) {
  require_orthogonal(x.system().endo, J);
  if (cfg.kmax < 1) throw PreconditionError("kmax must be at least 1");
  NormReport rep{"estimate", {}, {}, 0, 0};
  for (int k = 1; k <= cfg.kmax; ++k)
    rep.k_schedule.push_back(cfg.schedule == Schedule::linear ? 2L * k : 1L << k);

  const CPMatrix p = star(x, adjoint(x));
  const double s = bk_norm_exact(diagonal(p, 0), J);
  if (s <= x.system().tol.tol) {
    rep.values.assign(static_cast<std::size_t>(cfg.kmax), 0.0);
    return rep;
  }
  const CPMatrix q = scale(1.0 / s, p);
  auto check_cap = [&](const CPMatrix& m, int k) {
    if (m.size() > cfg.support_cap)
      throw ResourceError("support cap " + std::to_string(cfg.support_cap) + " reached at k = " + std::to_string(k) +
                          " (" + std::to_string(m.size()) + " entries)");
  };

  const CPMatrix q2 = star(q, q);
  CPMatrix power = q2;
  for (int k = 1; k <= cfg.kmax; ++k) {
    if (k > 1) power = cfg.schedule == Schedule::linear ? star(power, q2) : star(power, power);
    check_cap(power, k);
    const double n = static_cast<double>(rep.k_schedule[static_cast<std::size_t>(k - 1)]);
    const double c = bk_norm_exact(diagonal(power, 0), J);
    rep.values.push_back(std::sqrt(s) * std::pow(c, 1.0 / (2.0 * n)));
  }
  return rep;
}

}  // namespace xprod
