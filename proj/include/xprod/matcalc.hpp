#pragma once

// The *-algebra M(A) of finitely supported N x N matrices over A with
// a_ij in delta^i(1) A delta^j(1), the convolution product built from the
// shift Lambda, the Z-grading by diagonals and the u-decomposition.

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <memory>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include "xprod/endo.hpp"

namespace xprod {

/// A C*-dynamical system (A, delta) together with the tolerance used for
/// every comparison on matrices over it.
struct System {
  Endomorphism endo;
  Tolerance tol;

  const BlockAlgebra& algebra() const { return endo.algebra(); }
};

using SystemPtr = std::shared_ptr<const System>;

inline SystemPtr make_system(Endomorphism endo, Tolerance tol = {}) {
  return std::make_shared<const System>(System{std::move(endo), tol});
}

using Position = std::pair<Index, Index>;
using EntryMap = std::map<Position, Element>;

namespace detail {

// Cheap pre-screen: Frobenius bounds the operator norm from above.
inline bool negligible(const Element& x, double tol) {
  for (const auto& b : x.blocks()) {
    const double f = b.norm();
    if (f <= tol) continue;
    if (f > tol * std::sqrt(static_cast<double>(b.rows()))) return false;
    if (operator_norm(b) > tol) return false;
  }
  return true;
}

inline void accumulate(EntryMap& m, const Position& p, Element v) {
  auto it = m.find(p);
  if (it == m.end())
    m.emplace(p, std::move(v));
  else
    it->second += v;
}

struct PositionHash {
  std::size_t operator()(const Position& p) const noexcept {
    return std::hash<Index>()(p.first) * 1000003u ^ std::hash<Index>()(p.second);
  }
};

inline bool same_system(const SystemPtr& a, const SystemPtr& b) {
  return a == b || (a && b && a->endo.same_as(b->endo));
}

}  // namespace detail

/// An element of M(A).
class CPMatrix {
 public:
  explicit CPMatrix(SystemPtr sys) : sys_(std::move(sys)) {
    if (!sys_) throw StructuralError("matrix needs a system");
  }

  /// Checks shapes and the corner constraint; prunes negligible entries.
  static CPMatrix from_entries(SystemPtr sys, EntryMap entries) {
    CPMatrix x(std::move(sys));
    const System& s = *x.sys_;
    for (const auto& [pos, a] : entries) {
      if (pos.first < 0 || pos.second < 0) throw StructuralError("matrix indices must be nonnegative");
      if (!a.belongs_to(s.algebra())) throw StructuralError("entry does not belong to the system's algebra");
      const double r = corner_residual(s, pos, a);
      if (r > s.tol.tol * std::max(1.0, norm(a)))
        throw PreconditionError("entry (" + std::to_string(pos.first) + "," + std::to_string(pos.second) +
                                ") violates the corner constraint, residual " + std::to_string(r));
    }
    x.entries_ = std::move(entries);
    x.prune();
    return x;
  }

  /// For results of operations that preserve the corner constraint.
  static CPMatrix from_trusted_entries(SystemPtr sys, EntryMap entries) {
    CPMatrix x(std::move(sys));
    x.entries_ = std::move(entries);
    x.prune();
    return x;
  }

  const System& system() const { return *sys_; }
  const SystemPtr& system_ptr() const { return sys_; }
  const EntryMap& entries() const& { return entries_; }
  EntryMap entries() && { return std::move(entries_); }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  Element at(Index i, Index j) const {
    auto it = entries_.find({i, j});
    return it == entries_.end() ? Element::zero(sys_->algebra()) : it->second;
  }

  /// Largest row or column index carrying an entry, -1 when empty.
  Index support_bound() const {
    Index m = -1;
    for (const auto& [p, a] : entries_) m = std::max({m, p.first, p.second});
    return m;
  }
  Index max_row() const {
    Index m = -1;
    for (const auto& [p, a] : entries_) m = std::max(m, p.first);
    return m;
  }
  Index max_col() const {
    Index m = -1;
    for (const auto& [p, a] : entries_) m = std::max(m, p.second);
    return m;
  }

  /// Degrees k = j - i of the nonzero diagonals.
  std::set<int> diagonals() const {
    std::set<int> ks;
    for (const auto& [p, a] : entries_) ks.insert(static_cast<int>(p.second - p.first));
    return ks;
  }

  static double corner_residual(const System& s, const Position& pos, const Element& a) {
    const Element pi = s.endo.unit_power(static_cast<int>(pos.first));
    const Element pj = s.endo.unit_power(static_cast<int>(pos.second));
    return norm(pi * a * pj - a);
  }

  /// Largest corner-constraint residual over the stored entries.
  double corner_residual() const {
    double r = 0.0;
    for (const auto& [p, a] : entries_) r = std::max(r, corner_residual(*sys_, p, a));
    return r;
  }

 private:
  void prune() {
    const double tol = sys_->tol.tol;
    std::erase_if(entries_, [tol](const auto& kv) { return detail::negligible(kv.second, tol); });
  }

  SystemPtr sys_;
  EntryMap entries_;
};

inline void require_same_system(const CPMatrix& x, const CPMatrix& y) {
  if (!detail::same_system(x.system_ptr(), y.system_ptr()))
    throw StructuralError("matrices belong to different systems");
}

/// a sits at (0,0).
inline CPMatrix embed(const SystemPtr& sys, const Element& a) {
  return CPMatrix::from_entries(sys, {{{0, 0}, a}});
}

/// u has delta(1) at (0,1).
inline CPMatrix unit_u(const SystemPtr& sys) {
  return CPMatrix::from_trusted_entries(sys, {{{0, 1}, sys->endo.unit_power(1)}});
}

inline CPMatrix add(const CPMatrix& x, const CPMatrix& y) {
  require_same_system(x, y);
  EntryMap m = x.entries();
  for (const auto& [p, b] : y.entries()) detail::accumulate(m, p, b);
  return CPMatrix::from_trusted_entries(x.system_ptr(), std::move(m));
}

inline CPMatrix scale(Complex lambda, const CPMatrix& x) {
  EntryMap m;
  for (const auto& [p, a] : x.entries()) m.emplace(p, lambda * a);
  return CPMatrix::from_trusted_entries(x.system_ptr(), std::move(m));
}

/// (a^*)_{m,n} = (a_{n,m})^*
inline CPMatrix adjoint(const CPMatrix& x) {
  EntryMap m;
  for (const auto& [p, a] : x.entries()) m.emplace(Position{p.second, p.first}, a.adjoint());
  return CPMatrix::from_trusted_entries(x.system_ptr(), std::move(m));
}

inline CPMatrix subtract(const CPMatrix& x, const CPMatrix& y) { return add(x, scale(-1.0, y)); }

enum class LinearOp { add, scale, adjoint };

inline CPMatrix linear_ops(const CPMatrix& x, const CPMatrix& y, LinearOp op, Complex lambda = 1.0) {
  switch (op) {
    case LinearOp::add: return add(x, y);
    case LinearOp::scale: return scale(lambda, x);
    case LinearOp::adjoint: return adjoint(x);
  }
  throw StructuralError("unknown linear op");
}

/// Ordinary matrix product (x y)_{ij} = sum_l x_{il} y_{lj}.
inline CPMatrix plain_product(const CPMatrix& x, const CPMatrix& y) {
  require_same_system(x, y);
  std::map<Index, std::vector<std::pair<Index, const Element*>>> rows_of_y;
  for (const auto& [p, b] : y.entries()) rows_of_y[p.first].emplace_back(p.second, &b);
  EntryMap m;
  for (const auto& [p, a] : x.entries()) {
    auto it = rows_of_y.find(p.second);
    if (it == rows_of_y.end()) continue;
    for (const auto& [j, b] : it->second) detail::accumulate(m, {p.first, j}, a * *b);
  }
  return CPMatrix::from_trusted_entries(x.system_ptr(), std::move(m));
}

/// Lambda^n: entry (i,j) moves to (i+n, j+n) and is mapped through delta^n.
inline CPMatrix lambda_shift(const CPMatrix& x, int n = 1) {
  if (n < 0) throw PreconditionError("negative power of Lambda");
  EntryMap m;
  for (const auto& [p, a] : x.entries()) m.emplace(Position{p.first + n, p.second + n}, x.system().endo.apply(a, n));
  return CPMatrix::from_trusted_entries(x.system_ptr(), std::move(m));
}

/// Convolution product a * b = a . sum_{j>=0} Lambda^j(b) + sum_{j>=1} Lambda^j(a) . b.
///
/// Evaluated pair by pair: an entry a_{m,l} meets b_{s,t} in exactly one
/// summand, j = l - s when s <= l (landing at (m, t+l-s)) or j = s - l
/// otherwise (landing at (m+s-l, t)). All other summands vanish, so the
/// formally infinite sums stop at j = max support index.
inline CPMatrix star(const CPMatrix& x, const CPMatrix& y) {
  require_same_system(x, y);
  const Endomorphism& d = x.system().endo;

  struct Entry {
    Index i, j;
    std::vector<Element> powers;  // delta^0, delta^1, ... of the value
    const Element& power(const Endomorphism& d, Index n) {
      while (static_cast<Index>(powers.size()) <= n) powers.push_back(d(powers.back()));
      return powers[static_cast<std::size_t>(n)];
    }
  };
  std::vector<Entry> xs, ys;
  for (const auto& [p, a] : x.entries()) xs.push_back({p.first, p.second, {a}});
  for (const auto& [p, b] : y.entries()) ys.push_back({p.first, p.second, {b}});

  const Element zero = Element::zero(x.system().algebra());
  std::unordered_map<Position, Element, detail::PositionHash> acc;
  auto slot = [&](Index i, Index j) -> Element& { return acc.try_emplace(Position{i, j}, zero).first->second; };
  for (auto& a : xs) {
    for (auto& b : ys) {
      if (b.i <= a.j)
        slot(a.i, b.j + a.j - b.i).add_product(a.powers[0], b.power(d, a.j - b.i));
      else
        slot(a.i + b.i - a.j, b.j).add_product(a.power(d, b.i - a.j), b.powers[0]);
    }
  }
  return CPMatrix::from_trusted_entries(x.system_ptr(), EntryMap(std::make_move_iterator(acc.begin()),
                                                                 std::make_move_iterator(acc.end())));
}

/// x^{*n} for n >= 1.
inline CPMatrix star_power(const CPMatrix& x, int n) {
  if (n < 1) throw PreconditionError("star_power needs n >= 1");
  CPMatrix r = x;
  for (int k = 1; k < n; ++k) r = star(r, x);
  return r;
}

/// The component of M(A) living on one diagonal. coeffs[n] = a_n^{(k)},
/// i.e. a_{n,n+k} for k >= 0 and a_{n-k,n} for k < 0.
struct KDiagonal {
  SystemPtr sys;
  int k = 0;
  std::map<Index, Element> coeffs;

  bool empty() const { return coeffs.empty(); }
  /// Largest index n with a stored coefficient, -1 when empty.
  Index last() const { return coeffs.empty() ? -1 : coeffs.rbegin()->first; }
};

inline Position diagonal_position(int k, Index n) {
  return k >= 0 ? Position{n, n + k} : Position{n - k, n};
}

inline KDiagonal diagonal(const CPMatrix& x, int k) {
  KDiagonal d{x.system_ptr(), k, {}};
  for (const auto& [p, a] : x.entries())
    if (p.second - p.first == k) d.coeffs.emplace(std::min(p.first, p.second), a);
  return d;
}

inline CPMatrix to_matrix(const KDiagonal& d) {
  EntryMap m;
  for (const auto& [n, a] : d.coeffs) m.emplace(diagonal_position(d.k, n), a);
  return CPMatrix::from_trusted_entries(d.sys, std::move(m));
}

/// N_k: moves the k-diagonal onto the main diagonal and drops the rest.
inline CPMatrix nk(const CPMatrix& x, int k) {
  EntryMap m;
  for (const auto& [p, a] : x.entries())
    if (p.second - p.first == k) {
      const Index n = std::min(p.first, p.second);
      m.emplace(Position{n, n}, a);
    }
  return CPMatrix::from_trusted_entries(x.system_ptr(), std::move(m));
}

/// The same coefficients re-viewed as a 0-diagonal.
inline KDiagonal as_zero_diagonal(const KDiagonal& d) { return KDiagonal{d.sys, 0, d.coeffs}; }

/// u^{*k} for k > 0, and its adjoint for k < 0; embed(1) for k = 0.
inline CPMatrix u_power(const SystemPtr& sys, int k) {
  if (k == 0) return embed(sys, Element::identity(sys->algebra()));
  const CPMatrix u = unit_u(sys);
  return k > 0 ? star_power(u, k) : star_power(adjoint(u), -k);
}

struct UTerm {
  int k;
  CPMatrix coefficient;  // in M_0
};

/// x = sum_{k<0} u^{*|k|*} a_k + sum_{k>=0} a_k u^{*k}, with a_k = N_k(x).
inline std::vector<UTerm> u_decompose(const CPMatrix& x) {
  std::vector<UTerm> out;
  for (int k : x.diagonals()) out.push_back({k, nk(x, k)});
  return out;
}

inline CPMatrix u_reconstruct(const SystemPtr& sys, const std::vector<UTerm>& terms) {
  CPMatrix r(sys);
  for (const auto& [k, a] : terms)
    r = add(r, k >= 0 ? star(a, u_power(sys, k)) : star(u_power(sys, k), a));
  return r;
}

/// Gauge action: the k-diagonal is multiplied by z^k.
inline CPMatrix gauge_twist(const CPMatrix& x, Complex z) {
  if (std::abs(std::abs(z) - 1.0) > x.system().tol.tol) throw PreconditionError("gauge parameter must satisfy |z| = 1");
  EntryMap m;
  for (const auto& [p, a] : x.entries()) m.emplace(p, std::pow(z, static_cast<int>(p.second - p.first)) * a);
  return CPMatrix::from_trusted_entries(x.system_ptr(), std::move(m));
}

/// Largest entry norm of x - y.
inline double max_entry_distance(const CPMatrix& x, const CPMatrix& y) {
  require_same_system(x, y);
  double r = 0.0;
  for (const auto& [p, a] : x.entries()) r = std::max(r, norm(a - y.at(p.first, p.second)));
  for (const auto& [p, b] : y.entries())
    if (!x.entries().count(p)) r = std::max(r, norm(b));
  return r;
}

inline bool approx_equal(const CPMatrix& x, const CPMatrix& y) {
  return max_entry_distance(x, y) <= x.system().tol.tol;
}

/// Central support of delta^m(1): identity on every block where it is nonzero.
inline Element central_support(const Endomorphism& d, int m) {
  const Element q = d.unit_power(m);
  std::vector<std::size_t> in;
  for (std::size_t b = 0; b < q.num_blocks(); ++b)
    if (q.block(b).norm() > 0.5) in.push_back(b);
  return block_unit(d.algebra(), Ideal(d.num_blocks(), in));
}

/// A left unit for M_k, valid for every element whose row indices are at
/// most `bound`, together with a factorisation unit = sum y_i * z_i^* with
/// y_i, z_i in M_k witnessing that it lies in M_k * M_{-k}.
struct LocalUnit {
  CPMatrix unit;
  std::vector<std::pair<CPMatrix, CPMatrix>> factors;
};

inline LocalUnit local_unit(const SystemPtr& sys, int k, Index bound) {
  const Endomorphism& d = sys->endo;
  const BlockAlgebra& alg = sys->algebra();
  if (k <= 0) {
    // delta^{|k|}(1) at (|k|,|k|) = u^{*|k|*} * u^{*|k|} is a two-sided unit on M_k.
    const CPMatrix y = u_power(sys, k);
    return {star(y, adjoint(y)), {{y, y}}};
  }

  LocalUnit out{CPMatrix(sys), {}};
  EntryMap unit;
  for (Index r = 0; r <= bound; ++r) {
    const int ri = static_cast<int>(r);
    const Element dr = d.unit_power(ri);
    const Element p_next = central_support(d, ri + k);
    Element beta = r == 0 ? p_next : dr * (p_next - d(central_support(d, ri + k - 1)));
    if (detail::negligible(beta, sys->tol.tol)) continue;
    unit.emplace(Position{r, r}, beta);

    // beta = sum_j v_j w_j^* with v_j, w_j in delta^r(1) A delta^{r+k}(1).
    const Element q = d.unit_power(ri + k);
    for (std::size_t b = 0; b < alg.num_blocks(); ++b) {
      const Matrix& qb = q.block(b);
      if (qb.norm() < 0.5) continue;
      Eigen::Index col = 0;
      qb.colwise().norm().maxCoeff(&col);
      const Eigen::VectorXcd xi = qb.col(col) / qb.col(col).norm();
      for (int j = 0; j < alg.dim(b); ++j) {
        std::vector<Matrix> e = Element::zero(alg).blocks();
        e[b] = Eigen::VectorXcd::Unit(alg.dim(b), j) * xi.adjoint();
        const Element ej_xi(std::move(e));
        const Element v = dr * ej_xi * q;
        const Element w = dr * beta.adjoint() * ej_xi * q;
        out.factors.emplace_back(CPMatrix::from_trusted_entries(sys, {{{r, r + k}, v}}),
                                 CPMatrix::from_trusted_entries(sys, {{{r, r + k}, w}}));
      }
    }
  }
  out.unit = CPMatrix::from_trusted_entries(sys, std::move(unit));
  return out;
}

}  // namespace xprod
