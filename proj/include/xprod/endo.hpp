#pragma once

// *-endomorphisms of block algebras in multiplicity normal form, their
// kernels, orthogonal ideals and the extended system (A_J, delta_J).

#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <vector>

#include "xprod/algebra.hpp"

namespace xprod {

/// delta(x)_b = W_b (x_0^{(mult[b][0])} + x_1^{(mult[b][1])} + ... + 0_{slack[b]}) W_b^*
///
/// Every *-homomorphism between finite-dimensional C*-algebras is unitarily
/// equivalent to such a form, so nothing is lost by storing it this way.
/// Values of delta^m(1) are memoised in a cache shared by all copies.
class Endomorphism {
 public:
  Endomorphism() = default;

  /// Unitaries may be empty, meaning W_b = 1 for every b.
  Endomorphism(BlockAlgebra alg, std::vector<std::vector<int>> mult, std::vector<Matrix> unitaries = {},
               Tolerance tol = {})
      : state_(std::make_shared<State>()) {
    const std::size_t B = alg.num_blocks();
    if (mult.size() != B) throw StructuralError("multiplicity matrix must be B x B");
    if (unitaries.empty())
      for (int n : alg.dims()) unitaries.push_back(Matrix::Identity(n, n));
    if (unitaries.size() != B) throw StructuralError("one unitary per target block required");
    state_->slack.resize(B);
    state_->identity_unitary.resize(B);
    for (std::size_t b = 0; b < B; ++b) {
      if (mult[b].size() != B) throw StructuralError("multiplicity matrix must be B x B");
      int used = 0;
      for (std::size_t i = 0; i < B; ++i) {
        if (mult[b][i] < 0) throw StructuralError("multiplicities must be nonnegative");
        used += mult[b][i] * alg.dim(i);
      }
      if (used > alg.dim(b)) {
        std::ostringstream os;
        os << "block " << b + 1 << ": sources need dimension " << used << " > " << alg.dim(b);
        throw StructuralError(os.str());
      }
      state_->slack[b] = alg.dim(b) - used;
      const Matrix& w = unitaries[b];
      if (w.rows() != alg.dim(b) || w.cols() != alg.dim(b))
        throw StructuralError("unitary has wrong shape for its block");
      const Matrix id = Matrix::Identity(w.rows(), w.cols());
      if ((w * w.adjoint() - id).norm() > std::max(tol.tol, 1e-12) * w.rows() * 10)
        throw StructuralError("W_" + std::to_string(b + 1) + " is not unitary");
      state_->identity_unitary[b] = (w - id).norm() == 0.0;
    }
    state_->alg = std::move(alg);
    state_->mult = std::move(mult);
    state_->unitaries = std::move(unitaries);
  }

  /// Same as above, with slack given explicitly and checked.
  Endomorphism(BlockAlgebra alg, std::vector<std::vector<int>> mult, std::vector<Matrix> unitaries,
               const std::vector<int>& slack, Tolerance tol = {})
      : Endomorphism(std::move(alg), std::move(mult), std::move(unitaries), tol) {
    if (slack != state_->slack) throw StructuralError("slack does not match dimension bookkeeping");
  }

  static Endomorphism identity(const BlockAlgebra& alg) {
    const std::size_t B = alg.num_blocks();
    std::vector<std::vector<int>> mult(B, std::vector<int>(B, 0));
    for (std::size_t b = 0; b < B; ++b) mult[b][b] = 1;
    return Endomorphism(alg, std::move(mult));
  }
  static Endomorphism zero(const BlockAlgebra& alg) {
    const std::size_t B = alg.num_blocks();
    return Endomorphism(alg, std::vector<std::vector<int>>(B, std::vector<int>(B, 0)));
  }

  const BlockAlgebra& algebra() const { return state().alg; }
  std::size_t num_blocks() const { return state().alg.num_blocks(); }
  int mult(std::size_t target, std::size_t source) const { return state().mult.at(target).at(source); }
  const std::vector<std::vector<int>>& mult() const { return state().mult; }
  const std::vector<Matrix>& unitaries() const { return state().unitaries; }
  const std::vector<int>& slack() const { return state().slack; }

  Element operator()(const Element& x) const {
    const State& s = state();
    if (!x.belongs_to(s.alg)) throw StructuralError("element does not belong to the endomorphism's algebra");
    const std::size_t B = s.alg.num_blocks();
    std::vector<Matrix> out;
    out.reserve(B);
    for (std::size_t b = 0; b < B; ++b) {
      const int n = s.alg.dim(b);
      Matrix d = Matrix::Zero(n, n);
      int off = 0;
      for (std::size_t i = 0; i < B; ++i) {
        const int ni = s.alg.dim(i);
        for (int r = 0; r < s.mult[b][i]; ++r) {
          d.block(off, off, ni, ni) = x.block(i);
          off += ni;
        }
      }
      if (s.identity_unitary[b])
        out.push_back(std::move(d));
      else
        out.push_back(s.unitaries[b] * d * s.unitaries[b].adjoint());
    }
    return Element(std::move(out));
  }

  /// delta^n(x).
  Element apply(const Element& x, int n = 1) const {
    if (n < 0) throw PreconditionError("negative power of an endomorphism");
    if (!x.belongs_to(algebra())) throw StructuralError("element does not belong to the endomorphism's algebra");
    Element y = x;
    for (int k = 0; k < n; ++k) y = (*this)(y);
    return y;
  }

  /// delta^m(1), memoised.
  Element unit_power(int m) const {
    if (m < 0) throw PreconditionError("negative power of an endomorphism");
    const State& s = state();
    std::lock_guard<std::mutex> lock(s.cache_mutex);
    if (s.unit_powers.empty()) s.unit_powers.push_back(Element::identity(s.alg));
    while (static_cast<int>(s.unit_powers.size()) <= m) s.unit_powers.push_back((*this)(s.unit_powers.back()));
    return s.unit_powers[static_cast<std::size_t>(m)];
  }

  /// Structural equality (ignores the cache).
  bool same_as(const Endomorphism& o) const {
    if (state_ == o.state_) return true;
    if (!state_ || !o.state_) return false;
    if (!(state().alg == o.state().alg) || state().mult != o.state().mult) return false;
    for (std::size_t b = 0; b < num_blocks(); ++b)
      if (state().unitaries[b] != o.state().unitaries[b]) return false;
    return true;
  }

 private:
  struct State {
    BlockAlgebra alg;
    std::vector<std::vector<int>> mult;
    std::vector<Matrix> unitaries;
    std::vector<int> slack;
    std::vector<bool> identity_unitary;
    mutable std::mutex cache_mutex;
    mutable std::vector<Element> unit_powers;
  };
  const State& state() const {
    if (!state_) throw StructuralError("use of a default-constructed endomorphism");
    return *state_;
  }
  std::shared_ptr<State> state_;
};

inline Element apply(const Endomorphism& d, const Element& x, int n = 1) { return d.apply(x, n); }

/// Blocks i that no target block draws on.
inline Ideal kernel(const Endomorphism& d) {
  const std::size_t B = d.num_blocks();
  std::vector<std::size_t> in;
  for (std::size_t i = 0; i < B; ++i) {
    bool used = false;
    for (std::size_t b = 0; b < B; ++b) used = used || d.mult(b, i) > 0;
    if (!used) in.push_back(i);
  }
  return Ideal(B, in);
}

struct Orthogonality {
  bool orthogonal;
  Ideal iperp;  // largest ideal orthogonal to the first argument
};

inline Orthogonality orthogonality(const Ideal& I, const Ideal& J) {
  return {!I.intersects(J), I.complement()};
}

inline void require_orthogonal(const Endomorphism& d, const Ideal& J) {
  if (J.num_blocks() != d.num_blocks()) throw StructuralError("ideal and system of different algebras");
  const Ideal I = kernel(d);
  if (I.intersects(J))
    throw PreconditionError("ideal J = " + J.to_string() + " is not orthogonal to ker(delta) = " + I.to_string());
}

/// Commutative system on points {0..p-1}: delta(f)(x) = f(psi(x)) for x in
/// the domain of psi, 0 otherwise.
struct CommutativeSystem {
  int points = 0;
  std::map<int, int> map;  // psi, 0-based

  bool in_domain(int x) const { return map.count(x) != 0; }
  int psi(int x) const { return map.at(x); }
  std::vector<bool> image() const {
    std::vector<bool> im(static_cast<std::size_t>(points), false);
    for (auto [x, y] : map) im[static_cast<std::size_t>(y)] = true;
    return im;
  }
  void check() const {
    if (points < 1) throw StructuralError("commutative system needs at least one point");
    for (auto [x, y] : map)
      if (x < 0 || x >= points || y < 0 || y >= points) throw StructuralError("map point out of range");
  }

  Endomorphism to_endomorphism() const {
    check();
    const auto P = static_cast<std::size_t>(points);
    std::vector<std::vector<int>> mult(P, std::vector<int>(P, 0));
    for (auto [x, y] : map) mult[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] = 1;
    return Endomorphism(BlockAlgebra(std::vector<int>(P, 1)), std::move(mult));
  }
};

/// (A_J, delta_J) with A_J = A/I + A/J. Block t of A_J is a copy of block
/// `source_block[t]` of A; the first `first_count` blocks form A/I.
struct ExtendedSystem {
  BlockAlgebra original;
  BlockAlgebra algebra;
  Endomorphism endo;
  Ideal I;
  Ideal J;
  std::vector<std::size_t> source_block;
  std::size_t first_count = 0;

  /// a -> (a + I) + (a + J)
  Element embed(const Element& a) const {
    std::vector<Matrix> bs;
    for (std::size_t b : source_block) bs.push_back(a.block(b));
    return Element(std::move(bs));
  }

  /// (a + I) + (b + J) from representatives a, b in A.
  Element pair(const Element& a, const Element& b) const {
    std::vector<Matrix> bs;
    for (std::size_t t = 0; t < source_block.size(); ++t)
      bs.push_back(t < first_count ? a.block(source_block[t]) : b.block(source_block[t]));
    return Element(std::move(bs));
  }

  /// Representatives (a, b) in A with zeros on the blocks of I and J.
  std::pair<Element, Element> lift(const Element& x) const {
    std::vector<Matrix> a = Element::zero(original).blocks();
    std::vector<Matrix> b = a;
    for (std::size_t t = 0; t < source_block.size(); ++t)
      (t < first_count ? a : b)[source_block[t]] = x.block(t);
    return {Element(std::move(a)), Element(std::move(b))};
  }

  /// The second summand (0, A/J).
  Ideal second_summand() const {
    std::vector<std::size_t> in;
    for (std::size_t t = first_count; t < source_block.size(); ++t) in.push_back(t);
    return Ideal(source_block.size(), in);
  }

  /// (0 + I) + (1 + J), the unit of ker(delta_J).
  Element kernel_unit() const { return block_unit(algebra, second_summand()); }
};

inline ExtendedSystem extend_system(const Endomorphism& d, const Ideal& J) {
  require_orthogonal(d, J);
  const BlockAlgebra& alg = d.algebra();
  const Ideal I = kernel(d);
  const std::size_t B = alg.num_blocks();

  ExtendedSystem ext;
  ext.I = I;
  ext.J = J;
  ext.original = alg;
  std::vector<std::size_t> first_index(B, B);
  for (std::size_t b = 0; b < B; ++b)
    if (!I.contains(b)) {
      first_index[b] = ext.source_block.size();
      ext.source_block.push_back(b);
    }
  ext.first_count = ext.source_block.size();
  for (std::size_t b = 0; b < B; ++b)
    if (!J.contains(b)) ext.source_block.push_back(b);

  const std::size_t T = ext.source_block.size();
  std::vector<int> dims;
  for (std::size_t b : ext.source_block) dims.push_back(alg.dim(b));
  ext.algebra = BlockAlgebra(dims);

  // delta_J only reads the A/I summand; kernel blocks carry multiplicity 0
  // in delta, so the source order of the normal form is unchanged.
  std::vector<std::vector<int>> mult(T, std::vector<int>(T, 0));
  std::vector<Matrix> unitaries;
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t b = ext.source_block[t];
    for (std::size_t i = 0; i < B; ++i)
      if (d.mult(b, i) > 0) mult[t][first_index[i]] = d.mult(b, i);
    unitaries.push_back(d.unitaries()[b]);
  }
  ext.endo = Endomorphism(ext.algebra, std::move(mult), std::move(unitaries));
  return ext;
}

}  // namespace xprod
