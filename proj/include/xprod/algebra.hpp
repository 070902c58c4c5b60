#pragma once

// Finite-dimensional C*-algebras A = M_{n_1} + ... + M_{n_B}, their elements
// and their (two-sided, closed) ideals.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xprod/core.hpp"

namespace xprod {

class BlockAlgebra {
 public:
  BlockAlgebra() = default;
  explicit BlockAlgebra(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw StructuralError("block algebra needs at least one block");
    for (int n : dims_)
      if (n < 1) throw StructuralError("block dimensions must be positive");
  }
  BlockAlgebra(std::initializer_list<int> dims) : BlockAlgebra(std::vector<int>(dims)) {}

  std::size_t num_blocks() const { return dims_.size(); }
  int dim(std::size_t b) const { return dims_.at(b); }
  const std::vector<int>& dims() const { return dims_; }
  int total_dim() const {
    int s = 0;
    for (int n : dims_) s += n;
    return s;
  }

  friend bool operator==(const BlockAlgebra&, const BlockAlgebra&) = default;

 private:
  std::vector<int> dims_;
};

/// An element of a BlockAlgebra: one square complex matrix per block.
class Element {
 public:
  Element() = default;
  explicit Element(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {
    for (const auto& m : blocks_)
      if (m.rows() != m.cols() || m.rows() < 1)
        throw StructuralError("element blocks must be non-empty square matrices");
  }

  static Element zero(const BlockAlgebra& alg) {
    std::vector<Matrix> bs;
    bs.reserve(alg.num_blocks());
    for (int n : alg.dims()) bs.push_back(Matrix::Zero(n, n));
    return Element(std::move(bs));
  }
  static Element identity(const BlockAlgebra& alg) {
    std::vector<Matrix> bs;
    bs.reserve(alg.num_blocks());
    for (int n : alg.dims()) bs.push_back(Matrix::Identity(n, n));
    return Element(std::move(bs));
  }
  /// Element of C^p from its p scalar values.
  static Element scalars(std::span<const Complex> values) {
    std::vector<Matrix> bs;
    for (Complex v : values) bs.push_back(Matrix::Constant(1, 1, v));
    return Element(std::move(bs));
  }
  static Element scalars(std::initializer_list<Complex> values) {
    return scalars(std::span<const Complex>(values.begin(), values.size()));
  }

  std::size_t num_blocks() const { return blocks_.size(); }
  const Matrix& block(std::size_t b) const { return blocks_.at(b); }
  const std::vector<Matrix>& blocks() const { return blocks_; }

  BlockAlgebra algebra() const {
    std::vector<int> dims;
    for (const auto& m : blocks_) dims.push_back(static_cast<int>(m.rows()));
    return BlockAlgebra(std::move(dims));
  }

  bool same_shape(const Element& o) const {
    if (blocks_.size() != o.blocks_.size()) return false;
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      if (blocks_[b].rows() != o.blocks_[b].rows()) return false;
    return true;
  }
  bool belongs_to(const BlockAlgebra& alg) const {
    if (blocks_.size() != alg.num_blocks()) return false;
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      if (blocks_[b].rows() != alg.dim(b)) return false;
    return true;
  }

  Element adjoint() const {
    std::vector<Matrix> bs;
    bs.reserve(blocks_.size());
    for (const auto& m : blocks_) bs.push_back(m.adjoint());
    return Element(std::move(bs));
  }

  friend Element operator+(const Element& x, const Element& y) {
    return zip(x, y, [](const Matrix& a, const Matrix& b) -> Matrix { return a + b; });
  }
  friend Element operator-(const Element& x, const Element& y) {
    return zip(x, y, [](const Matrix& a, const Matrix& b) -> Matrix { return a - b; });
  }
  friend Element operator*(const Element& x, const Element& y) {
    return zip(x, y, [](const Matrix& a, const Matrix& b) -> Matrix { return a * b; });
  }
  friend Element operator*(Complex s, const Element& x) {
    std::vector<Matrix> bs;
    bs.reserve(x.blocks_.size());
    for (const auto& m : x.blocks_) bs.push_back(s * m);
    return Element(std::move(bs));
  }
  Element operator-() const { return Complex(-1.0) * *this; }

  Element& operator+=(const Element& y) {
    if (!same_shape(y)) throw StructuralError("elements belong to different algebras");
    for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b] += y.blocks_[b];
    return *this;
  }

  /// *this += x * y without temporaries.
  void add_product(const Element& x, const Element& y) {
    for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b].noalias() += x.blocks_[b] * y.blocks_[b];
  }

 private:
  template <class F>
  static Element zip(const Element& x, const Element& y, F f) {
    if (!x.same_shape(y)) throw StructuralError("elements belong to different algebras");
    std::vector<Matrix> bs;
    bs.reserve(x.blocks_.size());
    for (std::size_t b = 0; b < x.blocks_.size(); ++b) bs.push_back(f(x.blocks_[b], y.blocks_[b]));
    return Element(std::move(bs));
  }

  std::vector<Matrix> blocks_;
};

enum class ArithmeticOp { add, multiply, adjoint, scale };

/// Blockwise realisation of the *-algebra operations. `y` is ignored for
/// adjoint and scale.
inline Element arithmetic(const Element& x, const Element& y, ArithmeticOp op,
                          Complex lambda = 1.0) {
  switch (op) {
    case ArithmeticOp::add: return x + y;
    case ArithmeticOp::multiply: return x * y;
    case ArithmeticOp::adjoint: return x.adjoint();
    case ArithmeticOp::scale: return lambda * x;
  }
  throw StructuralError("unknown arithmetic op");
}

/// Closed two-sided ideal, stored as the set of blocks it contains.
class Ideal {
 public:
  Ideal() = default;
  explicit Ideal(std::size_t num_blocks) : in_(num_blocks, false) {}
  /// 0-based block indices.
  Ideal(std::size_t num_blocks, std::span<const std::size_t> blocks) : in_(num_blocks, false) {
    for (std::size_t b : blocks) {
      if (b >= num_blocks) throw StructuralError("ideal block index out of range");
      in_[b] = true;
    }
  }
  Ideal(std::size_t num_blocks, std::initializer_list<std::size_t> blocks)
      : Ideal(num_blocks, std::span<const std::size_t>(blocks.begin(), blocks.size())) {}

  static Ideal zero(std::size_t num_blocks) { return Ideal(num_blocks); }
  static Ideal full(std::size_t num_blocks) {
    Ideal k(num_blocks);
    std::fill(k.in_.begin(), k.in_.end(), true);
    return k;
  }
  /// Every ideal of a block algebra, in bitmask order.
  static std::vector<Ideal> all(std::size_t num_blocks) {
    std::vector<Ideal> out;
    for (unsigned long mask = 0; mask < (1ul << num_blocks); ++mask) {
      Ideal k(num_blocks);
      for (std::size_t b = 0; b < num_blocks; ++b) k.in_[b] = (mask >> b) & 1u;
      out.push_back(std::move(k));
    }
    return out;
  }

  std::size_t num_blocks() const { return in_.size(); }
  bool contains(std::size_t b) const { return in_.at(b); }
  bool empty() const { return std::none_of(in_.begin(), in_.end(), [](bool v) { return v; }); }
  std::vector<std::size_t> blocks() const {
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < in_.size(); ++b)
      if (in_[b]) out.push_back(b);
    return out;
  }
  Ideal complement() const {
    Ideal k(in_.size());
    for (std::size_t b = 0; b < in_.size(); ++b) k.in_[b] = !in_[b];
    return k;
  }
  bool intersects(const Ideal& o) const {
    check_same(o);
    for (std::size_t b = 0; b < in_.size(); ++b)
      if (in_[b] && o.in_[b]) return true;
    return false;
  }
  bool subset_of(const Ideal& o) const {
    check_same(o);
    for (std::size_t b = 0; b < in_.size(); ++b)
      if (in_[b] && !o.in_[b]) return false;
    return true;
  }
  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (std::size_t b : blocks()) {
      if (!first) s += ",";
      s += std::to_string(b + 1);
      first = false;
    }
    return s + "}";
  }

  friend bool operator==(const Ideal&, const Ideal&) = default;

 private:
  void check_same(const Ideal& o) const {
    if (o.in_.size() != in_.size()) throw StructuralError("ideals of different algebras");
  }
  std::vector<bool> in_;
};

/// C*-norm: maximum of the block operator norms.
inline double norm(const Element& x) {
  double m = 0.0;
  for (const auto& b : x.blocks()) m = std::max(m, operator_norm(b));
  return m;
}

/// Quotient norm ||x + K|| = inf_{k in K} ||x - k||.
inline double distance_to_ideal(const Element& x, const Ideal& K) {
  if (K.num_blocks() != x.num_blocks()) throw StructuralError("ideal and element of different algebras");
  double m = 0.0;
  for (std::size_t b = 0; b < x.num_blocks(); ++b)
    if (!K.contains(b)) m = std::max(m, operator_norm(x.block(b)));
  return m;
}

/// Central projection p_S: identity on the blocks of S, zero elsewhere.
inline Element block_unit(const BlockAlgebra& alg, const Ideal& S) {
  if (S.num_blocks() != alg.num_blocks()) throw StructuralError("ideal and algebra mismatch");
  std::vector<Matrix> bs;
  for (std::size_t b = 0; b < alg.num_blocks(); ++b) {
    int n = alg.dim(b);
    bs.push_back(S.contains(b) ? Matrix(Matrix::Identity(n, n)) : Matrix(Matrix::Zero(n, n)));
  }
  return Element(std::move(bs));
}

/// Projection onto a single block; the block units span the center.
inline Element block_unit(const BlockAlgebra& alg, std::size_t b) {
  return block_unit(alg, Ideal(alg.num_blocks(), {b}));
}

/// Matrix unit E_{pq} inside block b.
inline Element matrix_unit(const BlockAlgebra& alg, std::size_t b, int p, int q) {
  Element z = Element::zero(alg);
  std::vector<Matrix> bs = z.blocks();
  bs.at(b)(p, q) = 1.0;
  return Element(std::move(bs));
}

/// Blockwise max of the operator norm of x - y.
inline double distance(const Element& x, const Element& y) { return norm(x - y); }

inline bool approx_equal(const Element& x, const Element& y, Tolerance t = {}) {
  return distance(x, y) <= t.tol;
}

}  // namespace xprod
