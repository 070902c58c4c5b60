#pragma once

// Random instances for property tests and demos.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "xprod/matcalc.hpp"

namespace xprod::random {

using Rng = std::mt19937_64;

inline Matrix gaussian(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = Complex(g(rng), g(rng));
  return m;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the phase fix).
inline Matrix unitary(int n, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(n, n, rng));
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (int i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

inline Element element(const BlockAlgebra& alg, Rng& rng) {
  std::vector<Matrix> bs;
  for (int n : alg.dims()) bs.push_back(gaussian(n, n, rng));
  return Element(std::move(bs));
}

struct SystemShape {
  int max_blocks = 4;
  int max_dim = 3;
  bool random_unitaries = true;
};

/// Random endomorphism in normal form: each target block greedily takes
/// sources in random order with random multiplicities that still fit.
inline Endomorphism endomorphism(Rng& rng, const SystemShape& shape = {}) {
  std::uniform_int_distribution<int> nb(1, shape.max_blocks), nd(1, shape.max_dim);
  const int B = nb(rng);
  std::vector<int> dims;
  for (int b = 0; b < B; ++b) dims.push_back(nd(rng));
  const BlockAlgebra alg(dims);
  std::vector<std::vector<int>> mult(B, std::vector<int>(B, 0));
  std::vector<int> order(B);
  std::iota(order.begin(), order.end(), 0);
  std::bernoulli_distribution take(0.6);
  for (int b = 0; b < B; ++b) {
    std::shuffle(order.begin(), order.end(), rng);
    int room = dims[b];
    for (int i : order) {
      if (!take(rng) || dims[i] > room) continue;
      std::uniform_int_distribution<int> m(1, room / dims[i]);
      mult[b][i] = m(rng);
      room -= mult[b][i] * dims[i];
    }
  }
  std::vector<Matrix> us;
  if (shape.random_unitaries)
    for (int n : dims) us.push_back(unitary(n, rng));
  return Endomorphism(alg, std::move(mult), std::move(us));
}

/// Random point map on {0..p-1}; each point is in the domain with probability `defined`.
inline CommutativeSystem commutative(int points, Rng& rng, double defined = 0.8) {
  CommutativeSystem cs{points, {}};
  std::bernoulli_distribution in(defined);
  std::uniform_int_distribution<int> to(0, points - 1);
  for (int x = 0; x < points; ++x)
    if (in(rng)) cs.map[x] = to(rng);
  return cs;
}

/// Random element of the corner delta^i(1) A delta^j(1).
inline Element corner(const System& sys, Index i, Index j, Rng& rng) {
  const Endomorphism& d = sys.endo;
  return d.unit_power(static_cast<int>(i)) * element(sys.algebra(), rng) * d.unit_power(static_cast<int>(j));
}

/// `count` random entries with indices in [0, max_index].
inline CPMatrix cpmatrix(const SystemPtr& sys, Rng& rng, Index max_index, int count) {
  std::uniform_int_distribution<Index> idx(0, max_index);
  EntryMap m;
  for (int c = 0; c < count; ++c) {
    const Index i = idx(rng), j = idx(rng);
    m[{i, j}] = corner(*sys, i, j, rng);
  }
  return CPMatrix::from_entries(sys, std::move(m));
}

/// Random element of M_k with coefficient indices n in [0, last].
inline CPMatrix graded(const SystemPtr& sys, int k, Index last, Rng& rng, double density = 0.7) {
  std::bernoulli_distribution keep(density);
  EntryMap m;
  for (Index n = 0; n <= last; ++n) {
    if (n < last && !keep(rng)) continue;
    const Position p = diagonal_position(k, n);
    m[p] = corner(*sys, p.first, p.second, rng);
  }
  return CPMatrix::from_entries(sys, std::move(m));
}

inline KDiagonal kdiagonal(const SystemPtr& sys, int k, Index last, Rng& rng) {
  return diagonal(graded(sys, k, last, rng), k);
}

/// A nonzero 0-diagonal of norm zero for J: partial sums s_0..s_{N-1} are
/// random elements of J and s_N = 0.
inline CPMatrix null_diagonal(const SystemPtr& sys, const Ideal& J, Index N, Rng& rng) {
  const Endomorphism& d = sys->endo;
  const Element pJ = block_unit(sys->algebra(), J);
  EntryMap m;
  Element prev = Element::zero(sys->algebra());
  for (Index i = 0; i <= N; ++i) {
    const Element s = i < N ? pJ * corner(*sys, i, i, rng) * pJ : Element::zero(sys->algebra());
    m[{i, i}] = s - d(prev);
    prev = s;
  }
  return CPMatrix::from_trusted_entries(sys, std::move(m));
}

}  // namespace xprod::random
