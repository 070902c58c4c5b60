#pragma once

// Fixtures and independent oracles shared by the unit and acceptance suites.

#include <string>
#include <vector>

#include "xprod/random.hpp"
#include "xprod/xprod.hpp"

namespace xprod::testing {

/// psi: 1->2, 2->3, 3->3 on C^3.
inline CommutativeSystem c3() { return {3, {{0, 1}, {1, 2}, {2, 2}}}; }
/// psi(1)=2, psi(2)=1, psi(3)=1; 4 is outside the domain.
inline CommutativeSystem two_cycle() { return {4, {{0, 1}, {1, 0}, {2, 0}}}; }
/// psi(1)=1, psi(2)=1; 3 is outside the domain.
inline CommutativeSystem merge() { return {3, {{0, 0}, {1, 0}}}; }
/// psi = 3 everywhere.
inline CommutativeSystem collapse() { return {3, {{0, 2}, {1, 2}, {2, 2}}}; }
/// A chain 1->2->3->4 ending outside the domain.
inline CommutativeSystem chain4() { return {4, {{0, 1}, {1, 2}, {2, 3}}}; }

/// 1->3, 2->3, 3->5, 4->5; every chain leaves the domain at 5.
inline CommutativeSystem tree5() { return {5, {{0, 2}, {1, 2}, {2, 4}, {3, 4}}}; }
/// A 3-cycle: delta is an automorphism.
inline CommutativeSystem cycle3() { return {3, {{0, 1}, {1, 2}, {2, 0}}}; }

inline SystemPtr sys_of(const CommutativeSystem& cs, Tolerance t = {}) { return make_system(cs.to_endomorphism(), t); }

/// M_2 + C with delta = Ad(W) on M_2 and the identity on C.
inline Matrix rotation(double t) {
  Matrix w(2, 2);
  w << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return w;
}
inline SystemPtr rotation_system() {
  return make_system(Endomorphism(BlockAlgebra{2, 1}, {{1, 0}, {0, 1}}, {rotation(0.3), Matrix::Identity(1, 1)}));
}
inline CovariantRep rotation_rep(const SystemPtr& sys) {
  Matrix u = Matrix::Identity(3, 3);
  u.block(0, 0, 2, 2) = rotation(0.3);
  return {sys, {1, 1}, Matrix::Identity(3, 3), u};
}

/// M_2 + C with delta(a + l) = diag(l, 0) + 0: noncommutative, with kernel and slack.
inline SystemPtr corner_system() {
  return make_system(Endomorphism(BlockAlgebra{2, 1}, {{0, 1}, {0, 0}}));
}

inline std::vector<Ideal> orthogonal_ideals(const Endomorphism& d) {
  std::vector<Ideal> out;
  const Ideal I = kernel(d);
  for (const Ideal& J : Ideal::all(d.num_blocks()))
    if (orthogonality(I, J).orthogonal) out.push_back(J);
  return out;
}

/// x * y straight from the definition: x . sum_{j=0}^{M} Lambda^j(y) + sum_{j=1}^{M} Lambda^j(x) . y,
/// with M well past the point where every term vanishes.
inline CPMatrix star_oracle(const CPMatrix& x, const CPMatrix& y, int extra = 4) {
  const Index M = std::max<Index>(x.support_bound(), y.support_bound()) + 1 + extra;
  CPMatrix sum_y(y.system_ptr()), out(x.system_ptr());
  for (Index j = 0; j <= M; ++j) sum_y = add(sum_y, lambda_shift(y, static_cast<int>(j)));
  out = plain_product(x, sum_y);
  CPMatrix sum_x(x.system_ptr());
  for (Index j = 1; j <= M; ++j) sum_x = add(sum_x, lambda_shift(x, static_cast<int>(j)));
  return add(out, plain_product(sum_x, y));
}

/// True when every entry of x lies on diagonal k.
inline bool on_diagonal(const CPMatrix& x, int k) {
  for (const auto& [p, a] : x.entries())
    if (p.second - p.first != k) return false;
  return true;
}

}  // namespace xprod::testing
