#pragma once

// Covariant representations (pi, U) of (A, delta): validation, the associated
// ideal, the extension of pi to A_J, the homomorphism Psi on M(A), Fourier
// coefficients, property (*) sampling, and path representations of
// commutative systems.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "xprod/norms.hpp"

namespace xprod {

/// pi(x) = W (x_1 + ... (mu_1 copies) + x_2 + ... ) W^*, together with U.
struct CovariantRep {
  SystemPtr sys;
  std::vector<int> multiplicities;
  Matrix W;
  Matrix U;

  int dim() const { return static_cast<int>(U.rows()); }

  Matrix pi(const Element& x) const {
    const BlockAlgebra& alg = sys->algebra();
    if (!x.belongs_to(alg)) throw StructuralError("element does not belong to the representation's algebra");
    const int d = dim();
    Matrix m = Matrix::Zero(d, d);
    int off = 0;
    for (std::size_t b = 0; b < alg.num_blocks(); ++b) {
      const int n = alg.dim(b);
      for (int c = 0; c < multiplicities[b]; ++c, off += n) m.block(off, off, n, n) = x.block(b);
    }
    return W * m * W.adjoint();
  }
};

inline Matrix identity_matrix(int d) { return Matrix::Identity(d, d); }

struct RepReport {
  bool valid = true;
  std::string axiom;      // first violated axiom, empty when valid
  std::string generator;  // offending generator
  double residual = 0.0;
};

struct ValidateOptions {
  double tol = 1e-10;
  /// Columns on which covariance is not required (the defect shell of a
  /// truncated path representation).
  std::vector<bool> excluded_columns;
};

namespace detail {

inline std::string unit_name(std::size_t b, int p, int q) {
  return "E_" + std::to_string(p + 1) + std::to_string(q + 1) + " in block " + std::to_string(b + 1);
}

inline Matrix drop_columns(Matrix m, const std::vector<bool>& excluded) {
  for (std::size_t c = 0; c < excluded.size(); ++c)
    if (excluded[c]) m.col(static_cast<Eigen::Index>(c)).setZero();
  return m;
}

}  // namespace detail

/// Checks, in order: faithful unital pi, partial isometry, covariance on
/// matrix units, and U^*U in the commutant of pi(A). Never throws.
inline RepReport validate(const CovariantRep& rep, const ValidateOptions& opt = {}) {
  auto fail = [](std::string axiom, std::string gen, double r) { return RepReport{false, std::move(axiom), std::move(gen), r}; };
  if (!rep.sys) return fail("faithful-unital", "system", 0.0);
  const BlockAlgebra& alg = rep.sys->algebra();
  const Endomorphism& d = rep.sys->endo;
  const int dim = rep.dim();
  if (rep.U.rows() != rep.U.cols()) return fail("faithful-unital", "U is not square", 0.0);
  if (rep.multiplicities.size() != alg.num_blocks()) return fail("faithful-unital", "multiplicities", 0.0);
  int total = 0;
  for (std::size_t b = 0; b < alg.num_blocks(); ++b) {
    if (rep.multiplicities[b] < 1)
      return fail("faithful-unital", "block " + std::to_string(b + 1) + " has multiplicity 0", 0.0);
    total += rep.multiplicities[b] * alg.dim(b);
  }
  if (total != dim || rep.W.rows() != dim || rep.W.cols() != dim)
    return fail("faithful-unital", "dimension bookkeeping", std::abs(total - dim));
  {
    const double r = operator_norm(rep.W * rep.W.adjoint() - identity_matrix(dim));
    if (r > opt.tol) return fail("faithful-unital", "W is not unitary", r);
  }
  const Matrix& U = rep.U;
  const Matrix Ustar = U.adjoint();
  {
    const double r = operator_norm(U * Ustar * U - U);
    if (r > opt.tol) return fail("partial-isometry", "U U* U - U", r);
  }
  for (std::size_t b = 0; b < alg.num_blocks(); ++b)
    for (int p = 0; p < alg.dim(b); ++p)
      for (int q = 0; q < alg.dim(b); ++q) {
        const Element e = matrix_unit(alg, b, p, q);
        Matrix res = U * rep.pi(e) * Ustar - rep.pi(d(e));
        if (!opt.excluded_columns.empty()) res = detail::drop_columns(std::move(res), opt.excluded_columns);
        const double r = operator_norm(res);
        if (r > opt.tol) return fail("covariance", detail::unit_name(b, p, q), r);
      }
  const Matrix UsU = Ustar * U;
  for (std::size_t b = 0; b < alg.num_blocks(); ++b)
    for (int p = 0; p < alg.dim(b); ++p)
      for (int q = 0; q < alg.dim(b); ++q) {
        const Matrix pe = rep.pi(matrix_unit(alg, b, p, q));
        const double r = operator_norm(UsU * pe - pe * UsU);
        if (r > opt.tol) return fail("commutant", detail::unit_name(b, p, q), r);
      }
  return {};
}

/// J = {a : U^*U pi(a) = pi(a)}, decided on block units.
inline Ideal association_ideal(const CovariantRep& rep, double tol = 1e-10) {
  const BlockAlgebra& alg = rep.sys->algebra();
  const Matrix UsU = rep.U.adjoint() * rep.U;
  std::vector<std::size_t> in;
  for (std::size_t b = 0; b < alg.num_blocks(); ++b) {
    const Matrix pz = rep.pi(block_unit(alg, b));
    if (operator_norm(UsU * pz - pz) <= tol) in.push_back(b);
  }
  return Ideal(alg.num_blocks(), in);
}

/// U^*U = 1 - pi(p_I).
inline bool is_strict(const CovariantRep& rep, double tol = 1e-10) {
  const Element pI = block_unit(rep.sys->algebra(), kernel(rep.sys->endo));
  const Matrix target = identity_matrix(rep.dim()) - rep.pi(pI);
  return operator_norm(rep.U.adjoint() * rep.U - target) <= tol;
}

inline double strictness_residual(const CovariantRep& rep) {
  const Element pI = block_unit(rep.sys->algebra(), kernel(rep.sys->endo));
  return operator_norm(rep.U.adjoint() * rep.U - (identity_matrix(rep.dim()) - rep.pi(pI)));
}

/// (pi~, U) for (A_J, delta_J) with pi~((a+I) + (b+J)) = U^*U pi(a) + (1 - U^*U) pi(b),
/// returned in the same (multiplicity, unitary) form.
struct ExtendedRep {
  ExtendedSystem ext;
  CovariantRep rep;

  Matrix pi_tilde(const Element& x) const { return rep.pi(x); }
};

inline ExtendedRep extend_pi(const CovariantRep& rep, const Ideal& J, double tol = 1e-10) {
  const Ideal actual = association_ideal(rep, tol);
  if (!(actual == J))
    throw PreconditionError("ideal " + J.to_string() + " differs from the association ideal " + actual.to_string());
  ExtendedSystem ext = extend_system(rep.sys->endo, J);
  const BlockAlgebra& alg = rep.sys->algebra();
  const int dim = rep.dim();
  const Matrix P = rep.U.adjoint() * rep.U;
  const Matrix Q = identity_matrix(dim) - P;

  std::vector<int> mult;
  std::vector<Eigen::VectorXcd> columns;
  for (std::size_t t = 0; t < ext.source_block.size(); ++t) {
    const std::size_t b = ext.source_block[t];
    const Matrix& side = t < ext.first_count ? P : Q;
    const Matrix e11 = side * rep.pi(matrix_unit(alg, b, 0, 0));
    Eigen::SelfAdjointEigenSolver<Matrix> es((e11 + e11.adjoint()) / 2.0);
    std::vector<Eigen::VectorXcd> range;
    for (Eigen::Index c = 0; c < es.eigenvalues().size(); ++c)
      if (es.eigenvalues()(c) > 0.5) range.push_back(es.eigenvectors().col(c));
    if (range.empty())
      throw PreconditionError("extended representation vanishes on block " + std::to_string(t + 1) + " of A_J");
    mult.push_back(static_cast<int>(range.size()));
    for (const auto& v : range)
      for (int p = 0; p < alg.dim(b); ++p) columns.push_back(side * rep.pi(matrix_unit(alg, b, p, 0)) * v);
  }
  if (static_cast<int>(columns.size()) != dim)
    throw PreconditionError("extended representation is not unital");
  Matrix W(dim, dim);
  for (int c = 0; c < dim; ++c) W.col(c) = columns[static_cast<std::size_t>(c)];
  auto sys = make_system(ext.endo, rep.sys->tol);
  return {std::move(ext), CovariantRep{std::move(sys), std::move(mult), std::move(W), rep.U}};
}

namespace detail {

inline void require_rep_system(const CovariantRep& rep, const CPMatrix& x) {
  if (!detail::same_system(rep.sys, x.system_ptr()))
    throw StructuralError("matrix and representation belong to different systems");
}

inline std::vector<Matrix> powers(const Matrix& m, Index n) {
  std::vector<Matrix> out{identity_matrix(static_cast<int>(m.rows()))};
  for (Index k = 1; k <= n; ++k) out.push_back(out.back() * m);
  return out;
}

}  // namespace detail

/// Psi(x) = sum U^{*m} pi(a_mn) U^n.
inline Matrix psi(const CovariantRep& rep, const CPMatrix& x) {
  detail::require_rep_system(rep, x);
  const int d = rep.dim();
  Matrix out = Matrix::Zero(d, d);
  if (x.empty()) return out;
  const auto up = detail::powers(rep.U, x.support_bound());
  for (const auto& [p, a] : x.entries())
    out += up[static_cast<std::size_t>(p.first)].adjoint() * rep.pi(a) * up[static_cast<std::size_t>(p.second)];
  return out;
}

inline double rep_norm(const CovariantRep& rep, const CPMatrix& x) { return operator_norm(psi(rep, x)); }

/// sum_n U^{*n} pi(x_n^{(k)}) U^n
inline Matrix nk_coefficient(const CovariantRep& rep, const CPMatrix& x, int k) { return psi(rep, nk(x, k)); }

/// sum_{k>=0} N_k(x) U^k + sum_{k<0} U^{*|k|} N_k(x)
inline Matrix fourier_reconstruct(const CovariantRep& rep, const CPMatrix& x) {
  const int d = rep.dim();
  Matrix out = Matrix::Zero(d, d);
  for (int k : x.diagonals()) {
    const Matrix c = nk_coefficient(rep, x, k);
    Matrix uk = identity_matrix(d);
    for (int i = 0; i < std::abs(k); ++i) uk = uk * rep.U;
    out += k >= 0 ? Matrix(c * uk) : Matrix(uk.adjoint() * c);
  }
  return out;
}

struct PropertyStarReport {
  bool violation = false;
  std::optional<std::size_t> witness;  // index into the samples
  double lhs = 0.0;                    // ||Psi(0-diagonal part)||
  double rhs = 0.0;                    // ||Psi(x)||
  std::size_t checked = 0;
};

inline PropertyStarReport check_property_star(const CovariantRep& rep, const std::vector<CPMatrix>& samples,
                                              double tol = 1e-10) {
  PropertyStarReport r;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const double lhs = rep_norm(rep, to_matrix(diagonal(samples[s], 0)));
    const double rhs = rep_norm(rep, samples[s]);
    ++r.checked;
    if (lhs > rhs + tol) {
      r.violation = true;
      r.witness = s;
      r.lhs = lhs;
      r.rhs = rhs;
      return r;
    }
  }
  return r;
}

/// alpha_z on the representation: U -> zU.
inline CovariantRep gauge_twisted(const CovariantRep& rep, Complex z) {
  CovariantRep out = rep;
  out.U = z * rep.U;
  return out;
}

struct CompareReport {
  bool same_ideal = false;
  Ideal ideal1, ideal2;
  std::vector<double> norms1, norms2;
  double max_difference = 0.0;
  /// rep i has some norm strictly below the other's: it cannot have property (*).
  bool below1 = false, below2 = false;
  /// Largest gap between a rep norm and the formula norm, over single-diagonal samples.
  double formula_gap1 = 0.0, formula_gap2 = 0.0;
};

/// Both reps must represent the same system, but their norms are compared on
/// matrices from that system.
inline CompareReport compare_reps(const CovariantRep& rep1, const CovariantRep& rep2, const std::vector<CPMatrix>& samples,
                                  double tol = 1e-8) {
  CompareReport r;
  r.ideal1 = association_ideal(rep1);
  r.ideal2 = association_ideal(rep2);
  r.same_ideal = r.ideal1 == r.ideal2;
  if (!r.same_ideal) return r;
  for (const auto& x : samples) {
    const double n1 = rep_norm(rep1, x);
    const double n2 = rep_norm(rep2, x);
    r.norms1.push_back(n1);
    r.norms2.push_back(n2);
    r.max_difference = std::max(r.max_difference, std::abs(n1 - n2));
    r.below1 = r.below1 || n1 < n2 - tol;
    r.below2 = r.below2 || n2 < n1 - tol;
    const auto ks = x.diagonals();
    if (ks.size() == 1) {
      const double f = bk_norm_exact(diagonal(x, *ks.begin()), r.ideal1);
      r.formula_gap1 = std::max(r.formula_gap1, f - n1);
      r.formula_gap2 = std::max(r.formula_gap2, f - n2);
    }
  }
  r.below1 = r.below1 || r.formula_gap1 > tol;
  r.below2 = r.below2 || r.formula_gap2 > tol;
  return r;
}

// ---------------------------------------------------------------------------
// Path representations of commutative systems.

struct PathNode {
  enum class Kind { chain, cycle };
  int label = 0;  // 0-based point of X
  Kind kind = Kind::chain;
  int depth = 0;  // level for chains, position for cycles
  int origin = 0; // root point for chains, smallest point of the cycle for cycles
  int copy = 0;
};

struct PathOptions {
  int root_multiplicity = 1;
  int cycle_wraps = 1;
};

struct PathRep {
  CovariantRep rep;
  std::vector<PathNode> nodes;
  int depth = 0;
  std::vector<std::size_t> defect_shell;

  std::vector<bool> shell_mask() const {
    std::vector<bool> m(nodes.size(), false);
    for (std::size_t i : defect_shell) m[i] = true;
    return m;
  }

  /// Columns on which Psi of a product is computed exactly when the right
  /// factor has row indices at most `max_row`: the compression to depth D
  /// only loses vectors that the right factor pushes past depth D.
  std::vector<bool> exact_columns(Index max_row) const {
    std::vector<bool> m(nodes.size(), false);
    for (std::size_t i = 0; i < nodes.size(); ++i)
      m[i] = nodes[i].kind == PathNode::Kind::cycle || nodes[i].depth + max_row <= depth;
    return m;
  }

  bool has_cycles() const {
    return std::any_of(nodes.begin(), nodes.end(), [](const PathNode& n) { return n.kind == PathNode::Kind::cycle; });
  }
};

inline RepReport validate(const PathRep& pr, double tol = 1e-10) {
  return validate(pr.rep, ValidateOptions{tol, pr.shell_mask()});
}

/// Psi(x)Psi(y) - Psi(x*y) restricted to the columns where the truncated
/// model is exact for this pair.
inline double homomorphism_residual(const PathRep& pr, const CPMatrix& x, const CPMatrix& y) {
  const Matrix res = psi(pr.rep, star(x, y)) - psi(pr.rep, x) * psi(pr.rep, y);
  const auto keep = pr.exact_columns(y.max_row());
  std::vector<bool> drop(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) drop[i] = !keep[i];
  return operator_norm(detail::drop_columns(res, drop));
}

/// Chains from every root x in X \ S_J up to depth D, plus a unitary cyclic
/// block for every psi-cycle inside S_J.
inline PathRep build_path_rep(const CommutativeSystem& cs, const Ideal& S_J, int D, const PathOptions& opt = {},
                              Tolerance tol = {}) {
  cs.check();
  if (D < 1) throw PreconditionError("depth must be at least 1");
  if (opt.root_multiplicity < 1 || opt.cycle_wraps < 1) throw PreconditionError("multiplicities must be positive");
  const int P = cs.points;
  if (S_J.num_blocks() != static_cast<std::size_t>(P)) throw StructuralError("ideal and system of different sizes");
  const auto image = cs.image();
  for (std::size_t s : S_J.blocks())
    if (!image[s])
      throw PreconditionError("S_J = " + S_J.to_string() + " is not contained in psi(Y): point " +
                              std::to_string(s + 1) + " has no preimage");

  PathRep pr;
  pr.depth = D;
  for (int x = 0; x < P; ++x) {
    if (S_J.contains(static_cast<std::size_t>(x))) continue;
    for (int c = 0; c < opt.root_multiplicity; ++c) {
      int label = x;
      for (int k = 0; k <= D; ++k) {
        pr.nodes.push_back({label, PathNode::Kind::chain, k, x, c});
        if (!cs.in_domain(label)) break;
        if (k == D) pr.defect_shell.push_back(pr.nodes.size() - 1);
        label = cs.psi(label);
      }
    }
  }
  const std::size_t chain_count = pr.nodes.size();

  // Cycles inside S_J, each listed once from its smallest point.
  for (int x = 0; x < P; ++x) {
    if (!S_J.contains(static_cast<std::size_t>(x))) continue;
    std::vector<int> cyc{x};
    int y = x;
    bool closed = false;
    for (int step = 0; step < P && cs.in_domain(y); ++step) {
      y = cs.psi(y);
      if (y == x) {
        closed = true;
        break;
      }
      if (!S_J.contains(static_cast<std::size_t>(y))) break;
      cyc.push_back(y);
    }
    if (!closed || *std::min_element(cyc.begin(), cyc.end()) != x) continue;
    int pos = 0;
    for (int w = 0; w < opt.cycle_wraps; ++w)
      for (int l : cyc) pr.nodes.push_back({l, PathNode::Kind::cycle, pos++, x, 0});
  }

  std::vector<int> mult(static_cast<std::size_t>(P), 0);
  for (const auto& n : pr.nodes) ++mult[static_cast<std::size_t>(n.label)];
  for (int x = 0; x < P; ++x)
    if (mult[static_cast<std::size_t>(x)] == 0)
      throw PreconditionError("depth " + std::to_string(D) + " leaves point " + std::to_string(x + 1) +
                              " unrepresented; pi would not be faithful");

  const int dim = static_cast<int>(pr.nodes.size());
  Matrix U = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < chain_count; ++i)
    if (pr.nodes[i].depth > 0) U(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(i)) = 1.0;
  // U e_v = e_w where psi(label w) = label v: one step backwards along the cycle.
  for (std::size_t i = chain_count; i < pr.nodes.size();) {
    std::size_t j = i;
    while (j < pr.nodes.size() && pr.nodes[j].origin == pr.nodes[i].origin) ++j;
    const std::size_t len = j - i;
    for (std::size_t s = 0; s < len; ++s)
      U(static_cast<Eigen::Index>(i + (s + len - 1) % len), static_cast<Eigen::Index>(i + s)) = 1.0;
    i = j;
  }

  Matrix W = Matrix::Zero(dim, dim);
  std::vector<int> offset(static_cast<std::size_t>(P), 0);
  for (int x = 1; x < P; ++x) offset[static_cast<std::size_t>(x)] = offset[static_cast<std::size_t>(x - 1)] + mult[static_cast<std::size_t>(x - 1)];
  for (std::size_t i = 0; i < pr.nodes.size(); ++i)
    W(static_cast<Eigen::Index>(i), offset[static_cast<std::size_t>(pr.nodes[i].label)]++) = 1.0;

  pr.rep = CovariantRep{make_system(cs.to_endomorphism(), tol), std::move(mult), std::move(W), std::move(U)};
  return pr;
}

}  // namespace xprod
