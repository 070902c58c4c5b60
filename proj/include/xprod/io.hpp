#pragma once

// JSON formats. Complex scalars are [re, im] (a bare number is read as a real
// scalar); matrices are row-major arrays of rows; block and point indices are
// 1-based in files.

#include <filesystem>
#include <optional>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "xprod/rep.hpp"

namespace xprod::io {

using json = nlohmann::json;

namespace detail {

[[noreturn]] inline void bad(const std::string& what) { throw ParseError(what); }

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) bad(where + ": missing \"" + key + "\"");
  return j.at(key);
}

inline int to_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where + ": expected an integer");
  return j.get<int>();
}

}  // namespace detail

inline json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    detail::bad("complex scalar must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) detail::bad("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) detail::bad("matrix rows must be non-empty arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) detail::bad("matrix rows differ in length");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

inline json to_json(const BlockAlgebra& a) { return {{"blocks", a.dims()}}; }

inline BlockAlgebra algebra_from_json(const json& j) {
  const json& b = detail::field(j, "blocks", "algebra");
  if (!b.is_array()) detail::bad("algebra: \"blocks\" must be an array");
  std::vector<int> dims;
  for (const auto& n : b) dims.push_back(detail::to_int(n, "algebra block"));
  try {
    return BlockAlgebra(std::move(dims));
  } catch (const StructuralError& e) {
    detail::bad(std::string("algebra: ") + e.what());
  }
}

inline json to_json(const Element& x) {
  json out = json::array();
  for (const auto& b : x.blocks()) out.push_back(to_json(b));
  return out;
}

inline Element element_from_json(const json& j, const BlockAlgebra& alg) {
  if (!j.is_array() || j.size() != alg.num_blocks()) detail::bad("element must be an array with one matrix per block");
  std::vector<Matrix> bs;
  for (std::size_t b = 0; b < alg.num_blocks(); ++b) {
    Matrix m = matrix_from_json(j[b]);
    if (m.rows() != alg.dim(b) || m.cols() != alg.dim(b))
      detail::bad("element block " + std::to_string(b + 1) + " has the wrong shape");
    bs.push_back(std::move(m));
  }
  return Element(std::move(bs));
}

inline json to_json(const Ideal& k) {
  json in = json::array();
  for (std::size_t b : k.blocks()) in.push_back(b + 1);
  return {{"blocks_in", in}};
}

inline Ideal ideal_from_json(const json& j, std::size_t num_blocks) {
  const json& in = detail::field(j, "blocks_in", "ideal");
  if (!in.is_array()) detail::bad("ideal: \"blocks_in\" must be an array");
  std::vector<std::size_t> blocks;
  for (const auto& b : in) {
    const int v = detail::to_int(b, "ideal block");
    if (v < 1 || static_cast<std::size_t>(v) > num_blocks)
      detail::bad("ideal block " + std::to_string(v) + " out of range 1.." + std::to_string(num_blocks));
    blocks.push_back(static_cast<std::size_t>(v - 1));
  }
  return Ideal(num_blocks, blocks);
}

inline json to_json(const CommutativeSystem& cs) {
  json map = json::object();
  for (auto [x, y] : cs.map) map[std::to_string(x + 1)] = y + 1;
  return {{"commutative", {{"points", cs.points}, {"map", map}}}};
}

inline CommutativeSystem commutative_from_json(const json& j) {
  CommutativeSystem cs;
  cs.points = detail::to_int(detail::field(j, "points", "commutative system"), "points");
  const json& m = detail::field(j, "map", "commutative system");
  auto add = [&](int x, int y) {
    if (x < 1 || x > cs.points || y < 1 || y > cs.points) detail::bad("commutative map point out of range");
    cs.map[x - 1] = y - 1;
  };
  if (m.is_object()) {
    for (const auto& [k, v] : m.items()) {
      int x = 0;
      try {
        x = std::stoi(k);
      } catch (const std::exception&) {
        detail::bad("commutative map key '" + k + "' is not a point");
      }
      add(x, detail::to_int(v, "map value"));
    }
  } else if (m.is_array()) {
    for (const auto& pr : m) {
      if (!pr.is_array() || pr.size() != 2) detail::bad("commutative map entries must be [x, psi(x)] pairs");
      add(detail::to_int(pr[0], "map point"), detail::to_int(pr[1], "map value"));
    }
  } else {
    detail::bad("commutative map must be an object or an array of pairs");
  }
  return cs;
}

inline json to_json(const Endomorphism& d) {
  json u = json::array();
  for (const auto& w : d.unitaries()) u.push_back(to_json(w));
  return {{"algebra", to_json(d.algebra())},
          {"endomorphism", {{"mult", d.mult()}, {"unitaries", u}, {"slack", d.slack()}}}};
}

/// A system file, either form. Also returns the commutative description when given.
struct SystemFile {
  SystemPtr sys;
  std::optional<CommutativeSystem> commutative;
};

inline SystemFile system_from_json(const json& j, Tolerance tol = {}) {
  try {
    if (j.contains("commutative")) {
      CommutativeSystem cs = commutative_from_json(j.at("commutative"));
      return {make_system(cs.to_endomorphism(), tol), cs};
    }
    BlockAlgebra alg = algebra_from_json(detail::field(j, "algebra", "system"));
    const json& e = detail::field(j, "endomorphism", "system");
    const json& mj = detail::field(e, "mult", "endomorphism");
    if (!mj.is_array()) detail::bad("endomorphism: \"mult\" must be a matrix of integers");
    std::vector<std::vector<int>> mult;
    for (const auto& row : mj) {
      if (!row.is_array()) detail::bad("endomorphism: \"mult\" rows must be arrays");
      std::vector<int> r;
      for (const auto& v : row) r.push_back(detail::to_int(v, "multiplicity"));
      mult.push_back(std::move(r));
    }
    std::vector<Matrix> us;
    if (e.contains("unitaries"))
      for (const auto& u : e.at("unitaries")) us.push_back(matrix_from_json(u));
    if (e.contains("slack")) {
      std::vector<int> slack;
      for (const auto& v : e.at("slack")) slack.push_back(detail::to_int(v, "slack"));
      return {make_system(Endomorphism(std::move(alg), std::move(mult), std::move(us), slack, tol), tol), {}};
    }
    return {make_system(Endomorphism(std::move(alg), std::move(mult), std::move(us), tol), tol), {}};
  } catch (const StructuralError& e) {
    detail::bad(std::string("system: ") + e.what());
  } catch (const json::exception& e) {
    detail::bad(std::string("system: ") + e.what());
  }
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

/// Resolves a "system" member: an inline object or a path relative to `base`.
inline SystemFile resolve_system(const json& j, const std::filesystem::path& base, Tolerance tol) {
  if (j.is_string()) return system_from_json(read_json_file(base / j.get<std::string>()), tol);
  return system_from_json(j, tol);
}

inline json to_json(const CPMatrix& x) {
  json entries = json::array();
  for (const auto& [p, a] : x.entries()) entries.push_back({{"i", p.first}, {"j", p.second}, {"value", to_json(a)}});
  return {{"entries", entries}};
}

/// Entries violating the corner constraint beyond tol are rejected.
inline CPMatrix cpmatrix_from_json(const json& j, const SystemPtr& sys) {
  const json& es = detail::field(j, "entries", "element");
  if (!es.is_array()) detail::bad("element: \"entries\" must be an array");
  EntryMap m;
  for (const auto& e : es) {
    const int i = detail::to_int(detail::field(e, "i", "entry"), "entry i");
    const int jj = detail::to_int(detail::field(e, "j", "entry"), "entry j");
    if (i < 0 || jj < 0) detail::bad("entry indices must be nonnegative");
    Element v = element_from_json(detail::field(e, "value", "entry"), sys->algebra());
    if (!m.emplace(Position{i, jj}, std::move(v)).second)
      detail::bad("duplicate entry (" + std::to_string(i) + "," + std::to_string(jj) + ")");
  }
  try {
    return CPMatrix::from_entries(sys, std::move(m));
  } catch (const PreconditionError& e) {
    detail::bad(std::string("element: ") + e.what());
  }
}

inline json to_json(const CovariantRep& r) {
  return {{"dim", r.dim()}, {"pi", {{"multiplicities", r.multiplicities}, {"unitary", to_json(r.W)}}}, {"U", to_json(r.U)}};
}

inline CovariantRep rep_from_json(const json& j, const SystemPtr& sys) {
  CovariantRep r;
  r.sys = sys;
  const int d = detail::to_int(detail::field(j, "dim", "representation"), "dim");
  const json& pi = detail::field(j, "pi", "representation");
  for (const auto& m : detail::field(pi, "multiplicities", "pi")) r.multiplicities.push_back(detail::to_int(m, "multiplicity"));
  r.W = matrix_from_json(detail::field(pi, "unitary", "pi"));
  r.U = matrix_from_json(detail::field(j, "U", "representation"));
  if (r.W.rows() != d || r.W.cols() != d || r.U.rows() != d || r.U.cols() != d)
    detail::bad("representation: matrices must be dim x dim");
  return r;
}

inline json to_json(const PathRep& pr) {
  json out = to_json(pr.rep);
  json nodes = json::array();
  for (const auto& n : pr.nodes)
    nodes.push_back({{"label", n.label + 1},
                     {"kind", n.kind == PathNode::Kind::chain ? "chain" : "cycle"},
                     {"depth", n.depth}});
  out["nodes"] = nodes;
  out["defect_shell"] = pr.defect_shell;
  out["depth"] = pr.depth;
  return out;
}

inline json to_json(const NormReport& r) {
  return {{"method", r.method}, {"values", r.values}, {"k_schedule", r.k_schedule}, {"transient", r.transient}, {"period", r.period}};
}

inline json to_json(const RepReport& r) {
  json out = {{"valid", r.valid}};
  if (!r.valid) {
    out["axiom"] = r.axiom;
    out["generator"] = r.generator;
    out["residual"] = r.residual;
  }
  return out;
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ParseError("cannot write " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw ParseError("write failed for " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace xprod::io
