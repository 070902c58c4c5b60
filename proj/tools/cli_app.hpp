#pragma once

// The xprod command line. run() is callable from tests with captured streams.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xprod/random.hpp"
#include "xprod/xprod.hpp"

namespace xprod::cli {

namespace fs = std::filesystem;
using io::json;

enum Exit { ok = 0, failed = 1, parse_error = 2, resource = 3 };

struct Options {
  double tol = 1e-10;
  int kmax = 6;
  int depth = 8;
  std::string schedule = "linear";
  std::string out;
  std::string csv;

  std::string system, element, left, right, ideal, rep, rep2, method = "exact";
  std::optional<int> diagonal;
  int root_multiplicity = 1, cycle_wraps = 1, samples = 50;
  unsigned long seed = 1;
  bool exclude_shell = false;
  std::string demo;
};

namespace detail {

struct Loaded {
  io::SystemFile sys;
  json raw;
  fs::path dir;
};

inline Loaded load_system(const std::string& path, Tolerance tol) {
  json j = io::read_json_file(path);
  return {io::system_from_json(j, tol), j, fs::path(path).parent_path()};
}

inline CPMatrix load_element(const std::string& path, Tolerance tol, const SystemPtr& fallback = nullptr) {
  const json j = io::read_json_file(path);
  SystemPtr sys = fallback;
  if (j.contains("system")) sys = io::resolve_system(j.at("system"), fs::path(path).parent_path(), tol).sys;
  if (!sys) throw ParseError(path + ": element file names no system and none was given");
  return io::cpmatrix_from_json(j, sys);
}

inline Ideal load_ideal(const std::string& path, std::size_t num_blocks) {
  return io::ideal_from_json(io::read_json_file(path), num_blocks);
}

inline CovariantRep load_rep(const std::string& path, Tolerance tol, const SystemPtr& fallback) {
  const json j = io::read_json_file(path);
  SystemPtr sys = fallback;
  if (j.contains("system")) sys = io::resolve_system(j.at("system"), fs::path(path).parent_path(), tol).sys;
  if (!sys) throw ParseError(path + ": representation file names no system; pass --system");
  return io::rep_from_json(j, sys);
}

inline void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ParseError(std::string("missing required option ") + flag);
}

}  // namespace detail

/// Every report carries the resolved configuration.
inline json config_json(const std::string& verb, const Options& o) {
  json c = {{"verb", verb}, {"tol", o.tol}, {"kmax", o.kmax}, {"depth", o.depth}, {"schedule", o.schedule}};
  json inputs = json::object();
  auto put = [&](const char* k, const std::string& v) {
    if (!v.empty()) inputs[k] = v;
  };
  put("system", o.system);
  put("element", o.element);
  put("left", o.left);
  put("right", o.right);
  put("ideal", o.ideal);
  put("rep", o.rep);
  put("rep2", o.rep2);
  if (!inputs.empty()) c["inputs"] = inputs;
  if (verb == "norm") c["method"] = o.method;
  if (o.diagonal) c["diagonal"] = *o.diagonal;
  if (verb == "rep-build-path") {
    c["root_multiplicity"] = o.root_multiplicity;
    c["cycle_wraps"] = o.cycle_wraps;
  }
  if (verb == "rep-compare") {
    c["samples"] = o.samples;
    c["seed"] = o.seed;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Demos

namespace demos {

inline CommutativeSystem c3() { return {3, {{0, 1}, {1, 2}, {2, 2}}}; }

/// a_0 = e_2 at (0,0), a_1 = -delta(e_2) at (1,1).
inline CPMatrix c3_two_coeff(const SystemPtr& sys) {
  const Element e2 = Element::scalars({0.0, 1.0, 0.0});
  return CPMatrix::from_entries(sys, {{{0, 0}, e2}, {{1, 1}, -sys->endo(e2)}});
}

inline json variety(std::ostream& out, Tolerance tol) {
  const auto sys = make_system(c3().to_endomorphism(), tol);
  const CPMatrix x = c3_two_coeff(sys);
  out << "element: a_0 = e_2, a_1 = -delta(e_2) in C^3, psi: 1->2, 2->3, 3->3; ker delta = {1}\n";
  out << std::left << std::setw(10) << "J" << std::setw(14) << "exact" << std::setw(14) << "limit" << "seminorm\n";
  json rows = json::array();
  for (const Ideal& J : {Ideal(3), Ideal(3, {1}), Ideal(3, {2}), Ideal(3, {1, 2})}) {
    const KDiagonal d = diagonal(x, 0);
    const double e = bk_norm_exact(d, J), l = bk_norm_limit(d, J), s = seminorm(x, J);
    out << std::setw(10) << J.to_string() << std::setw(14) << e << std::setw(14) << l << s << "\n";
    rows.push_back({{"ideal", io::to_json(J)}, {"exact", e}, {"limit", l}, {"seminorm", s}});
  }
  return {{"demo", "variety"}, {"rows", rows}};
}

/// psi(x) = 3 for every x in C^3: the kernel is {1,2} and I^perp = {3}.
inline CommutativeSystem collapse() { return {3, {{0, 2}, {1, 2}, {2, 2}}}; }

inline json strict_vs_associated(std::ostream& out, Tolerance tol, int depth) {
  const CommutativeSystem cs = collapse();
  const auto sys = make_system(cs.to_endomorphism(), tol);
  const Ideal I = kernel(sys->endo);
  const Ideal Iperp = orthogonality(I, I).iperp;
  struct Case {
    std::string name;
    Ideal S;
    PathOptions opt;
  };
  const std::vector<Case> cases = {
      {"path rep, S_J = I^perp", Iperp, {1, 1}},
      {"path rep, S_J = I^perp, doubled roots", Iperp, {2, 1}},
      {"path rep, S_J = I^perp, cycle wrapped twice", Iperp, {1, 2}},
      {"path rep, S_J = {}", Ideal(3), {1, 1}},
  };
  out << "system: C^3, psi = 3 everywhere; ker delta = " << I.to_string() << ", I^perp = " << Iperp.to_string() << "\n";
  out << std::left << std::setw(46) << "representation" << std::setw(8) << "valid" << std::setw(12) << "associated"
      << std::setw(16) << "assoc = I^perp" << "strict\n";
  json rows = json::array();
  for (const auto& c : cases) {
    const PathRep pr = build_path_rep(cs, c.S, depth, c.opt, tol);
    const RepReport v = validate(pr, tol.tol);
    const Ideal J = association_ideal(pr.rep, tol.tol);
    const bool strict = is_strict(pr.rep, tol.tol);
    const bool flagged = J == Iperp && !strict;
    out << std::setw(46) << c.name << std::setw(8) << (v.valid ? "yes" : "no") << std::setw(12) << J.to_string()
        << std::setw(16) << (J == Iperp ? "yes" : "no") << (strict ? "yes" : "no") << (flagged ? "  <- associated, not strict" : "")
        << "\n";
    rows.push_back({{"rep", c.name}, {"valid", v.valid}, {"association_ideal", io::to_json(J)}, {"strict", strict},
                    {"associated_not_strict", flagged}, {"strictness_residual", strictness_residual(pr.rep)}});
  }
  out << "note: in finite dimensions covariance forces U*U pi(p_I) = 0, so association with I^perp already gives "
         "U*U = 1 - pi(p_I); the associated-but-not-strict case needs an infinite-dimensional H.\n";
  return {{"demo", "strict-vs-associated"}, {"rows", rows}};
}

inline json fourier(std::ostream& out, Tolerance tol, int depth) {
  const CommutativeSystem cs = c3();
  const PathRep pr = build_path_rep(cs, Ideal(3, {1, 2}), depth, {}, tol);
  const auto sys = pr.rep.sys;
  random::Rng rng(2024);
  std::vector<std::pair<std::string, CPMatrix>> xs = {{"two-coefficient fixture", c3_two_coeff(sys)},
                                                      {"u", unit_u(sys)},
                                                      {"random", random::cpmatrix(sys, rng, 3, 6)}};
  out << std::left << std::setw(26) << "element" << std::setw(12) << "diagonals" << std::setw(22) << "u-round-trip"
      << "fourier residual\n";
  json rows = json::array();
  double worst = 0.0;
  for (const auto& [name, x] : xs) {
    const double r1 = max_entry_distance(u_reconstruct(sys, u_decompose(x)), x);
    const double r2 = operator_norm(fourier_reconstruct(pr.rep, x) - psi(pr.rep, x));
    worst = std::max({worst, r1, r2});
    out << std::setw(26) << name << std::setw(12) << x.diagonals().size() << std::setw(22) << r1 << r2 << "\n";
    rows.push_back({{"element", name}, {"u_round_trip", r1}, {"fourier_residual", r2}});
  }
  out << "max residual " << worst << (worst <= tol.tol ? " <= tol\n" : " > tol\n");
  return {{"demo", "fourier"}, {"rows", rows}, {"max_residual", worst}};
}

}  // namespace demos

// ---------------------------------------------------------------------------

namespace detail {

inline json norm_report_json(const NormReport& r) { return io::to_json(r); }

inline void write_csv(const std::string& path, const NormReport& r) {
  std::ostringstream os;
  os << "k,power,e_k\n" << std::setprecision(17);
  for (std::size_t i = 0; i < r.values.size(); ++i) os << i + 1 << "," << r.k_schedule[i] << "," << r.values[i] << "\n";
  const fs::path tmp = path + ".tmp";
  {
    std::ofstream f(tmp);
    if (!f) throw ParseError("cannot write " + path);
    f << os.str();
  }
  fs::rename(tmp, path);
}

inline KDiagonal pick_diagonal(const CPMatrix& x, const std::optional<int>& k) {
  if (k) return diagonal(x, *k);
  const auto ks = x.diagonals();
  if (ks.empty()) return KDiagonal{x.system_ptr(), 0, {}};
  if (ks.size() > 1) throw PreconditionError("element has " + std::to_string(ks.size()) + " diagonals; pass --diagonal k");
  return diagonal(x, *ks.begin());
}

inline std::vector<CPMatrix> sample_elements(const SystemPtr& sys, int n, unsigned long seed) {
  random::Rng rng(seed);
  std::uniform_int_distribution<int> kind(0, 1), kk(-2, 2);
  std::vector<CPMatrix> xs;
  for (int s = 0; s < n; ++s)
    xs.push_back(kind(rng) == 0 ? random::graded(sys, kk(rng), 2, rng) : random::cpmatrix(sys, rng, 2, 3));
  return xs;
}

}  // namespace detail

inline json execute(const std::string& verb, const Options& o, std::ostream& out) {
  const Tolerance tol{o.tol};
  json r;
  if (verb == "kernel" || verb == "iperp" || verb == "extend") {
    detail::require(o.system, "--system");
    const auto L = detail::load_system(o.system, tol);
    const Endomorphism& d = L.sys.sys->endo;
    const Ideal I = kernel(d);
    if (verb == "kernel") {
      r = {{"kernel", io::to_json(I)}};
    } else if (verb == "iperp") {
      r = {{"kernel", io::to_json(I)}, {"iperp", io::to_json(orthogonality(I, I).iperp)}};
      if (!o.ideal.empty()) {
        const Ideal J = detail::load_ideal(o.ideal, d.num_blocks());
        r["ideal"] = io::to_json(J);
        r["orthogonal"] = orthogonality(I, J).orthogonal;
      }
    } else {
      detail::require(o.ideal, "--ideal");
      const Ideal J = detail::load_ideal(o.ideal, d.num_blocks());
      const ExtendedSystem ext = extend_system(d, J);
      json src = json::array();
      for (std::size_t b : ext.source_block) src.push_back(b + 1);
      r = io::to_json(ext.endo);
      r["source_blocks"] = src;
      r["first_summand_blocks"] = ext.first_count;
      r["kernel"] = io::to_json(kernel(ext.endo));
      r["second_summand"] = io::to_json(ext.second_summand());
      r["kernel_unit"] = io::to_json(ext.kernel_unit());
    }
  } else if (verb == "star") {
    detail::require(o.left, "--left");
    detail::require(o.right, "--right");
    const CPMatrix x = detail::load_element(o.left, tol);
    const CPMatrix y = detail::load_element(o.right, tol, x.system_ptr());
    r = io::to_json(star(x, y));
  } else if (verb == "norm" || verb == "seminorm" || verb == "estimate") {
    detail::require(o.element, "--element");
    const CPMatrix x = detail::load_element(o.element, tol);
    const std::size_t B = x.system().algebra().num_blocks();
    if (verb == "estimate") {
      const EstimateConfig cfg{o.kmax, parse_schedule(o.schedule)};
      std::vector<Ideal> ideals;
      if (!o.ideal.empty()) {
        ideals.push_back(detail::load_ideal(o.ideal, B));
      } else {
        // No ideal given: report every admissible J rather than choosing one.
        for (const Ideal& J : Ideal::all(B))
          if (orthogonality(kernel(x.system().endo), J).orthogonal) ideals.push_back(J);
      }
      json by = json::array();
      std::optional<NormReport> first;
      bool agree = true;
      for (const Ideal& J : ideals) {
        NormReport rep = csnorm_estimate(x, J, cfg);
        by.push_back({{"ideal", io::to_json(J)}, {"values", rep.values}});
        if (!first) {
          first = rep;
        } else {
          for (std::size_t i = 0; i < rep.values.size(); ++i)
            agree = agree && std::abs(rep.values[i] - first->values[i]) <= o.tol;
        }
      }
      r = detail::norm_report_json(*first);
      if (o.ideal.empty()) {
        r["by_ideal"] = by;
        if (!agree) r.erase("values");
      } else {
        r["ideal"] = io::to_json(ideals.front());
      }
      if (!o.csv.empty() && r.contains("values")) detail::write_csv(o.csv, *first);
    } else {
      detail::require(o.ideal, "--ideal");
      const Ideal J = detail::load_ideal(o.ideal, B);
      NormReport rep;
      if (verb == "seminorm") {
        rep = {"seminorm", {seminorm(x, J)}, {}, 0, 0};
      } else if (o.method == "exact") {
        rep = {"exact", {bk_norm_exact(detail::pick_diagonal(x, o.diagonal), J)}, {}, 0, 0};
      } else if (o.method == "limit") {
        const LimitNorm l = bk_norm_limit_report(detail::pick_diagonal(x, o.diagonal), J);
        rep = {"limit", {l.value}, {}, l.transient, l.period};
      } else {
        throw ParseError("unknown method '" + o.method + "' (expected exact or limit)");
      }
      r = detail::norm_report_json(rep);
      r["value"] = rep.values.front();
      r["ideal"] = io::to_json(J);
    }
  } else if (verb == "rep-validate") {
    detail::require(o.rep, "--rep");
    SystemPtr fallback = o.system.empty() ? nullptr : detail::load_system(o.system, tol).sys.sys;
    const CovariantRep rep = detail::load_rep(o.rep, tol, fallback);
    ValidateOptions vo{o.tol, {}};
    if (o.exclude_shell) {
      const json j = io::read_json_file(o.rep);
      if (j.contains("defect_shell")) {
        vo.excluded_columns.assign(static_cast<std::size_t>(rep.dim()), false);
        for (const auto& i : j.at("defect_shell")) vo.excluded_columns.at(i.get<std::size_t>()) = true;
      }
    }
    const RepReport v = validate(rep, vo);
    r = io::to_json(v);
    if (v.valid) {
      const Ideal J = association_ideal(rep, o.tol);
      r["association_ideal"] = io::to_json(J);
      r["kernel"] = io::to_json(kernel(rep.sys->endo));
      r["strict"] = is_strict(rep, o.tol);
    }
  } else if (verb == "rep-build-path") {
    detail::require(o.system, "--system");
    detail::require(o.ideal, "--ideal");
    const auto L = detail::load_system(o.system, tol);
    if (!L.sys.commutative) throw PreconditionError("path representations need a commutative system");
    const Ideal S = detail::load_ideal(o.ideal, L.sys.sys->endo.num_blocks());
    const PathRep pr = build_path_rep(*L.sys.commutative, S, o.depth, {o.root_multiplicity, o.cycle_wraps}, tol);
    r = io::to_json(pr);
    r["system"] = io::to_json(*L.sys.commutative);
    r["association_ideal"] = io::to_json(association_ideal(pr.rep, o.tol));
  } else if (verb == "rep-norm") {
    detail::require(o.rep, "--rep");
    detail::require(o.element, "--element");
    SystemPtr fallback = o.system.empty() ? nullptr : detail::load_system(o.system, tol).sys.sys;
    const CovariantRep rep = detail::load_rep(o.rep, tol, fallback);
    const CPMatrix x = detail::load_element(o.element, tol, rep.sys);
    r = {{"value", rep_norm(rep, x)}};
  } else if (verb == "rep-compare") {
    detail::require(o.rep, "--rep");
    detail::require(o.rep2, "--rep2");
    SystemPtr fallback = o.system.empty() ? nullptr : detail::load_system(o.system, tol).sys.sys;
    const CovariantRep r1 = detail::load_rep(o.rep, tol, fallback);
    const CovariantRep r2 = detail::load_rep(o.rep2, tol, fallback);
    if (!xprod::detail::same_system(r1.sys, r2.sys)) throw PreconditionError("representations of different systems");
    const auto xs = detail::sample_elements(r1.sys, o.samples, o.seed);
    const CompareReport c = compare_reps(r1, r2, xs);
    r = {{"same_ideal", c.same_ideal},
         {"ideal1", io::to_json(c.ideal1)},
         {"ideal2", io::to_json(c.ideal2)},
         {"max_difference", c.max_difference},
         {"lacks_property_star_1", c.below1},
         {"lacks_property_star_2", c.below2},
         {"samples", xs.size()}};
  } else if (verb == "demo") {
    if (o.demo == "variety") r = demos::variety(out, tol);
    else if (o.demo == "strict-vs-associated") r = demos::strict_vs_associated(out, tol, o.depth);
    else if (o.demo == "fourier") r = demos::fourier(out, tol, o.depth);
    else throw ParseError("unknown demo '" + o.demo + "'");
  } else {
    throw ParseError("unknown verb '" + verb + "'");
  }
  r["config"] = config_json(verb, o);
  return r;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Crossed products of finite-dimensional C*-algebras by endomorphisms"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--tol", o.tol, "tolerance for approximate comparisons")->capture_default_str();
  app.add_option("--out", o.out, "write the JSON report here instead of stdout");

  auto sub = [&](const char* name, const char* help) { return app.add_subcommand(name, help); };
  auto* kernel_cmd = sub("kernel", "kernel ideal of delta");
  auto* iperp_cmd = sub("iperp", "I^perp, and orthogonality of --ideal to the kernel");
  auto* extend_cmd = sub("extend", "the extended system (A_J, delta_J)");
  auto* star_cmd = sub("star", "convolution product of two elements of M(A)");
  auto* norm_cmd = sub("norm", "norm of a k-diagonal");
  auto* semi_cmd = sub("seminorm", "the seminorm |||x|||_J");
  auto* est_cmd = sub("estimate", "C*-norm estimates e_1..e_kmax");
  auto* val_cmd = sub("rep-validate", "validate a covariant representation");
  auto* path_cmd = sub("rep-build-path", "path representation of a commutative system");
  auto* rnorm_cmd = sub("rep-norm", "operator norm of Psi(x)");
  auto* cmp_cmd = sub("rep-compare", "compare two representations on random samples");
  auto* demo_cmd = sub("demo", "bundled demonstrations");

  for (auto* c : {kernel_cmd, iperp_cmd, extend_cmd, val_cmd, path_cmd, rnorm_cmd, cmp_cmd})
    c->add_option("--system", o.system, "system file");
  for (auto* c : {iperp_cmd, extend_cmd, norm_cmd, semi_cmd, est_cmd, path_cmd}) c->add_option("--ideal", o.ideal, "ideal file");
  for (auto* c : {norm_cmd, semi_cmd, est_cmd, rnorm_cmd}) c->add_option("--element", o.element, "element file");
  for (auto* c : {val_cmd, rnorm_cmd, cmp_cmd}) c->add_option("--rep", o.rep, "representation file");
  star_cmd->add_option("--left", o.left, "left factor");
  star_cmd->add_option("--right", o.right, "right factor");
  norm_cmd->add_option("--method", o.method, "exact or limit")->capture_default_str();
  norm_cmd->add_option("--diagonal", o.diagonal, "diagonal k to evaluate");
  est_cmd->add_option("--kmax", o.kmax, "number of estimates")->capture_default_str();
  est_cmd->add_option("--schedule", o.schedule, "linear or doubling")->capture_default_str();
  est_cmd->add_option("--csv", o.csv, "also write e_k as CSV");
  val_cmd->add_flag("--exclude-shell", o.exclude_shell, "skip covariance on the recorded defect shell");
  for (auto* c : {path_cmd, demo_cmd}) c->add_option("--depth", o.depth, "path depth D")->capture_default_str();
  path_cmd->add_option("--root-multiplicity", o.root_multiplicity, "copies of each root chain")->capture_default_str();
  path_cmd->add_option("--cycle-wraps", o.cycle_wraps, "length multiplier of cycle blocks")->capture_default_str();
  cmp_cmd->add_option("--rep2", o.rep2, "second representation file");
  cmp_cmd->add_option("--samples", o.samples, "number of random samples")->capture_default_str();
  cmp_cmd->add_option("--seed", o.seed, "sample seed")->capture_default_str();
  demo_cmd->add_option("name", o.demo, "variety, strict-vs-associated or fourier")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return parse_error;
  }
  if (o.tol < 0) {
    err << "error: --tol must be nonnegative\n";
    return parse_error;
  }
  const std::string verb = app.get_subcommands().front()->get_name();

  try {
    const json report = execute(verb, o, out);
    if (o.out.empty()) {
      if (verb != "demo") out << report.dump(2) << "\n";
    } else {
      io::write_json_file(o.out, report);
    }
    if (verb == "rep-validate" && !report.at("valid").get<bool>()) return failed;
    return ok;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return parse_error;
  } catch (const ResourceError& e) {
    err << "resource cap: " << e.what() << "\n";
    return resource;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return failed;
  } catch (const io::json::exception& e) {
    err << "parse error: " << e.what() << "\n";
    return parse_error;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return failed;
  }
}

}  // namespace xprod::cli
