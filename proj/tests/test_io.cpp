#include <gtest/gtest.h>

#include <filesystem>

#include "support.hpp"

using namespace xprod;
using namespace xprod::testing;
using io::json;

namespace {

const std::filesystem::path data_dir{XPROD_DATA_DIR};

TEST(Io, MatrixAndComplexRoundTrip) {
  random::Rng rng(1);
  const Matrix m = random::gaussian(3, 2, rng);
  EXPECT_EQ(io::matrix_from_json(io::to_json(m)), m);
  EXPECT_EQ(io::complex_from_json(json(2.5)), Complex(2.5, 0.0));
  EXPECT_EQ(io::complex_from_json(json::array({1, -2})), Complex(1, -2));
  EXPECT_THROW(io::complex_from_json(json::array({1, 2, 3})), ParseError);
  EXPECT_THROW(io::matrix_from_json(json::parse("[[1, 2], [3]]")), ParseError);
}

TEST(Io, SystemRoundTrip) {
  random::Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    const Endomorphism d = random::endomorphism(rng);
    const io::SystemFile f = io::system_from_json(io::to_json(d));
    EXPECT_TRUE(f.sys->endo.same_as(d));
    const Element x = random::element(d.algebra(), rng);
    EXPECT_LE(distance(f.sys->endo(x), d(x)), 1e-12);
  }
  const CommutativeSystem cs = two_cycle();
  const io::SystemFile f = io::system_from_json(io::to_json(cs));
  ASSERT_TRUE(f.commutative);
  EXPECT_EQ(f.commutative->map, cs.map);
  const json pairs = json::parse(R"({"commutative": {"points": 3, "map": [[1, 2], [2, 3], [3, 3]]}})");
  EXPECT_EQ(io::system_from_json(pairs).commutative->map, c3().map);
}

TEST(Io, SystemParseErrors) {
  EXPECT_THROW(io::system_from_json(json::parse(R"({"algebra": {"blocks": [1]}})")), ParseError);
  EXPECT_THROW(io::system_from_json(json::parse(R"({"algebra": {"blocks": [1, 1]}, "endomorphism": {"mult": [[2, 0], [0, 0]]}})")),
               ParseError);
  EXPECT_THROW(io::system_from_json(json::parse(R"({"commutative": {"points": 2, "map": {"1": 5}}})")), ParseError);
  EXPECT_THROW(io::system_from_json(json::parse(R"({"commutative": {"points": 2, "map": {"x": 1}}})")), ParseError);
  EXPECT_THROW(io::read_json_file(data_dir / "missing.json"), ParseError);
}

TEST(Io, IdealParsing) {
  EXPECT_EQ(io::ideal_from_json(io::read_json_file(data_dir / "ideal_23.json"), 3), Ideal(3, {1, 2}));
  EXPECT_TRUE(io::ideal_from_json(io::read_json_file(data_dir / "ideal_empty.json"), 3).empty());
  EXPECT_THROW(io::ideal_from_json(json::parse(R"({"blocks_in": [4]})"), 3), ParseError);
  EXPECT_THROW(io::ideal_from_json(json::parse(R"({"blocks_in": [0]})"), 3), ParseError);
  EXPECT_THROW(io::ideal_from_json(json::parse(R"({"blocks": [1]})"), 3), ParseError);
}

TEST(Io, ElementRoundTripAndValidation) {
  random::Rng rng(3);
  const auto sys = rotation_system();
  const CPMatrix x = random::cpmatrix(sys, rng, 3, 5);
  EXPECT_TRUE(approx_equal(io::cpmatrix_from_json(io::to_json(x), sys), x));

  const io::SystemFile c = io::resolve_system("c3_system.json", data_dir, {});
  const CPMatrix f = io::cpmatrix_from_json(io::read_json_file(data_dir / "c3_two_coeff.json"), c.sys);
  EXPECT_EQ(f.size(), 2u);
  // delta(1) = e_1 + e_2 + e_3 on the two-cycle system, so e_4 cannot sit in row 1
  const SystemPtr tc = io::system_from_json(io::to_json(two_cycle())).sys;
  const json bad = json::parse(R"({"entries": [{"i": 1, "j": 0, "value": [[[0]], [[0]], [[0]], [[1]]]}]})");
  EXPECT_THROW(io::cpmatrix_from_json(bad, tc), ParseError);
  const json ok = json::parse(R"({"entries": [{"i": 0, "j": 0, "value": [[[0]], [[0]], [[0]], [[1]]]}]})");
  EXPECT_EQ(io::cpmatrix_from_json(ok, tc).size(), 1u);
  const json dup = json::parse(
      R"({"entries": [{"i": 0, "j": 0, "value": [[[0]], [[1]], [[0]]]}, {"i": 0, "j": 0, "value": [[[1]], [[0]], [[0]]]}]})");
  EXPECT_THROW(io::cpmatrix_from_json(dup, c.sys), ParseError);
  const json neg = json::parse(R"({"entries": [{"i": -1, "j": 0, "value": [[[1]], [[0]], [[0]]]}]})");
  EXPECT_THROW(io::cpmatrix_from_json(neg, c.sys), ParseError);
}

TEST(Io, RepRoundTrip) {
  const auto sys = rotation_system();
  const CovariantRep r = rotation_rep(sys);
  const CovariantRep back = io::rep_from_json(io::to_json(r), sys);
  EXPECT_EQ(back.multiplicities, r.multiplicities);
  EXPECT_LE(operator_norm(back.U - r.U), 1e-15);
  const json file = io::read_json_file(data_dir / "rotation_rep.json");
  const CovariantRep fr = io::rep_from_json(file, io::resolve_system(file.at("system"), data_dir, {}).sys);
  EXPECT_TRUE(validate(fr).valid);
  json broken = io::to_json(r);
  broken["dim"] = 4;
  EXPECT_THROW(io::rep_from_json(broken, sys), ParseError);
}

TEST(Io, PathRepJsonCarriesShell) {
  const PathRep pr = build_path_rep(c3(), Ideal(3, {1, 2}), 4);
  const json j = io::to_json(pr);
  EXPECT_EQ(j.at("nodes").size(), pr.nodes.size());
  EXPECT_EQ(j.at("defect_shell").get<std::vector<std::size_t>>(), pr.defect_shell);
  EXPECT_EQ(j.at("nodes")[0].at("label").get<int>(), 1);
}

TEST(Io, AtomicWrite) {
  const auto path = std::filesystem::temp_directory_path() / "xprod_io_test.json";
  io::write_json_file(path, json{{"a", 1}});
  EXPECT_EQ(io::read_json_file(path).at("a").get<int>(), 1);
  EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  std::filesystem::remove(path);
}

}  // namespace
