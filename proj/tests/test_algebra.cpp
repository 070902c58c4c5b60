#include <gtest/gtest.h>

#include "support.hpp"

using namespace xprod;

namespace {

Element e(std::initializer_list<Complex> v) { return Element::scalars(v); }

TEST(Algebra, RejectsBadShapes) {
  EXPECT_THROW(BlockAlgebra(std::vector<int>{}), StructuralError);
  EXPECT_THROW(BlockAlgebra({2, 0}), StructuralError);
  EXPECT_THROW(e({1.0}) + e({1.0, 2.0}), StructuralError);
  EXPECT_THROW(Element({Matrix::Zero(2, 3)}), StructuralError);
}

TEST(Algebra, ArithmeticExamples) {
  const BlockAlgebra c3{1, 1, 1};
  random::Rng rng(1);
  const Element x = random::element(BlockAlgebra{2, 3}, rng);
  EXPECT_TRUE(approx_equal(arithmetic(arithmetic(x, x, ArithmeticOp::adjoint), x, ArithmeticOp::adjoint), x));
  EXPECT_TRUE(approx_equal(arithmetic(Element::identity(x.algebra()), x, ArithmeticOp::multiply), x));
  const Element y = arithmetic(e({0, 1, 0}), e({0, 1, 0}), ArithmeticOp::multiply);
  EXPECT_TRUE(approx_equal(y, e({0, 1, 0})));
  EXPECT_TRUE(approx_equal(arithmetic(x, x, ArithmeticOp::scale, 2.0), x + x));
  EXPECT_TRUE(approx_equal(arithmetic(x, x, ArithmeticOp::add), 2.0 * x));
  (void)c3;
}

TEST(Algebra, NormExamples) {
  const BlockAlgebra a{2, 3};
  EXPECT_EQ(norm(Element::zero(a)), 0.0);
  EXPECT_NEAR(norm(Element::identity(a)), 1.0, 1e-14);
  EXPECT_NEAR(norm(e({0, 1, 0})), 1.0, 1e-14);
  Matrix m(2, 2);
  m << 3, 0, 0, -4;  // singular values 4, 3
  EXPECT_NEAR(norm(Element({m})), 4.0, 1e-12);
}

TEST(Algebra, DistanceToIdealExamples) {
  const Element x = e({0, 1, 0});
  EXPECT_NEAR(distance_to_ideal(x, Ideal(3)), norm(x), 1e-14);
  EXPECT_EQ(distance_to_ideal(x, Ideal::full(3)), 0.0);
  EXPECT_EQ(distance_to_ideal(x, Ideal(3, {1, 2})), 0.0);
  EXPECT_EQ(distance_to_ideal(x, Ideal(3, {0})), 1.0);
}

TEST(Algebra, DistanceIsInfimumOverIdeal) {
  // inf over k in K of ||x - k|| is attained by k = x restricted to K; random k do no better.
  random::Rng rng(2);
  const BlockAlgebra a{2, 1, 3};
  const Ideal K(3, {0, 2});
  const Element pK = block_unit(a, K);
  for (int t = 0; t < 20; ++t) {
    const Element x = random::element(a, rng);
    const double d = distance_to_ideal(x, K);
    EXPECT_NEAR(d, norm(x - pK * x), 1e-12);
    for (int s = 0; s < 5; ++s) EXPECT_LE(d, norm(x - pK * random::element(a, rng)) + 1e-12);
  }
}

TEST(Algebra, BlockUnitExamples) {
  const BlockAlgebra a{1, 1, 1};
  EXPECT_TRUE(approx_equal(block_unit(a, Ideal(3)), Element::zero(a)));
  EXPECT_TRUE(approx_equal(block_unit(a, Ideal::full(3)), Element::identity(a)));
  const Element p = block_unit(a, Ideal(3, {0}));
  EXPECT_TRUE(approx_equal(p, e({1, 0, 0})));
  EXPECT_TRUE(approx_equal(p * p, p));
  random::Rng rng(3);
  const BlockAlgebra b{2, 2};
  const Element q = block_unit(b, 1);
  const Element x = random::element(b, rng);
  EXPECT_TRUE(approx_equal(q * x, x * q));
  const Element y = q * x;
  EXPECT_TRUE(approx_equal(block_unit(b, Ideal(2, {1})) * y, y));
}

TEST(Algebra, CStarIdentityAndIdealLattice) {
  random::Rng rng(4);
  const BlockAlgebra a{3, 1, 2, 4};
  const auto ideals = Ideal::all(4);
  for (int t = 0; t < 25; ++t) {
    const Element x = random::element(a, rng);
    EXPECT_NEAR(norm(x) * norm(x), norm(x * x.adjoint()), 1e-10 * norm(x) * norm(x));
    for (const Ideal& K1 : ideals) {
      EXPECT_LE(distance_to_ideal(x, K1), norm(x) + 1e-14);
      for (const Ideal& K2 : ideals) {
        if (K1.subset_of(K2)) EXPECT_LE(distance_to_ideal(x, K2), distance_to_ideal(x, K1) + 1e-14);
        if (!K1.intersects(K2))
          EXPECT_NEAR(std::max(distance_to_ideal(x, K1), distance_to_ideal(x, K2)), norm(x), 1e-12);
      }
    }
  }
}

TEST(Algebra, IdealBookkeeping) {
  const Ideal K(4, {0, 2});
  EXPECT_EQ(K.to_string(), "{1,3}");
  EXPECT_EQ(K.complement(), Ideal(4, {1, 3}));
  EXPECT_TRUE(Ideal(4).empty());
  EXPECT_EQ(Ideal::all(3).size(), 8u);
  EXPECT_THROW(Ideal(2, {2}), StructuralError);
  EXPECT_THROW((void)K.intersects(Ideal(3)), StructuralError);
}

TEST(Algebra, MatrixUnits) {
  const BlockAlgebra a{2, 3};
  const Element e12 = matrix_unit(a, 1, 0, 1), e21 = matrix_unit(a, 1, 1, 0);
  EXPECT_TRUE(approx_equal(e12 * e21, matrix_unit(a, 1, 0, 0)));
  EXPECT_TRUE(approx_equal(e12.adjoint(), e21));
}

}  // namespace
