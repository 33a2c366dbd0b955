#include <gtest/gtest.h>

#include "graver_opt/linalg.hpp"
#include "support.hpp"

using namespace graver_opt;
using namespace test_support;

namespace {

const IntMat kExample{{2, 1, 0, 1, 0, 0}, {1, 2, 0, 0, 1, 0}, {0, 0, 1, 0, 0, 1}};

// Is z an integer combination of the basis? Solve over Q, then check integrality.
bool integer_combination(const std::vector<IntVec>& basis, const IntVec& z) {
  if (basis.empty()) return is_zero(z);
  const std::size_t n = z.size();
  IntMat cols(n, basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) cols(i, j) = basis[j][i];
  RatVec x;
  if (!solve_rational(cols, to_rat(z), x)) return false;
  return is_integral(x);
}

}  // namespace

TEST(KernelBasis, SingleRow) {
  auto k = kernel_basis(IntMat{{1, 1}});
  ASSERT_EQ(k.size(), 1u);
  EXPECT_TRUE(k[0] == vec({1, -1}) || k[0] == vec({-1, 1}));
}

TEST(KernelBasis, FullColumnRank) { EXPECT_TRUE(kernel_basis(IntMat{{1, 0}, {0, 1}}).empty()); }

TEST(KernelBasis, ExampleMatrixHasThreeDimensionalKernel) {
  auto k = kernel_basis(kExample);
  EXPECT_EQ(k.size(), 3u);
  for (const IntVec& v : k) EXPECT_TRUE(in_kernel(kExample, v));
}

TEST(KernelBasis, SaturationOnRandomMatrices) {
  Gen gen(11);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = gen.uniform(2, 4);
    const std::size_t m = gen.uniform(1, 2);
    const IntMat a = gen.matrix(m, n, -3, 3);
    const auto basis = kernel_basis(a);
    EXPECT_EQ(basis.size(), n - rank(a));
    for (const IntVec& v : basis) EXPECT_TRUE(in_kernel(a, v));
    IntVec lo(n, Int(-3)), hi(n, Int(3));
    for_each_point(lo, hi, [&](const IntVec& z) {
      if (in_kernel(a, z)) EXPECT_TRUE(integer_combination(basis, z)) << to_string(z);
    });
  }
}

TEST(IsPrimitive, Examples) {
  EXPECT_TRUE(is_primitive(vec({2, -1, 0})));
  EXPECT_FALSE(is_primitive(vec({2, -2, 4})));
  EXPECT_TRUE(is_primitive(vec({1, 0, 0, -2, -1, 0})));
  try {
    is_primitive(vec({0, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroVector);
  }
}

TEST(SignCompatible, Examples) {
  EXPECT_TRUE(sign_compatible(vec({1, -1, 0}), vec({2, 0, 0})));
  EXPECT_FALSE(sign_compatible(vec({1, -1}), vec({1, 1})));
  // Every coordinatewise product is >= 0: a zero never conflicts with a sign.
  EXPECT_TRUE(sign_compatible(vec({1, -2, 0, 0, 3, 0}), vec({2, -1, 0, -3, 0, 0})));
  EXPECT_FALSE(sign_compatible(vec({1, -2, 0, 0, 3, 0}), vec({2, 1, 0, -3, 0, 0})));
  try {
    sign_compatible(vec({1}), vec({1, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimMismatch);
  }
}

TEST(SignCompatible, SymmetricAndReflexiveOnNonnegative) {
  Gen gen(12);
  for (int trial = 0; trial < 500; ++trial) {
    const IntVec a = gen.vector(4, -2, 2), b = gen.vector(4, -2, 2);
    EXPECT_EQ(sign_compatible(a, b), sign_compatible(b, a));
    const IntVec p = gen.vector(4, 0, 3);
    EXPECT_TRUE(sign_compatible(p, p));
  }
}

TEST(ConformalOrder, AgreesWithNaiveDefinition) {
  Gen gen(13);
  for (int trial = 0; trial < 500; ++trial) {
    const IntVec u = gen.vector(3, -2, 2), v = gen.vector(3, -2, 2);
    EXPECT_EQ(conformal_le(u, v), conformally_below(u, v));
  }
}

TEST(IntegerSolution, SolvesOrReportsNone) {
  auto z = integer_solution(kExample, vec({2, 2, 1}));
  ASSERT_TRUE(z);
  EXPECT_EQ(mul(kExample, *z), vec({2, 2, 1}));
  EXPECT_FALSE(integer_solution(IntMat{{2, 4}}, vec({3})));
  EXPECT_FALSE(integer_solution(IntMat{{1, 1}, {1, 1}}, vec({1, 2})));
}

TEST(IntegerSolution, RandomSystems) {
  Gen gen(14);
  for (int trial = 0; trial < 200; ++trial) {
    const IntMat a = gen.matrix(2, 4, -3, 3);
    const IntVec z = gen.vector(4, -3, 3);
    const IntVec b = mul(a, z);
    auto s = integer_solution(a, b);
    ASSERT_TRUE(s);
    EXPECT_EQ(mul(a, *s), b);
  }
}

TEST(Canonical, LexicographicOrder) {
  std::vector<IntVec> vs{vec({1, -1}), vec({-1, 1}), vec({0, 0}), vec({1, -1})};
  sort_unique_canonical(vs);
  ASSERT_EQ(vs.size(), 3u);
  EXPECT_EQ(vs[0], vec({-1, 1}));
  EXPECT_EQ(vs[2], vec({1, -1}));
}

TEST(Rationals, ParseAndPrint) {
  EXPECT_EQ(parse_rat("-6/4"), Rat(-3, 2));
  EXPECT_EQ(to_string(Rat(-3, 2)), "-3/2");
  EXPECT_EQ(to_string(Rat(4)), "4");
  EXPECT_EQ(floor_rat(Rat(-3, 2)), -2);
  EXPECT_EQ(ceil_rat(Rat(-3, 2)), -1);
  EXPECT_EQ(floor_div(Int(-7), Int(2)), -4);
  EXPECT_EQ(ceil_div(Int(7), Int(2)), 4);
}
