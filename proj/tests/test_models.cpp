#include <gtest/gtest.h>

#include "graver_opt/linalg.hpp"
#include "graver_opt/models.hpp"
#include "support.hpp"

using namespace graver_opt;
using namespace test_support;

namespace {

std::vector<IntVec> instance_points(const NFoldInstance& inst) {
  const FeasibleBox box = inst.box();
  return naive_feasible(box.A, box.b, box.lower, box.integer_upper());
}

// Line sums of an L x M x N array in array order x[i][j][k].
struct LineSums {
  IntMat r, s, t;  // r: M x N (over i), s: L x N (over j), t: L x M (over k)
};

LineSums line_sums(std::size_t L, std::size_t M, std::size_t N, const IntVec& x) {
  LineSums out{IntMat(M, N), IntMat(L, N), IntMat(L, M)};
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j < M; ++j)
      for (std::size_t k = 0; k < N; ++k) {
        const Int& v = x[(i * M + j) * N + k];
        out.r(j, k) += v;
        out.s(i, k) += v;
        out.t(i, j) += v;
      }
  return out;
}

MarginSpec three_way_margins(std::size_t L, std::size_t M, std::size_t N, const LineSums& sums, const Int& cap) {
  MarginSpec spec;
  spec.dims = {L, M, N};
  spec.family = {{0, 2}, {1, 2}, {0, 1}};
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t k = 0; k < N; ++k) spec.values[{i, kPlus, k}] = sums.s(i, k);
  for (std::size_t j = 0; j < M; ++j)
    for (std::size_t k = 0; k < N; ++k) spec.values[{kPlus, j, k}] = sums.r(j, k);
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j < M; ++j) spec.values[{i, j, kPlus}] = sums.t(i, j);
  spec.bounds = {cap};
  return spec;
}

// Every message in {0..u}^(LMN) with all line sums <= U, encoded.
std::vector<std::pair<IntVec, IntVec>> all_codewords(std::size_t L, std::size_t M, std::size_t N, long u, const Int& U) {
  std::vector<std::pair<IntVec, IntVec>> out;
  const std::size_t cells = L * M * N;
  for_each_point(IntVec(cells, Int(0)), IntVec(cells, Int(u)), [&](const IntVec& msg) {
    try {
      out.emplace_back(msg, encode_message(L, M, N, U, msg));
    } catch (const Error&) {
    }
  });
  return out;
}

Rat decode_distance(const DecodingSpec& spec, const IntVec& augmented) {
  Rat d = 0;
  for (std::size_t c : spec.coordinate_set()) {
    const Int diff = abs(augmented[c] - spec.received[c]);
    if (spec.p) {
      Int pw;
      mpz_pow_ui(pw.get_mpz_t(), diff.get_mpz_t(), *spec.p);
      d += pw;
    } else if (Rat(diff) > d) {
      d = diff;
    }
  }
  return d;
}

}  // namespace

TEST(Transportation, InstanceShape) {
  const NFoldInstance inst = build_transportation(vec({3, 3}), vec({2, 2, 2}), Int(3));
  EXPECT_EQ(inst.A, (IntMat{{1, 1}}));
  EXPECT_EQ(inst.B, IntMat::identity(2));
  EXPECT_EQ(inst.b0, vec({3, 3}));
  EXPECT_EQ(inst.b, (std::vector<IntVec>{vec({2}), vec({2}), vec({2})}));
  EXPECT_EQ(inst.N, 3u);
}

TEST(Transportation, FeasibleSetEqualsTables) {
  const IntVec supplies = vec({3, 2}), demands = vec({1, 2, 2});
  const std::vector<IntVec> caps{vec({1, 1}), vec({2, 1}), vec({2, 2})};
  const NFoldInstance inst = build_transportation(supplies, demands, caps);
  // Tables x[customer][supplier] with row sums = demands, column sums = supplies, x <= caps.
  std::set<IntVec> tables;
  for_each_point(IntVec(6, Int(0)), vec({1, 1, 2, 1, 2, 2}), [&](const IntVec& x) {
    for (std::size_t i = 0; i < 3; ++i)
      if (x[2 * i] + x[2 * i + 1] != demands[i]) return;
    for (std::size_t j = 0; j < 2; ++j)
      if (x[j] + x[2 + j] + x[4 + j] != supplies[j]) return;
    tables.insert(x);
  });
  const auto points = instance_points(inst);
  EXPECT_EQ(as_set(points), tables);
  EXPECT_FALSE(tables.empty());
}

TEST(Transportation, BalanceMismatch) {
  try {
    build_transportation(vec({3, 3}), vec({2, 2}), Int(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBalanceMismatch);
  }
}

TEST(Transportation, CongestionCostsMatchNaiveSearch) {
  Gen gen(71);
  for (int trial = 0; trial < 10; ++trial) {
    const IntVec supplies = vec({3, 3});
    NFoldInstance inst = build_transportation(supplies, vec({2, 2, 2}), Int(3));
    std::vector<std::vector<Univariate>> f(3);
    for (auto& row : f)
      for (int j = 0; j < 2; ++j) row.push_back(Univariate::abs_power(Int(gen.uniform(1, 3)), gen.uniform(1, 3), Int(0)));
    set_separable(inst, f);
    const NFoldResult r = solve_nfold(inst);
    const Objective obj = inst.objective();
    const NaiveOptimum opt = naive_optimum(inst.box(), [&](const IntVec& z) { return obj.eval(z); });
    EXPECT_EQ(r.value, *opt.value);
  }
}

TEST(ThreeWay, FeasibleSetBijection) {
  const std::size_t L = 2, M = 2, N = 2;
  const IntVec x0 = vec({1, 0, 0, 1, 0, 1, 1, 0});
  const LineSums sums = line_sums(L, M, N, x0);
  const NFoldInstance inst = build_3way_linesum(L, M, N, sums.r, sums.s, sums.t, Int(1));
  EXPECT_EQ(inst.A, (IntMat{{1, 1, 0, 0}, {0, 0, 1, 1}, {1, 0, 1, 0}, {0, 1, 0, 1}}));
  EXPECT_EQ(inst.B, IntMat::identity(4));

  std::set<IntVec> arrays;
  for_each_point(IntVec(8, Int(0)), IntVec(8, Int(1)), [&](const IntVec& x) {
    const LineSums ls = line_sums(L, M, N, x);
    if (ls.r == sums.r && ls.s == sums.s && ls.t == sums.t) arrays.insert(layers_from_array(L, M, N, x));
  });
  EXPECT_EQ(as_set(instance_points(inst)), arrays);
  EXPECT_GT(arrays.size(), 1u);
}

TEST(ThreeWay, ZeroMarginsGiveZeroArray) {
  const NFoldInstance inst = build_3way_linesum(2, 2, 2, IntMat(2, 2), IntMat(2, 2), IntMat(2, 2), Int(3));
  const auto points = instance_points(inst);
  ASSERT_EQ(points.size(), 1u);
  EXPECT_TRUE(is_zero(points[0]));
}

TEST(ThreeWay, InconsistentMargins) {
  IntMat t(2, 2);
  t(0, 0) = 1;
  try {
    build_3way_linesum(2, 2, 2, IntMat(2, 2), IntMat(2, 2), t, Int(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInconsistentMargins);
  }
}

TEST(ThreeWay, LayerOrderRoundtrip) {
  Gen gen(72);
  for (int trial = 0; trial < 20; ++trial) {
    const IntVec x = gen.vector(2 * 3 * 4, 0, 9);
    EXPECT_EQ(array_from_layers(2, 3, 4, layers_from_array(2, 3, 4, x)), x);
  }
  // Layer k holds x[.][.][k] row-major.
  EXPECT_EQ(layers_from_array(1, 2, 2, vec({1, 2, 3, 4})), vec({1, 3, 2, 4}));
}

TEST(Hierarchical, ReproducesThreeWayInstance) {
  Gen gen(73);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t L = gen.uniform(1, 3), M = gen.uniform(1, 3), N = gen.uniform(1, 3);
    const IntVec x = gen.vector(L * M * N, 0, 2);
    const LineSums sums = line_sums(L, M, N, x);
    const NFoldInstance h = build_hierarchical(three_way_margins(L, M, N, sums, Int(2)));
    const NFoldInstance t = build_3way_linesum(L, M, N, sums.r, sums.s, sums.t, Int(2));
    EXPECT_EQ(h.A, t.A);
    EXPECT_EQ(h.B, t.B);
    EXPECT_EQ(h.N, t.N);
    EXPECT_EQ(h.b0, t.b0);
    EXPECT_EQ(h.b, t.b);
    EXPECT_EQ(h.upper, t.upper);
  }
}

TEST(Hierarchical, AllCellsPinned) {
  MarginSpec spec;
  spec.dims = {2, 2};
  spec.family = {{0, 1}};
  spec.values = {{{0, 0}, Int(1)}, {{0, 1}, Int(0)}, {{1, 0}, Int(2)}, {{1, 1}, Int(1)}};
  spec.bounds = {Int(3)};
  const auto points = instance_points(build_hierarchical(spec));
  ASSERT_EQ(points.size(), 1u);
  // Layer order: last coordinate outermost.
  EXPECT_EQ(points[0], vec({1, 2, 0, 1}));
  spec.bounds = {Int(1)};
  EXPECT_TRUE(instance_points(build_hierarchical(spec)).empty());
}

TEST(Hierarchical, MarginCount) {
  EXPECT_EQ(margin_count({4, 5, 3, 2}, {0, 2}), 12u);
  EXPECT_EQ(margin_support({2, kPlus, 1, kPlus}), (std::vector<std::size_t>{0, 2}));
}

TEST(Hierarchical, InconsistentMargins) {
  LineSums sums = line_sums(2, 2, 2, vec({1, 0, 0, 1, 0, 1, 1, 1}));
  sums.t(0, 0) += 1;
  try {
    build_hierarchical(three_way_margins(2, 2, 2, sums, Int(2)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInconsistentMargins);
  }
}

TEST(LpObjective, Examples) {
  const Objective l1 = lp_objective(3, {{0, Int(0)}, {1, Int(0)}, {2, Int(0)}}, 1);
  EXPECT_EQ(l1.eval(vec({1, 0, 1})), 2);
  EXPECT_EQ(lp_objective(2, {}, 2).eval(vec({5, -3})), 0);
  EXPECT_EQ(lp_objective(2, {{0, Int(1)}, {1, Int(1)}}, 2).eval(vec({0, 3})), 5);
}

TEST(LinfQ, Examples) {
  EXPECT_EQ(linf_q(Int(1), Int(1)), 1u);
  EXPECT_EQ(linf_q(Int(6), Int(1)), 5u);
  EXPECT_EQ(linf_q(Int(4), Int(2)), 7u);
}

TEST(LinfQ, SmallestExponentByExactPowers) {
  for (long nn = 1; nn <= 40; ++nn) {
    for (long w = 1; w <= 4; ++w) {
      const unsigned long q = linf_q(Int(nn), Int(w));
      const Rat base = Rat(2 * w + 1, 2 * w);
      Rat pw = 1;
      for (unsigned long k = 1; k < q; ++k) pw *= base;
      EXPECT_LE(pw, nn);
      EXPECT_GT(pw * base, nn);
    }
  }
}

TEST(Decode, EncodeCompletesEveryLine) {
  const IntVec msg = vec({1, 0, 0, 1, 1, 1, 0, 0});
  const IntVec aug = encode_message(2, 2, 2, Int(2), msg);
  DecodingSpec spec{2, 2, 2, Int(1), Int(2), aug, 1, std::nullopt};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      Int s = 0;
      for (std::size_t k = 0; k <= 2; ++k) s += aug[spec.augmented_index(i, j, k)];
      EXPECT_EQ(s, 2);
    }
  try {
    encode_message(1, 1, 2, Int(1), vec({1, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(Decode, UncorruptedWordComesBack) {
  const IntVec msg = vec({1, 0, 0, 1, 1, 1, 0, 0});
  DecodingSpec spec{2, 2, 2, Int(1), Int(2), encode_message(2, 2, 2, Int(2), msg), 1, std::nullopt};
  const DecodeResult r = decode(spec);
  EXPECT_EQ(r.message, msg);
  EXPECT_EQ(r.distance, 0);
}

TEST(Decode, SingleFlipRecoveredWithHamming) {
  Gen gen(74);
  for (int trial = 0; trial < 5; ++trial) {
    const IntVec msg = gen.vector(8, 0, 1);
    IntVec received = encode_message(2, 2, 2, Int(2), msg);
    DecodingSpec spec{2, 2, 2, Int(1), Int(2), received, 1, std::nullopt};
    const std::size_t cell = gen.uniform(0, 7);
    const std::size_t idx = spec.augmented_index(cell / 4, (cell / 2) % 2, cell % 2);
    spec.received[idx] = 1 - spec.received[idx];
    const DecodeResult r = decode(spec);
    EXPECT_EQ(r.message, msg) << "trial " << trial;
    EXPECT_EQ(r.distance, 1);
  }
}

TEST(Decode, MinimumDistanceMatchesCodewordEnumeration) {
  Gen gen(75);
  const auto codewords = all_codewords(1, 2, 2, 1, Int(2));
  for (int trial = 0; trial < 6; ++trial) {
    DecodingSpec spec{1, 2, 2, Int(1), Int(2), {}, std::nullopt, std::nullopt};
    spec.received = gen.vector(spec.augmented_size(), 0, 2);
    for (std::optional<unsigned long> p : {std::optional<unsigned long>(), std::optional<unsigned long>(1),
                                           std::optional<unsigned long>(2)}) {
      spec.p = p;
      const DecodeResult r = decode(spec);
      std::optional<Rat> best;
      for (const auto& [msg, aug] : codewords) {
        const Rat d = decode_distance(spec, aug);
        if (!best || d < *best) best = d;
      }
      EXPECT_EQ(r.distance, *best) << "trial " << trial;
      EXPECT_EQ(decode_distance(spec, r.augmented), r.distance);
      EXPECT_EQ(r.augmented, encode_message(1, 2, 2, Int(2), r.message));
      if (!p) EXPECT_TRUE(r.q);
    }
  }
}

TEST(Decode, InfinityRecordsQ) {
  DecodingSpec spec{2, 2, 2, Int(1), Int(2), encode_message(2, 2, 2, Int(2), IntVec(8)), std::nullopt, std::nullopt};
  const DecodingModel model = build_decoding(spec);
  ASSERT_TRUE(model.q);
  EXPECT_EQ(*model.q, 27u);
  Int w = 0;
  for (const IntVec& u : model.instance.upper)
    for (const Int& x : u) w = std::max(w, x);
  EXPECT_EQ(*model.q, linf_q(Int(model.instance.N * model.instance.block_width()), w));
}

TEST(Decode, CoordinateSubset) {
  const IntVec msg = vec({1, 0});
  DecodingSpec spec{1, 1, 2, Int(1), Int(2), encode_message(1, 1, 2, Int(2), msg), 1, std::nullopt};
  spec.coords = std::vector<std::size_t>{spec.augmented_index(0, 0, 0), spec.augmented_index(0, 0, 1)};
  const DecodeResult r = decode(spec);
  EXPECT_EQ(r.message, msg);
  EXPECT_EQ(r.distance, 0);
}
