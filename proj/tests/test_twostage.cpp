#include <gtest/gtest.h>

#include "graver_opt/graver.hpp"
#include "graver_opt/linalg.hpp"
#include "graver_opt/twostage.hpp"
#include "support.hpp"

using namespace graver_opt;
using namespace test_support;

namespace {

// Scenario equations T x + W y = b^(i) with squared costs on x and every y.
TwoStageInstance squares_instance(const IntMat& t, const IntMat& w, const std::vector<IntVec>& b, long ux, long uy) {
  TwoStageInstance inst;
  inst.T = t;
  inst.W = w;
  inst.N = b.size();
  inst.b = b;
  inst.ux = IntVec(t.cols(), Int(ux));
  inst.uy.assign(inst.N, IntVec(w.cols(), Int(uy)));
  const std::size_t m = t.cols(), n = w.cols();
  inst.C = IntMat(m + n, m);
  inst.D = IntMat(m + n, n);
  for (std::size_t j = 0; j < m; ++j) inst.C(j, j) = 1;
  for (std::size_t j = 0; j < n; ++j) inst.D(m + j, j) = 1;
  inst.f.assign(inst.N, std::vector<Univariate>(m + n, Univariate::square()));
  return inst;
}

NaiveOptimum instance_optimum(const TwoStageInstance& inst) {
  const FeasibleBox box = inst.box();
  return naive_optimum(box, [&](const IntVec& z) { return inst.value(z); });
}

TwoStageInstance random_instance(Gen& gen) {
  const std::size_t m = gen.uniform(1, 2), n = gen.uniform(1, 2), scenarios = gen.uniform(1, 3);
  const IntMat t = gen.matrix(1, m, -1, 2);
  const IntMat w = gen.matrix(1, n, 1, 2);
  TwoStageInstance inst;
  inst.T = t;
  inst.W = w;
  inst.N = scenarios;
  inst.ux = gen.vector(m, 1, 2);
  const IntVec x = [&] {
    IntVec v(m);
    for (std::size_t j = 0; j < m; ++j) v[j] = gen.uniform(0, inst.ux[j].get_si());
    return v;
  }();
  for (std::size_t i = 0; i < scenarios; ++i) {
    inst.uy.push_back(gen.vector(n, 1, 2));
    IntVec y(n);
    for (std::size_t j = 0; j < n; ++j) y[j] = gen.uniform(0, inst.uy[i][j].get_si());
    inst.b.push_back(add(mul(t, x), mul(w, y)));
  }
  inst.first_linear.resize(m);
  for (Rat& q : inst.first_linear) q = gen.uniform(-2, 2);
  if (gen.coin()) {
    inst.second_linear.assign(scenarios, RatVec(n));
    for (auto& h : inst.second_linear)
      for (Rat& v : h) v = gen.uniform(-2, 2);
  }
  if (gen.coin()) {
    inst.C = gen.matrix(1, m, -1, 1);
    inst.D = gen.matrix(1, n, -1, 1);
    for (std::size_t i = 0; i < scenarios; ++i)
      inst.f.push_back({Univariate::abs_power(Int(1), 2, Int(gen.uniform(-1, 1)))});
  } else {
    inst.C = IntMat(0, m);
    inst.D = IntMat(0, n);
  }
  return inst;
}

}  // namespace

TEST(BuildTwoStageMatrix, Examples) {
  EXPECT_EQ(build_twostage_matrix(IntMat{{1}}, IntMat{{1}}, 2), (IntMat{{1, 1, 0}, {1, 0, 1}}));
  EXPECT_EQ(build_twostage_matrix(IntMat{{1, 2}}, IntMat{{3}}, 1), (IntMat{{1, 2, 3}}));
  try {
    build_twostage_matrix(IntMat{{1}}, IntMat{{1}, {1}}, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimMismatch);
  }
}

TEST(BuildTwoStageMatrix, KernelCharacterization) {
  Gen gen(61);
  std::size_t in = 0, out = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const IntMat t = gen.matrix(1, 2, -1, 1), w = gen.matrix(1, 2, -1, 1);
    const std::size_t scenarios = gen.uniform(1, 3);
    const IntMat m = build_twostage_matrix(t, w, scenarios);
    const IntVec v = gen.vector(2 + 2 * scenarios, -1, 1);
    bool blockwise = true;
    for (std::size_t i = 0; i < scenarios; ++i) {
      const IntVec wi(v.begin() + 2 + 2 * i, v.begin() + 4 + 2 * i);
      if (!is_zero(add(mul(t, IntVec(v.begin(), v.begin() + 2)), mul(w, wi)))) blockwise = false;
    }
    EXPECT_EQ(in_kernel(m, v), blockwise);
    (blockwise ? in : out) += 1;
  }
  EXPECT_GT(in, 0u);
  EXPECT_GT(out, 0u);
}

TEST(BuildingBlocks, UnitPair) {
  const BuildingBlocks bb = extract_building_blocks(IntMat{{1}}, IntMat{{1}}, IntMat(0, 1), IntMat(0, 1), 3);
  for (const IntVec& v : bb.first_stage()) {
    EXPECT_LE(abs(v[0]), 1);
    for (const IntVec& w : bb.second_stage.at(v)) EXPECT_EQ(v[0] + w[0], 0);
  }
  const BuildingBlocks more = extract_building_blocks(IntMat{{1}}, IntMat{{1}}, IntMat(0, 1), IntMat(0, 1), 4);
  EXPECT_EQ(bb.second_stage, more.second_stage);
}

TEST(BuildingBlocks, ZeroTDecouples) {
  const IntMat w{{1, 1}};
  const BuildingBlocks bb = extract_building_blocks(IntMat{{0}}, w, IntMat(0, 1), IntMat(0, 2), 3);
  for (const auto& [v, ws] : bb.second_stage)
    for (const IntVec& y : ws) EXPECT_TRUE(in_kernel(w, y));
}

TEST(BuildingBlocks, PairsSatisfyScenarioEquations) {
  Gen gen(62);
  for (int trial = 0; trial < 20; ++trial) {
    const IntMat t = gen.matrix(1, gen.uniform(1, 2), -2, 2), w = gen.matrix(1, gen.uniform(1, 2), 1, 2);
    BuildingBlocks bb;
    try {
      bb = extract_building_blocks(t, w, IntMat(0, t.cols()), IntMat(0, w.cols()), 4);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kNotStabilized);
      continue;
    }
    for (const auto& [v, ws] : bb.second_stage)
      for (const IntVec& y : ws) EXPECT_TRUE(is_zero(add(mul(t, v), mul(w, y))));
  }
}

TEST(BuildingBlocks, NotStabilizedAtTinyCap) {
  try {
    extract_building_blocks(IntMat{{1}}, IntMat{{2, 3}}, IntMat(0, 1), IntMat(0, 2), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotStabilized);
  }
  const BuildingBlocks three = extract_building_blocks(IntMat{{1}}, IntMat{{2, 3}}, IntMat(0, 1), IntMat(0, 2), 3);
  const BuildingBlocks four = extract_building_blocks(IntMat{{1}}, IntMat{{2, 3}}, IntMat(0, 1), IntMat(0, 2), 4);
  EXPECT_EQ(three.second_stage, four.second_stage);
}

TEST(ImprovingVector, ExampleFromSuboptimalPoint) {
  const TwoStageInstance inst = squares_instance(IntMat{{1}}, IntMat{{1}}, {vec({2}), vec({3})}, 3, 3);
  const BuildingBlocks bb = extract_building_blocks(inst.T, inst.W, inst.C, inst.D, 4);
  const IntVec z = vec({0, 2, 3});
  const auto step = improving_vector(z, bb, inst);
  ASSERT_TRUE(step);
  EXPECT_TRUE(in_kernel(inst.matrix(), *step));
  const IntVec next = add(z, *step);
  EXPECT_TRUE(inst.box().contains(next));
  EXPECT_LT(inst.value(next), inst.value(z));

  const NaiveOptimum opt = instance_optimum(inst);
  EXPECT_FALSE(improving_vector(opt.argmin.front(), bb, inst));
}

TEST(ImprovingVector, NoneExactlyAtOptima) {
  Gen gen(63);
  int certified = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const TwoStageInstance inst = random_instance(gen);
    BuildingBlocks bb;
    try {
      bb = extract_building_blocks(inst.T, inst.W, inst.C, inst.D, 4);
    } catch (const Error&) {
      continue;
    }
    const NaiveOptimum opt = instance_optimum(inst);
    for (const IntVec& z : naive_feasible(inst.matrix(), inst.rhs(), inst.box().lower, inst.box().integer_upper())) {
      const auto step = improving_vector(z, bb, inst);
      EXPECT_EQ(!step, inst.value(z) == *opt.value) << to_string(z);
      if (step) {
        EXPECT_TRUE(in_kernel(inst.matrix(), *step));
        EXPECT_TRUE(inst.box().contains(add(z, *step)));
        EXPECT_LT(inst.value(add(z, *step)), inst.value(z));
      }
      ++certified;
    }
  }
  EXPECT_GT(certified, 100);
}

TEST(GreedyStepTwoStage, ImprovesAndReachesKernel) {
  const TwoStageInstance inst = squares_instance(IntMat{{1}}, IntMat{{1}}, {vec({2}), vec({3})}, 3, 3);
  const BuildingBlocks bb = extract_building_blocks(inst.T, inst.W, inst.C, inst.D, 4);
  const IntVec z = vec({0, 2, 3});
  const TwoStageStep step = greedy_step_twostage(z, bb, inst);
  ASSERT_FALSE(step.is_zero());
  const IntVec next = add(z, scaled(step.direction, step.steplen));
  EXPECT_TRUE(inst.box().contains(next));
  EXPECT_EQ(inst.value(next), step.new_value);
  EXPECT_LT(step.new_value, inst.value(z));
}

TEST(GreedyStepTwoStage, LinearObjectivesStepToTheBoundary) {
  TwoStageInstance inst;
  inst.T = IntMat{{1}};
  inst.W = IntMat{{1, -1}};
  inst.N = 2;
  inst.b = {vec({0}), vec({0})};
  inst.ux = vec({3});
  inst.uy = {vec({3, 3}), vec({3, 3})};
  inst.C = IntMat(0, 1);
  inst.D = IntMat(0, 2);
  inst.first_linear = RatVec{-1};
  const BuildingBlocks bb = extract_building_blocks(inst.T, inst.W, inst.C, inst.D, 4);
  const IntVec z = vec({0, 0, 0, 0, 0});
  const TwoStageStep step = greedy_step_twostage(z, bb, inst);
  ASSERT_FALSE(step.is_zero());
  const IntVec beyond = add(z, scaled(step.direction, step.steplen + 1));
  EXPECT_FALSE(inst.box().contains(beyond));
}

TEST(SolveTwoStage, SquaresExample) {
  const TwoStageInstance inst = squares_instance(IntMat{{1}}, IntMat{{1}}, {vec({2}), vec({3})}, 3, 3);
  const TwoStageResult r = solve_twostage(inst);
  EXPECT_EQ(r.value, *instance_optimum(inst).value);
  EXPECT_TRUE(inst.box().contains(r.point));
}

TEST(SolveTwoStage, ParityObstructionIsInfeasible) {
  TwoStageInstance inst;
  inst.T = IntMat{{1}};
  inst.W = IntMat{{2}};
  inst.N = 2;
  inst.b = {vec({3}), vec({1})};
  inst.ux = vec({0});
  inst.uy = {vec({3}), vec({3})};
  inst.C = IntMat(0, 1);
  inst.D = IntMat(0, 1);
  for (PhaseOneMethod method : {PhaseOneMethod::kBoxViolation, PhaseOneMethod::kSlack}) {
    try {
      solve_twostage(inst, TwoStageOptions{4, method, {}});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInfeasible);
    }
  }
}

TEST(SolveTwoStage, SingleScenarioMatchesPlainIp) {
  TwoStageInstance inst = squares_instance(IntMat{{1, 1}}, IntMat{{1, 2}}, {vec({4})}, 2, 2);
  const TwoStageResult r = solve_twostage(inst);
  const IpResult ip = solve_ip(inst.box(), inst.objective(), std::nullopt);
  EXPECT_EQ(r.value, ip.value);
}

TEST(SolveTwoStage, RandomInstancesMatchNaiveSearch) {
  Gen gen(64);
  int solved = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const TwoStageInstance inst = random_instance(gen);
    TwoStageResult r;
    try {
      r = solve_twostage(inst);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kNotStabilized);
      continue;
    }
    EXPECT_TRUE(inst.box().contains(r.point));
    EXPECT_EQ(r.value, *instance_optimum(inst).value) << "trial " << trial;
    ++solved;
  }
  EXPECT_GE(solved, 30);
}

TEST(PhaseOne, BothMethodsOnSmallInstances) {
  Gen gen(65);
  for (int trial = 0; trial < 15; ++trial) {
    TwoStageInstance inst = random_instance(gen);
    if (inst.m() + inst.N * inst.n() > 5) continue;
    for (PhaseOneMethod method : {PhaseOneMethod::kBoxViolation, PhaseOneMethod::kSlack}) {
      const IntVec z = twostage_phase_one(inst, TwoStageOptions{4, method, {}});
      EXPECT_TRUE(inst.box().contains(z));
    }
  }
}

// For fixed (v, alpha) the scenario choices are independent: the assembled
// value equals the first-stage value plus independently minimized scenarios.
TEST(Decomposition, ScenarioMinimaAddUp) {
  const TwoStageInstance inst = squares_instance(IntMat{{1}}, IntMat{{1, 1}}, {vec({2}), vec({3}), vec({1})}, 2, 3);
  const BuildingBlocks bb = extract_building_blocks(inst.T, inst.W, inst.C, inst.D, 4);
  const IntVec z = twostage_phase_one(inst);
  const auto step = improving_vector(z, bb, inst);
  if (!step) GTEST_SKIP();
  const IntVec next = add(z, *step);
  const IntVec v(step->begin(), step->begin() + 1);
  const IntVec x(next.begin(), next.begin() + 1);
  Rat total = inst.first_stage_value(x);
  for (std::size_t i = 0; i < inst.N; ++i) {
    const IntVec y0(z.begin() + 1 + 2 * i, z.begin() + 3 + 2 * i);
    std::optional<Rat> best;
    const auto it = bb.second_stage.find(v);
    std::vector<IntVec> options = it == bb.second_stage.end() ? std::vector<IntVec>{} : it->second;
    if (is_zero(v)) options.push_back(IntVec(2));
    for (const IntVec& w : options) {
      const IntVec y = add(y0, w);
      if (y[0] < 0 || y[1] < 0 || y[0] > inst.uy[i][0] || y[1] > inst.uy[i][1]) continue;
      const Rat val = inst.scenario_value(i, x, y);
      if (!best || val < *best) best = val;
    }
    ASSERT_TRUE(best);
    total += *best;
  }
  EXPECT_EQ(inst.value(next), total);
}
