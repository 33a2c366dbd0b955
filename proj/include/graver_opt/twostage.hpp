#pragma once

#include <map>
#include <optional>
#include <vector>

#include "graver_opt/augment.hpp"
#include "graver_opt/objective.hpp"
#include "graver_opt/types.hpp"

namespace graver_opt {

// min q.x + sum_i [h^(i).y^(i) + sum_j f^(i)_j(C_j.x + D_j.y^(i))]
// s.t. T x + W y^(i) = b^(i), 0 <= x <= ux, 0 <= y^(i) <= uy^(i).
struct TwoStageInstance {
  IntMat T;  // d x m
  IntMat W;  // d x n
  std::size_t N = 0;
  std::vector<IntVec> b;
  IntVec ux;
  std::vector<IntVec> uy;
  IntMat C;                                // s x m
  IntMat D;                                // s x n
  RatVec first_linear;                     // q, empty means zero
  std::vector<RatVec> second_linear;       // h^(i), empty means zero
  std::vector<std::vector<Univariate>> f;  // N x s, empty means zero

  std::size_t m() const { return T.cols(); }
  std::size_t n() const { return W.cols(); }
  void validate() const;

  // Value of scenario i (without the first-stage linear term).
  Rat scenario_value(std::size_t i, std::span<const Int> x, std::span<const Int> y) const;
  Rat first_stage_value(std::span<const Int> x) const;
  Rat value(const IntVec& z) const;  // z = (x, y^(1), ..., y^(N))

  IntMat matrix() const;
  IntVec rhs() const;
  FeasibleBox box() const;
  Objective objective() const;
};

IntMat build_twostage_matrix(const IntMat& t, const IntMat& w, std::size_t n_blocks);

// First-stage parts v of Graver elements and, for each v, the second-stage
// parts w appearing next to it. Every pair satisfies T v + W w = 0.
struct BuildingBlocks {
  std::size_t m = 0;
  std::size_t n = 0;
  std::map<IntVec, std::vector<IntVec>> second_stage;
  std::size_t cap = 0;

  std::vector<IntVec> first_stage() const;
  std::size_t pair_count() const;
};

// Harvests blocks from the Graver bases of the rearranged matrices
// [(T;C), (W,0;D,I)]^(N) for N = 1..cap. Rows (C_j, D_j) that are zero or a
// signed unit vector are dropped: they only copy a coordinate. Throws kNotStabilized when the
// blocks found up to cap-1 and up to cap differ.
BuildingBlocks extract_building_blocks(const IntMat& t, const IntMat& w, const IntMat& c,
                                       const IntMat& d, std::size_t cap);

struct TwoStageStep {
  IntVec direction;  // (v, w^(1..N)); empty for the zero step
  Int steplen;
  Rat new_value;
  bool is_zero() const { return direction.empty(); }
};

// Best assembled vector at step length 1 that strictly improves, or nullopt
// (certified optimal).
std::optional<IntVec> improving_vector(const IntVec& z, const BuildingBlocks& blocks,
                                       const TwoStageInstance& inst);

// Greedy step over alpha = 1..alpha_max; ties by value, alpha, canonical vector.
TwoStageStep greedy_step_twostage(const IntVec& z, const BuildingBlocks& blocks,
                                  const TwoStageInstance& inst, const SolveOptions& opts = {});

struct TwoStageOptions {
  std::size_t block_cap = 4;
  PhaseOneMethod phase_one = PhaseOneMethod::kBoxViolation;
  SolveOptions solve;
};

// Feasible point. kBoxViolation minimizes the bound violation of an integer
// solution of the scenario equations; kSlack uses [T,(W,I,-I)]^(N).
// Throws kInfeasible.
IntVec twostage_phase_one(const TwoStageInstance& inst, const TwoStageOptions& opts = {});

struct TwoStageResult {
  IntVec point;
  Rat value;
  AugmentTrace trace;
  std::size_t basis_size = 0;
};

TwoStageResult solve_twostage(const TwoStageInstance& inst, const TwoStageOptions& opts = {});

}  // namespace graver_opt
