#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graver_opt/graver.hpp"
#include "graver_opt/objective.hpp"
#include "graver_opt/types.hpp"

namespace graver_opt {

// {z : A z = b, lower <= z <= upper}; a missing upper bound means +infinity.
struct FeasibleBox {
  IntMat A;
  IntVec b;
  IntVec lower;
  std::vector<std::optional<Rat>> upper;

  static FeasibleBox make(IntMat a, IntVec b, IntVec lower, const IntVec& upper);

  std::size_t dim() const { return lower.size(); }
  bool bounded() const;
  // Integral upper bounds; throws kUnboundedBox when one is missing.
  IntVec integer_upper() const;

  bool within_bounds(std::span<const Int> z) const;
  bool within_bounds(std::span<const Rat> z) const;
  bool contains(std::span<const Int> z) const;
  bool contains(std::span<const Rat> z) const;
};

template <class Scalar>
struct GreedyStep {
  IntVec direction;  // empty for the zero step
  Scalar steplen = 0;
  Rat new_value;

  bool is_zero() const { return direction.empty(); }
};

enum class StepKind { kGreedy, kShrink };

struct TraceStep {
  Rat value_before;
  Rat value_after;
  IntVec direction;
  Rat steplen;
  StepKind kind = StepKind::kGreedy;
};

struct AugmentTrace {
  std::vector<TraceStep> iterations;
  std::optional<Rat> h_bound;
  std::size_t n_eff = 1;
  std::uint64_t directions_evaluated = 0;
  std::vector<std::string> warnings;
};

struct SolveOptions {
  unsigned threads = 1;
  // Warn when log2(H) exceeds this multiple of the instance encoding length.
  unsigned h_warning_factor = 4;
};

// Minimizer of a convex f on [l, u] ∩ Z by three-point bisection; ties go to
// the smallest argument. Throws kEmptyInterval when l > u.
Int line_search(const std::function<Rat(const Int&)>& f, const Int& l, const Int& u);

// Largest alpha >= 0 keeping z + alpha g inside the bounds; nullopt when no
// bound binds. Throws kInfeasibleBase when z violates the bounds.
std::optional<Int> max_step(std::span<const Int> z, std::span<const Int> g, const FeasibleBox& box);
std::optional<Rat> max_step(std::span<const Rat> z, std::span<const Int> g, const FeasibleBox& box);

// Best (alpha, g) over the directions; ties by value, then alpha, then the
// canonical order of g. The zero step when nothing improves strictly.
GreedyStep<Int> greedy_step(std::span<const Int> z, const std::vector<IntVec>& dirs,
                            const Objective& obj, const FeasibleBox& box,
                            const SolveOptions& opts = {});
// Rational mode, linear objectives only: steps go to the max_step endpoint.
GreedyStep<Rat> greedy_step(std::span<const Rat> z, const std::vector<IntVec>& dirs,
                            const Objective& obj, const FeasibleBox& box,
                            const SolveOptions& opts = {});

struct IpResult {
  IntVec point;
  Rat value;
  AugmentTrace trace;
  std::size_t basis_size = 0;
};

struct LpResult {
  RatVec point;
  Rat value;
  AugmentTrace trace;
  std::size_t basis_size = 0;
};

// Greedy augmentation over a Graver basis (plain or composite) to optimality.
IpResult solve_ip_greedy(const IntVec& z0, const GraverBasis& basis, const Objective& obj,
                         const FeasibleBox& box, const SolveOptions& opts = {});

// Greedy circuit augmentation alternating with support-shrinking moves.
LpResult solve_lp_circuit(const RatVec& z0, const CircuitSet& circuits, const RatVec& c,
                          const FeasibleBox& box, const SolveOptions& opts = {});

// Greedy augmentation over an explicit direction set.
IpResult augment_to_optimum(const IntVec& z0, const std::vector<IntVec>& dirs,
                            const Objective& obj, const FeasibleBox& box, std::size_t n_eff,
                            const SolveOptions& opts = {});

enum class PhaseOneMethod { kBoxViolation, kSlack };

// Feasible integer point of a finite box. Starts from an integer solution of
// A z = b and minimizes the separable bound violation sum_i dist(z_i, [l_i, u_i])
// over dirs, which must contain G(A). Throws kInfeasible.
IntVec find_feasible_point(const FeasibleBox& box, const std::vector<IntVec>& dirs,
                           const SolveOptions& opts = {});

// Feasible integer point by minimizing total slack over the Graver basis of
// [A | S], S = diag(+-1), from z = lower with slack |b - A lower|. Throws kInfeasible.
IntVec find_feasible_point_slack(const FeasibleBox& box, const SolveOptions& opts = {});

// Feasible rational point by the same slack construction over circuits.
RatVec find_feasible_point_lp(const FeasibleBox& box, const SolveOptions& opts = {});

// Full IP pipeline: composite Graver basis of (A, objective coupling rows),
// phase one unless a start is given, greedy augmentation.
IpResult solve_ip(const FeasibleBox& box, const Objective& obj, const std::optional<IntVec>& start,
                  PhaseOneMethod phase_one = PhaseOneMethod::kBoxViolation,
                  const SolveOptions& opts = {});

// Full LP pipeline over circuits. Linear objective only.
LpResult solve_lp(const FeasibleBox& box, const RatVec& c, const std::optional<RatVec>& start,
                  const SolveOptions& opts = {});

// Diagnostic: best-improvement augmentation over the given directions with no
// shrinking, stopped after max_iters steps. Exhibits zig-zagging.
LpResult solve_lp_naive(const RatVec& z0, const std::vector<IntVec>& dirs, const RatVec& c,
                        const FeasibleBox& box, std::size_t max_iters);

// The objective along the ray z + alpha g, evaluated from precomputed row values.
class RayEvaluator {
 public:
  RayEvaluator(const Objective& obj, std::span<const Int> z, std::span<const Int> g);
  Rat operator()(const Int& alpha) const;
  bool is_linear() const { return rows_.empty(); }
  const Rat& slope() const { return lin_slope_; }

 private:
  struct Row {
    const Univariate* f;
    Int y;
    Int k;
  };
  Rat lin_base_;
  Rat lin_slope_;
  std::vector<Row> rows_;
};

}  // namespace graver_opt
