#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "graver_opt/augment.hpp"
#include "graver_opt/graver.hpp"
#include "graver_opt/objective.hpp"
#include "graver_opt/types.hpp"

namespace graver_opt {

// min sum_i f^(i)(x^(i)) s.t. sum_i B x^(i) = b0, A x^(i) = b^(i),
// 0 <= x^(i) <= upper^(i), with f^(i)(x) = c^(i).x + sum_j f^(i)_j(C_j.x).
struct NFoldInstance {
  IntMat A;
  IntMat B;
  std::size_t N = 0;
  IntVec b0;
  std::vector<IntVec> b;
  std::vector<IntVec> upper;
  IntMat C;                                    // shared rows c_1..c_s (s x n)
  std::vector<RatVec> linear;                  // c^(i), N entries (empty means zero)
  std::vector<std::vector<Univariate>> f;      // f^(i)_j, N x s (empty means zero)

  std::size_t block_width() const { return A.cols(); }
  void validate() const;

  IntMat matrix() const;
  IntVec rhs() const;
  FeasibleBox box() const;
  Objective objective() const;
};

IntMat build_nfold_matrix(const IntMat& a, const IntMat& b, std::size_t n_blocks);

// ([A,B],C)^(N) in the printed layout (rows: B, N A-blocks, N C-blocks;
// columns: N x-blocks, then N slack blocks of width s) and the permutation to
// the N-fold layout [Abar,Bbar]^(N) with Abar = [[A,0],[C,I]], Bbar = [B,0]:
// matrix(r, c) == nfold(row_perm[r], col_perm[c]).
struct ComposedNFold {
  IntMat matrix;
  IntMat a_bar;
  IntMat b_bar;
  std::vector<std::size_t> row_perm;
  std::vector<std::size_t> col_perm;
};

ComposedNFold compose_with_C(const IntMat& a, const IntMat& b, const IntMat& c, std::size_t n_blocks);

// Smallest g <= cap with max type of G([A,B]^(g+1)) <= g; NotStabilized otherwise.
std::size_t graver_complexity(const IntMat& a, const IntMat& b, std::size_t cap);

struct LiftedGraver {
  IntMat a;
  IntMat b;
  std::size_t generator_type_bound = 0;
  std::size_t block_width = 0;
  std::vector<IntVec> seed_elements;  // G([A,B]^(g)), canonical order
};

LiftedGraver make_lifted_graver(const IntMat& a, const IntMat& b, std::size_t cap);

// G([A,B]^(N)) by order-preserving placement of the seed's nonzero blocks.
// Throws kNTooSmall when N < g.
GraverBasis lift_graver(const LiftedGraver& seed, std::size_t n_blocks);

struct NFoldBasis {
  GraverBasis basis;  // flat x coordinates, coupling = block-diagonal shared rows
  bool lifted = false;
  std::optional<std::size_t> complexity;
};

struct NFoldOptions {
  std::size_t graver_cap = 6;
  std::size_t direct_threshold = 24;  // direct Graver computation when N*n <= this
  PhaseOneMethod phase_one = PhaseOneMethod::kBoxViolation;
  SolveOptions solve;
  // Reused instead of recomputing when its matrix and coupling match.
  std::shared_ptr<const NFoldBasis> basis;
};

// Composite basis of the instance (shared rows with a non-affine f in some block).
NFoldBasis nfold_basis(const NFoldInstance& inst, const NFoldOptions& opts = {});

// Feasible point (flattened blocks). Throws kInfeasible.
IntVec phase_one(const NFoldInstance& inst, const NFoldOptions& opts = {});

struct NFoldResult {
  IntVec point;  // flattened blocks
  Rat value;
  AugmentTrace trace;
  std::size_t basis_size = 0;
  bool lifted = false;
  std::optional<std::size_t> complexity;
};

NFoldResult solve_nfold(const NFoldInstance& inst, const NFoldOptions& opts = {});

std::vector<IntVec> split_blocks(const IntVec& flat, std::size_t block_width);

}  // namespace graver_opt
