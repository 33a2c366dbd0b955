#pragma once

#include <map>
#include <optional>
#include <vector>

#include "graver_opt/nfold.hpp"
#include "graver_opt/objective.hpp"
#include "graver_opt/types.hpp"

namespace graver_opt {

// Transportation from n suppliers to N customers. Block i holds x_{i,1..n};
// caps[i][j] bounds the channel customer i <- supplier j.
NFoldInstance build_transportation(const IntVec& supplies, const IntVec& demands,
                                   const std::vector<IntVec>& caps);
NFoldInstance build_transportation(const IntVec& supplies, const IntVec& demands, const Int& cap);

// Separable costs sum_{i,j} f[i][j](x_{i,j}) on an N-fold instance: C = I_n.
void set_separable(NFoldInstance& inst, std::vector<std::vector<Univariate>> f);

// L x M x N arrays with line sums r (M x N, over i), s (L x N, over j) and
// t (L x M, over k). Layer k is x_{.,.,k} row-major; A is the incidence matrix
// of K_{L,M} (L rows for s, then M rows for r), B = I_LM, b0 = t.
// caps[k] bounds layer k.
NFoldInstance build_3way_linesum(std::size_t L, std::size_t M, std::size_t N, const IntMat& r,
                                 const IntMat& s, const IntMat& t, const std::vector<IntVec>& caps);
NFoldInstance build_3way_linesum(std::size_t L, std::size_t M, std::size_t N, const IntMat& r,
                                 const IntMat& s, const IntMat& t, const Int& cap);

// Array <-> N-fold layer order for L x M x N arrays (array order is row-major
// x[i][j][k]; layer order is k-major with x[i][j] row-major inside).
IntVec layers_from_array(std::size_t L, std::size_t M, std::size_t N, const IntVec& array);
IntVec array_from_layers(std::size_t L, std::size_t M, std::size_t N, const IntVec& layers);

inline constexpr std::size_t kPlus = static_cast<std::size_t>(-1);
using MarginIndex = std::vector<std::size_t>;  // kPlus marks a summed coordinate

// Hierarchical margins on M_1 x ... x M_d arrays; coordinates are 0-based.
struct MarginSpec {
  std::vector<std::size_t> dims;
  std::vector<std::vector<std::size_t>> family;
  std::map<MarginIndex, Int> values;
  // Cell bounds in layer order (last coordinate outermost), or one uniform bound.
  IntVec bounds;

  void validate() const;
};

std::vector<std::size_t> margin_support(const MarginIndex& index);
// Number of margins with the given support.
std::size_t margin_count(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& support);

// Margins whose support holds the last coordinate become A-rows of every layer;
// the others become B-rows. Rows follow the family order, tuples lexicographic.
NFoldInstance build_hierarchical(const MarginSpec& spec);

// sum_{j in I} |z_j - target_j|^p over a dim-dimensional point: one row per
// coordinate (zero function outside I).
Objective lp_objective(std::size_t dim, const std::map<std::size_t, Int>& target, unsigned long p);

// The same functions installed on an N-fold instance over its flat coordinates.
void set_lp_distance(NFoldInstance& inst, const std::map<std::size_t, Int>& target, unsigned long p);

// Smallest q >= 1 with (1 + 1/(2w))^q > nn.
unsigned long linf_q(const Int& nn, const Int& w);

struct DecodingSpec {
  std::size_t L = 0;
  std::size_t M = 0;
  std::size_t N = 0;
  Int u;  // alphabet {0..u}
  Int U;  // checksum constant
  // Augmented (L+1) x (M+1) x (N+1) array, row-major; index L, M or N on an
  // axis is the slack position. Cells with two or more slack indices lie on no
  // checksum line and are ignored.
  IntVec received;
  std::optional<unsigned long> p;  // nullopt is p = infinity
  std::optional<std::vector<std::size_t>> coords;  // augmented indices; nullopt is every checksum cell

  void validate() const;
  std::size_t augmented_size() const { return (L + 1) * (M + 1) * (N + 1); }
  std::size_t augmented_index(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * (M + 1) + j) * (N + 1) + k;
  }
  // Augmented indices of the cells the decoder works with, increasing.
  std::vector<std::size_t> coordinate_set() const;
};

// Augmented array of an L x M x N message (row-major): slack entries complete
// every line through a message cell to U. Throws kInvalidArgument when some
// line already exceeds U.
IntVec encode_message(std::size_t L, std::size_t M, std::size_t N, const Int& U, const IntVec& message);

// Checksum instance over the augmented array. Layer k < N holds the L*M
// message cells, then the M slack cells (L, j, k), then the L slack cells
// (i, M, k); a final layer holds the slack cells (i, j, N) at the message
// positions. Every line through a message cell sums to U. The objective is the
// p-th power distance (q-th for p = infinity) on the chosen cells.
struct DecodingModel {
  NFoldInstance instance;
  std::optional<unsigned long> q;
  // Instance coordinate of each augmented cell (nullopt off the checksum lines).
  std::vector<std::optional<std::size_t>> position;
};

DecodingModel build_decoding(const DecodingSpec& spec);

struct DecodeResult {
  IntVec message;    // L x M x N, row-major
  IntVec augmented;  // decoded augmented array, zero off the checksum lines
  // sum |x - xbar|^p over the chosen cells for finite p, max |x - xbar| for p = infinity
  Rat distance;
  std::optional<unsigned long> q;
  NFoldResult solve;
};

// Solved with the direct basis (the lifting bound of the checksum pair is out of
// reach); opts.direct_threshold is raised to the instance size.
DecodeResult decode(const DecodingSpec& spec, const NFoldOptions& opts = {});

}  // namespace graver_opt
