#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "graver_opt/augment.hpp"
#include "graver_opt/objective.hpp"
#include "graver_opt/types.hpp"

namespace graver_opt {

// Exhaustive ground truth. Nothing here shares code with the Graver machinery:
// points are enumerated over the free coordinates of the reduced row echelon
// form of [A | b], the remaining coordinates are solved for and checked.

struct OracleOptions {
  std::uint64_t cell_cap = 10'000'000;  // largest number of free-coordinate combinations
  // Replaces a missing upper bound by lower + radius.
  std::optional<Int> radius;
};

struct OracleResult {
  bool feasible = false;
  IntVec point;  // lexicographically smallest optimum
  Rat value;
  std::uint64_t feasible_count = 0;
  std::uint64_t visited = 0;
};

// Calls visit on every integer point of the box. Throws kSearchSpaceTooLarge
// when the free coordinates span more than cell_cap combinations, and
// kUnboundedBox when a bound is missing and no radius is given.
std::uint64_t enumerate_feasible(const FeasibleBox& box, const std::function<void(const IntVec&)>& visit,
                                 const OracleOptions& opts = {});

OracleResult brute_force(const FeasibleBox& box, const std::function<Rat(const IntVec&)>& value,
                         const OracleOptions& opts = {});
OracleResult brute_force(const FeasibleBox& box, const Objective& obj, const OracleOptions& opts = {});

// Every entry of a Graver element of A is at most (n - rank) * rank! * max|a_ij|^rank.
Int graver_entry_bound(const IntMat& a);

// The ⊑-minimal nonzero integer kernel vectors with entries in [-bound, bound]
// (bound defaults to graver_entry_bound), canonical order.
std::vector<IntVec> brute_force_graver(const IntMat& a, const std::optional<Int>& bound = std::nullopt,
                                       const OracleOptions& opts = {});

}  // namespace graver_opt
