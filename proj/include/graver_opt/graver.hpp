#pragma once

#include <cstddef>
#include <vector>

#include "graver_opt/types.hpp"

namespace graver_opt {

// Primitive support-minimal integer kernel vectors of a matrix, closed under
// negation and kept in canonical order.
struct CircuitSet {
  IntMat matrix;
  std::vector<IntVec> elements;
};

// ⊑-minimal nonzero integer kernel vectors, closed under negation, canonical
// order. For a composite basis G(A,C), `elements` holds the projection onto the
// first n coordinates and `lifted[i]` the full (n+s)-dimensional kernel vector
// of [[A,0],[C,I]] that projects to `elements[i]`.
struct GraverBasis {
  IntMat matrix;
  std::vector<IntVec> elements;
  std::vector<IntVec> lifted;
  IntMat coupling;  // C for composite bases, 0 rows otherwise

  std::size_t size() const { return elements.size(); }
};

struct DecompositionTerm {
  Int coeff;
  IntVec dir;
};

struct Decomposition {
  std::vector<DecompositionTerm> terms;
};

CircuitSet circuits(const IntMat& a);

GraverBasis graver(const IntMat& a);

// Graver basis of [[A,0],[C,I_s]] projected onto the first n coordinates.
GraverBasis graver_composite(const IntMat& a, const IntMat& c);

// Plain normal-form completion on the given matrix, without the column
// preprocessing that graver() applies. Exposed for cross-checks.
std::vector<IntVec> graver_completion(const IntMat& a);

// Sign-compatible decomposition of a kernel vector into at most `bound`
// distinct Graver elements with positive integer coefficients.
// Throws kNotInKernel, or kBoundExceeded when no decomposition fits.
Decomposition decompose(const IntVec& v, const GraverBasis& g, std::size_t bound);

// Number of nonzero blocks of v split into consecutive blocks of the given width.
std::size_t block_type(const IntVec& v, std::size_t block_width);

}  // namespace graver_opt
