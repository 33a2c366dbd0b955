#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graver_opt/types.hpp"

namespace graver_opt {

// Integer lattice basis of ker(A) ∩ Z^n. The returned vectors generate every
// integer kernel vector over Z; the basis is brought to reduced echelon form so
// that the output is canonical for a given matrix.
std::vector<IntVec> kernel_basis(const IntMat& a);

// Some integer z with A z = b, or nullopt when none exists.
std::optional<IntVec> integer_solution(const IntMat& a, std::span<const Int> b);

// gcd of all entries is 1. Throws kZeroVector on the zero vector.
bool is_primitive(std::span<const Int> v);

// a_i * b_i >= 0 for every coordinate. Throws kDimMismatch.
bool sign_compatible(std::span<const Int> a, std::span<const Int> b);

// u ⊑ v: u lies in the orthant of v and |u_i| <= |v_i| for all i.
bool conformal_le(std::span<const Int> u, std::span<const Int> v);

// Canonical global vector order: lexicographic on entries.
bool lex_less(std::span<const Int> a, std::span<const Int> b);
void sort_canonical(std::vector<IntVec>& vs);
void sort_unique_canonical(std::vector<IntVec>& vs);

Int content(std::span<const Int> v);  // gcd of entries, 0 for the zero vector
IntVec primitive_part(std::span<const Int> v);

bool is_zero(std::span<const Int> v);
IntVec negated(std::span<const Int> v);
IntVec add(std::span<const Int> a, std::span<const Int> b);
IntVec sub(std::span<const Int> a, std::span<const Int> b);
IntVec scaled(std::span<const Int> v, const Int& k);
void axpy(IntVec& y, const Int& a, std::span<const Int> x);  // y += a*x
Int dot(std::span<const Int> a, std::span<const Int> b);
Rat dot(std::span<const Rat> a, std::span<const Int> b);
Int l1_norm(std::span<const Int> v);
Int linf_norm(std::span<const Int> v);

IntVec mul(const IntMat& a, std::span<const Int> x);
RatVec mul(const IntMat& a, std::span<const Rat> x);
IntMat mul(const IntMat& a, const IntMat& b);

std::size_t rank(const IntMat& a);

// Solves A x = b over Q. Returns false when no solution exists.
bool solve_rational(const IntMat& a, std::span<const Rat> b, RatVec& x);

RatVec to_rat(std::span<const Int> v);
// Throws kInvalidArgument when some entry is not integral.
IntVec to_int(std::span<const Rat> v);
bool is_integral(std::span<const Rat> v);

Int floor_div(const Int& a, const Int& b);
Int ceil_div(const Int& a, const Int& b);
Int floor_rat(const Rat& q);
Int ceil_rat(const Rat& q);

// Canonical text form: "p" for integers, "p/q" otherwise.
std::string to_string(const Rat& q);
std::string to_string(std::span<const Int> v);
Rat parse_rat(const std::string& text);

// Block helpers shared by the structured modules.
IntMat hstack(const IntMat& left, const IntMat& right);
IntMat vstack(const IntMat& top, const IntMat& bottom);
IntMat zeros(std::size_t rows, std::size_t cols);
void place(IntMat& dst, const IntMat& src, std::size_t row0, std::size_t col0);

}  // namespace graver_opt
