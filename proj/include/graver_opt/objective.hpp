#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "graver_opt/types.hpp"

namespace graver_opt {

// Univariate function on the integers, convex for every kind except callback
// where convexity is the caller's promise.
class Univariate {
 public:
  enum class Kind { kZero, kPoly, kAbsPower, kTable, kCallback };

  Univariate() = default;

  static Univariate zero();
  // coeffs[k] is the coefficient of t^k.
  static Univariate poly(RatVec coeffs);
  // scale * |t - shift|^exponent
  static Univariate abs_power(Int scale, unsigned long exponent, Int shift);
  // Piecewise-linear through (x, value) breakpoints, extended linearly past the
  // outermost ones. Breakpoints must have distinct x.
  static Univariate table(std::vector<std::pair<Int, Rat>> points);
  static Univariate callback(std::function<Rat(const Int&)> fn);

  static Univariate square() { return poly({Rat(0), Rat(0), Rat(1)}); }

  Kind kind() const { return kind_; }
  Rat operator()(const Int& t) const;

  // Affine functions (zero, or polynomials of degree <= 1) need no coupling row.
  bool is_affine() const;

  const RatVec& coeffs() const { return coeffs_; }
  const Int& scale() const { return scale_; }
  unsigned long exponent() const { return exponent_; }
  const Int& shift() const { return shift_; }
  const std::vector<std::pair<Int, Rat>>& points() const { return points_; }

 private:
  Kind kind_ = Kind::kZero;
  RatVec coeffs_;
  Int scale_;
  unsigned long exponent_ = 1;
  Int shift_;
  std::vector<std::pair<Int, Rat>> points_;
  std::function<Rat(const Int&)> fn_;
};

// Successive differences f(t+1)-f(t) are nondecreasing on [a, b].
bool check_z_convex(const Univariate& f, const Int& a, const Int& b);

struct ObjectiveRow {
  IntVec coeffs;
  Univariate f;
};

// f(z) = c.z + sum_j f_j(c_j.z). A linear objective has no rows.
class Objective {
 public:
  Objective() = default;

  static Objective linear(RatVec c);
  static Objective composite(RatVec c, std::vector<ObjectiveRow> rows);

  std::size_t dim() const { return c_.size(); }
  bool is_linear() const { return rows_.empty(); }
  const RatVec& linear_part() const { return c_; }
  const std::vector<ObjectiveRow>& rows() const { return rows_; }

  // Rows that need a coupling row in the composite basis (non-affine f_j), as a
  // matrix C with one row per such f_j.
  IntMat coupling() const;

  Rat eval(std::span<const Int> z) const;
  // Throws kRationalPointOnIntegerObjective unless the objective is linear.
  Rat eval(std::span<const Rat> z) const;

 private:
  RatVec c_;
  std::vector<ObjectiveRow> rows_;
};

// dist(t, [l, u]) as a piecewise-linear table; u absent means +infinity.
Univariate distance_to_interval(const Int& l, const std::optional<Int>& u);

// Upper bound on max - min of the objective over integer points of the box.
// Throws kUnboundedBox when an upper bound is missing.

Rat range_bound(const Objective& obj, const IntVec& lower,
                const std::vector<std::optional<Rat>>& upper);
Rat range_bound(const Objective& obj, const IntVec& lower, const IntVec& upper);

}  // namespace graver_opt
