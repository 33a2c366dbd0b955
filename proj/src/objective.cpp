#include "graver_opt/objective.hpp"

#include <algorithm>

#include "graver_opt/augment.hpp"
#include "graver_opt/linalg.hpp"

namespace graver_opt {

Univariate Univariate::zero() { return Univariate(); }

Univariate Univariate::poly(RatVec coeffs) {
  while (!coeffs.empty() && sgn(coeffs.back()) == 0) coeffs.pop_back();
  Univariate f;
  f.kind_ = coeffs.empty() ? Kind::kZero : Kind::kPoly;
  f.coeffs_ = std::move(coeffs);
  return f;
}

Univariate Univariate::abs_power(Int scale, unsigned long exponent, Int shift) {
  if (sgn(scale) < 0) throw Error(ErrorCode::kInvalidArgument, "abs_power scale must be >= 0");
  if (exponent < 1) throw Error(ErrorCode::kInvalidArgument, "abs_power exponent must be >= 1");
  Univariate f;
  f.kind_ = Kind::kAbsPower;
  f.scale_ = std::move(scale);
  f.exponent_ = exponent;
  f.shift_ = std::move(shift);
  return f;
}

Univariate Univariate::table(std::vector<std::pair<Int, Rat>> points) {
  if (points.empty()) throw Error(ErrorCode::kInvalidArgument, "table needs a breakpoint");
  std::sort(points.begin(), points.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].first == points[i - 1].first) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate table breakpoint");
    }
  }
  Univariate f;
  f.kind_ = Kind::kTable;
  f.points_ = std::move(points);
  return f;
}

Univariate Univariate::callback(std::function<Rat(const Int&)> fn) {
  Univariate f;
  f.kind_ = Kind::kCallback;
  f.fn_ = std::move(fn);
  return f;
}

namespace {

Rat interpolate(const std::pair<Int, Rat>& a, const std::pair<Int, Rat>& b, const Int& t) {
  Rat slope = (b.second - a.second) / Rat(b.first - a.first);
  return a.second + slope * Rat(t - a.first);
}

}  // namespace

Rat Univariate::operator()(const Int& t) const {
  switch (kind_) {
    case Kind::kZero:
      return 0;
    case Kind::kPoly: {
      Rat acc = 0;
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * Rat(t) + *it;
      return acc;
    }
    case Kind::kAbsPower: {
      Int d = abs(t - shift_);
      Int p;
      mpz_pow_ui(p.get_mpz_t(), d.get_mpz_t(), exponent_);
      return Rat(scale_ * p);
    }
    case Kind::kTable: {
      if (points_.size() == 1) return points_.front().second;
      // Segment whose right end is the first breakpoint >= t, clamped to the ends.
      auto it = std::lower_bound(points_.begin(), points_.end(), t,
                                 [](const auto& p, const Int& x) { return p.first < x; });
      if (it != points_.end() && it->first == t) return it->second;
      std::size_t right = static_cast<std::size_t>(it - points_.begin());
      right = std::clamp<std::size_t>(right, 1, points_.size() - 1);
      return interpolate(points_[right - 1], points_[right], t);
    }
    case Kind::kCallback:
      return fn_(t);
  }
  return 0;
}

bool Univariate::is_affine() const {
  if (kind_ == Kind::kZero) return true;
  if (kind_ == Kind::kPoly) return coeffs_.size() <= 2;
  return false;
}

bool check_z_convex(const Univariate& f, const Int& a, const Int& b) {
  if (b - a < 2) return true;
  Rat prev = f(a + 1) - f(a);
  Rat prev_value = f(a + 1);
  for (Int t = a + 1; t + 1 <= b; ++t) {
    Rat next_value = f(t + 1);
    Rat diff = next_value - prev_value;
    if (diff < prev) return false;
    prev = diff;
    prev_value = next_value;
  }
  return true;
}

Objective Objective::linear(RatVec c) {
  Objective o;
  o.c_ = std::move(c);
  return o;
}

Objective Objective::composite(RatVec c, std::vector<ObjectiveRow> rows) {
  for (const auto& r : rows) {
    if (r.coeffs.size() != c.size()) throw Error(ErrorCode::kDimMismatch, "objective row length");
  }
  Objective o;
  o.c_ = std::move(c);
  o.rows_ = std::move(rows);
  return o;
}

IntMat Objective::coupling() const {
  std::vector<IntVec> out;
  for (const auto& r : rows_) {
    if (!r.f.is_affine()) out.push_back(r.coeffs);
  }
  return IntMat::from_rows(out, dim());
}

Rat Objective::eval(std::span<const Int> z) const {
  if (z.size() != dim()) throw Error(ErrorCode::kDimMismatch, "objective dimension");
  Rat value = dot(c_, z);
  for (const auto& r : rows_) value += r.f(dot(r.coeffs, z));
  return value;
}

Rat Objective::eval(std::span<const Rat> z) const {
  if (z.size() != dim()) throw Error(ErrorCode::kDimMismatch, "objective dimension");
  if (!is_linear()) {
    throw Error(ErrorCode::kRationalPointOnIntegerObjective, "composite objective needs an integer point");
  }
  Rat value = 0;
  for (std::size_t i = 0; i < z.size(); ++i) value += c_[i] * z[i];
  return value;
}

Rat range_bound(const Objective& obj, const IntVec& lower,
                const std::vector<std::optional<Rat>>& upper) {
  const std::size_t n = obj.dim();
  if (lower.size() != n || upper.size() != n) throw Error(ErrorCode::kDimMismatch, "box dimension");
  for (std::size_t i = 0; i < n; ++i) {
    if (!upper[i]) throw Error(ErrorCode::kUnboundedBox, "coordinate " + std::to_string(i));
  }
  Rat h = 0;
  for (std::size_t i = 0; i < n; ++i) h += abs(obj.linear_part()[i]) * (*upper[i] - Rat(lower[i]));
  for (const auto& row : obj.rows()) {
    // Range of the row value over integer points of the box.
    Int lo = 0;
    Int hi = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Int& a = row.coeffs[i];
      if (sgn(a) == 0) continue;
      const Int u = floor_rat(*upper[i]);
      if (sgn(a) > 0) {
        lo += a * lower[i];
        hi += a * u;
      } else {
        lo += a * u;
        hi += a * lower[i];
      }
    }
    if (lo > hi) continue;
    const Rat top = std::max(row.f(lo), row.f(hi));
    const Int arg = line_search([&](const Int& t) { return row.f(t); }, lo, hi);
    h += top - row.f(arg);
  }
  return h;
}

Rat range_bound(const Objective& obj, const IntVec& lower, const IntVec& upper) {
  std::vector<std::optional<Rat>> u;
  for (const Int& x : upper) u.emplace_back(Rat(x));
  return range_bound(obj, lower, u);
}

Univariate distance_to_interval(const Int& l, const std::optional<Int>& u) {
  std::vector<std::pair<Int, Rat>> pts{{l - 1, Rat(1)}, {l, Rat(0)}};
  if (!u) {
    pts.push_back({l + 1, Rat(0)});
  } else {
    if (*u != l) pts.push_back({*u, Rat(0)});
    pts.push_back({*u + 1, Rat(1)});
  }
  return Univariate::table(std::move(pts));
}

}  // namespace graver_opt
