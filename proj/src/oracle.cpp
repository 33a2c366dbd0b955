#include "graver_opt/oracle.hpp"

#include <algorithm>

#include "graver_opt/linalg.hpp"

namespace graver_opt {

namespace {

// x_pivot[r] = (rhs[r] - sum_f coeff[r][f] * x_free[f]) / denom, integer data.
struct Parametrization {
  std::vector<std::size_t> pivots;
  std::vector<std::size_t> free;
  std::vector<IntVec> coeff;  // per pivot row, per free column
  IntVec rhs;
  Int denom = 1;
  bool consistent = true;
};

Parametrization parametrize(const IntMat& a, std::span<const Int> b) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  std::vector<RatVec> rows(m, RatVec(n + 1));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) rows[r][c] = a(r, c);
    rows[r][n] = b[r];
  }
  Parametrization out;
  std::size_t lead = 0;
  for (std::size_t c = 0; c < n && lead < m; ++c) {
    std::size_t p = lead;
    while (p < m && sgn(rows[p][c]) == 0) ++p;
    if (p == m) continue;
    std::swap(rows[p], rows[lead]);
    const Rat inv = Rat(1) / rows[lead][c];
    for (Rat& x : rows[lead]) x *= inv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == lead || sgn(rows[r][c]) == 0) continue;
      const Rat factor = rows[r][c];
      for (std::size_t k = 0; k <= n; ++k) rows[r][k] -= factor * rows[lead][k];
    }
    out.pivots.push_back(c);
    ++lead;
  }
  for (std::size_t r = lead; r < m; ++r)
    if (sgn(rows[r][n]) != 0) out.consistent = false;
  std::vector<bool> is_pivot(n, false);
  for (std::size_t c : out.pivots) is_pivot[c] = true;
  for (std::size_t c = 0; c < n; ++c)
    if (!is_pivot[c]) out.free.push_back(c);

  Int denom = 1;
  for (std::size_t r = 0; r < lead; ++r)
    for (const Rat& x : rows[r]) denom = lcm(denom, Int(x.get_den()));
  out.denom = denom;
  for (std::size_t r = 0; r < lead; ++r) {
    IntVec cf;
    for (std::size_t f : out.free) cf.push_back(Int(rows[r][f] * denom));
    out.coeff.push_back(std::move(cf));
    out.rhs.push_back(Int(rows[r][n] * denom));
  }
  return out;
}

struct Range {
  Int lo;
  Int hi;
};

std::vector<Range> box_ranges(const FeasibleBox& box, const OracleOptions& opts) {
  std::vector<Range> out;
  for (std::size_t i = 0; i < box.dim(); ++i) {
    Int hi;
    if (box.upper[i]) {
      hi = floor_rat(*box.upper[i]);
    } else if (opts.radius) {
      hi = box.lower[i] + *opts.radius;
    } else {
      throw Error(ErrorCode::kUnboundedBox, "coordinate " + std::to_string(i) + " has no upper bound");
    }
    out.push_back({box.lower[i], hi});
  }
  return out;
}

std::uint64_t enumerate(const IntMat& a, std::span<const Int> b, const std::vector<Range>& ranges,
                        const std::function<void(const IntVec&)>& visit, const OracleOptions& opts) {
  const std::size_t n = a.cols();
  for (const Range& r : ranges)
    if (r.hi < r.lo) return 0;
  const Parametrization par = parametrize(a, b);
  if (!par.consistent) return 0;

  Int space = 1;
  for (std::size_t f : par.free) {
    space *= ranges[f].hi - ranges[f].lo + 1;
    if (space > Int(std::to_string(opts.cell_cap))) {
      throw Error(ErrorCode::kSearchSpaceTooLarge,
                  "more than " + std::to_string(opts.cell_cap) + " free-coordinate combinations");
    }
  }

  IntVec z(n);
  for (std::size_t f : par.free) z[f] = ranges[f].lo;
  std::uint64_t visited = 0;
  Int num;
  for (;;) {
    ++visited;
    bool ok = true;
    for (std::size_t r = 0; r < par.pivots.size() && ok; ++r) {
      num = par.rhs[r];
      for (std::size_t k = 0; k < par.free.size(); ++k) num -= par.coeff[r][k] * z[par.free[k]];
      if (!mpz_divisible_p(num.get_mpz_t(), par.denom.get_mpz_t())) {
        ok = false;
        break;
      }
      Int& x = z[par.pivots[r]];
      mpz_divexact(x.get_mpz_t(), num.get_mpz_t(), par.denom.get_mpz_t());
      const Range& rg = ranges[par.pivots[r]];
      if (x < rg.lo || x > rg.hi) ok = false;
    }
    if (ok) visit(z);
    // Odometer over the free coordinates, last one fastest.
    std::size_t k = par.free.size();
    while (k > 0) {
      Int& x = z[par.free[k - 1]];
      if (x < ranges[par.free[k - 1]].hi) {
        ++x;
        break;
      }
      x = ranges[par.free[k - 1]].lo;
      --k;
    }
    if (k == 0) break;
  }
  return visited;
}

}  // namespace

std::uint64_t enumerate_feasible(const FeasibleBox& box, const std::function<void(const IntVec&)>& visit,
                                 const OracleOptions& opts) {
  if (box.A.cols() != box.dim() || box.b.size() != box.A.rows()) throw Error(ErrorCode::kDimMismatch, "box");
  return enumerate(box.A, box.b, box_ranges(box, opts), visit, opts);
}

OracleResult brute_force(const FeasibleBox& box, const std::function<Rat(const IntVec&)>& value,
                         const OracleOptions& opts) {
  OracleResult res;
  res.visited = enumerate_feasible(
      box,
      [&](const IntVec& z) {
        ++res.feasible_count;
        Rat v = value(z);
        if (!res.feasible || v < res.value || (v == res.value && lex_less(z, res.point))) {
          res.feasible = true;
          res.value = std::move(v);
          res.point = z;
        }
      },
      opts);
  return res;
}

OracleResult brute_force(const FeasibleBox& box, const Objective& obj, const OracleOptions& opts) {
  if (obj.dim() != box.dim()) throw Error(ErrorCode::kDimMismatch, "objective dimension");
  return brute_force(box, [&](const IntVec& z) { return obj.eval(z); }, opts);
}

Int graver_entry_bound(const IntMat& a) {
  const std::size_t n = a.cols();
  const Parametrization par = parametrize(a, IntVec(a.rows()));
  const std::size_t r = par.pivots.size();
  Int amax = 0;
  for (const Int& x : a.data()) amax = std::max(amax, Int(abs(x)));
  Int bound = static_cast<unsigned long>(n - r);
  for (std::size_t k = 2; k <= r; ++k) bound *= static_cast<unsigned long>(k);
  for (std::size_t k = 0; k < r; ++k) bound *= amax;
  return std::max(bound, Int(1));
}

std::vector<IntVec> brute_force_graver(const IntMat& a, const std::optional<Int>& bound,
                                       const OracleOptions& opts) {
  const std::size_t n = a.cols();
  const Int r = bound ? *bound : graver_entry_bound(a);
  std::vector<Range> ranges(n, Range{-r, r});
  std::vector<IntVec> kernel;
  enumerate(a, IntVec(a.rows()), ranges,
            [&](const IntVec& z) {
              if (!is_zero(z)) kernel.push_back(z);
            },
            opts);
  // A non-minimal vector dominates a minimal one of smaller l1 norm, which
  // lies in the same box; so scanning by l1 suffices.
  std::vector<std::pair<Int, std::size_t>> order;
  for (std::size_t i = 0; i < kernel.size(); ++i) order.emplace_back(l1_norm(kernel[i]), i);
  std::sort(order.begin(), order.end());
  std::vector<IntVec> minimal;
  for (const auto& [norm, i] : order) {
    const IntVec& v = kernel[i];
    bool dominated = false;
    for (const IntVec& g : minimal) {
      bool below = true;
      for (std::size_t k = 0; k < n && below; ++k) {
        if (sgn(g[k]) == 0) continue;
        if (sgn(g[k]) != sgn(v[k]) || cmpabs(g[k], v[k]) > 0) below = false;
      }
      if (below) {
        dominated = true;
        break;
      }
    }
    if (!dominated) minimal.push_back(v);
  }
  sort_canonical(minimal);
  return minimal;
}

}  // namespace graver_opt
