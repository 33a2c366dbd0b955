#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "graver_opt/augment.hpp"
#include "graver_opt/linalg.hpp"
#include "graver_opt/types.hpp"

namespace test_support {

using graver_opt::Int;
using graver_opt::IntMat;
using graver_opt::IntVec;
using graver_opt::Rat;

using VecSet = std::set<IntVec>;

inline VecSet as_set(const std::vector<IntVec>& vs) { return VecSet(vs.begin(), vs.end()); }

inline IntVec vec(std::initializer_list<long> v) { return graver_opt::make_int_vec(v); }

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  long uniform(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
  bool coin() { return uniform(0, 1) == 1; }

  IntMat matrix(std::size_t rows, std::size_t cols, long lo, long hi) {
    IntMat m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = uniform(lo, hi);
    return m;
  }

  IntVec vector(std::size_t n, long lo, long hi) {
    IntVec v(n);
    for (Int& x : v) x = uniform(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 rng_;
};

// Calls visit on every point of the integer box [lo, hi] (odometer, last coordinate fastest).
inline void for_each_point(const IntVec& lo, const IntVec& hi, const std::function<void(const IntVec&)>& visit) {
  const std::size_t n = lo.size();
  for (std::size_t i = 0; i < n; ++i)
    if (lo[i] > hi[i]) return;
  IntVec z = lo;
  for (;;) {
    visit(z);
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (z[i] < hi[i]) {
        ++z[i];
        break;
      }
      z[i] = lo[i];
      if (i == 0) return;
    }
    if (n == 0) return;
  }
}

inline bool in_kernel(const IntMat& a, const IntVec& v) {
  for (std::size_t r = 0; r < a.rows(); ++r) {
    Int s = 0;
    for (std::size_t c = 0; c < a.cols(); ++c) s += a(r, c) * v[c];
    if (s != 0) return false;
  }
  return true;
}

inline bool conformally_below(const IntVec& u, const IntVec& v) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == 0) continue;
    if (sgn(u[i]) != sgn(v[i]) || abs(u[i]) > abs(v[i])) return false;
  }
  return true;
}

// ⊑-minimal nonzero kernel vectors among the points of [-r, r]^n, by pairwise comparison.
inline VecSet naive_graver(const IntMat& a, long r) {
  const std::size_t n = a.cols();
  std::vector<IntVec> kernel;
  IntVec lo(n, Int(-r)), hi(n, Int(r));
  for_each_point(lo, hi, [&](const IntVec& z) {
    if (std::any_of(z.begin(), z.end(), [](const Int& x) { return x != 0; }) && in_kernel(a, z)) kernel.push_back(z);
  });
  VecSet out;
  for (const IntVec& v : kernel) {
    bool minimal = true;
    for (const IntVec& u : kernel) {
      if (u != v && conformally_below(u, v)) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.insert(v);
  }
  return out;
}

struct NaiveOptimum {
  std::optional<Rat> value;
  std::vector<IntVec> argmin;
  std::size_t feasible = 0;
};

// Scans the whole box; independent of the library's echelon-form oracle.
inline NaiveOptimum naive_optimum(const IntMat& a, const IntVec& b, const IntVec& lo, const IntVec& hi,
                                  const std::function<Rat(const IntVec&)>& value) {
  NaiveOptimum out;
  for_each_point(lo, hi, [&](const IntVec& z) {
    for (std::size_t r = 0; r < a.rows(); ++r) {
      Int s = 0;
      for (std::size_t c = 0; c < a.cols(); ++c) s += a(r, c) * z[c];
      if (s != b[r]) return;
    }
    ++out.feasible;
    const Rat v = value(z);
    if (!out.value || v < *out.value) {
      out.value = v;
      out.argmin.assign(1, z);
    } else if (v == *out.value) {
      out.argmin.push_back(z);
    }
  });
  return out;
}

inline NaiveOptimum naive_optimum(const graver_opt::FeasibleBox& box, const std::function<Rat(const IntVec&)>& value) {
  return naive_optimum(box.A, box.b, box.lower, box.integer_upper(), value);
}

inline std::vector<IntVec> naive_feasible(const IntMat& a, const IntVec& b, const IntVec& lo, const IntVec& hi) {
  std::vector<IntVec> out;
  naive_optimum(a, b, lo, hi, [&](const IntVec& z) {
    out.push_back(z);
    return Rat(0);
  });
  return out;
}

}  // namespace test_support
