#include "graver_opt/graver.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <tuple>
#include <utility>

#include "graver_opt/linalg.hpp"

namespace graver_opt {

namespace {

using Word = std::uint64_t;

// Sign pattern of a vector as bit masks, used to reject ⊑ tests cheaply.
struct SignMask {
  std::vector<Word> pos;
  std::vector<Word> neg;

  void assign(std::span<const Int> v) {
    const std::size_t words = (v.size() + 63) / 64;
    pos.assign(words, 0);
    neg.assign(words, 0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const int s = sgn(v[i]);
      if (s > 0) pos[i / 64] |= Word{1} << (i % 64);
      if (s < 0) neg[i / 64] |= Word{1} << (i % 64);
    }
  }

  bool empty() const {
    for (std::size_t w = 0; w < pos.size(); ++w)
      if (pos[w] | neg[w]) return false;
    return true;
  }
};

// u's pattern fits inside v's (sign orthant containment), optionally with u negated.
bool pattern_fits(const SignMask& u, const SignMask& v, bool negate_u) {
  const auto& up = negate_u ? u.neg : u.pos;
  const auto& un = negate_u ? u.pos : u.neg;
  for (std::size_t w = 0; w < v.pos.size(); ++w) {
    if ((up[w] & ~v.pos[w]) | (un[w] & ~v.neg[w])) return false;
  }
  return true;
}

bool has_opposite_sign(const SignMask& a, const SignMask& b) {
  for (std::size_t w = 0; w < a.pos.size(); ++w) {
    if ((a.pos[w] & b.neg[w]) | (a.neg[w] & b.pos[w])) return true;
  }
  return false;
}

bool has_same_sign(const SignMask& a, const SignMask& b) {
  for (std::size_t w = 0; w < a.pos.size(); ++w) {
    if ((a.pos[w] & b.pos[w]) | (a.neg[w] & b.neg[w])) return true;
  }
  return false;
}

bool magnitudes_fit(std::span<const Int> u, std::span<const Int> v) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (sgn(u[i]) != 0 && cmpabs(u[i], v[i]) > 0) return false;
  }
  return true;
}

std::uint64_t saturating_norm(std::span<const Int> v) {
  std::uint64_t total = 0;
  for (const Int& x : v) {
    if (!x.fits_slong_p()) return UINT64_MAX;
    const long a = std::labs(x.get_si());
    total += static_cast<std::uint64_t>(a);
  }
  return total;
}

struct Element {
  IntVec v;
  SignMask mask;
};

// Normal-form completion. The working set stores one representative of each
// ± pair; reduction and S-vectors account for both signs.
class Completion {
 public:
  explicit Completion(std::size_t n) : n_(n) {}

  void run(const std::vector<IntVec>& generators) {
    for (const IntVec& g : generators) insert(g);
    while (!pairs_.empty()) {
      auto [norm, i, j, minus] = pairs_.top();
      pairs_.pop();
      IntVec s = minus ? sub(set_[i].v, set_[j].v) : add(set_[i].v, set_[j].v);
      SignMask m;
      m.assign(s);
      if (reduce(s, m)) insert(std::move(s), &m);
    }
  }

  // ⊑-minimal elements of the completed set together with their negations.
  std::vector<IntVec> minimal_elements() const {
    std::vector<IntVec> out;
    for (std::size_t i = 0; i < set_.size(); ++i) {
      const Element& e = set_[i];
      bool minimal = true;
      for (std::size_t j = 0; j < set_.size() && minimal; ++j) {
        if (i == j) continue;
        const Element& f = set_[j];
        for (bool neg : {false, true}) {
          if (!pattern_fits(f.mask, e.mask, neg)) continue;
          if (!magnitudes_fit(f.v, e.v)) continue;
          // f ⊑ e with f != ±e (identical magnitudes would mean duplicates).
          if (f.v != e.v && negated(f.v) != e.v) {
            minimal = false;
            break;
          }
        }
      }
      if (minimal) {
        out.push_back(e.v);
        out.push_back(negated(e.v));
      }
    }
    sort_unique_canonical(out);
    return out;
  }

 private:
  // Reduces s in place by the symmetric working set. Returns true when a
  // nonzero remainder is left.
  bool reduce(IntVec& s, SignMask& m) const {
    bool changed = true;
    while (changed) {
      if (m.empty()) return false;
      changed = false;
      for (const Element& e : set_) {
        for (bool neg : {false, true}) {
          if (!pattern_fits(e.mask, m, neg)) continue;
          if (!magnitudes_fit(e.v, s)) continue;
          // Largest multiple of ±e that stays conformal.
          Int k;
          bool first = true;
          for (std::size_t i = 0; i < n_; ++i) {
            if (sgn(e.v[i]) == 0) continue;
            Int q = abs(s[i]) / abs(e.v[i]);
            if (first || q < k) k = q;
            first = false;
          }
          if (neg) k = -k;
          axpy(s, -k, e.v);
          m.assign(s);
          changed = true;
          break;
        }
        if (m.empty()) return false;
      }
    }
    return !m.empty();
  }

  void insert(IntVec v, const SignMask* known = nullptr) {
    Element e;
    if (known) {
      e.mask = *known;
    } else {
      e.mask.assign(v);
    }
    e.v = std::move(v);
    if (e.mask.empty()) return;
    const std::size_t idx = set_.size();
    for (std::size_t j = 0; j < idx; ++j) {
      const Element& f = set_[j];
      // Sign-compatible pairs reduce to zero immediately.
      if (has_opposite_sign(e.mask, f.mask)) {
        pairs_.push({saturating_norm(add(e.v, f.v)), idx, j, false});
      }
      if (has_same_sign(e.mask, f.mask)) {
        pairs_.push({saturating_norm(sub(e.v, f.v)), idx, j, true});
      }
    }
    set_.push_back(std::move(e));
  }

  using Pair = std::tuple<std::uint64_t, std::size_t, std::size_t, bool>;

  std::size_t n_;
  std::vector<Element> set_;
  std::priority_queue<Pair, std::vector<Pair>, std::greater<>> pairs_;
};

bool is_zero_col(const IntMat& a, std::size_t c) {
  for (std::size_t r = 0; r < a.rows(); ++r)
    if (sgn(a(r, c)) != 0) return false;
  return true;
}

// Returns +1 / -1 when column k equals +/- column j, 0 otherwise.
int parallel_sign(const IntMat& a, std::size_t j, std::size_t k) {
  bool same = true;
  bool opposite = true;
  for (std::size_t r = 0; r < a.rows() && (same || opposite); ++r) {
    if (a(r, k) != a(r, j)) same = false;
    if (a(r, k) != -a(r, j)) opposite = false;
  }
  if (same) return 1;
  if (opposite) return -1;
  return 0;
}

IntVec insert_at(const IntVec& v, std::size_t pos, const Int& value) {
  IntVec out;
  out.reserve(v.size() + 1);
  out.insert(out.end(), v.begin(), v.begin() + static_cast<std::ptrdiff_t>(pos));
  out.push_back(value);
  out.insert(out.end(), v.begin() + static_cast<std::ptrdiff_t>(pos), v.end());
  return out;
}

// Graver basis with exact reductions for zero columns and for pairs of equal or
// opposite columns; the remaining core goes through the completion.
std::vector<IntVec> graver_elements(const IntMat& a) {
  const std::size_t n = a.cols();
  if (n == 0) return {};

  for (std::size_t j = 0; j < n; ++j) {
    if (!is_zero_col(a, j)) continue;
    std::vector<IntVec> out;
    for (const IntVec& g : graver_elements(a.drop_col(j))) out.push_back(insert_at(g, j, 0));
    IntVec e(n);
    e[j] = 1;
    out.push_back(e);
    out.push_back(negated(e));
    sort_unique_canonical(out);
    return out;
  }

  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      const int eps = parallel_sign(a, j, k);
      if (eps == 0) continue;
      // Column k = eps * column j. Every Graver element of the reduced matrix
      // with value t at j splits as (a_j, b_k) with a_j + eps*b_k = t and both
      // parts in the orthant of t; e_j - eps*e_k closes the set.
      std::vector<IntVec> out;
      for (const IntVec& g : graver_elements(a.drop_col(k))) {
        const Int& t = g[j];
        const int sigma = sgn(t);
        if (sigma == 0) {
          out.push_back(insert_at(g, k, 0));
          continue;
        }
        const Int mag = abs(t);
        for (Int part = 0; part <= mag; ++part) {
          IntVec h = insert_at(g, k, Int(eps * sigma) * (mag - part));
          h[j] = Int(sigma) * part;
          out.push_back(std::move(h));
        }
      }
      IntVec e(n);
      e[j] = 1;
      e[k] = -eps;
      out.push_back(e);
      out.push_back(negated(e));
      sort_unique_canonical(out);
      return out;
    }
  }

  return graver_completion(a);
}

bool rows_are_signed_units(const IntMat& c) {
  for (std::size_t r = 0; r < c.rows(); ++r) {
    int nonzero = 0;
    for (std::size_t j = 0; j < c.cols(); ++j) {
      if (sgn(c(r, j)) == 0) continue;
      if (abs(c(r, j)) != 1) return false;
      ++nonzero;
    }
    if (nonzero > 1) return false;
  }
  return true;
}

}  // namespace

std::vector<IntVec> graver_completion(const IntMat& a) {
  const auto basis = kernel_basis(a);
  if (basis.empty()) return {};
  Completion completion(a.cols());
  completion.run(basis);
  return completion.minimal_elements();
}

CircuitSet circuits(const IntMat& a) {
  const std::size_t n = a.cols();
  CircuitSet out{a, {}};
  if (n == 0) return out;
  if (n > 30) throw Error(ErrorCode::kInvalidArgument, "circuit enumeration limited to 30 columns");
  const std::size_t max_support = std::min(n, rank(a) + 1);
  std::vector<std::size_t> cols;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (size > max_support) continue;
    cols.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (mask & (std::uint64_t{1} << j)) cols.push_back(j);
    const auto kb = kernel_basis(a.select_cols(cols));
    if (kb.size() != 1) continue;
    const IntVec& g = kb.front();
    if (std::any_of(g.begin(), g.end(), [](const Int& x) { return sgn(x) == 0; })) continue;
    IntVec full(n);
    for (std::size_t t = 0; t < cols.size(); ++t) full[cols[t]] = g[t];
    out.elements.push_back(full);
    out.elements.push_back(negated(full));
  }
  sort_unique_canonical(out.elements);
  return out;
}

GraverBasis graver(const IntMat& a) {
  GraverBasis out{a, graver_elements(a), {}, IntMat(0, a.cols())};
  out.lifted = out.elements;
  return out;
}

GraverBasis graver_composite(const IntMat& a, const IntMat& c) {
  if (c.rows() > 0 && c.cols() != a.cols()) {
    throw Error(ErrorCode::kDimMismatch, "composite rows must have the column count of A");
  }
  const std::size_t n = a.cols();
  const std::size_t s = c.rows();
  if (s == 0) return graver(a);

  GraverBasis out{a, {}, {}, c};
  std::vector<std::pair<IntVec, IntVec>> pairs;
  if (rows_are_signed_units(c)) {
    // Each appended coordinate -c_j.x copies the sign of one x coordinate, so
    // ⊑-minimality of (x, -Cx) is that of x.
    for (const IntVec& x : graver_elements(a)) {
      IntVec full = x;
      for (std::size_t r = 0; r < s; ++r) full.push_back(-dot(c.row(r), x));
      pairs.emplace_back(x, std::move(full));
    }
  } else {
    IntMat big(a.rows() + s, n + s);
    place(big, a, 0, 0);
    place(big, c, a.rows(), 0);
    for (std::size_t r = 0; r < s; ++r) big(a.rows() + r, n + r) = 1;
    for (const IntVec& full : graver_elements(big)) {
      IntVec x(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(n));
      if (is_zero(x)) continue;
      pairs.emplace_back(std::move(x), full);
    }
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& l, const auto& r) { return lex_less(l.first, r.first); });
  for (auto& [x, full] : pairs) {
    out.elements.push_back(std::move(x));
    out.lifted.push_back(std::move(full));
  }
  return out;
}

namespace {

struct DecomposeSearch {
  std::vector<IntVec> candidates;
  std::set<std::tuple<IntVec, std::size_t, std::size_t>> failed;
  std::vector<DecompositionTerm> terms;

  bool run(const IntVec& rem, std::size_t start, std::size_t depth) {
    if (is_zero(rem)) return true;
    if (depth == 0) return false;
    auto key = std::make_tuple(rem, start, depth);
    if (failed.count(key)) return false;
    for (std::size_t idx = start; idx < candidates.size(); ++idx) {
      const IntVec& e = candidates[idx];
      if (!conformal_le(e, rem)) continue;
      Int kmax;
      bool first = true;
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (sgn(e[i]) == 0) continue;
        Int q = abs(rem[i]) / abs(e[i]);
        if (first || q < kmax) kmax = q;
        first = false;
      }
      for (Int k = kmax; k >= 1; --k) {
        IntVec next = rem;
        axpy(next, -k, e);
        terms.push_back({k, e});
        if (run(next, idx + 1, depth - 1)) return true;
        terms.pop_back();
      }
    }
    failed.insert(std::move(key));
    return false;
  }
};

}  // namespace

Decomposition decompose(const IntVec& v, const GraverBasis& g, std::size_t bound) {
  const IntMat& a = g.matrix;
  if (v.size() != a.cols()) throw Error(ErrorCode::kDimMismatch, "decompose dimension");
  if (!is_zero(mul(a, v))) throw Error(ErrorCode::kNotInKernel, to_string(v));
  Decomposition out;
  if (is_zero(v)) return out;

  // Composite bases decompose in the lifted space, where sign compatibility
  // also covers the appended coordinates.
  const bool lifted = g.coupling.rows() > 0;
  IntVec target = v;
  DecomposeSearch search;
  if (lifted) {
    for (std::size_t r = 0; r < g.coupling.rows(); ++r) target.push_back(-dot(g.coupling.row(r), v));
    for (std::size_t e = 0; e < g.lifted.size(); ++e) {
      if (conformal_le(g.lifted[e], target)) {
        search.candidates.push_back(g.lifted[e]);
      }
    }
  } else {
    for (std::size_t e = 0; e < g.elements.size(); ++e) {
      if (conformal_le(g.elements[e], target)) {
        search.candidates.push_back(g.elements[e]);
      }
    }
  }
  // Larger elements first keeps the number of terms small.
  std::vector<std::size_t> order(search.candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return l1_norm(search.candidates[l]) > l1_norm(search.candidates[r]);
  });
  std::vector<IntVec> sorted;
  for (std::size_t i : order) sorted.push_back(search.candidates[i]);
  search.candidates = std::move(sorted);

  if (!search.run(target, 0, bound)) {
    throw Error(ErrorCode::kBoundExceeded,
                "no sign-compatible decomposition with " + std::to_string(bound) + " terms");
  }
  for (auto& t : search.terms) {
    if (lifted) t.dir.resize(v.size());
    out.terms.push_back(std::move(t));
  }
  return out;
}

std::size_t block_type(const IntVec& v, std::size_t block_width) {
  if (block_width == 0) return 0;
  std::size_t type = 0;
  for (std::size_t start = 0; start < v.size(); start += block_width) {
    for (std::size_t i = start; i < std::min(v.size(), start + block_width); ++i) {
      if (sgn(v[i]) != 0) {
        ++type;
        break;
      }
    }
  }
  return type;
}

}  // namespace graver_opt
