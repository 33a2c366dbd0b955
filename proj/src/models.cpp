#include "graver_opt/models.hpp"

#include <algorithm>
#include <set>

#include "graver_opt/linalg.hpp"

namespace graver_opt {

namespace {

Int sum(std::span<const Int> v) {
  Int total = 0;
  for (const Int& x : v) total += x;
  return total;
}

void require_nonnegative(std::span<const Int> v, const char* what) {
  for (const Int& x : v)
    if (sgn(x) < 0) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must be nonnegative");
}

std::vector<IntVec> uniform_caps(std::size_t blocks, std::size_t width, const Int& cap) {
  return std::vector<IntVec>(blocks, IntVec(width, cap));
}

}  // namespace

NFoldInstance build_transportation(const IntVec& supplies, const IntVec& demands,
                                   const std::vector<IntVec>& caps) {
  const std::size_t n = supplies.size();
  const std::size_t N = demands.size();
  if (n == 0 || N == 0) throw Error(ErrorCode::kInvalidArgument, "need suppliers and customers");
  require_nonnegative(supplies, "supplies");
  require_nonnegative(demands, "demands");
  if (sum(supplies) != sum(demands)) {
    throw Error(ErrorCode::kBalanceMismatch,
                "total supply " + sum(supplies).get_str() + " != total demand " + sum(demands).get_str());
  }
  if (caps.size() != N) throw Error(ErrorCode::kDimMismatch, "need one cap row per customer");
  for (const IntVec& row : caps) {
    if (row.size() != n) throw Error(ErrorCode::kDimMismatch, "cap row length");
    require_nonnegative(row, "caps");
  }
  NFoldInstance inst;
  inst.A = IntMat(1, n);
  for (std::size_t j = 0; j < n; ++j) inst.A(0, j) = 1;
  inst.B = IntMat::identity(n);
  inst.N = N;
  inst.b0 = supplies;
  for (const Int& d : demands) inst.b.push_back(IntVec{d});
  inst.upper = caps;
  inst.C = IntMat(0, n);
  return inst;
}

NFoldInstance build_transportation(const IntVec& supplies, const IntVec& demands, const Int& cap) {
  return build_transportation(supplies, demands, uniform_caps(demands.size(), supplies.size(), cap));
}

void set_separable(NFoldInstance& inst, std::vector<std::vector<Univariate>> f) {
  const std::size_t n = inst.block_width();
  if (f.size() != inst.N) throw Error(ErrorCode::kDimMismatch, "need one function row per block");
  for (const auto& row : f)
    if (row.size() != n) throw Error(ErrorCode::kDimMismatch, "one function per block coordinate");
  inst.C = IntMat::identity(n);
  inst.f = std::move(f);
}

NFoldInstance build_3way_linesum(std::size_t L, std::size_t M, std::size_t N, const IntMat& r,
                                 const IntMat& s, const IntMat& t, const std::vector<IntVec>& caps) {
  if (L == 0 || M == 0 || N == 0) throw Error(ErrorCode::kInvalidArgument, "array dimensions must be positive");
  if (r.rows() != M || r.cols() != N) throw Error(ErrorCode::kDimMismatch, "r must be M x N");
  if (s.rows() != L || s.cols() != N) throw Error(ErrorCode::kDimMismatch, "s must be L x N");
  if (t.rows() != L || t.cols() != M) throw Error(ErrorCode::kDimMismatch, "t must be L x M");
  require_nonnegative(r.data(), "line sums");
  require_nonnegative(s.data(), "line sums");
  require_nonnegative(t.data(), "line sums");

  // Each pair of families must agree on the margins they share.
  for (std::size_t k = 0; k < N; ++k) {
    Int by_r = 0, by_s = 0;
    for (std::size_t j = 0; j < M; ++j) by_r += r(j, k);
    for (std::size_t i = 0; i < L; ++i) by_s += s(i, k);
    if (by_r != by_s) {
      throw Error(ErrorCode::kInconsistentMargins, "layer " + std::to_string(k) + " totals disagree");
    }
  }
  for (std::size_t j = 0; j < M; ++j) {
    Int by_r = 0, by_t = 0;
    for (std::size_t k = 0; k < N; ++k) by_r += r(j, k);
    for (std::size_t i = 0; i < L; ++i) by_t += t(i, j);
    if (by_r != by_t) throw Error(ErrorCode::kInconsistentMargins, "column " + std::to_string(j) + " totals disagree");
  }
  for (std::size_t i = 0; i < L; ++i) {
    Int by_s = 0, by_t = 0;
    for (std::size_t k = 0; k < N; ++k) by_s += s(i, k);
    for (std::size_t j = 0; j < M; ++j) by_t += t(i, j);
    if (by_s != by_t) throw Error(ErrorCode::kInconsistentMargins, "row " + std::to_string(i) + " totals disagree");
  }
  if (caps.size() != N) throw Error(ErrorCode::kDimMismatch, "need one cap vector per layer");
  for (const IntVec& c : caps) {
    if (c.size() != L * M) throw Error(ErrorCode::kDimMismatch, "cap vector length");
    require_nonnegative(c, "caps");
  }

  NFoldInstance inst;
  inst.A = IntMat(L + M, L * M);
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < M; ++j) {
      inst.A(i, i * M + j) = 1;
      inst.A(L + j, i * M + j) = 1;
    }
  }
  inst.B = IntMat::identity(L * M);
  inst.N = N;
  inst.b0 = t.data();
  for (std::size_t k = 0; k < N; ++k) {
    IntVec bk;
    for (std::size_t i = 0; i < L; ++i) bk.push_back(s(i, k));
    for (std::size_t j = 0; j < M; ++j) bk.push_back(r(j, k));
    inst.b.push_back(std::move(bk));
  }
  inst.upper = caps;
  inst.C = IntMat(0, L * M);
  return inst;
}

NFoldInstance build_3way_linesum(std::size_t L, std::size_t M, std::size_t N, const IntMat& r,
                                 const IntMat& s, const IntMat& t, const Int& cap) {
  return build_3way_linesum(L, M, N, r, s, t, uniform_caps(N, L * M, cap));
}

IntVec layers_from_array(std::size_t L, std::size_t M, std::size_t N, const IntVec& array) {
  if (array.size() != L * M * N) throw Error(ErrorCode::kDimMismatch, "array size");
  IntVec out(array.size());
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j < M; ++j)
      for (std::size_t k = 0; k < N; ++k) out[k * L * M + i * M + j] = array[(i * M + j) * N + k];
  return out;
}

IntVec array_from_layers(std::size_t L, std::size_t M, std::size_t N, const IntVec& layers) {
  if (layers.size() != L * M * N) throw Error(ErrorCode::kDimMismatch, "array size");
  IntVec out(layers.size());
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j < M; ++j)
      for (std::size_t k = 0; k < N; ++k) out[(i * M + j) * N + k] = layers[k * L * M + i * M + j];
  return out;
}

// ---------------------------------------------------------------------------
// Hierarchical margins

std::vector<std::size_t> margin_support(const MarginIndex& index) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < index.size(); ++j)
    if (index[j] != kPlus) out.push_back(j);
  return out;
}

std::size_t margin_count(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& support) {
  std::size_t count = 1;
  for (std::size_t j : support) {
    if (j >= dims.size()) throw Error(ErrorCode::kInvalidArgument, "support coordinate out of range");
    count *= dims[j];
  }
  return count;
}

namespace {

std::size_t cell_count(const std::vector<std::size_t>& dims) {
  std::size_t total = 1;
  for (std::size_t m : dims) total *= m;
  return total;
}

// All margin tuples with the given support, lexicographic.
std::vector<MarginIndex> tuples_with_support(const std::vector<std::size_t>& dims,
                                             const std::vector<std::size_t>& support) {
  std::vector<MarginIndex> out;
  MarginIndex cur(dims.size(), kPlus);
  for (std::size_t j : support) cur[j] = 0;
  const std::size_t count = margin_count(dims, support);
  for (std::size_t c = 0; c < count; ++c) {
    out.push_back(cur);
    for (std::size_t p = support.size(); p-- > 0;) {
      const std::size_t j = support[p];
      if (++cur[j] < dims[j]) break;
      cur[j] = 0;
    }
  }
  return out;
}

bool matches(const MarginIndex& index, const std::vector<std::size_t>& cell) {
  for (std::size_t j = 0; j < index.size(); ++j)
    if (index[j] != kPlus && index[j] != cell[j]) return false;
  return true;
}

// Cell coordinates for position p of a layer (row-major over the first d-1 axes).
std::vector<std::size_t> layer_cell(const std::vector<std::size_t>& dims, std::size_t p) {
  const std::size_t d = dims.size();
  std::vector<std::size_t> cell(d, 0);
  for (std::size_t j = d - 1; j-- > 0;) {
    cell[j] = p % dims[j];
    p /= dims[j];
  }
  return cell;
}

}  // namespace

void MarginSpec::validate() const {
  if (dims.empty()) throw Error(ErrorCode::kInvalidArgument, "array needs at least one axis");
  for (std::size_t m : dims)
    if (m == 0) throw Error(ErrorCode::kInvalidArgument, "axis lengths must be positive");
  if (family.empty()) throw Error(ErrorCode::kInvalidArgument, "margin family is empty");
  std::set<std::vector<std::size_t>> seen;
  for (const auto& h : family) {
    if (!std::is_sorted(h.begin(), h.end()) || std::adjacent_find(h.begin(), h.end()) != h.end()) {
      throw Error(ErrorCode::kInvalidArgument, "family members must be strictly increasing");
    }
    for (std::size_t j : h)
      if (j >= dims.size()) throw Error(ErrorCode::kInvalidArgument, "family coordinate out of range");
    if (!seen.insert(h).second) throw Error(ErrorCode::kInvalidArgument, "repeated family member");
  }
  for (const auto& [index, v] : values) {
    if (index.size() != dims.size()) throw Error(ErrorCode::kDimMismatch, "margin tuple length");
    for (std::size_t j = 0; j < index.size(); ++j)
      if (index[j] != kPlus && index[j] >= dims[j]) throw Error(ErrorCode::kInvalidArgument, "margin index out of range");
    if (!seen.contains(margin_support(index))) {
      throw Error(ErrorCode::kInvalidArgument, "margin support not in the family");
    }
    if (sgn(v) < 0) throw Error(ErrorCode::kInvalidArgument, "margin values must be nonnegative");
  }
  for (const auto& h : family)
    for (const MarginIndex& index : tuples_with_support(dims, h))
      if (!values.contains(index)) throw Error(ErrorCode::kInvalidArgument, "missing margin value");
  const std::size_t cells = cell_count(dims);
  if (bounds.size() != 1 && bounds.size() != cells) throw Error(ErrorCode::kDimMismatch, "bounds length");
  require_nonnegative(bounds, "bounds");

  // Any two members must induce the same margins on their common support.
  for (std::size_t a = 0; a < family.size(); ++a) {
    for (std::size_t b = a + 1; b < family.size(); ++b) {
      std::vector<std::size_t> common;
      std::set_intersection(family[a].begin(), family[a].end(), family[b].begin(), family[b].end(),
                            std::back_inserter(common));
      std::map<MarginIndex, Int> from_a, from_b;
      auto project = [&](const std::vector<std::size_t>& h, std::map<MarginIndex, Int>& into) {
        for (const MarginIndex& index : tuples_with_support(dims, h)) {
          MarginIndex key(dims.size(), kPlus);
          for (std::size_t j : common) key[j] = index[j];
          into[key] += values.at(index);
        }
      };
      project(family[a], from_a);
      project(family[b], from_b);
      if (from_a != from_b) throw Error(ErrorCode::kInconsistentMargins, "margins disagree on a shared sub-margin");
    }
  }
}

NFoldInstance build_hierarchical(const MarginSpec& spec) {
  spec.validate();
  const std::size_t d = spec.dims.size();
  const std::size_t last = d - 1;
  const std::size_t N = spec.dims[last];
  const std::size_t n = cell_count(spec.dims) / N;

  std::vector<std::vector<std::size_t>> cells;
  for (std::size_t p = 0; p < n; ++p) cells.push_back(layer_cell(spec.dims, p));

  std::vector<IntVec> a_rows, b_rows;
  std::vector<MarginIndex> a_tuples;
  IntVec b0;
  for (const auto& h : spec.family) {
    const bool in_layer = std::find(h.begin(), h.end(), last) != h.end();
    std::vector<std::size_t> sub;
    for (std::size_t j : h)
      if (j != last) sub.push_back(j);
    for (const MarginIndex& index : tuples_with_support(spec.dims, sub)) {
      IntVec row(n);
      for (std::size_t p = 0; p < n; ++p)
        if (matches(index, cells[p])) row[p] = 1;
      if (in_layer) {
        a_rows.push_back(std::move(row));
        a_tuples.push_back(index);
      } else {
        b_rows.push_back(std::move(row));
        b0.push_back(spec.values.at(index));
      }
    }
  }

  NFoldInstance inst;
  inst.A = IntMat::from_rows(a_rows, n);
  inst.B = IntMat::from_rows(b_rows, n);
  inst.N = N;
  inst.b0 = std::move(b0);
  for (std::size_t k = 0; k < N; ++k) {
    IntVec bk;
    for (MarginIndex index : a_tuples) {
      index[last] = k;
      bk.push_back(spec.values.at(index));
    }
    inst.b.push_back(std::move(bk));
    if (spec.bounds.size() == 1) {
      inst.upper.push_back(IntVec(n, spec.bounds[0]));
    } else {
      inst.upper.emplace_back(spec.bounds.begin() + static_cast<std::ptrdiff_t>(k * n),
                              spec.bounds.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
    }
  }
  inst.C = IntMat(0, n);
  return inst;
}

// ---------------------------------------------------------------------------
// Distance objectives

namespace {

std::vector<Univariate> lp_functions(std::size_t dim, const std::map<std::size_t, Int>& target,
                                     unsigned long p) {
  if (p == 0) throw Error(ErrorCode::kInvalidArgument, "p must be at least 1");
  std::vector<Univariate> out(dim, Univariate::zero());
  for (const auto& [j, v] : target) {
    if (j >= dim) throw Error(ErrorCode::kDimMismatch, "target coordinate out of range");
    out[j] = Univariate::abs_power(Int(1), p, v);
  }
  return out;
}

}  // namespace

Objective lp_objective(std::size_t dim, const std::map<std::size_t, Int>& target, unsigned long p) {
  std::vector<Univariate> fs = lp_functions(dim, target, p);
  std::vector<ObjectiveRow> rows;
  for (std::size_t j = 0; j < dim; ++j) {
    IntVec e(dim);
    e[j] = 1;
    rows.push_back({std::move(e), std::move(fs[j])});
  }
  return Objective::composite(RatVec(dim), std::move(rows));
}

void set_lp_distance(NFoldInstance& inst, const std::map<std::size_t, Int>& target, unsigned long p) {
  const std::size_t n = inst.block_width();
  std::vector<Univariate> fs = lp_functions(n * inst.N, target, p);
  std::vector<std::vector<Univariate>> f(inst.N);
  for (std::size_t i = 0; i < inst.N; ++i) f[i].assign(fs.begin() + static_cast<std::ptrdiff_t>(i * n),
                                                         fs.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
  set_separable(inst, std::move(f));
}

unsigned long linf_q(const Int& nn, const Int& w) {
  if (nn < 1) throw Error(ErrorCode::kInvalidArgument, "Nn must be positive");
  if (w < 1) throw Error(ErrorCode::kInvalidArgument, "w must be positive");
  const Rat base = Rat(1) + Rat(1, 1) / Rat(2 * w);
  Rat power = base;
  unsigned long q = 1;
  while (power <= Rat(nn)) {
    power *= base;
    ++q;
  }
  return q;
}

// ---------------------------------------------------------------------------
// Decoding

namespace {

// Instance coordinate of every augmented cell, see DecodingModel.
std::vector<std::optional<std::size_t>> decoding_positions(std::size_t L, std::size_t M, std::size_t N) {
  const std::size_t cells = L * M;
  const std::size_t width = cells + M + L;
  std::vector<std::optional<std::size_t>> pos((L + 1) * (M + 1) * (N + 1));
  for (std::size_t i = 0; i <= L; ++i) {
    for (std::size_t j = 0; j <= M; ++j) {
      for (std::size_t k = 0; k <= N; ++k) {
        const int slack = (i == L) + (j == M) + (k == N);
        if (slack > 1) continue;
        std::size_t at;
        if (k == N) at = N * width + i * M + j;
        else if (i == L) at = k * width + cells + j;
        else if (j == M) at = k * width + cells + M + i;
        else at = k * width + i * M + j;
        pos[(i * (M + 1) + j) * (N + 1) + k] = at;
      }
    }
  }
  return pos;
}

}  // namespace

void DecodingSpec::validate() const {
  if (L == 0 || M == 0 || N == 0) throw Error(ErrorCode::kInvalidArgument, "array dimensions must be positive");
  if (u < 0) throw Error(ErrorCode::kInvalidArgument, "alphabet bound must be nonnegative");
  const Int longest = u * static_cast<unsigned long>(std::max({L, M, N}));
  if (U < longest) {
    throw Error(ErrorCode::kInvalidArgument, "U below the largest possible line sum " + longest.get_str());
  }
  if (received.size() != augmented_size()) throw Error(ErrorCode::kDimMismatch, "received array size");
  const Int top = std::max(u, U);
  for (const Int& x : received)
    if (sgn(x) < 0 || x > top) throw Error(ErrorCode::kInvalidArgument, "received entry out of range");
  if (p && *p == 0) throw Error(ErrorCode::kInvalidArgument, "p must be at least 1");
  if (coords) {
    const auto pos = decoding_positions(L, M, N);
    for (std::size_t c : *coords)
      if (c >= augmented_size() || !pos[c]) throw Error(ErrorCode::kInvalidArgument, "coordinate is not a checksum cell");
  }
}

std::vector<std::size_t> DecodingSpec::coordinate_set() const {
  std::vector<std::size_t> out;
  if (coords) {
    out = *coords;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  const auto pos = decoding_positions(L, M, N);
  for (std::size_t c = 0; c < pos.size(); ++c)
    if (pos[c]) out.push_back(c);
  return out;
}

IntVec encode_message(std::size_t L, std::size_t M, std::size_t N, const Int& U, const IntVec& message) {
  if (message.size() != L * M * N) throw Error(ErrorCode::kDimMismatch, "message size");
  auto at = [&](std::size_t i, std::size_t j, std::size_t k) { return (i * (M + 1) + j) * (N + 1) + k; };
  IntVec out((L + 1) * (M + 1) * (N + 1));
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j < M; ++j)
      for (std::size_t k = 0; k < N; ++k) out[at(i, j, k)] = message[(i * M + j) * N + k];
  auto fill = [&](std::size_t slack_cell, const Int& line) {
    if (line > U) throw Error(ErrorCode::kInvalidArgument, "line sum exceeds U");
    out[slack_cell] = U - line;
  };
  for (std::size_t j = 0; j < M; ++j)
    for (std::size_t k = 0; k < N; ++k) {
      Int line = 0;
      for (std::size_t i = 0; i < L; ++i) line += out[at(i, j, k)];
      fill(at(L, j, k), line);
    }
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t k = 0; k < N; ++k) {
      Int line = 0;
      for (std::size_t j = 0; j < M; ++j) line += out[at(i, j, k)];
      fill(at(i, M, k), line);
    }
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j < M; ++j) {
      Int line = 0;
      for (std::size_t k = 0; k < N; ++k) line += out[at(i, j, k)];
      fill(at(i, j, N), line);
    }
  return out;
}

DecodingModel build_decoding(const DecodingSpec& spec) {
  spec.validate();
  const std::size_t L = spec.L, M = spec.M, N = spec.N;
  const std::size_t cells = L * M;
  const std::size_t width = cells + M + L;
  const Int& U = spec.U;

  NFoldInstance inst;
  // Rows: L row-lines (sum over j, slack (i, M)), then M column-lines (sum over i, slack (L, j)).
  inst.A = IntMat(L + M, width);
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < M; ++j) {
      inst.A(i, i * M + j) = 1;
      inst.A(L + j, i * M + j) = 1;
    }
    inst.A(i, cells + M + i) = 1;
  }
  for (std::size_t j = 0; j < M; ++j) inst.A(L + j, cells + j) = 1;
  inst.B = IntMat(cells, width);
  for (std::size_t c = 0; c < cells; ++c) inst.B(c, c) = 1;
  inst.N = N + 1;
  inst.b0 = IntVec(cells, U);
  for (std::size_t k = 0; k < N; ++k) {
    inst.b.push_back(IntVec(L + M, U));
    IntVec up(width, U);
    std::fill(up.begin(), up.begin() + static_cast<std::ptrdiff_t>(cells), spec.u);
    inst.upper.push_back(std::move(up));
  }
  // The last layer carries the slack of the lines along k; its own rows only
  // bound sums of M (resp. L) entries that are each at most U.
  const Int row_total = U * static_cast<unsigned long>(M);
  const Int col_total = U * static_cast<unsigned long>(L);
  IntVec last_b;
  for (std::size_t i = 0; i < L; ++i) last_b.push_back(row_total);
  for (std::size_t j = 0; j < M; ++j) last_b.push_back(col_total);
  inst.b.push_back(std::move(last_b));
  IntVec last_up(width, U);
  for (std::size_t j = 0; j < M; ++j) last_up[cells + j] = col_total;
  for (std::size_t i = 0; i < L; ++i) last_up[cells + M + i] = row_total;
  inst.upper.push_back(std::move(last_up));

  DecodingModel out;
  out.position = decoding_positions(L, M, N);
  std::map<std::size_t, Int> target;
  for (std::size_t c : spec.coordinate_set()) target[*out.position[c]] = spec.received[c];
  unsigned long p = 0;
  if (spec.p) {
    p = *spec.p;
  } else {
    Int w = 0;
    for (const IntVec& up : inst.upper)
      for (const Int& x : up) w = std::max(w, x);
    const Int nn = Int(static_cast<unsigned long>(inst.N * width));
    out.q = linf_q(nn, w < 1 ? Int(1) : w);
    p = *out.q;
  }
  set_lp_distance(inst, target, p);
  out.instance = std::move(inst);
  return out;
}

DecodeResult decode(const DecodingSpec& spec, const NFoldOptions& opts) {
  DecodingModel model = build_decoding(spec);
  const NFoldInstance& inst = model.instance;
  NFoldOptions direct = opts;
  direct.direct_threshold = std::max(direct.direct_threshold, inst.N * inst.block_width());

  DecodeResult out;
  out.q = model.q;
  out.solve = solve_nfold(inst, direct);
  out.augmented.assign(spec.augmented_size(), Int(0));
  for (std::size_t c = 0; c < model.position.size(); ++c)
    if (model.position[c]) out.augmented[c] = out.solve.point[*model.position[c]];
  const std::size_t L = spec.L, M = spec.M, N = spec.N;
  out.message.resize(L * M * N);
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j < M; ++j)
      for (std::size_t k = 0; k < N; ++k) out.message[(i * M + j) * N + k] = out.augmented[spec.augmented_index(i, j, k)];

  out.distance = 0;
  for (std::size_t c : spec.coordinate_set()) {
    Int diff = abs(out.augmented[c] - spec.received[c]);
    if (!spec.p) {
      if (diff > out.distance) out.distance = diff;
    } else {
      Int power;
      mpz_pow_ui(power.get_mpz_t(), diff.get_mpz_t(), *spec.p);
      out.distance += power;
    }
  }
  return out;
}

}  // namespace graver_opt
