#include "graver_opt/nfold.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "graver_opt/linalg.hpp"

namespace graver_opt {

namespace {

std::size_t shared_rows(const NFoldInstance& inst) { return inst.C.rows(); }

bool unit_rows(const IntMat& c) {
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

IntMat block_diag(const IntMat& c, std::size_t n_blocks) {
  IntMat out(c.rows() * n_blocks, c.cols() * n_blocks);
  for (std::size_t i = 0; i < n_blocks; ++i) place(out, c, i * c.rows(), i * c.cols());
  return out;
}

std::size_t max_type(const std::vector<IntVec>& elements, std::size_t width) {
  std::size_t t = 0;
  for (const IntVec& v : elements) t = std::max(t, block_type(v, width));
  return t;
}

}  // namespace

void NFoldInstance::validate() const {
  const std::size_t n = A.cols();
  if (B.cols() != n) throw Error(ErrorCode::kDimMismatch, "A and B column counts differ");
  if (N == 0) throw Error(ErrorCode::kInvalidArgument, "N must be positive");
  if (b0.size() != B.rows()) throw Error(ErrorCode::kDimMismatch, "b0 length");
  if (b.size() != N) throw Error(ErrorCode::kDimMismatch, "need one right-hand side per block");
  for (const IntVec& bi : b)
    if (bi.size() != A.rows()) throw Error(ErrorCode::kDimMismatch, "block right-hand side length");
  if (upper.size() != N) throw Error(ErrorCode::kDimMismatch, "need one upper bound per block");
  for (const IntVec& u : upper)
    if (u.size() != n) throw Error(ErrorCode::kDimMismatch, "block upper bound length");
  if (C.rows() > 0 && C.cols() != n) throw Error(ErrorCode::kDimMismatch, "objective rows length");
  if (!linear.empty()) {
    if (linear.size() != N) throw Error(ErrorCode::kDimMismatch, "need one linear cost per block");
    for (const RatVec& c : linear)
      if (c.size() != n) throw Error(ErrorCode::kDimMismatch, "linear cost length");
  }
  if (!f.empty()) {
    if (f.size() != N) throw Error(ErrorCode::kDimMismatch, "need one function list per block");
    for (const auto& fi : f)
      if (fi.size() != C.rows()) throw Error(ErrorCode::kDimMismatch, "one function per shared row");
  }
}

IntMat NFoldInstance::matrix() const { return build_nfold_matrix(A, B, N); }

IntVec NFoldInstance::rhs() const {
  IntVec out = b0;
  for (const IntVec& bi : b) out.insert(out.end(), bi.begin(), bi.end());
  return out;
}

FeasibleBox NFoldInstance::box() const {
  IntVec u;
  for (const IntVec& ui : upper) u.insert(u.end(), ui.begin(), ui.end());
  return FeasibleBox::make(matrix(), rhs(), IntVec(N * A.cols()), u);
}

Objective NFoldInstance::objective() const {
  const std::size_t n = A.cols();
  RatVec c(N * n);
  std::vector<ObjectiveRow> rows;
  for (std::size_t i = 0; i < N; ++i) {
    if (!linear.empty()) std::copy(linear[i].begin(), linear[i].end(), c.begin() + i * n);
    if (f.empty()) continue;
    for (std::size_t j = 0; j < C.rows(); ++j) {
      if (f[i][j].kind() == Univariate::Kind::kZero) continue;
      IntVec coeffs(N * n);
      for (std::size_t k = 0; k < n; ++k) coeffs[i * n + k] = C(j, k);
      rows.push_back({std::move(coeffs), f[i][j]});
    }
  }
  return Objective::composite(std::move(c), std::move(rows));
}

IntMat build_nfold_matrix(const IntMat& a, const IntMat& b, std::size_t n_blocks) {
  if (a.cols() != b.cols()) throw Error(ErrorCode::kDimMismatch, "A and B column counts differ");
  if (n_blocks == 0) throw Error(ErrorCode::kInvalidArgument, "N must be positive");
  const std::size_t n = a.cols();
  IntMat out(b.rows() + n_blocks * a.rows(), n_blocks * n);
  for (std::size_t i = 0; i < n_blocks; ++i) {
    place(out, b, 0, i * n);
    place(out, a, b.rows() + i * a.rows(), i * n);
  }
  return out;
}

ComposedNFold compose_with_C(const IntMat& a, const IntMat& b, const IntMat& c, std::size_t n_blocks) {
  const std::size_t n = a.cols();
  const std::size_t s = c.rows();
  if (b.cols() != n || (s > 0 && c.cols() != n)) {
    throw Error(ErrorCode::kDimMismatch, "A, B and C column counts differ");
  }
  const std::size_t N = n_blocks;
  const std::size_t da = a.rows();
  const std::size_t db = b.rows();

  ComposedNFold out;
  out.a_bar = IntMat(da + s, n + s);
  place(out.a_bar, a, 0, 0);
  if (s > 0) place(out.a_bar, c, da, 0);
  for (std::size_t t = 0; t < s; ++t) out.a_bar(da + t, n + t) = 1;
  out.b_bar = IntMat(db, n + s);
  place(out.b_bar, b, 0, 0);

  out.matrix = IntMat(db + N * (da + s), N * (n + s));
  for (std::size_t i = 0; i < N; ++i) {
    place(out.matrix, b, 0, i * n);
    place(out.matrix, a, db + i * da, i * n);
    if (s > 0) place(out.matrix, c, db + N * da + i * s, i * n);
    for (std::size_t t = 0; t < s; ++t) out.matrix(db + N * da + i * s + t, N * n + i * s + t) = 1;
  }

  for (std::size_t r = 0; r < db; ++r) out.row_perm.push_back(r);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t t = 0; t < da; ++t) out.row_perm.push_back(db + i * (da + s) + t);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t t = 0; t < s; ++t) out.row_perm.push_back(db + i * (da + s) + da + t);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < n; ++j) out.col_perm.push_back(i * (n + s) + j);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t t = 0; t < s; ++t) out.col_perm.push_back(i * (n + s) + n + t);
  return out;
}

LiftedGraver make_lifted_graver(const IntMat& a, const IntMat& b, std::size_t cap) {
  if (cap < 1) throw Error(ErrorCode::kInvalidArgument, "graver cap must be positive");
  const std::size_t n = a.cols();
  std::map<std::size_t, std::vector<IntVec>> cache;
  auto basis_at = [&](std::size_t N) -> const std::vector<IntVec>& {
    auto it = cache.find(N);
    if (it == cache.end()) it = cache.emplace(N, graver(build_nfold_matrix(a, b, N)).elements).first;
    return it->second;
  };
  for (std::size_t g = 1; g <= cap; ++g) {
    if (max_type(basis_at(g + 1), n) <= g) {
      return LiftedGraver{a, b, g, n, basis_at(g)};
    }
  }
  throw Error(ErrorCode::kNotStabilized, "Graver complexity exceeds cap " + std::to_string(cap));
}

std::size_t graver_complexity(const IntMat& a, const IntMat& b, std::size_t cap) {
  return make_lifted_graver(a, b, cap).generator_type_bound;
}

GraverBasis lift_graver(const LiftedGraver& seed, std::size_t n_blocks) {
  if (n_blocks < seed.generator_type_bound) {
    throw Error(ErrorCode::kNTooSmall, "N = " + std::to_string(n_blocks) + " below the type bound " +
                                           std::to_string(seed.generator_type_bound));
  }
  const std::size_t n = seed.block_width;
  std::set<IntVec> out;
  for (const IntVec& v : seed.seed_elements) {
    std::vector<IntVec> blocks;
    for (const IntVec& blk : split_blocks(v, n))
      if (!is_zero(blk)) blocks.push_back(blk);
    const std::size_t k = blocks.size();
    if (k == 0 || k > n_blocks) continue;
    // Every increasing choice of k slots among n_blocks.
    std::vector<std::size_t> slot(k);
    for (std::size_t i = 0; i < k; ++i) slot[i] = i;
    while (true) {
      IntVec w(n_blocks * n);
      for (std::size_t i = 0; i < k; ++i)
        std::copy(blocks[i].begin(), blocks[i].end(), w.begin() + slot[i] * n);
      out.insert(std::move(w));
      std::size_t i = k;
      while (i > 0 && slot[i - 1] == n_blocks - k + i - 1) --i;
      if (i == 0) break;
      ++slot[i - 1];
      for (std::size_t j = i; j < k; ++j) slot[j] = slot[j - 1] + 1;
    }
  }
  GraverBasis basis;
  basis.matrix = build_nfold_matrix(seed.a, seed.b, n_blocks);
  basis.elements.assign(out.begin(), out.end());
  basis.lifted = basis.elements;
  basis.coupling = IntMat(0, basis.matrix.cols());
  return basis;
}

std::vector<IntVec> split_blocks(const IntVec& flat, std::size_t block_width) {
  std::vector<IntVec> out;
  if (block_width == 0) return out;
  for (std::size_t start = 0; start < flat.size(); start += block_width) {
    out.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(start),
                     flat.begin() + static_cast<std::ptrdiff_t>(std::min(flat.size(), start + block_width)));
  }
  return out;
}

namespace {

// Shared rows that carry a non-affine function in some block.
IntMat coupled_rows(const NFoldInstance& inst) {
  std::vector<IntVec> coupled;
  for (std::size_t j = 0; j < shared_rows(inst); ++j) {
    bool affine = true;
    for (std::size_t i = 0; i < inst.f.size() && affine; ++i) affine = inst.f[i][j].is_affine();
    if (!affine) coupled.push_back(inst.C.row_vec(j));
  }
  return IntMat::from_rows(coupled, inst.block_width());
}

IntMat coupling_matrix(const NFoldInstance& inst) { return block_diag(coupled_rows(inst), inst.N); }

}  // namespace

NFoldBasis nfold_basis(const NFoldInstance& inst, const NFoldOptions& opts) {
  inst.validate();
  if (opts.basis) {
    const NFoldBasis& given = *opts.basis;
    if (given.basis.matrix == inst.matrix() && given.basis.coupling == coupling_matrix(inst)) return given;
  }
  const std::size_t n = inst.block_width();
  const std::size_t N = inst.N;

  const IntMat c = coupled_rows(inst);
  const IntMat c_flat = block_diag(c, N);
  const IntMat flat = inst.matrix();

  NFoldBasis out;
  if (N * n <= opts.direct_threshold) {
    out.basis = graver_composite(flat, c_flat);
    return out;
  }

  out.lifted = true;
  out.basis.matrix = flat;
  out.basis.coupling = c_flat;
  std::vector<std::pair<IntVec, IntVec>> pairs;
  if (unit_rows(c)) {
    LiftedGraver seed = make_lifted_graver(inst.A, inst.B, opts.graver_cap);
    out.complexity = seed.generator_type_bound;
    for (IntVec& x : lift_graver(seed, N).elements) {
      IntVec full = x;
      for (std::size_t r = 0; r < c_flat.rows(); ++r) full.push_back(-dot(c_flat.row(r), x));
      pairs.emplace_back(std::move(x), std::move(full));
    }
  } else {
    const ComposedNFold comp = compose_with_C(inst.A, inst.B, c, N);
    LiftedGraver seed = make_lifted_graver(comp.a_bar, comp.b_bar, opts.graver_cap);
    out.complexity = seed.generator_type_bound;
    for (const IntVec& v : lift_graver(seed, N).elements) {
      IntVec full(v.size());
      for (std::size_t col = 0; col < v.size(); ++col) full[col] = v[comp.col_perm[col]];
      IntVec x(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(N * n));
      if (is_zero(x)) continue;
      pairs.emplace_back(std::move(x), std::move(full));
    }
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& l, const auto& r) { return lex_less(l.first, r.first); });
  for (auto& [x, full] : pairs) {
    out.basis.elements.push_back(std::move(x));
    out.basis.lifted.push_back(std::move(full));
  }
  return out;
}

namespace {

// N-fold slack instance: A' = [A, I, -I, 0, 0], B' = [B, 0, 0, I, -I], unit
// cost on every slack, starting point x = 0 with all B-slack in the first block.
struct SlackInstance {
  NFoldInstance inst;
  IntVec start;
};

SlackInstance slack_instance(const NFoldInstance& src) {
  const std::size_t n = src.block_width();
  const std::size_t da = src.A.rows();
  const std::size_t db = src.B.rows();
  const std::size_t w = n + 2 * da + 2 * db;

  SlackInstance out;
  NFoldInstance& s = out.inst;
  s.N = src.N;
  s.A = IntMat(da, w);
  place(s.A, src.A, 0, 0);
  place(s.A, IntMat::identity(da), 0, n);
  s.B = IntMat(db, w);
  place(s.B, src.B, 0, 0);
  place(s.B, IntMat::identity(db), 0, n + 2 * da);
  for (std::size_t r = 0; r < da; ++r) s.A(r, n + da + r) = -1;
  for (std::size_t r = 0; r < db; ++r) s.B(r, n + 2 * da + db + r) = -1;
  s.b0 = src.b0;
  s.b = src.b;

  Int total = l1_norm(src.b0);
  for (const IntVec& bi : src.b) total += l1_norm(bi);
  RatVec cost(w);
  for (std::size_t k = n; k < w; ++k) cost[k] = 1;
  for (std::size_t i = 0; i < src.N; ++i) {
    IntVec u = src.upper[i];
    u.resize(w, total);
    s.upper.push_back(std::move(u));
    s.linear.push_back(cost);

    IntVec z(w);
    for (std::size_t r = 0; r < da; ++r) {
      const Int& v = src.b[i][r];
      if (sgn(v) > 0) z[n + r] = v;
      else z[n + da + r] = -v;
    }
    if (i == 0) {
      for (std::size_t r = 0; r < db; ++r) {
        const Int& v = src.b0[r];
        if (sgn(v) > 0) z[n + 2 * da + r] = v;
        else z[n + 2 * da + db + r] = -v;
      }
    }
    out.start.insert(out.start.end(), z.begin(), z.end());
  }
  s.C = IntMat(0, w);
  return out;
}

IntVec slack_phase_one(const NFoldInstance& inst, const NFoldOptions& opts) {
  SlackInstance slack = slack_instance(inst);
  const NFoldBasis nb = nfold_basis(slack.inst, opts);
  auto res = solve_ip_greedy(slack.start, nb.basis, slack.inst.objective(), slack.inst.box(), opts.solve);
  if (sgn(res.value) != 0) {
    throw Error(ErrorCode::kInfeasible, "minimal total slack " + to_string(res.value));
  }
  const std::size_t n = inst.block_width();
  const std::size_t w = slack.inst.block_width();
  IntVec x;
  for (std::size_t i = 0; i < inst.N; ++i) {
    x.insert(x.end(), res.point.begin() + static_cast<std::ptrdiff_t>(i * w),
             res.point.begin() + static_cast<std::ptrdiff_t>(i * w + n));
  }
  return x;
}

IntVec phase_one_with(const NFoldInstance& inst, const GraverBasis& basis, const NFoldOptions& opts) {
  if (opts.phase_one == PhaseOneMethod::kSlack) return slack_phase_one(inst, opts);
  return find_feasible_point(inst.box(), basis.elements, opts.solve);
}

}  // namespace

IntVec phase_one(const NFoldInstance& inst, const NFoldOptions& opts) {
  inst.validate();
  if (opts.phase_one == PhaseOneMethod::kSlack) return slack_phase_one(inst, opts);
  NFoldInstance plain = inst;
  plain.C = IntMat(0, inst.block_width());
  plain.f.clear();
  const NFoldBasis nb = nfold_basis(plain, opts);
  return find_feasible_point(inst.box(), nb.basis.elements, opts.solve);
}

NFoldResult solve_nfold(const NFoldInstance& inst, const NFoldOptions& opts) {
  const NFoldBasis nb = nfold_basis(inst, opts);
  const IntVec z0 = phase_one_with(inst, nb.basis, opts);
  auto res = solve_ip_greedy(z0, nb.basis, inst.objective(), inst.box(), opts.solve);
  NFoldResult out;
  out.point = std::move(res.point);
  out.value = std::move(res.value);
  out.trace = std::move(res.trace);
  out.basis_size = nb.basis.size();
  out.lifted = nb.lifted;
  out.complexity = nb.complexity;
  return out;
}

}  // namespace graver_opt
