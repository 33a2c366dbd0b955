#include "graver_opt/twostage.hpp"

#include <algorithm>
#include <set>

#include "graver_opt/graver.hpp"
#include "graver_opt/linalg.hpp"

namespace graver_opt {

void TwoStageInstance::validate() const {
  const std::size_t d = T.rows();
  if (W.rows() != d) throw Error(ErrorCode::kDimMismatch, "T and W row counts differ");
  if (N == 0) throw Error(ErrorCode::kInvalidArgument, "N must be positive");
  if (b.size() != N) throw Error(ErrorCode::kDimMismatch, "need one right-hand side per scenario");
  for (const IntVec& bi : b)
    if (bi.size() != d) throw Error(ErrorCode::kDimMismatch, "scenario right-hand side length");
  if (ux.size() != m()) throw Error(ErrorCode::kDimMismatch, "ux length");
  if (uy.size() != N) throw Error(ErrorCode::kDimMismatch, "need one uy per scenario");
  for (const IntVec& u : uy)
    if (u.size() != n()) throw Error(ErrorCode::kDimMismatch, "uy length");
  const std::size_t s = C.rows();
  if (D.rows() != s) throw Error(ErrorCode::kDimMismatch, "C and D row counts differ");
  if (s > 0 && (C.cols() != m() || D.cols() != n())) {
    throw Error(ErrorCode::kDimMismatch, "objective row lengths");
  }
  if (!first_linear.empty() && first_linear.size() != m()) {
    throw Error(ErrorCode::kDimMismatch, "first-stage cost length");
  }
  if (!second_linear.empty()) {
    if (second_linear.size() != N) throw Error(ErrorCode::kDimMismatch, "need one cost per scenario");
    for (const RatVec& h : second_linear)
      if (h.size() != n()) throw Error(ErrorCode::kDimMismatch, "second-stage cost length");
  }
  if (!f.empty()) {
    if (f.size() != N) throw Error(ErrorCode::kDimMismatch, "need one function list per scenario");
    for (const auto& fi : f)
      if (fi.size() != s) throw Error(ErrorCode::kDimMismatch, "one function per objective row");
  }
}

Rat TwoStageInstance::scenario_value(std::size_t i, std::span<const Int> x, std::span<const Int> y) const {
  Rat v = 0;
  if (!second_linear.empty()) v += dot(second_linear[i], y);
  if (!f.empty()) {
    for (std::size_t j = 0; j < C.rows(); ++j) {
      if (f[i][j].kind() == Univariate::Kind::kZero) continue;
      v += f[i][j](dot(C.row(j), x) + dot(D.row(j), y));
    }
  }
  return v;
}

Rat TwoStageInstance::first_stage_value(std::span<const Int> x) const {
  return first_linear.empty() ? Rat(0) : dot(first_linear, x);
}

Rat TwoStageInstance::value(const IntVec& z) const {
  std::span<const Int> all(z);
  const auto x = all.subspan(0, m());
  Rat v = first_stage_value(x);
  for (std::size_t i = 0; i < N; ++i) v += scenario_value(i, x, all.subspan(m() + i * n(), n()));
  return v;
}

IntMat TwoStageInstance::matrix() const { return build_twostage_matrix(T, W, N); }

IntVec TwoStageInstance::rhs() const {
  IntVec out;
  for (const IntVec& bi : b) out.insert(out.end(), bi.begin(), bi.end());
  return out;
}

FeasibleBox TwoStageInstance::box() const {
  IntVec u = ux;
  for (const IntVec& ui : uy) u.insert(u.end(), ui.begin(), ui.end());
  return FeasibleBox::make(matrix(), rhs(), IntVec(m() + N * n()), u);
}

Objective TwoStageInstance::objective() const {
  const std::size_t total = m() + N * n();
  RatVec c(total);
  if (!first_linear.empty()) std::copy(first_linear.begin(), first_linear.end(), c.begin());
  std::vector<ObjectiveRow> rows;
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t off = m() + i * n();
    if (!second_linear.empty()) {
      std::copy(second_linear[i].begin(), second_linear[i].end(), c.begin() + off);
    }
    if (f.empty()) continue;
    for (std::size_t j = 0; j < C.rows(); ++j) {
      if (f[i][j].kind() == Univariate::Kind::kZero) continue;
      IntVec coeffs(total);
      for (std::size_t k = 0; k < m(); ++k) coeffs[k] = C(j, k);
      for (std::size_t k = 0; k < n(); ++k) coeffs[off + k] = D(j, k);
      rows.push_back({std::move(coeffs), f[i][j]});
    }
  }
  return Objective::composite(std::move(c), std::move(rows));
}

IntMat build_twostage_matrix(const IntMat& t, const IntMat& w, std::size_t n_blocks) {
  if (t.rows() != w.rows()) throw Error(ErrorCode::kDimMismatch, "T and W row counts differ");
  if (n_blocks == 0) throw Error(ErrorCode::kInvalidArgument, "N must be positive");
  const std::size_t d = t.rows();
  const std::size_t m = t.cols();
  const std::size_t n = w.cols();
  IntMat out(n_blocks * d, m + n_blocks * n);
  for (std::size_t i = 0; i < n_blocks; ++i) {
    place(out, t, i * d, 0);
    place(out, w, i * d, m + i * n);
  }
  return out;
}

std::vector<IntVec> BuildingBlocks::first_stage() const {
  std::vector<IntVec> out;
  for (const auto& [v, ws] : second_stage) out.push_back(v);
  return out;
}

std::size_t BuildingBlocks::pair_count() const {
  std::size_t total = 0;
  for (const auto& [v, ws] : second_stage) total += ws.size();
  return total;
}

BuildingBlocks extract_building_blocks(const IntMat& t, const IntMat& w, const IntMat& c,
                                       const IntMat& d, std::size_t cap) {
  if (cap < 2) throw Error(ErrorCode::kInvalidArgument, "block cap must be at least 2");
  if (t.rows() != w.rows()) throw Error(ErrorCode::kDimMismatch, "T and W row counts differ");
  const std::size_t m = t.cols();
  const std::size_t n = w.cols();
  const std::size_t s = c.rows();
  if (d.rows() != s || (s > 0 && (c.cols() != m || d.cols() != n))) {
    throw Error(ErrorCode::kDimMismatch, "objective row shapes");
  }
  {
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < s; ++j) {
      std::size_t nonzero = 0;
      bool unit = true;
      for (std::size_t k = 0; k < m; ++k)
        if (sgn(c(j, k)) != 0) ++nonzero, unit = unit && cmpabs(c(j, k), Int(1)) == 0;
      for (std::size_t k = 0; k < n; ++k)
        if (sgn(d(j, k)) != 0) ++nonzero, unit = unit && cmpabs(d(j, k), Int(1)) == 0;
      if (nonzero > 1 || !unit) keep.push_back(j);
    }
    if (keep.size() < s) {
      std::vector<IntVec> cr, dr;
      for (std::size_t j : keep) {
        cr.push_back(c.row_vec(j));
        dr.push_back(d.row_vec(j));
      }
      return extract_building_blocks(t, w, IntMat::from_rows(cr, m), IntMat::from_rows(dr, n), cap);
    }
  }
  // Rearranged two-stage pair: (T; C) and (W, 0; D, I_s).
  IntMat t_bar(t.rows() + s, m);
  place(t_bar, t, 0, 0);
  if (s > 0) place(t_bar, c, t.rows(), 0);
  IntMat w_bar(t.rows() + s, n + s);
  place(w_bar, w, 0, 0);
  if (s > 0) place(w_bar, d, t.rows(), 0);
  for (std::size_t r = 0; r < s; ++r) w_bar(t.rows() + r, n + r) = 1;

  std::map<IntVec, std::set<IntVec>> found;
  std::map<IntVec, std::set<IntVec>> previous;
  for (std::size_t N = 1; N <= cap; ++N) {
    previous = found;
    const auto g = graver(build_twostage_matrix(t_bar, w_bar, N));
    for (const IntVec& e : g.elements) {
      IntVec v(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(m));
      auto& ws = found[v];
      for (std::size_t i = 0; i < N; ++i) {
        const auto begin = e.begin() + static_cast<std::ptrdiff_t>(m + i * (n + s));
        ws.insert(IntVec(begin, begin + static_cast<std::ptrdiff_t>(n)));
      }
    }
  }
  if (found != previous) {
    throw Error(ErrorCode::kNotStabilized,
                "building blocks still growing at cap " + std::to_string(cap));
  }
  BuildingBlocks out;
  out.m = m;
  out.n = n;
  out.cap = cap;
  for (auto& [v, ws] : found) {
    // Zero second-stage moves are allowed whenever T v = 0.
    if (is_zero(mul(t, v))) ws.insert(IntVec(n));
    out.second_stage[v].assign(ws.begin(), ws.end());
  }
  out.second_stage.try_emplace(IntVec(m), std::vector<IntVec>{IntVec(n)});
  return out;
}

namespace {

struct Assembled {
  Rat value;
  Int alpha;
  IntVec direction;
};

bool better(const Assembled& a, const Assembled& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.alpha != b.alpha) return a.alpha < b.alpha;
  return lex_less(a.direction, b.direction);
}

bool in_range(std::span<const Int> base, const Int& alpha, std::span<const Int> dir,
              std::span<const Int> upper) {
  for (std::size_t k = 0; k < base.size(); ++k) {
    Int v = base[k] + alpha * dir[k];
    if (sgn(v) < 0 || v > upper[k]) return false;
  }
  return true;
}

// Best assembled vector for a fixed step length alpha, if any improves.
std::optional<Assembled> best_at(const IntVec& z, const Int& alpha, const BuildingBlocks& blocks,
                                 const TwoStageInstance& inst, const Rat& current) {
  const std::size_t m = inst.m();
  const std::size_t n = inst.n();
  std::span<const Int> all(z);
  const auto x = all.subspan(0, m);
  std::optional<Assembled> best;
  for (const auto& [v, ws] : blocks.second_stage) {
    if (!in_range(x, alpha, v, inst.ux)) continue;
    IntVec xn(x.begin(), x.end());
    axpy(xn, alpha, v);
    Rat total = inst.first_stage_value(xn);
    IntVec dir = v;
    bool feasible = true;
    for (std::size_t i = 0; i < inst.N && feasible; ++i) {
      const auto y = all.subspan(m + i * n, n);
      std::optional<Rat> best_val;
      const IntVec* best_w = nullptr;
      for (const IntVec& w : ws) {
        if (!in_range(y, alpha, w, inst.uy[i])) continue;
        IntVec yn(y.begin(), y.end());
        axpy(yn, alpha, w);
        Rat val = inst.scenario_value(i, xn, yn);
        // ws is in canonical order, so the first minimum wins ties.
        if (!best_val || val < *best_val) {
          best_val = std::move(val);
          best_w = &w;
        }
      }
      if (!best_w) {
        feasible = false;
        break;
      }
      total += *best_val;
      dir.insert(dir.end(), best_w->begin(), best_w->end());
    }
    if (!feasible || is_zero(dir) || total >= current) continue;
    Assembled cand{std::move(total), alpha, std::move(dir)};
    if (!best || better(cand, *best)) best = std::move(cand);
  }
  return best;
}

Int alpha_limit(const TwoStageInstance& inst) {
  Int top = 0;
  for (const Int& u : inst.ux) top = std::max(top, u);
  for (const IntVec& ui : inst.uy)
    for (const Int& u : ui) top = std::max(top, u);
  return top;
}

void require_feasible(const IntVec& z, const TwoStageInstance& inst) {
  if (!inst.box().contains(z)) throw Error(ErrorCode::kInfeasibleBase, to_string(z));
}

}  // namespace

std::optional<IntVec> improving_vector(const IntVec& z, const BuildingBlocks& blocks,
                                       const TwoStageInstance& inst) {
  inst.validate();
  require_feasible(z, inst);
  auto best = best_at(z, Int(1), blocks, inst, inst.value(z));
  if (!best) return std::nullopt;
  return best->direction;
}

TwoStageStep greedy_step_twostage(const IntVec& z, const BuildingBlocks& blocks,
                                  const TwoStageInstance& inst, const SolveOptions&) {
  inst.validate();
  require_feasible(z, inst);
  const Rat current = inst.value(z);
  std::optional<Assembled> best;
  const Int top = alpha_limit(inst);
  for (Int alpha = 1; alpha <= top; ++alpha) {
    auto cand = best_at(z, alpha, blocks, inst, current);
    if (cand && (!best || better(*cand, *best))) best = std::move(cand);
  }
  TwoStageStep step;
  step.new_value = current;
  if (best) {
    step.direction = std::move(best->direction);
    step.steplen = best->alpha;
    step.new_value = best->value;
  }
  return step;
}

namespace {

IntMat nonaffine_rows(const TwoStageInstance& inst, const IntMat& rows) {
  std::vector<IntVec> out;
  for (std::size_t j = 0; j < inst.C.rows(); ++j) {
    bool affine = true;
    for (std::size_t i = 0; i < inst.f.size() && affine; ++i) affine = inst.f[i][j].is_affine();
    if (!affine) out.push_back(rows.row_vec(j));
  }
  return IntMat::from_rows(out, rows.cols());
}

// Greedy augmentation with building blocks from z0 to the zero step.
TwoStageResult augment(const IntVec& z0, const BuildingBlocks& blocks, const TwoStageInstance& inst,
                       const SolveOptions& opts) {
  TwoStageResult res;
  res.point = z0;
  res.value = inst.value(z0);
  res.basis_size = blocks.pair_count();
  const std::size_t dim = inst.m() + inst.N * inst.n();
  res.trace.n_eff = dim >= 2 ? 2 * dim - 2 : 1;
  for (;;) {
    auto step = greedy_step_twostage(res.point, blocks, inst, opts);
    res.trace.directions_evaluated += blocks.pair_count();
    if (step.is_zero()) break;
    axpy(res.point, step.steplen, step.direction);
    res.trace.iterations.push_back(
        {res.value, step.new_value, step.direction, Rat(step.steplen), StepKind::kGreedy});
    res.value = step.new_value;
  }
  return res;
}

}  // namespace

namespace {

IntVec phase_one_slack(const TwoStageInstance& inst, const TwoStageOptions& opts) {
  const std::size_t d = inst.T.rows();
  const std::size_t n = inst.n();
  TwoStageInstance slack;
  slack.T = inst.T;
  slack.N = inst.N;
  slack.b = inst.b;
  slack.ux = inst.ux;
  slack.W = IntMat(d, n + 2 * d);
  place(slack.W, inst.W, 0, 0);
  for (std::size_t r = 0; r < d; ++r) {
    slack.W(r, n + r) = 1;
    slack.W(r, n + d + r) = -1;
  }
  slack.C = IntMat(0, inst.m());
  slack.D = IntMat(0, n + 2 * d);
  IntVec z0(inst.m());
  for (std::size_t i = 0; i < inst.N; ++i) {
    IntVec u = inst.uy[i];
    u.resize(n + 2 * d, l1_norm(inst.b[i]));
    slack.uy.push_back(std::move(u));
    RatVec h(n + 2 * d);
    for (std::size_t k = n; k < n + 2 * d; ++k) h[k] = 1;
    slack.second_linear.push_back(std::move(h));
    IntVec y(n + 2 * d);
    for (std::size_t r = 0; r < d; ++r) {
      const Int& v = inst.b[i][r];
      if (sgn(v) > 0) y[n + r] = v;
      else y[n + d + r] = -v;
    }
    z0.insert(z0.end(), y.begin(), y.end());
  }
  const BuildingBlocks blocks =
      extract_building_blocks(slack.T, slack.W, slack.C, slack.D, opts.block_cap);
  auto res = augment(z0, blocks, slack, opts.solve);
  if (sgn(res.value) != 0) {
    throw Error(ErrorCode::kInfeasible, "minimal total slack " + to_string(res.value));
  }
  IntVec out(res.point.begin(), res.point.begin() + static_cast<std::ptrdiff_t>(inst.m()));
  for (std::size_t i = 0; i < inst.N; ++i) {
    const auto begin = res.point.begin() + static_cast<std::ptrdiff_t>(inst.m() + i * (n + 2 * d));
    out.insert(out.end(), begin, begin + static_cast<std::ptrdiff_t>(n));
  }
  return out;
}

// Shifted copy x' = x - lx, y' = y - ly with bounds relaxed to contain z0 and
// the violation dist(., [0, u]) of each original coordinate as objective.
IntVec phase_one_violation(const TwoStageInstance& inst, const TwoStageOptions& opts) {
  const std::size_t m = inst.m();
  const std::size_t n = inst.n();
  const auto z0 = integer_solution(inst.matrix(), inst.rhs());
  if (!z0) throw Error(ErrorCode::kInfeasible, "scenario equations have no integer solution");
  if (inst.box().contains(*z0)) return *z0;

  IntVec shift(z0->size());
  for (std::size_t k = 0; k < shift.size(); ++k) shift[k] = std::min(Int(0), (*z0)[k]);
  std::span<const Int> sh(shift);
  const IntVec tx = mul(inst.T, sh.subspan(0, m));

  TwoStageInstance rel;
  rel.T = inst.T;
  rel.W = inst.W;
  rel.N = inst.N;
  rel.C = IntMat(m + n, m);
  rel.D = IntMat(m + n, n);
  for (std::size_t k = 0; k < m; ++k) rel.C(k, k) = 1;
  for (std::size_t k = 0; k < n; ++k) rel.D(m + k, k) = 1;
  rel.ux.resize(m);
  for (std::size_t k = 0; k < m; ++k) rel.ux[k] = std::max(inst.ux[k], (*z0)[k]) - shift[k];
  for (std::size_t i = 0; i < inst.N; ++i) {
    const std::size_t off = m + i * n;
    rel.b.push_back(sub(sub(inst.b[i], tx), mul(inst.W, sh.subspan(off, n))));
    IntVec u(n);
    for (std::size_t k = 0; k < n; ++k) u[k] = std::max(inst.uy[i][k], (*z0)[off + k]) - shift[off + k];
    rel.uy.push_back(std::move(u));
    // First-stage violation is charged once, in scenario 0.
    std::vector<Univariate> fi;
    for (std::size_t k = 0; k < m; ++k) {
      fi.push_back(i == 0 ? distance_to_interval(-shift[k], inst.ux[k] - shift[k]) : Univariate::zero());
    }
    for (std::size_t k = 0; k < n; ++k) {
      fi.push_back(distance_to_interval(-shift[off + k], inst.uy[i][k] - shift[off + k]));
    }
    rel.f.push_back(std::move(fi));
  }
  const BuildingBlocks blocks = extract_building_blocks(rel.T, rel.W, rel.C, rel.D, opts.block_cap);
  auto res = augment(sub(*z0, shift), blocks, rel, opts.solve);
  if (sgn(res.value) != 0) {
    throw Error(ErrorCode::kInfeasible, "minimal bound violation " + to_string(res.value));
  }
  return add(res.point, shift);
}

}  // namespace

IntVec twostage_phase_one(const TwoStageInstance& inst, const TwoStageOptions& opts) {
  inst.validate();
  return opts.phase_one == PhaseOneMethod::kSlack ? phase_one_slack(inst, opts)
                                                   : phase_one_violation(inst, opts);
}

TwoStageResult solve_twostage(const TwoStageInstance& inst, const TwoStageOptions& opts) {
  inst.validate();
  const BuildingBlocks blocks = extract_building_blocks(
      inst.T, inst.W, nonaffine_rows(inst, inst.C), nonaffine_rows(inst, inst.D), opts.block_cap);
  const IntVec z0 = twostage_phase_one(inst, opts);
  return augment(z0, blocks, inst, opts.solve);
}

}  // namespace graver_opt
