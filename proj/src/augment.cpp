#include "graver_opt/augment.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "graver_opt/linalg.hpp"

namespace graver_opt {

FeasibleBox FeasibleBox::make(IntMat a, IntVec b, IntVec lower, const IntVec& upper) {
  if (a.cols() != lower.size() || upper.size() != lower.size() || a.rows() != b.size()) {
    throw Error(ErrorCode::kDimMismatch, "box dimensions");
  }
  FeasibleBox box{std::move(a), std::move(b), std::move(lower), {}};
  for (const Int& u : upper) box.upper.emplace_back(Rat(u));
  return box;
}

bool FeasibleBox::bounded() const {
  return std::all_of(upper.begin(), upper.end(), [](const auto& u) { return u.has_value(); });
}

IntVec FeasibleBox::integer_upper() const {
  IntVec out;
  for (std::size_t i = 0; i < upper.size(); ++i) {
    if (!upper[i]) throw Error(ErrorCode::kUnboundedBox, "coordinate " + std::to_string(i));
    out.push_back(floor_rat(*upper[i]));
  }
  return out;
}

bool FeasibleBox::within_bounds(std::span<const Int> z) const {
  if (z.size() != dim()) return false;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] < lower[i]) return false;
    if (upper[i] && Rat(z[i]) > *upper[i]) return false;
  }
  return true;
}

bool FeasibleBox::within_bounds(std::span<const Rat> z) const {
  if (z.size() != dim()) return false;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] < Rat(lower[i])) return false;
    if (upper[i] && z[i] > *upper[i]) return false;
  }
  return true;
}

bool FeasibleBox::contains(std::span<const Int> z) const {
  return within_bounds(z) && mul(A, z) == b;
}

bool FeasibleBox::contains(std::span<const Rat> z) const {
  if (!within_bounds(z)) return false;
  RatVec az = mul(A, z);
  for (std::size_t r = 0; r < b.size(); ++r)
    if (az[r] != Rat(b[r])) return false;
  return true;
}

Int line_search(const std::function<Rat(const Int&)>& f, const Int& l, const Int& u) {
  if (l > u) throw Error(ErrorCode::kEmptyInterval, "line search on an empty interval");
  Int lo = l;
  Int hi = u;
  while (hi - lo >= 2) {
    Int m = floor_div(lo + hi, 2);
    const Rat fm = f(m);
    if (f(m - 1) <= fm) {
      hi = m;
    } else if (fm > f(m + 1)) {
      lo = m + 1;
    } else {
      return m;
    }
  }
  if (lo == hi) return lo;
  return f(lo) <= f(hi) ? lo : hi;
}

namespace {

void require_within(std::span<const Int> z, const FeasibleBox& box) {
  if (!box.within_bounds(z)) throw Error(ErrorCode::kInfeasibleBase, to_string(z));
}

void require_within(std::span<const Rat> z, const FeasibleBox& box) {
  if (!box.within_bounds(z)) throw Error(ErrorCode::kInfeasibleBase, "point outside the box");
}

// Exact rational bound on alpha; callers round down in integer mode.
std::optional<Rat> rational_step(std::span<const Rat> z, std::span<const Int> g,
                                 const FeasibleBox& box) {
  std::optional<Rat> best;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int s = sgn(g[i]);
    if (s == 0) continue;
    std::optional<Rat> room;
    if (s > 0) {
      if (box.upper[i]) room = (*box.upper[i] - z[i]) / Rat(g[i]);
    } else {
      room = (z[i] - Rat(box.lower[i])) / Rat(-g[i]);
    }
    if (room && (!best || *room < *best)) best = room;
  }
  return best;
}

std::optional<Int> integer_step(std::span<const Int> z, std::span<const Int> g,
                                const FeasibleBox& box) {
  std::optional<Int> best;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int s = sgn(g[i]);
    if (s == 0) continue;
    std::optional<Int> room;
    if (s > 0) {
      if (box.upper[i]) room = floor_div(floor_rat(*box.upper[i]) - z[i], g[i]);
    } else {
      room = floor_div(z[i] - box.lower[i], -g[i]);
    }
    if (room && (!best || *room < *best)) best = room;
  }
  return best;
}

template <class Scalar>
struct Candidate {
  Rat value;
  Scalar alpha;
  const IntVec* dir = nullptr;
};

template <class Scalar>
bool better(const Candidate<Scalar>& a, const Candidate<Scalar>& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.alpha != b.alpha) return a.alpha < b.alpha;
  return lex_less(*a.dir, *b.dir);
}

// Runs eval over [0, count) in contiguous chunks and keeps the best candidate.
// The order is total, so the result does not depend on the chunking.
template <class Scalar, class Eval>
std::optional<Candidate<Scalar>> best_of(std::size_t count, unsigned threads, Eval eval) {
  auto scan = [&](std::size_t begin, std::size_t end) {
    std::optional<Candidate<Scalar>> best;
    for (std::size_t i = begin; i < end; ++i) {
      auto c = eval(i);
      if (c && (!best || better(*c, *best))) best = std::move(c);
    }
    return best;
  };
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(1, count / 8));
  if (workers <= 1) return scan(0, count);

  std::vector<std::optional<Candidate<Scalar>>> partial(workers);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        partial[w] = scan(count * w / workers, count * (w + 1) / workers);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::optional<Candidate<Scalar>> best;
  for (auto& p : partial) {
    if (p && (!best || better(*p, *best))) best = std::move(p);
  }
  return best;
}

}  // namespace

std::optional<Int> max_step(std::span<const Int> z, std::span<const Int> g, const FeasibleBox& box) {
  if (g.size() != z.size()) throw Error(ErrorCode::kDimMismatch, "direction dimension");
  require_within(z, box);
  return integer_step(z, g, box);
}

std::optional<Rat> max_step(std::span<const Rat> z, std::span<const Int> g, const FeasibleBox& box) {
  if (g.size() != z.size()) throw Error(ErrorCode::kDimMismatch, "direction dimension");
  require_within(z, box);
  return rational_step(z, g, box);
}

RayEvaluator::RayEvaluator(const Objective& obj, std::span<const Int> z, std::span<const Int> g)
    : lin_base_(dot(obj.linear_part(), z)), lin_slope_(dot(obj.linear_part(), g)) {
  for (const auto& row : obj.rows()) {
    Int y = dot(row.coeffs, z);
    Int k = dot(row.coeffs, g);
    if (sgn(k) == 0 || row.f.kind() == Univariate::Kind::kZero) {
      lin_base_ += row.f(y);
    } else {
      rows_.push_back({&row.f, std::move(y), std::move(k)});
    }
  }
}

Rat RayEvaluator::operator()(const Int& alpha) const {
  Rat v = lin_base_ + lin_slope_ * Rat(alpha);
  for (const Row& r : rows_) v += (*r.f)(r.y + alpha * r.k);
  return v;
}

GreedyStep<Int> greedy_step(std::span<const Int> z, const std::vector<IntVec>& dirs,
                            const Objective& obj, const FeasibleBox& box,
                            const SolveOptions& opts) {
  require_within(z, box);
  const Rat current = obj.eval(z);
  auto eval = [&](std::size_t i) -> std::optional<Candidate<Int>> {
    const IntVec& g = dirs[i];
    if (g.size() != z.size()) throw Error(ErrorCode::kDimMismatch, "direction dimension");
    if (is_zero(g)) return std::nullopt;
    RayEvaluator ray(obj, z, g);
    const auto room = integer_step(z, g, box);
    if (!room) {
      if (!ray.is_linear()) {
        throw Error(ErrorCode::kUnboundedBox, "nonlinear objective along an unbounded ray");
      }
      if (ray.slope() < 0) throw Error(ErrorCode::kUnboundedObjective, to_string(g));
      return std::nullopt;
    }
    if (*room < 1) return std::nullopt;
    Int alpha;
    if (ray.is_linear()) {
      if (ray.slope() >= 0) return std::nullopt;
      alpha = *room;
    } else {
      alpha = line_search(ray, 1, *room);
    }
    Rat value = ray(alpha);
    if (value >= current) return std::nullopt;
    return Candidate<Int>{std::move(value), std::move(alpha), &g};
  };
  auto best = best_of<Int>(dirs.size(), opts.threads, eval);
  GreedyStep<Int> step;
  step.new_value = current;
  if (best) {
    step.direction = *best->dir;
    step.steplen = best->alpha;
    step.new_value = best->value;
  }
  return step;
}

GreedyStep<Rat> greedy_step(std::span<const Rat> z, const std::vector<IntVec>& dirs,
                            const Objective& obj, const FeasibleBox& box,
                            const SolveOptions& opts) {
  require_within(z, box);
  const Rat current = obj.eval(z);
  auto eval = [&](std::size_t i) -> std::optional<Candidate<Rat>> {
    const IntVec& g = dirs[i];
    if (g.size() != z.size()) throw Error(ErrorCode::kDimMismatch, "direction dimension");
    const Rat slope = dot(obj.linear_part(), g);
    if (slope >= 0) return std::nullopt;
    const auto room = rational_step(z, g, box);
    if (!room) throw Error(ErrorCode::kUnboundedObjective, to_string(g));
    if (sgn(*room) == 0) return std::nullopt;
    return Candidate<Rat>{current + *room * slope, *room, &g};
  };
  auto best = best_of<Rat>(dirs.size(), opts.threads, eval);
  GreedyStep<Rat> step;
  step.new_value = current;
  if (best) {
    step.direction = *best->dir;
    step.steplen = best->alpha;
    step.new_value = best->value;
  }
  return step;
}

namespace {

std::size_t bit_length(const Int& x) {
  return sgn(x) == 0 ? 1 : mpz_sizeinbase(x.get_mpz_t(), 2) + 1;
}

std::size_t bit_length(const Rat& q) { return bit_length(q.get_num()) + bit_length(q.get_den()); }

std::size_t encoding_length(const FeasibleBox& box, const Objective& obj) {
  std::size_t bits = 0;
  for (const Int& x : box.A.data()) bits += bit_length(x);
  for (const Int& x : box.b) bits += bit_length(x);
  for (const Int& x : box.lower) bits += bit_length(x);
  for (const auto& u : box.upper) bits += u ? bit_length(*u) : 1;
  for (const Rat& c : obj.linear_part()) bits += bit_length(c);
  for (const auto& row : obj.rows())
    for (const Int& x : row.coeffs) bits += bit_length(x);
  return bits;
}

void fill_h_bound(AugmentTrace& trace, const Objective& obj, const FeasibleBox& box,
                  const SolveOptions& opts) {
  if (!box.bounded()) return;
  trace.h_bound = range_bound(obj, box.lower, box.upper);
  const double log_h = std::log2(trace.h_bound->get_d() + 1.0);
  const double limit = static_cast<double>(opts.h_warning_factor) *
                       static_cast<double>(encoding_length(box, obj));
  if (log_h > limit) {
    trace.warnings.push_back("log2(H) = " + std::to_string(log_h) +
                             " exceeds the encoding-length budget " + std::to_string(limit));
  }
}

}  // namespace

IpResult augment_to_optimum(const IntVec& z0, const std::vector<IntVec>& dirs,
                            const Objective& obj, const FeasibleBox& box, std::size_t n_eff,
                            const SolveOptions& opts) {
  if (obj.dim() != box.dim() || z0.size() != box.dim()) {
    throw Error(ErrorCode::kDimMismatch, "solver dimensions");
  }
  if (!box.contains(z0)) throw Error(ErrorCode::kInfeasibleBase, to_string(z0));
  IpResult res;
  res.point = z0;
  res.value = obj.eval(z0);
  res.basis_size = dirs.size();
  res.trace.n_eff = n_eff;
  fill_h_bound(res.trace, obj, box, opts);
  for (;;) {
    auto step = greedy_step(res.point, dirs, obj, box, opts);
    res.trace.directions_evaluated += dirs.size();
    if (step.is_zero()) break;
    axpy(res.point, step.steplen, step.direction);
    res.trace.iterations.push_back(
        {res.value, step.new_value, step.direction, Rat(step.steplen), StepKind::kGreedy});
    res.value = step.new_value;
  }
  return res;
}

IpResult solve_ip_greedy(const IntVec& z0, const GraverBasis& basis, const Objective& obj,
                         const FeasibleBox& box, const SolveOptions& opts) {
  const std::size_t n = box.dim() + basis.coupling.rows();
  return augment_to_optimum(z0, basis.elements, obj, box, n >= 2 ? 2 * n - 2 : 1, opts);
}

namespace {

// Signed slack columns so that z = lower with slack |b - A lower| is feasible.
struct SlackSystem {
  FeasibleBox box;
  IntVec start;
  std::size_t n = 0;
};

SlackSystem slack_system(const FeasibleBox& box) {
  const std::size_t n = box.dim();
  const std::size_t d = box.A.rows();
  const IntVec residual = sub(box.b, mul(box.A, box.lower));
  const Int total = l1_norm(residual);
  SlackSystem out;
  out.n = n;
  IntMat a(d, n + d);
  place(a, box.A, 0, 0);
  out.start = box.lower;
  out.box.lower = box.lower;
  out.box.upper = box.upper;
  for (std::size_t r = 0; r < d; ++r) {
    a(r, n + r) = sgn(residual[r]) < 0 ? -1 : 1;
    out.start.push_back(abs(residual[r]));
    out.box.lower.push_back(0);
    out.box.upper.emplace_back(Rat(total));
  }
  out.box.A = std::move(a);
  out.box.b = box.b;
  return out;
}

}  // namespace

IntVec find_feasible_point(const FeasibleBox& box, const std::vector<IntVec>& dirs,
                           const SolveOptions& opts) {
  const std::size_t n = box.dim();
  if (box.b.size() != box.A.rows() || box.A.cols() != n) throw Error(ErrorCode::kDimMismatch, "box");
  auto z0 = integer_solution(box.A, box.b);
  if (!z0) throw Error(ErrorCode::kInfeasible, "A z = b has no integer solution");
  if (box.contains(*z0)) return *z0;

  FeasibleBox relaxed = box;
  std::vector<ObjectiveRow> rows;
  for (std::size_t i = 0; i < n; ++i) {
    std::optional<Int> u;
    if (box.upper[i]) u = floor_rat(*box.upper[i]);
    if (u && *u < box.lower[i]) throw Error(ErrorCode::kInfeasible, "empty bound interval");
    IntVec e(n);
    e[i] = 1;
    rows.push_back({std::move(e), distance_to_interval(box.lower[i], u)});
    if ((*z0)[i] < relaxed.lower[i]) relaxed.lower[i] = (*z0)[i];
    if (u && (*z0)[i] > *u) relaxed.upper[i] = Rat((*z0)[i]);
  }
  const Objective violation = Objective::composite(RatVec(n), std::move(rows));
  auto res = augment_to_optimum(*z0, dirs, violation, relaxed, n >= 1 ? 2 * (2 * n) - 2 : 1, opts);
  if (sgn(res.value) != 0) {
    throw Error(ErrorCode::kInfeasible, "minimal bound violation " + to_string(res.value));
  }
  return res.point;
}

IntVec find_feasible_point_slack(const FeasibleBox& box, const SolveOptions& opts) {
  SlackSystem sys = slack_system(box);
  const std::size_t total = sys.box.dim();
  RatVec cost(total);
  for (std::size_t i = sys.n; i < total; ++i) cost[i] = 1;
  const GraverBasis basis = graver(sys.box.A);
  auto res = solve_ip_greedy(sys.start, basis, Objective::linear(cost), sys.box, opts);
  if (sgn(res.value) != 0) {
    throw Error(ErrorCode::kInfeasible, "minimal total slack " + to_string(res.value));
  }
  res.point.resize(sys.n);
  return res.point;
}

RatVec find_feasible_point_lp(const FeasibleBox& box, const SolveOptions& opts) {
  SlackSystem sys = slack_system(box);
  const std::size_t total = sys.box.dim();
  RatVec cost(total);
  for (std::size_t i = sys.n; i < total; ++i) {
    cost[i] = 1;
    sys.box.upper[i].reset();
  }
  const CircuitSet cs = circuits(sys.box.A);
  auto res = solve_lp_circuit(to_rat(sys.start), cs, cost, sys.box, opts);
  if (sgn(res.value) != 0) {
    throw Error(ErrorCode::kInfeasible, "minimal total slack " + to_string(res.value));
  }
  res.point.resize(sys.n);
  return res.point;
}

IpResult solve_ip(const FeasibleBox& box, const Objective& obj, const std::optional<IntVec>& start,
                  PhaseOneMethod phase_one, const SolveOptions& opts) {
  if (!box.bounded()) throw Error(ErrorCode::kUnboundedBox, "integer solves need finite upper bounds");
  const GraverBasis basis = graver_composite(box.A, obj.coupling());
  IntVec z0;
  if (start) {
    z0 = *start;
  } else if (phase_one == PhaseOneMethod::kSlack) {
    z0 = find_feasible_point_slack(box, opts);
  } else {
    z0 = find_feasible_point(box, basis.elements, opts);
  }
  return solve_ip_greedy(z0, basis, obj, box, opts);
}

LpResult solve_lp(const FeasibleBox& box, const RatVec& c, const std::optional<RatVec>& start,
                  const SolveOptions& opts) {
  const CircuitSet cs = circuits(box.A);
  const RatVec z0 = start ? *start : find_feasible_point_lp(box, opts);
  auto res = solve_lp_circuit(z0, cs, c, box, opts);
  res.basis_size = cs.elements.size();
  return res;
}

namespace {

void apply(RatVec& z, const Rat& alpha, std::span<const Int> g) {
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += alpha * g[i];
}

// One support-shrinking move: the first circuit (canonical order) with c.g <= 0
// moving only free coordinates, taken until some coordinate reaches a bound.
bool shrink_once(LpResult& res, const CircuitSet& circuits, const RatVec& c,
                 const FeasibleBox& box) {
  const std::size_t n = box.dim();
  std::vector<bool> free(n);
  for (std::size_t i = 0; i < n; ++i) {
    free[i] = res.point[i] > Rat(box.lower[i]) && (!box.upper[i] || res.point[i] < *box.upper[i]);
  }
  for (const IntVec& g : circuits.elements) {
    res.trace.directions_evaluated += 1;
    const Rat slope = dot(c, g);
    if (slope > 0) continue;
    bool inside = true;
    for (std::size_t i = 0; i < n && inside; ++i)
      if (sgn(g[i]) != 0 && !free[i]) inside = false;
    if (!inside) continue;
    const auto room = rational_step(res.point, g, box);
    if (!room) {
      if (slope < 0) throw Error(ErrorCode::kUnboundedObjective, to_string(g));
      continue;
    }
    apply(res.point, *room, g);
    const Rat value = res.value + *room * slope;
    res.trace.iterations.push_back({res.value, value, g, *room, StepKind::kShrink});
    res.value = value;
    return true;
  }
  return false;
}

void check_lp_inputs(const RatVec& z0, const RatVec& c, const FeasibleBox& box) {
  if (c.size() != box.dim() || z0.size() != box.dim()) {
    throw Error(ErrorCode::kDimMismatch, "solver dimensions");
  }
  if (!box.contains(z0)) throw Error(ErrorCode::kInfeasibleBase, "starting point infeasible");
}

}  // namespace

LpResult solve_lp_circuit(const RatVec& z0, const CircuitSet& circuits, const RatVec& c,
                          const FeasibleBox& box, const SolveOptions& opts) {
  check_lp_inputs(z0, c, box);
  const Objective obj = Objective::linear(c);
  LpResult res;
  res.point = z0;
  res.value = obj.eval(std::span<const Rat>(z0));
  res.trace.n_eff = std::max<std::size_t>(1, box.dim());
  fill_h_bound(res.trace, obj, box, opts);
  for (;;) {
    while (shrink_once(res, circuits, c, box)) {
    }
    auto step = greedy_step(std::span<const Rat>(res.point), circuits.elements, obj, box, opts);
    res.trace.directions_evaluated += circuits.elements.size();
    if (step.is_zero()) break;
    apply(res.point, step.steplen, step.direction);
    res.trace.iterations.push_back(
        {res.value, step.new_value, step.direction, step.steplen, StepKind::kGreedy});
    res.value = step.new_value;
  }
  return res;
}

LpResult solve_lp_naive(const RatVec& z0, const std::vector<IntVec>& dirs, const RatVec& c,
                        const FeasibleBox& box, std::size_t max_iters) {
  check_lp_inputs(z0, c, box);
  const Objective obj = Objective::linear(c);
  LpResult res;
  res.point = z0;
  res.value = obj.eval(std::span<const Rat>(z0));
  res.trace.n_eff = std::max<std::size_t>(1, box.dim());
  for (std::size_t it = 0; it < max_iters; ++it) {
    auto step = greedy_step(std::span<const Rat>(res.point), dirs, obj, box);
    res.trace.directions_evaluated += dirs.size();
    if (step.is_zero()) break;
    apply(res.point, step.steplen, step.direction);
    res.trace.iterations.push_back(
        {res.value, step.new_value, step.direction, step.steplen, StepKind::kGreedy});
    res.value = step.new_value;
  }
  return res;
}

}  // namespace graver_opt
