#include "graver_opt/linalg.hpp"

#include <algorithm>
#include <optional>
#include <utility>

namespace graver_opt {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kNotInKernel: return "NotInKernel";
    case ErrorCode::kBoundExceeded: return "BoundExceeded";
    case ErrorCode::kEmptyInterval: return "EmptyInterval";
    case ErrorCode::kInfeasibleBase: return "InfeasibleBase";
    case ErrorCode::kUnboundedObjective: return "UnboundedObjective";
    case ErrorCode::kUnboundedBox: return "UnboundedBox";
    case ErrorCode::kRationalPointOnIntegerObjective:
      return "RationalPointOnIntegerObjective";
    case ErrorCode::kNotConvex: return "NotConvex";
    case ErrorCode::kNotStabilized: return "NotStabilized";
    case ErrorCode::kNTooSmall: return "NTooSmall";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kBalanceMismatch: return "BalanceMismatch";
    case ErrorCode::kInconsistentMargins: return "InconsistentMargins";
    case ErrorCode::kSearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParse: return "Parse";
  }
  return "Unknown";
}

IntMat::IntMat(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw Error(ErrorCode::kDimMismatch, "ragged matrix literal");
    }
    for (long v : r) data_.emplace_back(v);
  }
}

IntMat IntMat::identity(std::size_t n) {
  IntMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMat IntMat::from_rows(const std::vector<IntVec>& rows, std::size_t cols) {
  IntMat m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw Error(ErrorCode::kDimMismatch, "row length differs from column count");
    }
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

IntVec IntMat::row_vec(std::size_t r) const {
  auto s = row(r);
  return IntVec(s.begin(), s.end());
}

IntVec IntMat::col_vec(std::size_t c) const {
  IntVec v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

IntMat IntMat::transpose() const {
  IntMat t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

IntMat IntMat::select_cols(std::span<const std::size_t> cols) const {
  IntMat m(rows_, cols.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t j = 0; j < cols.size(); ++j) m(r, j) = (*this)(r, cols[j]);
  return m;
}

IntMat IntMat::drop_col(std::size_t c) const {
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < cols_; ++j)
    if (j != c) keep.push_back(j);
  return select_cols(keep);
}

IntVec make_int_vec(std::initializer_list<long> values) {
  IntVec v;
  v.reserve(values.size());
  for (long x : values) v.emplace_back(x);
  return v;
}

namespace {

void check_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kDimMismatch,
                "dimensions " + std::to_string(a) + " and " + std::to_string(b));
  }
}

// Reduces the rows of m (n x k, k = cols) in place to a row echelon form using
// unimodular integer row operations. Returns the number of nonzero rows, which
// occupy the top of m after the call. Columns [0, limit) drive pivoting.
std::size_t integer_echelon(std::vector<IntVec>& m, std::size_t limit) {
  std::size_t pivot_row = 0;
  const std::size_t n = m.size();
  for (std::size_t c = 0; c < limit && pivot_row < n; ++c) {
    while (true) {
      // Row with smallest nonzero |entry| in column c at or below pivot_row.
      std::size_t best = n;
      for (std::size_t r = pivot_row; r < n; ++r) {
        if (sgn(m[r][c]) == 0) continue;
        if (best == n || cmpabs(m[r][c], m[best][c]) < 0) best = r;
      }
      if (best == n) break;
      std::swap(m[pivot_row], m[best]);
      bool done = true;
      for (std::size_t r = pivot_row + 1; r < n; ++r) {
        if (sgn(m[r][c]) == 0) continue;
        Int q = floor_div(m[r][c], m[pivot_row][c]);
        axpy(m[r], -q, m[pivot_row]);
        if (sgn(m[r][c]) != 0) done = false;
      }
      if (done) {
        if (sgn(m[pivot_row][c]) < 0) m[pivot_row] = negated(m[pivot_row]);
        ++pivot_row;
        break;
      }
    }
  }
  return pivot_row;
}

// Hermite-style reduction of the rows of a lattice basis: echelon form with
// positive pivots and entries above each pivot reduced into [0, pivot).
void hermite_reduce(std::vector<IntVec>& basis) {
  if (basis.empty()) return;
  const std::size_t k = basis.front().size();
  const std::size_t r = integer_echelon(basis, k);
  basis.resize(r);
  std::size_t row = 0;
  for (std::size_t c = 0; c < k && row < basis.size(); ++c) {
    if (sgn(basis[row][c]) == 0) continue;
    for (std::size_t above = 0; above < row; ++above) {
      Int q = floor_div(basis[above][c], basis[row][c]);
      if (sgn(q) != 0) axpy(basis[above], -q, basis[row]);
    }
    ++row;
  }
}

}  // namespace

std::vector<IntVec> kernel_basis(const IntMat& a) {
  const std::size_t n = a.cols();
  const std::size_t d = a.rows();
  // Rows (A^T row i | e_i); after echelonizing the A^T part, rows with a zero
  // A^T part carry a basis of the integer kernel in their identity part.
  std::vector<IntVec> m(n, IntVec(d + n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < d; ++r) m[i][r] = a(r, i);
    m[i][d + i] = 1;
  }
  const std::size_t nonzero = integer_echelon(m, d);
  std::vector<IntVec> basis;
  for (std::size_t i = nonzero; i < n; ++i) {
    basis.emplace_back(m[i].begin() + static_cast<std::ptrdiff_t>(d), m[i].end());
  }
  hermite_reduce(basis);
  return basis;
}

std::optional<IntVec> integer_solution(const IntMat& a, std::span<const Int> b) {
  check_same_dim(a.rows(), b.size());
  const std::size_t n = a.cols();
  IntMat ab(a.rows(), n + 1);
  place(ab, a, 0, 0);
  for (std::size_t r = 0; r < a.rows(); ++r) ab(r, n) = -b[r];
  // Integer kernel vectors of [A | -b] with last entry 1 are the solutions;
  // the last entries of a lattice basis generate all attainable values.
  IntVec acc(n + 1);
  for (const IntVec& v : kernel_basis(ab)) {
    if (sgn(v[n]) == 0) continue;
    if (sgn(acc[n]) == 0) {
      acc = v;
      continue;
    }
    Int g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), acc[n].get_mpz_t(), v[n].get_mpz_t());
    IntVec next = scaled(acc, s);
    axpy(next, t, v);
    acc = std::move(next);
  }
  if (abs(acc[n]) != 1) return std::nullopt;
  if (sgn(acc[n]) < 0) acc = negated(acc);
  acc.pop_back();
  return acc;
}

Int content(std::span<const Int> v) {
  Int g = 0;
  for (const Int& x : v) {
    if (sgn(x) != 0) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  }
  return g;
}

bool is_primitive(std::span<const Int> v) {
  Int g = content(v);
  if (sgn(g) == 0) throw Error(ErrorCode::kZeroVector, "is_primitive on zero vector");
  return g == 1;
}

IntVec primitive_part(std::span<const Int> v) {
  Int g = content(v);
  IntVec out(v.begin(), v.end());
  if (sgn(g) == 0 || g == 1) return out;
  for (Int& x : out) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
  return out;
}

bool sign_compatible(std::span<const Int> a, std::span<const Int> b) {
  check_same_dim(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (sgn(a[i]) * sgn(b[i]) < 0) return false;
  }
  return true;
}

bool conformal_le(std::span<const Int> u, std::span<const Int> v) {
  check_same_dim(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const int su = sgn(u[i]);
    if (su == 0) continue;
    if (su != sgn(v[i]) || cmpabs(u[i], v[i]) > 0) return false;
  }
  return true;
}

bool lex_less(std::span<const Int> a, std::span<const Int> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

void sort_canonical(std::vector<IntVec>& vs) {
  std::sort(vs.begin(), vs.end(),
            [](const IntVec& a, const IntVec& b) { return lex_less(a, b); });
}

void sort_unique_canonical(std::vector<IntVec>& vs) {
  sort_canonical(vs);
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
}

bool is_zero(std::span<const Int> v) {
  return std::all_of(v.begin(), v.end(), [](const Int& x) { return sgn(x) == 0; });
}

IntVec negated(std::span<const Int> v) {
  IntVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = -v[i];
  return out;
}

IntVec add(std::span<const Int> a, std::span<const Int> b) {
  check_same_dim(a.size(), b.size());
  IntVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

IntVec sub(std::span<const Int> a, std::span<const Int> b) {
  check_same_dim(a.size(), b.size());
  IntVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

IntVec scaled(std::span<const Int> v, const Int& k) {
  IntVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * k;
  return out;
}

void axpy(IntVec& y, const Int& a, std::span<const Int> x) {
  check_same_dim(y.size(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (sgn(x[i]) != 0) mpz_addmul(y[i].get_mpz_t(), a.get_mpz_t(), x[i].get_mpz_t());
  }
}

Int dot(std::span<const Int> a, std::span<const Int> b) {
  check_same_dim(a.size(), b.size());
  Int s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mpz_addmul(s.get_mpz_t(), a[i].get_mpz_t(), b[i].get_mpz_t());
  }
  return s;
}

Rat dot(std::span<const Rat> a, std::span<const Int> b) {
  check_same_dim(a.size(), b.size());
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (sgn(b[i]) != 0 && sgn(a[i]) != 0) s += a[i] * b[i];
  }
  return s;
}

Int l1_norm(std::span<const Int> v) {
  Int s = 0;
  for (const Int& x : v) s += abs(x);
  return s;
}

Int linf_norm(std::span<const Int> v) {
  Int m = 0;
  for (const Int& x : v)
    if (cmpabs(x, m) > 0) m = abs(x);
  return m;
}

IntVec mul(const IntMat& a, std::span<const Int> x) {
  check_same_dim(a.cols(), x.size());
  IntVec out(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) out[r] = dot(a.row(r), x);
  return out;
}

RatVec mul(const IntMat& a, std::span<const Rat> x) {
  check_same_dim(a.cols(), x.size());
  RatVec out(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) out[r] = dot(x, a.row(r));
  return out;
}

IntMat mul(const IntMat& a, const IntMat& b) {
  check_same_dim(a.cols(), b.rows());
  IntMat out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (sgn(a(i, k)) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
    }
  return out;
}

namespace {

// Gauss-Jordan over Q on the augmented system; returns the pivot columns.
std::vector<std::size_t> rref(std::vector<RatVec>& m, std::size_t limit) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < limit && row < m.size(); ++c) {
    std::size_t p = row;
    while (p < m.size() && sgn(m[p][c]) == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[row], m[p]);
    Rat inv = 1 / m[row][c];
    for (Rat& x : m[row]) x *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || sgn(m[r][c]) == 0) continue;
      Rat f = m[r][c];
      for (std::size_t j = c; j < m[r].size(); ++j) m[r][j] -= f * m[row][j];
    }
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

}  // namespace

std::size_t rank(const IntMat& a) {
  std::vector<RatVec> m(a.rows(), RatVec(a.cols()));
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) m[r][c] = a(r, c);
  return rref(m, a.cols()).size();
}

bool solve_rational(const IntMat& a, std::span<const Rat> b, RatVec& x) {
  check_same_dim(a.rows(), b.size());
  std::vector<RatVec> m(a.rows(), RatVec(a.cols() + 1));
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) m[r][c] = a(r, c);
    m[r][a.cols()] = b[r];
  }
  auto pivots = rref(m, a.cols());
  for (std::size_t r = pivots.size(); r < m.size(); ++r) {
    if (sgn(m[r][a.cols()]) != 0) return false;
  }
  x.assign(a.cols(), Rat(0));
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = m[r][a.cols()];
  return true;
}

RatVec to_rat(std::span<const Int> v) {
  RatVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

bool is_integral(std::span<const Rat> v) {
  return std::all_of(v.begin(), v.end(),
                     [](const Rat& q) { return q.get_den() == 1; });
}

IntVec to_int(std::span<const Rat> v) {
  IntVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i].get_den() != 1) {
      throw Error(ErrorCode::kInvalidArgument, "non-integral entry " + to_string(v[i]));
    }
    out[i] = v[i].get_num();
  }
  return out;
}

Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Int ceil_div(const Int& a, const Int& b) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Int floor_rat(const Rat& q) { return floor_div(q.get_num(), q.get_den()); }
Int ceil_rat(const Rat& q) { return ceil_div(q.get_num(), q.get_den()); }

std::string to_string(const Rat& q) { return q.get_str(); }

std::string to_string(std::span<const Int> v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += v[i].get_str();
  }
  return s + ")";
}

Rat parse_rat(const std::string& text) {
  Rat q;
  if (text.empty() || q.set_str(text, 10) != 0 || q.get_den() == 0) {
    throw Error(ErrorCode::kParse, "not an exact rational: '" + text + "'");
  }
  q.canonicalize();
  return q;
}

IntMat hstack(const IntMat& left, const IntMat& right) {
  check_same_dim(left.rows(), right.rows());
  IntMat m(left.rows(), left.cols() + right.cols());
  place(m, left, 0, 0);
  place(m, right, 0, left.cols());
  return m;
}

IntMat vstack(const IntMat& top, const IntMat& bottom) {
  check_same_dim(top.cols(), bottom.cols());
  IntMat m(top.rows() + bottom.rows(), top.cols());
  place(m, top, 0, 0);
  place(m, bottom, top.rows(), 0);
  return m;
}

IntMat zeros(std::size_t rows, std::size_t cols) { return IntMat(rows, cols); }

void place(IntMat& dst, const IntMat& src, std::size_t row0, std::size_t col0) {
  for (std::size_t r = 0; r < src.rows(); ++r)
    for (std::size_t c = 0; c < src.cols(); ++c) dst(row0 + r, col0 + c) = src(r, c);
}

}  // namespace graver_opt
