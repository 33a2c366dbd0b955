#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace graver_opt {

// All solver arithmetic is arbitrary precision.
using Int = mpz_class;
using Rat = mpq_class;
using IntVec = std::vector<Int>;
using RatVec = std::vector<Rat>;

inline int cmpabs(const Int& a, const Int& b) { return mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t()); }

enum class ErrorCode {
  kZeroVector,
  kDimMismatch,
  kNotInKernel,
  kBoundExceeded,
  kEmptyInterval,
  kInfeasibleBase,
  kUnboundedObjective,
  kUnboundedBox,
  kRationalPointOnIntegerObjective,
  kNotConvex,
  kNotStabilized,
  kNTooSmall,
  kInfeasible,
  kBalanceMismatch,
  kInconsistentMargins,
  kSearchSpaceTooLarge,
  kInvalidArgument,
  kParse,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Dense row-major integer matrix.
class IntMat {
 public:
  IntMat() = default;
  IntMat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}
  IntMat(std::initializer_list<std::initializer_list<long>> rows);

  static IntMat identity(std::size_t n);
  static IntMat from_rows(const std::vector<IntVec>& rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Int& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Int& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<const Int> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<Int> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  IntVec row_vec(std::size_t r) const;
  IntVec col_vec(std::size_t c) const;

  IntMat transpose() const;
  IntMat select_cols(std::span<const std::size_t> cols) const;
  IntMat drop_col(std::size_t c) const;

  const std::vector<Int>& data() const { return data_; }

  friend bool operator==(const IntMat&, const IntMat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Int> data_;
};

IntVec make_int_vec(std::initializer_list<long> values);

}  // namespace graver_opt
