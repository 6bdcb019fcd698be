#pragma once

#include <cstddef>
#include <vector>

#include "facpoly/rational.hpp"

namespace facpoly {

/// Dense row-major matrix of exact rationals.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols) {}
  /// Builds from nested rows; all rows must have equal length.
  static RationalMatrix from_rows(const std::vector<RationalVector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  const std::vector<Rational>& entries() const { return entries_; }

  RationalVector row(std::size_t i) const;
  RationalVector column(std::size_t j) const;
  bool is_zero() const;

  friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> entries_;
};

/// A * B^T.
RationalMatrix multiply_transposed(const RationalMatrix& a, const RationalMatrix& b);

/// Reduced row echelon form, pivoting on the first nonzero entry of each
/// column. `pivots` receives the pivot column of each nonzero row.
RationalMatrix reduced_row_echelon(RationalMatrix m, std::vector<std::size_t>* pivots = nullptr);

struct RankFactorization {
  RationalMatrix left;   // m x r, the pivot columns of M
  RationalMatrix right;  // n x r, transposed nonzero rows of rref(M)
  std::size_t rank = 0;
};

/// M = left * right^T with rank(M) columns in each factor.
RankFactorization rank_factorization(const RationalMatrix& m);

}  // namespace facpoly
