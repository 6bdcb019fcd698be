#include <cctype>
#include <string>
#include <utility>

#include "facpoly/errors.hpp"
#include "facpoly/matrix.hpp"
#include "facpoly/rational.hpp"

namespace facpoly {
namespace {

bool valid_integer_text(std::string_view text) {
  std::size_t pos = 0;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
  if (pos == text.size()) return false;
  for (; pos < text.size(); ++pos) {
    if (!std::isdigit(static_cast<unsigned char>(text[pos]))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!valid_integer_text(num) || !valid_integer_text(den)) {
    throw ValidationError("malformed rational '" + std::string(text) + "'");
  }
  auto strip_plus = [](std::string_view s) { return std::string(s.front() == '+' ? s.substr(1) : s); };
  Rational value;
  value.get_num() = BigInt(strip_plus(num), 10);
  value.get_den() = BigInt(strip_plus(den), 10);
  if (value.get_den() == 0) {
    throw ValidationError("zero denominator in '" + std::string(text) + "'");
  }
  value.canonicalize();
  return value;
}

std::string to_string(const Rational& value) { return value.get_str(10); }

Rational inner_product(const RationalVector& a, const RationalVector& b) {
  if (a.size() != b.size()) throw DimensionError("inner product of vectors with different lengths");
  Rational sum = 0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  return sum;
}

bool is_zero(const RationalVector& v) {
  for (const auto& x : v) {
    if (x != 0) return false;
  }
  return true;
}

RationalMatrix RationalMatrix::from_rows(const std::vector<RationalVector>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  RationalMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw DimensionError("ragged matrix: row " + std::to_string(i + 1));
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

RationalVector RationalMatrix::row(std::size_t i) const {
  return RationalVector(entries_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                        entries_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

RationalVector RationalMatrix::column(std::size_t j) const {
  RationalVector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

bool RationalMatrix::is_zero() const { return facpoly::is_zero(entries_); }

RationalMatrix multiply_transposed(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.cols() != b.cols()) throw DimensionError("inner dimensions differ in A*B^T");
  RationalMatrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      Rational sum = 0;
      for (std::size_t l = 0; l < a.cols(); ++l) sum += a(i, l) * b(j, l);
      out(i, j) = sum;
    }
  }
  return out;
}

RationalMatrix reduced_row_echelon(RationalMatrix m, std::vector<std::size_t>* pivots) {
  std::vector<std::size_t> pivot_cols;
  std::size_t lead_row = 0;
  for (std::size_t col = 0; col < m.cols() && lead_row < m.rows(); ++col) {
    std::size_t pivot = lead_row;
    while (pivot < m.rows() && m(pivot, col) == 0) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != lead_row) {
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(pivot, j), m(lead_row, j));
    }
    const Rational inv = 1 / m(lead_row, col);
    for (std::size_t j = col; j < m.cols(); ++j) m(lead_row, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == lead_row || m(i, col) == 0) continue;
      const Rational factor = m(i, col);
      for (std::size_t j = col; j < m.cols(); ++j) m(i, j) -= factor * m(lead_row, j);
    }
    pivot_cols.push_back(col);
    ++lead_row;
  }
  if (pivots) *pivots = std::move(pivot_cols);
  return m;
}

RankFactorization rank_factorization(const RationalMatrix& m) {
  std::vector<std::size_t> pivots;
  const RationalMatrix rref = reduced_row_echelon(m, &pivots);
  const std::size_t r = pivots.size();
  RankFactorization out{RationalMatrix(m.rows(), r), RationalMatrix(m.cols(), r), r};
  for (std::size_t l = 0; l < r; ++l) {
    for (std::size_t i = 0; i < m.rows(); ++i) out.left(i, l) = m(i, pivots[l]);
    for (std::size_t j = 0; j < m.cols(); ++j) out.right(j, l) = rref(l, j);
  }
  return out;
}

}  // namespace facpoly
