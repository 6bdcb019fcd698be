#include "facpoly/arrangement.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "facpoly/errors.hpp"
#include "facpoly/matrix.hpp"

namespace facpoly {
namespace {

// Distinct hyperplanes after canonical scaling (first nonzero linear
// coefficient equal to 1), projected onto a set of coordinates on which the
// normals keep their full rank. Sign vectors of the projected arrangement
// are exactly those of the original one.
struct Reduced {
  std::size_t input_count = 0;
  std::vector<int> forced;          // per input: forced sign, or 0 if it maps to a hyperplane
  std::vector<std::size_t> target;  // per input: hyperplane index
  std::vector<int> orientation;     // per input: sign of the canonical scaling
  RationalMatrix normals;           // hyperplanes x rank
  RationalVector constants;         // per hyperplane
  std::size_t rank = 0;
};

Reduced reduce(const std::vector<AffineFunctional>& functionals) {
  Reduced out;
  out.input_count = functionals.size();
  out.forced.assign(functionals.size(), 0);
  out.target.assign(functionals.size(), 0);
  out.orientation.assign(functionals.size(), 1);
  if (functionals.empty()) return out;

  const std::size_t dim = functionals.front().dim();
  std::map<std::pair<RationalVector, Rational>, std::size_t> index_of;
  std::vector<RationalVector> normals;
  for (std::size_t k = 0; k < functionals.size(); ++k) {
    const auto& h = functionals[k];
    if (h.dim() != dim) {
      throw DimensionError("functional " + std::to_string(k + 1) + " has dimension " + std::to_string(h.dim()) +
                           ", expected " + std::to_string(dim));
    }
    const auto lead = std::find_if(h.linear.begin(), h.linear.end(), [](const Rational& a) { return a != 0; });
    if (lead == h.linear.end()) {
      out.forced[k] = sign(h.constant) < 0 ? -1 : 1;
      continue;
    }
    const Rational scale = 1 / *lead;
    out.orientation[k] = sign(*lead);
    RationalVector linear(h.linear.size());
    for (std::size_t i = 0; i < linear.size(); ++i) linear[i] = h.linear[i] * scale;
    Rational constant = h.constant * scale;
    auto [it, inserted] = index_of.try_emplace({linear, constant}, normals.size());
    if (inserted) {
      normals.push_back(std::move(linear));
      out.constants.push_back(std::move(constant));
    }
    out.target[k] = it->second;
  }
  if (normals.empty()) return out;

  std::vector<std::size_t> pivots;
  reduced_row_echelon(RationalMatrix::from_rows(normals), &pivots);
  out.rank = pivots.size();
  out.normals = RationalMatrix(normals.size(), out.rank);
  for (std::size_t h = 0; h < normals.size(); ++h) {
    for (std::size_t c = 0; c < out.rank; ++c) out.normals(h, c) = normals[h][pivots[c]];
  }
  return out;
}

std::optional<RationalMatrix> invert(RationalMatrix m) {
  const std::size_t n = m.rows();
  RationalMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i) inv(i, i) = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m(pivot, col) == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m(pivot, j), m(col, j));
        std::swap(inv(pivot, j), inv(col, j));
      }
    }
    const Rational scale = 1 / m(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      m(col, j) *= scale;
      inv(col, j) *= scale;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || m(i, col) == 0) continue;
      const Rational factor = m(i, col);
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) -= factor * m(col, j);
        inv(i, j) -= factor * inv(col, j);
      }
    }
  }
  return inv;
}

bool next_combination(std::vector<std::size_t>& subset, std::size_t n) {
  const std::size_t r = subset.size();
  for (std::size_t i = r; i-- > 0;) {
    if (subset[i] < n - r + i) {
      ++subset[i];
      for (std::size_t j = i + 1; j < r; ++j) subset[j] = subset[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// Cells of the reduced arrangement with constants perturbed to
// b_h + eps^(h+1), eps infinitesimal. The perturbed arrangement is simple:
// each vertex lies on exactly `rank` hyperplanes with independent normals,
// and every cell is one of the 2^rank orthants around some vertex. Each
// original cell contains a perturbed cell with the same signs.
std::vector<SignVector> perturbed_cells(const Reduced& r) {
  const std::size_t count = r.constants.size();
  const std::size_t rank = r.rank;
  std::vector<SignVector> cells;

  std::vector<std::size_t> subset(rank);
  for (std::size_t i = 0; i < rank; ++i) subset[i] = i;
  std::vector<int> position(count, -1);
  do {
    RationalMatrix basis(rank, rank);
    for (std::size_t a = 0; a < rank; ++a) {
      for (std::size_t c = 0; c < rank; ++c) basis(a, c) = r.normals(subset[a], c);
    }
    const auto inverse = invert(basis);
    if (!inverse) continue;

    // Unperturbed vertex v0 = basis^{-1} (-b_S).
    RationalVector vertex(rank);
    for (std::size_t c = 0; c < rank; ++c) {
      Rational sum = 0;
      for (std::size_t a = 0; a < rank; ++a) sum -= (*inverse)(c, a) * r.constants[subset[a]];
      vertex[c] = sum;
    }
    for (std::size_t a = 0; a < rank; ++a) position[subset[a]] = static_cast<int>(a);

    SignVector base(count, 1);
    for (std::size_t h = 0; h < count; ++h) {
      if (position[h] >= 0) continue;
      Rational value = r.constants[h];
      for (std::size_t c = 0; c < rank; ++c) value += r.normals(h, c) * vertex[c];
      if (value != 0) {
        base[h] = static_cast<std::int8_t>(sign(value));
        continue;
      }
      // Hyperplane through v0: the lowest-order eps coefficient decides.
      // Coefficient of eps^(e+1) is -(a_h basis^{-1})_pos(e) for e in S and
      // 1 for e == h.
      RationalVector u(rank);
      for (std::size_t a = 0; a < rank; ++a) {
        Rational sum = 0;
        for (std::size_t c = 0; c < rank; ++c) sum += r.normals(h, c) * (*inverse)(c, a);
        u[a] = sum;
      }
      int decided = 0;
      for (std::size_t e = 0; e < count && decided == 0; ++e) {
        if (position[e] >= 0) {
          decided = -sign(u[static_cast<std::size_t>(position[e])]);
        } else if (e == h) {
          decided = 1;
        }
      }
      base[h] = static_cast<std::int8_t>(decided);
    }

    for (std::size_t mask = 0; mask < (std::size_t{1} << rank); ++mask) {
      SignVector cell = base;
      for (std::size_t a = 0; a < rank; ++a) cell[subset[a]] = (mask >> a) & 1U ? 1 : -1;
      cells.push_back(std::move(cell));
    }
    for (std::size_t a = 0; a < rank; ++a) position[subset[a]] = -1;
  } while (next_combination(subset, count));

  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

}  // namespace

Rational AffineFunctional::operator()(const RationalVector& point) const {
  return inner_product(linear, point) + constant;
}

BigInt generic_cell_count(std::uint64_t n, std::uint64_t d) {
  BigInt total = 0;
  for (std::uint64_t i = 0; i <= std::min(n, d); ++i) {
    BigInt c;
    mpz_bin_uiui(c.get_mpz_t(), n, i);
    total += c;
  }
  return total;
}

BigInt predicted_cell_count(const std::vector<AffineFunctional>& functionals) {
  const Reduced r = reduce(functionals);
  return generic_cell_count(r.constants.size(), r.rank);
}

std::vector<SignVector> enumerate_cells(const std::vector<AffineFunctional>& functionals,
                                        const ArrangementOptions& options) {
  const Reduced r = reduce(functionals);
  const BigInt predicted = generic_cell_count(r.constants.size(), r.rank);
  if (predicted > BigInt(std::to_string(options.cell_limit))) {
    throw BudgetError("arrangement predicts " + predicted.get_str() + " cells, limit is " +
                      std::to_string(options.cell_limit));
  }

  std::vector<SignVector> reduced_cells;
  if (r.constants.empty()) {
    reduced_cells.emplace_back();
  } else {
    reduced_cells = perturbed_cells(r);
  }

  std::vector<SignVector> out;
  out.reserve(reduced_cells.size());
  for (const auto& cell : reduced_cells) {
    SignVector expanded(r.input_count);
    for (std::size_t k = 0; k < r.input_count; ++k) {
      expanded[k] = r.forced[k] != 0 ? static_cast<std::int8_t>(r.forced[k])
                                     : static_cast<std::int8_t>(r.orientation[k] * cell[r.target[k]]);
    }
    out.push_back(std::move(expanded));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> sign_at_point(const std::vector<AffineFunctional>& functionals, const RationalVector& point) {
  std::vector<int> signs;
  signs.reserve(functionals.size());
  for (std::size_t k = 0; k < functionals.size(); ++k) {
    if (functionals[k].dim() != point.size()) {
      throw DimensionError("point has dimension " + std::to_string(point.size()) + ", functional " +
                           std::to_string(k + 1) + " has " + std::to_string(functionals[k].dim()));
    }
    signs.push_back(sign(functionals[k](point)));
  }
  return signs;
}

}  // namespace facpoly
