#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "facpoly/rational.hpp"

namespace facpoly {

/// h(lambda) = <linear, lambda> + constant on Q^dim.
struct AffineFunctional {
  RationalVector linear;
  Rational constant = 0;

  std::size_t dim() const { return linear.size(); }
  Rational operator()(const RationalVector& point) const;

  friend bool operator==(const AffineFunctional&, const AffineFunctional&) = default;
};

/// One entry per functional: +1 when h >= 0 holds on the cell, -1 when
/// h <= 0 holds.
using SignVector = std::vector<std::int8_t>;

struct ArrangementOptions {
  /// Refuse when the predicted number of cells exceeds this.
  std::uint64_t cell_limit = 10'000'000;
};

/// Cells of the arrangement {h_k = 0} as sign vectors, sorted
/// lexicographically (-1 before +1) without duplicates.
///
/// Every full-dimensional cell contributes its sign vector. The output may
/// also contain a few vectors that only exist after perturbing the constant
/// terms (degenerate arrangements); it never exceeds sum_{i<=d} C(n, i).
/// Functionals with zero linear part are forced to the sign of their
/// constant, and to +1 when identically zero.
std::vector<SignVector> enumerate_cells(const std::vector<AffineFunctional>& functionals,
                                        const ArrangementOptions& options = {});

/// Upper bound on the output size of enumerate_cells: sum_{i<=d} C(n, i),
/// taken over the distinct non-degenerate hyperplanes and the rank of their
/// normals.
BigInt predicted_cell_count(const std::vector<AffineFunctional>& functionals);

/// sum_{i=0}^{d} C(n, i).
BigInt generic_cell_count(std::uint64_t n, std::uint64_t d);

/// Exact signs (-1, 0, +1) of every functional at `point`.
std::vector<int> sign_at_point(const std::vector<AffineFunctional>& functionals, const RationalVector& point);

}  // namespace facpoly
