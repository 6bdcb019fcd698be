#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "facpoly/rational.hpp"

namespace facpoly {

using BitVector = std::vector<std::uint8_t>;

// Block indices are 0-based in memory; files use 1-based indices.

/// One summand prod_{j in blocks} <coeffs[j], x^j>. `blocks` is sorted and
/// strictly increasing; coeffs[p] belongs to blocks[p].
struct Term {
  std::vector<std::size_t> blocks;
  std::vector<RationalVector> coeffs;

  /// Coefficient vector of `block`; the block must be in the term.
  const RationalVector& coeff(std::size_t block) const;
  bool contains(std::size_t block) const;

  friend bool operator==(const Term&, const Term&) = default;
};

/// max sum_I prod_{j in I} <c^{I,j}, x^j> + offset over binary blocks.
/// The term list is a multiset: repeated index sets are allowed.
struct FactorizedInstance {
  std::vector<std::size_t> n;
  std::vector<Term> terms;
  Rational offset = 0;

  std::size_t block_count() const { return n.size(); }
  std::size_t variable_count() const;

  friend bool operator==(const FactorizedInstance&, const FactorizedInstance&) = default;
};

/// Term of prod_{j in blocks} (<coeffs[j], x^j> + shifts[j]).
struct AffineTerm {
  std::vector<std::size_t> blocks;
  std::vector<RationalVector> coeffs;
  std::vector<Rational> shifts;

  friend bool operator==(const AffineTerm&, const AffineTerm&) = default;
};

struct AffineFactorizedInstance {
  std::vector<std::size_t> n;
  std::vector<AffineTerm> terms;
  Rational offset = 0;

  std::size_t block_count() const { return n.size(); }

  friend bool operator==(const AffineFactorizedInstance&, const AffineFactorizedInstance&) = default;
};

struct Hyperedge {
  std::vector<std::size_t> nodes;  // sorted, distinct, size >= 2
  Rational cost;

  friend bool operator==(const Hyperedge&, const Hyperedge&) = default;
};

/// Polynomial given monomial by monomial:
/// sum_k node_cost[k] x_k + sum_e cost_e prod_{k in e} x_k.
struct ExplicitInstance {
  std::size_t nodes = 0;
  RationalVector node_cost;
  std::vector<Hyperedge> edges;

  friend bool operator==(const ExplicitInstance&, const ExplicitInstance&) = default;
};

struct Assignment {
  std::vector<BitVector> blocks;

  /// Blocks concatenated in order.
  BitVector flatten() const;

  // Lexicographic on the concatenation when block sizes agree.
  friend auto operator<=>(const Assignment&, const Assignment&) = default;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// All-zero assignment shaped like `n`.
Assignment zero_assignment(const std::vector<std::size_t>& n);
/// Splits a flat bit vector into blocks of sizes `n`.
Assignment split_assignment(const BitVector& flat, const std::vector<std::size_t>& n);

struct Solution {
  Assignment assignment;
  Rational value;
  std::uint64_t leaves_explored = 0;
};

/// Row-major (last index fastest) dense tensor.
struct DenseTensor {
  std::vector<std::size_t> dims;
  std::vector<Rational> entries;

  static DenseTensor zeros(const std::vector<std::size_t>& dims);
  std::size_t order() const { return dims.size(); }
  std::size_t flat_index(const std::vector<std::size_t>& index) const;

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;
};

/// sum_p a^{p,1} (x) a^{p,2} (x) ... (x) a^{p,s}; factors[p][j] = a^{p,j}.
struct FactoredTensor {
  std::vector<std::size_t> dims;
  std::vector<std::vector<RationalVector>> factors;

  friend bool operator==(const FactoredTensor&, const FactoredTensor&) = default;
};

// Validation throws ValidationError naming the offending item.
void validate(const FactorizedInstance& inst);
void validate(const AffineFactorizedInstance& inst);
void validate(const ExplicitInstance& inst);
void validate(const DenseTensor& tensor);
void validate(const FactoredTensor& tensor);

/// Throws DimensionError naming the first block whose length differs.
void check_assignment(const std::vector<std::size_t>& n, const Assignment& x);

Rational eval_factorized(const FactorizedInstance& inst, const Assignment& x);
Rational eval_affine(const AffineFactorizedInstance& inst, const Assignment& x);
Rational eval_explicit(const ExplicitInstance& inst, const BitVector& x);

/// sum of (a - b)^2 over all entries.
Rational eval_tensor_objective(const DenseTensor& a, const DenseTensor& b);

/// m_j = number of terms containing block j and some block < j.
std::vector<std::size_t> compute_m(const FactorizedInstance& inst);

inline constexpr std::size_t kDefaultTensorBudget = 10'000'000;

/// Dense sum of outer products. Throws BudgetError when prod(dims) > budget.
DenseTensor materialize_tensor(const FactoredTensor& tensor,
                               std::size_t budget = kDefaultTensorBudget);

/// Number of entries prod(dims), saturating at SIZE_MAX.
std::size_t tensor_size(const std::vector<std::size_t>& dims);

}  // namespace facpoly
