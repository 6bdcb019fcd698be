#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "facpoly/instances.hpp"
#include "facpoly/matrix.hpp"
#include "facpoly/solver.hpp"

namespace facpoly {

/// How a target solution maps back. For a target assignment y with target
/// value v, the source value of recover(y) is value_scale * v + value_shift.
/// When value_exact is false the identity only holds at target optima.
struct ReductionCertificate {
  std::string direction;
  std::string recover;
  Rational value_scale = 1;
  Rational value_shift = 0;
  bool value_exact = true;
};

struct FactorizedReduction {
  FactorizedInstance instance;
  ReductionCertificate certificate;
};

/// Quadratic objective sum_{i<j} x^i' Q^{i,j} x^j + sum_j c^j' x^j.
/// Missing (i, j) pairs are zero blocks.
struct QuadraticInstance {
  std::vector<std::size_t> n;
  std::map<std::pair<std::size_t, std::size_t>, RationalMatrix> q;
  std::vector<RationalVector> c;  // one per block

  friend bool operator==(const QuadraticInstance&, const QuadraticInstance&) = default;
};

void validate(const QuadraticInstance& inst);
Rational eval_quadratic(const QuadraticInstance& inst, const Assignment& x);

inline constexpr std::size_t kDefaultExpansionBudget = 1'000'000;

/// Copies the variable vector once per edge position and adds the penalty
/// M * sum_k (s prod_j x^j_k - sum_j x^j_k), M = sum_e |c_e| + 1, so every
/// optimum has identical copies. Node costs live on the first copy. An
/// edgeless instance becomes a single-block linear instance.
FactorizedReduction explicit_to_factorized(const ExplicitInstance& inst);

/// The first copy of the variables.
BitVector recover_first_copy(const Assignment& x);

/// Expands every product; node k of block j becomes node sum_{i<j} n_i + k.
/// The instance offset is not representable and is dropped (see the
/// certificate). Throws BudgetError when the monomial count exceeds budget.
std::pair<ExplicitInstance, ReductionCertificate> factorized_to_explicit(
    const FactorizedInstance& inst, std::size_t budget = kDefaultExpansionBudget);

/// Expands each affine product over nonempty subsets of its blocks; the
/// constant part goes to the offset. Value-exact.
FactorizedInstance affine_to_linear(const AffineFactorizedInstance& inst,
                                    std::size_t budget = kDefaultExpansionBudget);

/// One full-index-set term per rank-1 factor.
FactorizedInstance factored_tensor_to_FU(const FactoredTensor& tensor);

/// A factorization of a dense tensor: a rank factorization for matrices,
/// one scaled unit factor per nonzero entry otherwise.
FactoredTensor factor_dense(const DenseTensor& tensor);

/// sum of squared entries, computed from the factors.
Rational squared_norm(const FactoredTensor& tensor);

/// B = sum_i (x) _j x^{i,j}; x is ordered (1,1),...,(1,s),(2,1),...
DenseTensor recover_tensor(const std::vector<BitVector>& x, const std::vector<std::size_t>& dims, std::size_t t);

/// Binary tensor factorization written as a factorized instance over the
/// blocks x^{i,j}; block (i, j) has index i*s + j.
struct TensorFactorizationModel {
  FactorizedInstance instance;
  ReductionCertificate certificate;  // error = -value + ||A||^2
  std::vector<std::size_t> dims;
  std::size_t t = 1;

  DenseTensor recover(const Assignment& x) const;
  Rational error(const Rational& value) const;
};

/// Explicit-form model of the same problem over t * sum n_j variables.
struct ExplicitTensorModel {
  ExplicitInstance instance;
  ReductionCertificate certificate;
  std::vector<std::size_t> dims;
  std::size_t t = 1;

  DenseTensor recover(const BitVector& x) const;
  Rational error(const Rational& value) const;
};

ExplicitTensorModel btf_to_explicit(const DenseTensor& a, std::size_t t,
                                    std::size_t budget = kDefaultExpansionBudget);

/// For each i: the q factors of 2A (2 on the last mode) plus e (x) ... (x) -e.
/// For each pair i < i': the diagonal terms -2 prod_j x^{i,j}_{k_j} x^{i',j}_{k_j},
/// one per index tuple (k_1, ..., k_s).
TensorFactorizationModel btf_factored_to_F(const FactoredTensor& a, std::size_t t);

/// Number of terms btf_factored_to_F emits: t(q+1) + C(t,2) * prod n_j.
std::size_t btf_term_count(const std::vector<std::size_t>& dims, std::size_t q, std::size_t t);

/// Rank-1 case: q + 1 terms, all over every mode.
TensorFactorizationModel r1btf_factored_to_FU(const FactoredTensor& a);

struct TensorFactorizationResult {
  std::vector<BitVector> factors;  // x^{i,j}, ordered as in recover_tensor
  DenseTensor approximation;
  Rational error;
  Solution solution;
};

/// Best binary-rank-<=t approximation of a factored tensor.
TensorFactorizationResult solve_btf(const FactoredTensor& a, std::size_t t, const SolveOptions& options = {});

/// Rank factorizes Q^{i,j} and emits one two-block term per rank; nonzero
/// linear parts become singleton terms.
FactorizedInstance quadratic_to_F(const QuadraticInstance& inst);

struct BmfResult {
  BitVector x;
  BitVector y;
  Rational error;
};

/// Best x y^T with binary x, y in squared error.
BmfResult bmf_rank1(const RationalMatrix& a, const SolveOptions& options = {});

}  // namespace facpoly
