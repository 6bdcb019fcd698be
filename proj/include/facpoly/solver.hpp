#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "facpoly/arrangement.hpp"
#include "facpoly/errors.hpp"
#include "facpoly/instances.hpp"

namespace facpoly {

/// Split of the term list with respect to the last block s.
struct TermPartition {
  std::vector<std::size_t> alpha;  // terms without s
  std::vector<std::size_t> beta;   // terms strictly containing {s}
  std::vector<std::size_t> gamma;  // terms equal to {s}
};

/// Predicted recursion size. per_level[j] bounds the number of cells
/// enumerated when block j is eliminated (1 for the first block, which is
/// decided greedily); total is their product, an upper bound on the number
/// of leaves.
struct BudgetReport {
  std::vector<std::size_t> m;
  std::vector<BigInt> per_level;
  BigInt total = 1;
  std::uint64_t limit = 0;

  bool within_limit() const;
};

enum class OrderPolicy { Auto, Identity };

inline constexpr std::uint64_t kDefaultLeafBudget = 10'000'000;

struct SolveOptions {
  OrderPolicy order = OrderPolicy::Auto;
  std::uint64_t leaf_budget = kDefaultLeafBudget;
};

/// Thrown by solve when the predicted leaf count exceeds the budget.
class BudgetExceeded : public BudgetError {
 public:
  explicit BudgetExceeded(BudgetReport report);
  const BudgetReport& report() const { return report_; }

 private:
  BudgetReport report_;
};

TermPartition partition_terms(const FactorizedInstance& inst);

/// h_k(lambda) = sum_{I in beta} lambda_I c^{I,s}_k + sum_{I in gamma} c^{I,s}_k,
/// one functional per coordinate of the last block, in dimension |beta|.
std::vector<AffineFunctional> build_functionals(const FactorizedInstance& inst, const TermPartition& partition);

/// x_k = 1 exactly where the sign is +1.
BitVector partial_solution(const SignVector& signs);

/// Fixes the last block to `fixed`. Beta terms lose block s and have their
/// smallest remaining block rescaled by <c^{I,s}, fixed>; terms whose scalar
/// vanishes are dropped. Gamma contributions move into the offset. The child
/// may end up with no terms, which the solver treats as a constant objective.
FactorizedInstance build_child(const FactorizedInstance& inst, const TermPartition& partition, const BitVector& fixed);

/// s = 1: x_k = 1 iff the column sum of coefficients is positive.
Solution solve_base(const FactorizedInstance& inst);

/// perm[p] = original block placed at position p. A block with maximal m_j
/// (first one on ties) moves to position 1; the others keep their order.
std::vector<std::size_t> choose_order(const FactorizedInstance& inst);

/// Relabels blocks: block perm[p] of `inst` becomes block p.
FactorizedInstance permute_blocks(const FactorizedInstance& inst, const std::vector<std::size_t>& perm);

BudgetReport check_budget(const FactorizedInstance& inst, std::uint64_t limit = kDefaultLeafBudget);

/// Exact maximizer. Among optimal leaves the lexicographically smallest
/// assignment (blocks in their original order) is returned.
Solution solve(const FactorizedInstance& inst, const SolveOptions& options = {});

Solution solve_affine(const AffineFactorizedInstance& inst, const SolveOptions& options = {});

/// lambda_I = prod_{j in I \ {s}} <c^{I,j}, x^j> for every beta term.
RationalVector lambda_at(const FactorizedInstance& inst, const TermPartition& partition, const Assignment& x);

/// Checks the sign conditions that every optimum satisfies with respect to
/// each block taken as the last one: x_k = 1 where h_k > 0, x_k = 0 where
/// h_k < 0, and flipping x_k where h_k = 0 keeps the value. Returns the
/// number of violations.
std::size_t flip_optimality_violations(const FactorizedInstance& inst, const Assignment& x);

}  // namespace facpoly
