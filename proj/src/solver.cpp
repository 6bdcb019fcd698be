#include "facpoly/solver.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "facpoly/errors.hpp"
#include "facpoly/reductions.hpp"

namespace facpoly {
namespace {

struct Candidate {
  Rational value;
  std::vector<BitVector> blocks;  // by position in the searched instance
};

class Search {
 public:
  explicit Search(const std::vector<std::size_t>& original_of) {
    by_original_.resize(original_of.size());
    std::iota(by_original_.begin(), by_original_.end(), std::size_t{0});
    std::sort(by_original_.begin(), by_original_.end(),
              [&](std::size_t a, std::size_t b) { return original_of[a] < original_of[b]; });
  }

  Candidate run(const FactorizedInstance& inst) {
    if (inst.n.size() == 1) {
      ++leaves_;
      Solution base = solve_base(inst);
      return {std::move(base.value), std::move(base.assignment.blocks)};
    }
    const TermPartition partition = partition_terms(inst);
    const auto cells = enumerate_cells(build_functionals(inst, partition));
    std::optional<Candidate> best;
    for (const auto& cell : cells) {
      BitVector fixed = partial_solution(cell);
      Candidate candidate = run(build_child(inst, partition, fixed));
      candidate.blocks.push_back(std::move(fixed));
      if (!best || better(candidate, *best)) best = std::move(candidate);
    }
    return std::move(*best);
  }

  std::uint64_t leaves() const { return leaves_; }

 private:
  // Higher value wins; ties go to the lexicographically smaller assignment
  // with blocks read in their original order. Blocks fixed further up the
  // recursion are shared by both candidates and do not affect the order.
  bool better(const Candidate& a, const Candidate& b) const {
    if (a.value != b.value) return a.value > b.value;
    const std::size_t depth = a.blocks.size();
    for (std::size_t position : by_original_) {
      if (position >= depth) continue;
      if (a.blocks[position] != b.blocks[position]) return a.blocks[position] < b.blocks[position];
    }
    return false;
  }

  std::vector<std::size_t> by_original_;
  std::uint64_t leaves_ = 0;
};

}  // namespace

bool BudgetReport::within_limit() const { return total <= BigInt(std::to_string(limit)); }

BudgetExceeded::BudgetExceeded(BudgetReport report)
    : BudgetError("predicted " + report.total.get_str() + " leaves exceeds budget " + std::to_string(report.limit)),
      report_(std::move(report)) {}

TermPartition partition_terms(const FactorizedInstance& inst) {
  const std::size_t s = inst.n.size();
  if (s < 2) throw ValidationError("term partition needs at least two blocks");
  const std::size_t last = s - 1;
  TermPartition out;
  for (std::size_t t = 0; t < inst.terms.size(); ++t) {
    const auto& blocks = inst.terms[t].blocks;
    if (blocks.empty() || blocks.back() != last) {
      out.alpha.push_back(t);
    } else if (blocks.size() == 1) {
      out.gamma.push_back(t);
    } else {
      out.beta.push_back(t);
    }
  }
  return out;
}

std::vector<AffineFunctional> build_functionals(const FactorizedInstance& inst, const TermPartition& partition) {
  const std::size_t last = inst.n.size() - 1;
  const std::size_t count = inst.n[last];
  std::vector<AffineFunctional> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k].linear.resize(partition.beta.size());
    for (std::size_t b = 0; b < partition.beta.size(); ++b) {
      out[k].linear[b] = inst.terms[partition.beta[b]].coeffs.back()[k];
    }
    for (std::size_t t : partition.gamma) out[k].constant += inst.terms[t].coeffs.back()[k];
  }
  return out;
}

BitVector partial_solution(const SignVector& signs) {
  BitVector x(signs.size());
  for (std::size_t k = 0; k < signs.size(); ++k) x[k] = signs[k] > 0 ? 1 : 0;
  return x;
}

FactorizedInstance build_child(const FactorizedInstance& inst, const TermPartition& partition, const BitVector& fixed) {
  const std::size_t last = inst.n.size() - 1;
  FactorizedInstance child;
  child.n.assign(inst.n.begin(), inst.n.end() - 1);
  child.offset = inst.offset;
  for (std::size_t t : partition.gamma) child.offset += select_sum(inst.terms[t].coeffs.back(), fixed);

  // Keep the original term order among survivors.
  std::vector<std::size_t> kept(partition.alpha);
  kept.insert(kept.end(), partition.beta.begin(), partition.beta.end());
  std::sort(kept.begin(), kept.end());
  for (std::size_t t : kept) {
    const Term& term = inst.terms[t];
    if (term.blocks.back() != last) {
      child.terms.push_back(term);
      continue;
    }
    const Rational scalar = select_sum(term.coeffs.back(), fixed);
    if (scalar == 0) continue;
    Term reduced;
    reduced.blocks.assign(term.blocks.begin(), term.blocks.end() - 1);
    reduced.coeffs.assign(term.coeffs.begin(), term.coeffs.end() - 1);
    if (scalar != 1) {
      for (auto& c : reduced.coeffs.front()) c *= scalar;
    }
    child.terms.push_back(std::move(reduced));
  }
  return child;
}

Solution solve_base(const FactorizedInstance& inst) {
  if (inst.n.size() != 1) throw ValidationError("base case needs exactly one block");
  RationalVector column(inst.n[0]);
  for (const auto& term : inst.terms) {
    for (std::size_t k = 0; k < column.size(); ++k) column[k] += term.coeffs.front()[k];
  }
  Solution out;
  out.assignment.blocks.emplace_back(column.size(), 0);
  out.value = inst.offset;
  for (std::size_t k = 0; k < column.size(); ++k) {
    if (column[k] > 0) {
      out.assignment.blocks[0][k] = 1;
      out.value += column[k];
    }
  }
  out.leaves_explored = 1;
  return out;
}

std::vector<std::size_t> choose_order(const FactorizedInstance& inst) {
  const auto m = compute_m(inst);
  const std::size_t first = static_cast<std::size_t>(std::max_element(m.begin(), m.end()) - m.begin());
  std::vector<std::size_t> perm{first};
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (j != first) perm.push_back(j);
  }
  return perm;
}

FactorizedInstance permute_blocks(const FactorizedInstance& inst, const std::vector<std::size_t>& perm) {
  const std::size_t s = inst.n.size();
  if (perm.size() != s) throw ValidationError("block permutation has wrong length");
  std::vector<std::size_t> position(s, s);
  for (std::size_t p = 0; p < s; ++p) {
    if (perm[p] >= s || position[perm[p]] != s) throw ValidationError("invalid block permutation");
    position[perm[p]] = p;
  }
  FactorizedInstance out;
  out.offset = inst.offset;
  out.n.resize(s);
  for (std::size_t p = 0; p < s; ++p) out.n[p] = inst.n[perm[p]];
  for (const auto& term : inst.terms) {
    std::vector<std::pair<std::size_t, const RationalVector*>> parts;
    for (std::size_t q = 0; q < term.blocks.size(); ++q) parts.emplace_back(position[term.blocks[q]], &term.coeffs[q]);
    std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    Term relabeled;
    for (const auto& [block, coeffs] : parts) {
      relabeled.blocks.push_back(block);
      relabeled.coeffs.push_back(*coeffs);
    }
    out.terms.push_back(std::move(relabeled));
  }
  return out;
}

BudgetReport check_budget(const FactorizedInstance& inst, std::uint64_t limit) {
  BudgetReport report;
  report.m = compute_m(inst);
  report.limit = limit;
  report.per_level.assign(inst.n.size(), BigInt(1));
  for (std::size_t j = 1; j < inst.n.size(); ++j) {
    report.per_level[j] = generic_cell_count(inst.n[j], report.m[j]);
  }
  report.total = 1;
  for (const auto& level : report.per_level) report.total *= level;
  return report;
}

Solution solve(const FactorizedInstance& inst, const SolveOptions& options) {
  validate(inst);
  std::vector<std::size_t> perm(inst.n.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  if (options.order == OrderPolicy::Auto) perm = choose_order(inst);
  const FactorizedInstance working = permute_blocks(inst, perm);

  BudgetReport report = check_budget(working, options.leaf_budget);
  if (!report.within_limit()) throw BudgetExceeded(std::move(report));

  Search search(perm);
  Candidate best = search.run(working);

  Solution out;
  out.assignment.blocks.resize(inst.n.size());
  for (std::size_t p = 0; p < perm.size(); ++p) out.assignment.blocks[perm[p]] = std::move(best.blocks[p]);
  out.value = std::move(best.value);
  out.leaves_explored = search.leaves();
  if (eval_factorized(inst, out.assignment) != out.value) {
    throw std::logic_error("solver leaf value disagrees with the objective");
  }
  return out;
}

Solution solve_affine(const AffineFactorizedInstance& inst, const SolveOptions& options) {
  validate(inst);
  Solution out = solve(affine_to_linear(inst), options);
  if (eval_affine(inst, out.assignment) != out.value) {
    throw std::logic_error("affine expansion changed the objective value");
  }
  return out;
}

RationalVector lambda_at(const FactorizedInstance& inst, const TermPartition& partition, const Assignment& x) {
  check_assignment(inst.n, x);
  RationalVector lambda;
  lambda.reserve(partition.beta.size());
  for (std::size_t t : partition.beta) {
    const Term& term = inst.terms[t];
    Rational product = 1;
    for (std::size_t p = 0; p + 1 < term.blocks.size(); ++p) {
      product *= select_sum(term.coeffs[p], x.blocks[term.blocks[p]]);
    }
    lambda.push_back(std::move(product));
  }
  return lambda;
}

std::size_t flip_optimality_violations(const FactorizedInstance& inst, const Assignment& x) {
  check_assignment(inst.n, x);
  const Rational value = eval_factorized(inst, x);
  const std::size_t s = inst.n.size();
  std::size_t violations = 0;
  for (std::size_t j = 0; j < s; ++j) {
    // Coefficient of x^j_k with every other block held fixed.
    RationalVector slope(inst.n[j]);
    if (s == 1) {
      for (const auto& term : inst.terms) {
        for (std::size_t k = 0; k < slope.size(); ++k) slope[k] += term.coeffs.front()[k];
      }
    } else {
      std::vector<std::size_t> perm;
      for (std::size_t b = 0; b < s; ++b) {
        if (b != j) perm.push_back(b);
      }
      perm.push_back(j);
      const FactorizedInstance relabeled = permute_blocks(inst, perm);
      Assignment moved;
      for (std::size_t b : perm) moved.blocks.push_back(x.blocks[b]);
      const TermPartition partition = partition_terms(relabeled);
      const auto lambda = lambda_at(relabeled, partition, moved);
      const auto functionals = build_functionals(relabeled, partition);
      for (std::size_t k = 0; k < slope.size(); ++k) slope[k] = functionals[k](lambda);
    }
    for (std::size_t k = 0; k < slope.size(); ++k) {
      const int h = sign(slope[k]);
      const bool bit = x.blocks[j][k] != 0;
      if ((h > 0 && !bit) || (h < 0 && bit)) {
        ++violations;
      } else if (h == 0) {
        Assignment flipped = x;
        flipped.blocks[j][k] ^= 1;
        if (eval_factorized(inst, flipped) != value) ++violations;
      }
    }
  }
  return violations;
}

}  // namespace facpoly
