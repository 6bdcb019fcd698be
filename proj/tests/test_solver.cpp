#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "facpoly/errors.hpp"
#include "facpoly/oracle.hpp"
#include "facpoly/solver.hpp"
#include "test_support.hpp"

namespace facpoly {
namespace {

using testing::bits;
using testing::q;
using testing::vec;

Term term(std::vector<std::size_t> blocks, std::vector<RationalVector> coeffs) { return Term{std::move(blocks), std::move(coeffs)}; }

FactorizedInstance worked_example() {
  FactorizedInstance inst;
  inst.n = {2, 2};
  inst.terms = {term({0, 1}, {vec({1, -1}), vec({1, -2})})};
  return inst;
}

oracle::RandomSpec small_spec(std::uint64_t seed) {
  oracle::RandomSpec spec;
  spec.seed = seed;
  spec.s_max = 4;
  spec.n_max = 4;
  spec.terms_max = 4;
  spec.den_max = 3;
  return spec;
}

std::size_t bit_count(const FactorizedInstance& inst) { return std::accumulate(inst.n.begin(), inst.n.end(), std::size_t{0}); }

// Every leaf of the recursion, rebuilt from the public pieces.
void collect_leaves(const FactorizedInstance& inst, std::vector<BitVector> fixed_suffix,
                    std::vector<std::pair<Assignment, Rational>>& leaves) {
  if (inst.n.size() == 1) {
    const Solution base = solve_base(inst);
    Assignment x = base.assignment;
    for (auto it = fixed_suffix.rbegin(); it != fixed_suffix.rend(); ++it) x.blocks.push_back(*it);
    leaves.emplace_back(std::move(x), base.value);
    return;
  }
  const auto partition = partition_terms(inst);
  for (const auto& cell : enumerate_cells(build_functionals(inst, partition))) {
    const BitVector fixed = partial_solution(cell);
    auto suffix = fixed_suffix;
    suffix.push_back(fixed);
    collect_leaves(build_child(inst, partition, fixed), std::move(suffix), leaves);
  }
}

TEST(PartitionTerms, Example) {
  FactorizedInstance inst;
  inst.n = {1, 1, 1};
  inst.terms = {term({0, 1}, {vec({1}), vec({1})}), term({1, 2}, {vec({1}), vec({1})}), term({2}, {vec({1})}), term({0}, {vec({1})})};
  const auto p = partition_terms(inst);
  EXPECT_EQ(p.alpha, (std::vector<std::size_t>{0, 3}));
  EXPECT_EQ(p.beta, (std::vector<std::size_t>{1}));
  EXPECT_EQ(p.gamma, (std::vector<std::size_t>{2}));
}

TEST(PartitionTerms, NoTermOnLastBlockAndAllGamma) {
  FactorizedInstance inst;
  inst.n = {1, 1};
  inst.terms = {term({0}, {vec({1})})};
  auto p = partition_terms(inst);
  EXPECT_TRUE(p.beta.empty());
  EXPECT_TRUE(p.gamma.empty());
  inst.terms = {term({1}, {vec({1})}), term({1}, {vec({2})})};
  p = partition_terms(inst);
  EXPECT_TRUE(p.alpha.empty());
  EXPECT_TRUE(p.beta.empty());
  EXPECT_EQ(p.gamma.size(), 2U);
}

TEST(PartitionTerms, CoversAllTermsAndBetaIsM) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto spec = small_spec(seed);
    spec.s_min = 2;
    const auto inst = oracle::gen_random(spec);
    const auto p = partition_terms(inst);
    std::vector<std::size_t> all = p.alpha;
    all.insert(all.end(), p.beta.begin(), p.beta.end());
    all.insert(all.end(), p.gamma.begin(), p.gamma.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expected(inst.terms.size());
    std::iota(expected.begin(), expected.end(), std::size_t{0});
    EXPECT_EQ(all, expected);
    EXPECT_EQ(p.beta.size(), compute_m(inst).back());
  }
}

TEST(PartitionTerms, NeedsTwoBlocks) {
  FactorizedInstance inst;
  inst.n = {2};
  inst.terms = {term({0}, {vec({1, 1})})};
  EXPECT_THROW(partition_terms(inst), ValidationError);
}

TEST(BuildFunctionals, ReadOff) {
  FactorizedInstance inst;
  inst.n = {1, 2};
  inst.terms = {term({0, 1}, {vec({5}), vec({1, -1})}), term({1}, {vec({0, 3})})};
  const auto h = build_functionals(inst, partition_terms(inst));
  ASSERT_EQ(h.size(), 2U);
  EXPECT_EQ(h[0].linear, vec({1}));
  EXPECT_EQ(h[0].constant, 0);
  EXPECT_EQ(h[1].linear, vec({-1}));
  EXPECT_EQ(h[1].constant, 3);
}

TEST(BuildFunctionals, NoBetaGivesConstantsAndGreedyChoice) {
  FactorizedInstance inst;
  inst.n = {1, 3};
  inst.terms = {term({0}, {vec({1})}), term({1}, {vec({2, -1, 0})})};
  const auto h = build_functionals(inst, partition_terms(inst));
  for (const auto& f : h) EXPECT_EQ(f.dim(), 0U);
  const auto cells = enumerate_cells(h);
  ASSERT_EQ(cells.size(), 1U);
  EXPECT_EQ(partial_solution(cells[0]), bits("101"));
}

TEST(BuildFunctionals, RewritingIdentity) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto spec = small_spec(seed);
    spec.s_min = 2;
    spec.n_max = 3;
    const auto inst = oracle::gen_random(spec);
    const auto p = partition_terms(inst);
    const auto h = build_functionals(inst, p);
    testing::each_assignment(inst.n, [&](const Assignment& x) {
      const auto lambda = lambda_at(inst, p, x);
      Rational value = inst.offset;
      for (std::size_t t : p.alpha) {
        Rational product = 1;
        for (std::size_t i = 0; i < inst.terms[t].blocks.size(); ++i) {
          product *= select_sum(inst.terms[t].coeffs[i], x.blocks[inst.terms[t].blocks[i]]);
        }
        value += product;
      }
      for (std::size_t k = 0; k < h.size(); ++k) {
        if (x.blocks.back()[k]) value += h[k](lambda);
      }
      ASSERT_EQ(value, eval_factorized(inst, x));
    });
  }
}

TEST(PartialSolution, Mapping) {
  EXPECT_EQ(partial_solution({1, 1, -1}), bits("110"));
  EXPECT_EQ(partial_solution({-1, -1}), bits("00"));
  EXPECT_EQ(partial_solution({1, 1, 1}), bits("111"));
}

TEST(BuildChild, Example) {
  FactorizedInstance inst;
  inst.n = {2, 2};
  inst.terms = {term({0, 1}, {vec({1, -1}), vec({1, 0})}), term({1}, {vec({0, 3})})};
  const auto child = build_child(inst, partition_terms(inst), bits("11"));
  EXPECT_EQ(child.n, (std::vector<std::size_t>{2}));
  ASSERT_EQ(child.terms.size(), 1U);
  EXPECT_EQ(child.terms[0].blocks, (std::vector<std::size_t>{0}));
  EXPECT_EQ(child.terms[0].coeffs[0], vec({1, -1}));
  EXPECT_EQ(child.offset, 3);
}

TEST(BuildChild, ZeroFixingDropsBeta) {
  FactorizedInstance inst;
  inst.n = {2, 2};
  inst.offset = q(1, 2);
  inst.terms = {term({0, 1}, {vec({1, -1}), vec({1, 0})}), term({1}, {vec({0, 3})}), term({0}, {vec({4, 4})})};
  const auto child = build_child(inst, partition_terms(inst), bits("00"));
  ASSERT_EQ(child.terms.size(), 1U);
  EXPECT_EQ(child.terms[0].coeffs[0], vec({4, 4}));
  EXPECT_EQ(child.offset, q(1, 2));
}

TEST(BuildChild, ValueIdentity) {
  oracle::Rng rng(99);
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    auto spec = small_spec(seed);
    spec.s_min = 2;
    spec.n_max = 3;
    const auto inst = oracle::gen_random(spec);
    const auto p = partition_terms(inst);
    BitVector fixed(inst.n.back());
    for (auto& b : fixed) b = rng.coin();
    const auto child = build_child(inst, p, fixed);
    testing::each_assignment(child.n, [&](const Assignment& y) {
      Assignment x = y;
      x.blocks.push_back(fixed);
      ASSERT_EQ(eval_factorized(child, y), eval_factorized(inst, x));
    });
  }
}

TEST(SolveBase, Examples) {
  FactorizedInstance inst;
  inst.n = {2};
  inst.terms = {term({0}, {vec({1, -2})}), term({0}, {vec({2, 1})})};
  const auto sol = solve_base(inst);
  EXPECT_EQ(sol.assignment.blocks[0], bits("10"));
  EXPECT_EQ(sol.value, 3);

  inst.terms = {term({0}, {vec({0, 0})})};
  inst.offset = q(-5, 3);
  const auto zero = solve_base(inst);
  EXPECT_EQ(zero.assignment.blocks[0], bits("00"));
  EXPECT_EQ(zero.value, q(-5, 3));
}

TEST(SolveBase, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto spec = small_spec(seed);
    spec.s_max = 1;
    spec.n_max = 8;
    const auto inst = oracle::gen_random(spec);
    const auto sol = solve_base(inst);
    const auto brute = oracle::brute_force(inst);
    EXPECT_EQ(sol.value, brute.value);
    // Ties go to 0, so the base solution is the lexicographically smallest maximizer.
    EXPECT_EQ(sol.assignment, brute.assignment);
  }
}

TEST(Solve, WorkedExample) {
  const auto sol = solve(worked_example());
  EXPECT_EQ(sol.value, 2);
  EXPECT_EQ(sol.assignment.blocks[0], bits("01"));
  EXPECT_EQ(sol.assignment.blocks[1], bits("01"));
  EXPECT_GE(sol.leaves_explored, 1U);
}

TEST(Solve, NonpositiveSingletonsGiveZeroAssignment) {
  FactorizedInstance inst;
  inst.n = {3, 2, 2};
  inst.offset = q(7, 4);
  inst.terms = {term({0}, {vec({-1, 0, -3})}), term({1}, {vec({0, -2})}), term({2}, {vec({-1, -1})})};
  const auto sol = solve(inst);
  EXPECT_EQ(sol.value, q(7, 4));
  // Functionals that vanish identically take the + side.
  EXPECT_EQ(sol.assignment.blocks[0], bits("000"));
  EXPECT_EQ(sol.assignment.blocks[1], bits("10"));
  EXPECT_EQ(sol.assignment.blocks[2], bits("00"));
}

TEST(Solve, TriangleMaxCut) {
  oracle::Graph triangle{3, {{0, 1}, {0, 2}, {1, 2}}};
  const auto reduction = oracle::maxcut_to_factorized(triangle);
  EXPECT_EQ(solve(reduction.instance).value, 2);
}

TEST(Solve, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto inst = oracle::gen_random(small_spec(seed));
    if (bit_count(inst) > 16) continue;
    const auto sol = solve(inst);
    const auto brute = oracle::brute_force(inst);
    ASSERT_EQ(sol.value, brute.value) << "seed " << seed;
    EXPECT_EQ(eval_factorized(inst, sol.assignment), sol.value);
  }
}

TEST(Solve, IdentityOrderGivesSameValue) {
  for (std::uint64_t seed = 500; seed < 600; ++seed) {
    const auto inst = oracle::gen_random(small_spec(seed));
    SolveOptions identity;
    identity.order = OrderPolicy::Identity;
    EXPECT_EQ(solve(inst).value, solve(inst, identity).value);
  }
}

TEST(Solve, EveryLeafIsFeasibleAndBounded) {
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    const auto inst = oracle::gen_random(small_spec(seed));
    SolveOptions identity;
    identity.order = OrderPolicy::Identity;
    const auto sol = solve(inst, identity);
    std::vector<std::pair<Assignment, Rational>> leaves;
    collect_leaves(inst, {}, leaves);
    EXPECT_EQ(leaves.size(), sol.leaves_explored);
    Rational best = leaves.front().second;
    for (const auto& [x, value] : leaves) {
      check_assignment(inst.n, x);
      EXPECT_EQ(eval_factorized(inst, x), value);
      EXPECT_LE(value, sol.value);
      best = std::max(best, value);
    }
    EXPECT_EQ(best, sol.value);
  }
}

TEST(Solve, TieBreakIsLexicographicAmongLeaves) {
  // Two leaves, (0,0) and (1,1), both worth 0.
  FactorizedInstance inst;
  inst.n = {1, 1};
  inst.terms = {term({0, 1}, {vec({1}), vec({1})}), term({1}, {vec({-1})})};
  SolveOptions identity;
  identity.order = OrderPolicy::Identity;
  const auto sol = solve(inst, identity);
  EXPECT_EQ(sol.leaves_explored, 2U);
  EXPECT_EQ(sol.value, 0);
  EXPECT_EQ(sol.assignment, zero_assignment(inst.n));
  EXPECT_EQ(solve(inst).assignment, zero_assignment(inst.n));
}

TEST(Solve, FlipOptimalityAtOptimum) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const auto inst = oracle::gen_random(small_spec(seed));
    EXPECT_EQ(flip_optimality_violations(inst, solve(inst).assignment), 0U) << "seed " << seed;
  }
}

TEST(FlipOptimality, AgreesWithSingleFlipOracle) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto spec = small_spec(seed);
    spec.n_max = 2;
    const auto inst = oracle::gen_random(spec);
    testing::each_assignment(inst.n, [&](const Assignment& x) {
      const Rational value = eval_factorized(inst, x);
      std::size_t improving = 0;
      for (std::size_t j = 0; j < inst.n.size(); ++j) {
        for (std::size_t k = 0; k < inst.n[j]; ++k) {
          Assignment y = x;
          y.blocks[j][k] ^= 1;
          improving += eval_factorized(inst, y) > value;
        }
      }
      ASSERT_EQ(flip_optimality_violations(inst, x), improving);
    });
  }
}

TEST(Solve, BlockPermutationInvariance) {
  oracle::Rng rng(12);
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    const auto inst = oracle::gen_random(small_spec(seed));
    std::vector<std::size_t> perm(inst.n.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(i) - 1))]);
    const auto relabeled = permute_blocks(inst, perm);
    EXPECT_EQ(solve(relabeled).value, solve(inst).value);
    const auto sol = solve(inst);
    Assignment moved;
    for (auto b : perm) moved.blocks.push_back(sol.assignment.blocks[b]);
    EXPECT_EQ(eval_factorized(relabeled, moved), sol.value);
  }
}

TEST(Solve, ScalingCovarianceOfSingleTerm) {
  oracle::Rng rng(21);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto spec = small_spec(seed);
    spec.terms_min = spec.terms_max = 1;
    spec.max_term_size = 0;
    const auto inst = oracle::gen_random(spec);
    auto scaled = inst;
    Rational rho = 1;
    for (auto& c : scaled.terms[0].coeffs) {
      const Rational factor = q(rng.uniform(1, 5), static_cast<unsigned long>(rng.uniform(1, 4)));
      rho *= factor;
      for (auto& v : c) v *= factor;
    }
    EXPECT_EQ(solve(scaled).value, rho * solve(inst).value);
    const auto before = oracle::brute_force_optima(inst);
    const auto after = oracle::brute_force_optima(scaled);
    EXPECT_EQ(before.assignments, after.assignments);
    EXPECT_EQ(after.value, rho * before.value);
  }
}

TEST(SolveAffine, Examples) {
  AffineFactorizedInstance constant;
  constant.n = {2, 1};
  constant.terms = {AffineTerm{{0, 1}, {RationalVector(2), RationalVector(1)}, {2, 3}}};
  EXPECT_EQ(solve_affine(constant).value, 6);

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto affine = oracle::gen_random_affine(small_spec(seed));
    FactorizedInstance linear;
    linear.n = affine.n;
    for (auto& t : affine.terms) {
      std::fill(t.shifts.begin(), t.shifts.end(), Rational(0));
      linear.terms.push_back(term(t.blocks, t.coeffs));
    }
    const auto a = solve_affine(affine);
    const auto b = solve(linear);
    EXPECT_EQ(a.value, b.value);
  }
}

TEST(SolveAffine, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    const auto affine = oracle::gen_random_affine(small_spec(seed));
    const std::vector<std::size_t>& n = affine.n;
    if (std::accumulate(n.begin(), n.end(), std::size_t{0}) > 14) continue;
    Rational best;
    bool first = true;
    testing::each_assignment(n, [&](const Assignment& x) {
      const Rational v = eval_affine(affine, x);
      if (first || v > best) best = v;
      first = false;
    });
    EXPECT_EQ(solve_affine(affine).value, best) << "seed " << seed;
  }
}

TEST(ChooseOrder, Examples) {
  FactorizedInstance inst;
  inst.n = {1, 1, 1};
  inst.terms = {term({0, 1}, {vec({1}), vec({1})}), term({0, 1}, {vec({1}), vec({1})}), term({1, 2}, {vec({1}), vec({1})})};
  ASSERT_EQ(compute_m(inst), (std::vector<std::size_t>{0, 2, 1}));
  const auto perm = choose_order(inst);
  EXPECT_EQ(perm.front(), 1U);
  auto sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<std::size_t>{0, 1, 2}));

  inst.terms = {term({0}, {vec({1})}), term({1}, {vec({1})}), term({2}, {vec({1})})};
  EXPECT_EQ(choose_order(inst), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(ChooseOrder, FirstBlockHasMaximalM) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto inst = oracle::gen_random(small_spec(seed));
    const auto m = compute_m(inst);
    EXPECT_EQ(m[choose_order(inst).front()], *std::max_element(m.begin(), m.end()));
  }
}

TEST(CheckBudget, Examples) {
  FactorizedInstance single;
  single.n = {4};
  single.terms = {term({0}, {vec({1, 1, 1, 1})})};
  EXPECT_EQ(check_budget(single).total, 1);

  FactorizedInstance two;
  two.n = {3, 5};
  two.terms = {term({0, 1}, {vec({1, 1, 1}), vec({1, -1, 2, -2, 3})})};
  const auto report = check_budget(two);
  EXPECT_EQ(report.per_level[1], 6);
  EXPECT_EQ(report.total, 6);
  EXPECT_TRUE(report.within_limit());
}

TEST(CheckBudget, TotalIsProductAndBoundsLeaves) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto spec = small_spec(seed);
    spec.s_min = 3;
    const auto inst = oracle::gen_random(spec);
    const auto report = check_budget(inst);
    BigInt product = 1;
    for (const auto& level : report.per_level) product *= level;
    EXPECT_EQ(report.total, product);
    EXPECT_GE(report.total, 1);
    SolveOptions identity;
    identity.order = OrderPolicy::Identity;
    EXPECT_LE(BigInt(std::to_string(solve(inst, identity).leaves_explored)), report.total);
  }
}

TEST(Solve, BudgetRefusal) {
  FactorizedInstance inst;
  inst.n = {3, 5};
  inst.terms = {term({0, 1}, {vec({1, 1, 1}), vec({1, -1, 2, -2, 3})})};
  SolveOptions tight;
  tight.order = OrderPolicy::Identity;
  tight.leaf_budget = 5;
  try {
    solve(inst, tight);
    FAIL() << "expected BudgetExceeded";
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.report().total, 6);
    EXPECT_FALSE(e.report().within_limit());
  }
  tight.leaf_budget = 6;
  EXPECT_NO_THROW(solve(inst, tight));
}

TEST(Solve, RejectsInvalidInstances) {
  FactorizedInstance inst = worked_example();
  inst.terms.push_back(Term{{}, {}});
  EXPECT_THROW(solve(inst), ValidationError);
}

}  // namespace
}  // namespace facpoly
