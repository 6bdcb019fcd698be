#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "facpoly/instances.hpp"
#include "facpoly/reductions.hpp"

namespace facpoly::oracle {

inline constexpr std::size_t kDefaultCap = 24;

/// Seeded generator with platform-independent integer sampling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);
  bool coin() { return uniform(0, 1) == 1; }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Ranges for random factorized instances. Coefficients are p/q with p in
/// [num_min, num_max] and q in [den_min, den_max].
struct RandomSpec {
  std::uint64_t seed = 0;
  std::size_t s_min = 1, s_max = 3;
  std::size_t n_min = 1, n_max = 4;
  std::size_t terms_min = 1, terms_max = 4;
  std::int64_t num_min = -3, num_max = 3;
  std::int64_t den_min = 1, den_max = 1;
  /// Largest index set drawn; 0 means up to s. Index sets are uniform over
  /// nonempty subsets of allowed size.
  std::size_t max_term_size = 0;
};

Rational random_rational(Rng& rng, const RandomSpec& spec);
RationalVector random_vector(Rng& rng, const RandomSpec& spec, std::size_t size);

FactorizedInstance gen_random(const RandomSpec& spec);
/// Same shape distribution; each (term, block) also gets a shift d.
AffineFactorizedInstance gen_random_affine(const RandomSpec& spec);

/// Maximum over all 2^{sum n_j} assignments; the lexicographically smallest
/// maximizer. Throws BudgetError when sum n_j > cap.
Solution brute_force(const FactorizedInstance& inst, std::size_t cap = kDefaultCap);

struct Optima {
  Rational value;
  std::vector<Assignment> assignments;  // sorted; at most max_kept
  std::uint64_t count = 0;              // total number of maximizers
};

Optima brute_force_optima(const FactorizedInstance& inst, std::size_t cap = kDefaultCap,
                          std::size_t max_kept = 1U << 16);

struct ExplicitOptimum {
  BitVector x;
  Rational value;
  std::vector<BitVector> maximizers;
};

ExplicitOptimum brute_force_explicit(const ExplicitInstance& inst, std::size_t cap = kDefaultCap);

struct TensorOptimum {
  DenseTensor approximation;
  Rational error;
};

/// Minimum squared error over every binary-rank-<=t tensor built by
/// recover_tensor from t*sum n_j bits.
TensorOptimum brute_force_btf(const DenseTensor& a, std::size_t t, std::size_t cap = kDefaultCap);

/// Calls visit for every assignment of the given shape, lexicographically.
void for_each_assignment(const std::vector<std::size_t>& n, const std::function<void(const Assignment&)>& visit);

struct Graph {
  std::size_t nodes = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // 0-based, simple
};

void validate(const Graph& graph);

/// Two-block encoding of max cut: copies x, y of the node vector, cut terms
/// x_i + y_j - 2 x_i y_j, and an agreement penalty n(2 x_i y_i - x_i - y_i).
/// Exactly n + 2 terms. Recover the cut from the first block.
FactorizedReduction maxcut_to_factorized(const Graph& graph);

/// Maximum cut size by enumerating all 2^n node subsets.
std::size_t max_cut_value(const Graph& graph);
std::size_t cut_size(const Graph& graph, const BitVector& side);

}  // namespace facpoly::oracle
