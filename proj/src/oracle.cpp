#include "facpoly/oracle.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <type_traits>

#include "facpoly/errors.hpp"

namespace facpoly::oracle {
namespace {

using Wide = __int128;

void check_cap(std::size_t bits, std::size_t cap) {
  if (bits > cap) {
    throw BudgetError("exhaustive search over " + std::to_string(bits) + " variables exceeds cap " +
                      std::to_string(cap));
  }
}

BigInt to_big(Wide value) {
  const bool negative = value < 0;
  unsigned __int128 magnitude = negative ? static_cast<unsigned __int128>(-(value + 1)) + 1
                                         : static_cast<unsigned __int128>(value);
  BigInt high = static_cast<unsigned long>(static_cast<std::uint64_t>(magnitude >> 64));
  BigInt low = static_cast<unsigned long>(static_cast<std::uint64_t>(magnitude));
  BigInt out = (high << 64) + low;
  return negative ? BigInt(-out) : out;
}

std::optional<Wide> to_wide(const BigInt& value) {
  if (mpz_sizeinbase(value.get_mpz_t(), 2) > 62) return std::nullopt;
  return static_cast<Wide>(value.get_si());
}

// Objective scaled to integers: value = (sum_t weight_t prod_p <coeff, x>) / scale + offset.
struct IntegerModel {
  struct Part {
    std::size_t term;
    std::size_t position;
  };
  BigInt scale;
  std::vector<Wide> weight;                          // per term
  std::vector<std::vector<std::vector<Wide>>> coeff;  // [term][position][k]
  std::vector<std::vector<Part>> parts_of_block;      // terms touching each block
};

std::optional<IntegerModel> integer_model(const FactorizedInstance& inst) {
  IntegerModel model;
  std::vector<BigInt> term_den(inst.terms.size(), BigInt(1));
  std::vector<std::vector<std::vector<BigInt>>> scaled(inst.terms.size());
  model.parts_of_block.resize(inst.n.size());
  for (std::size_t t = 0; t < inst.terms.size(); ++t) {
    const Term& term = inst.terms[t];
    for (std::size_t p = 0; p < term.blocks.size(); ++p) {
      BigInt den = 1;
      for (const auto& c : term.coeffs[p]) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
      std::vector<BigInt> ints;
      for (const auto& c : term.coeffs[p]) ints.push_back(c.get_num() * (den / c.get_den()));
      scaled[t].push_back(std::move(ints));
      term_den[t] *= den;
      model.parts_of_block[term.blocks[p]].push_back({t, p});
    }
  }
  model.scale = 1;
  for (const auto& d : term_den) mpz_lcm(model.scale.get_mpz_t(), model.scale.get_mpz_t(), d.get_mpz_t());

  BigInt bound = 0;
  model.weight.resize(inst.terms.size());
  model.coeff.resize(inst.terms.size());
  for (std::size_t t = 0; t < inst.terms.size(); ++t) {
    const BigInt weight = model.scale / term_den[t];
    BigInt term_bound = weight;
    auto w = to_wide(weight);
    if (!w) return std::nullopt;
    model.weight[t] = *w;
    for (const auto& ints : scaled[t]) {
      BigInt l1 = 0;
      std::vector<Wide> row;
      for (const auto& v : ints) {
        l1 += abs(v);
        auto wide = to_wide(v);
        if (!wide) return std::nullopt;
        row.push_back(*wide);
      }
      if (!to_wide(l1)) return std::nullopt;
      term_bound *= l1;
      model.coeff[t].push_back(std::move(row));
    }
    bound += term_bound;
  }
  if (mpz_sizeinbase(bound.get_mpz_t(), 2) > 120) return std::nullopt;
  return model;
}

// Visits every assignment in Gray-code order with its exact value.
template <typename Visit>
void enumerate_values(const FactorizedInstance& inst, Visit&& visit) {
  const std::size_t total_bits = inst.variable_count();
  std::vector<std::pair<std::size_t, std::size_t>> position_of;  // flat bit -> (block, k)
  for (std::size_t j = 0; j < inst.n.size(); ++j) {
    for (std::size_t k = 0; k < inst.n[j]; ++k) position_of.emplace_back(j, k);
  }
  Assignment x = zero_assignment(inst.n);
  const std::uint64_t count = std::uint64_t{1} << total_bits;

  if (auto model = integer_model(inst)) {
    const std::size_t terms = inst.terms.size();
    std::vector<std::vector<Wide>> inner(terms);
    std::vector<Wide> term_value(terms, 0);
    for (std::size_t t = 0; t < terms; ++t) inner[t].assign(inst.terms[t].blocks.size(), 0);
    Wide sum = 0;
    const Rational inverse_scale = Rational(1) / Rational(model->scale);
    auto value_of = [&](Wide raw) -> Rational { return Rational(to_big(raw)) * inverse_scale + inst.offset; };
    visit(x, sum, value_of);
    for (std::uint64_t step = 1; step < count; ++step) {
      const auto [block, k] = position_of[static_cast<std::size_t>(std::countr_zero(step))];
      auto& bit = x.blocks[block][k];
      bit ^= 1;
      const Wide delta = bit ? 1 : -1;
      for (const auto& part : model->parts_of_block[block]) {
        inner[part.term][part.position] += delta * model->coeff[part.term][part.position][k];
        Wide product = model->weight[part.term];
        for (const auto& v : inner[part.term]) {
          product *= v;
          if (product == 0) break;
        }
        sum += product - term_value[part.term];
        term_value[part.term] = product;
      }
      visit(x, sum, value_of);
    }
    return;
  }

  // Rational fallback for coefficients too large for the integer path.
  for (std::uint64_t step = 0; step < count; ++step) {
    if (step > 0) {
      const auto [block, k] = position_of[static_cast<std::size_t>(std::countr_zero(step))];
      x.blocks[block][k] ^= 1;
    }
    const Rational value = eval_factorized(inst, x);
    visit(x, value, [](const Rational& v) -> Rational { return v; });
  }
}

}  // namespace

std::int64_t Rng::uniform(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw ValidationError("empty sampling range");
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<std::int64_t>(engine_());
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t draw = engine_();
  while (draw >= limit) draw = engine_();
  return lo + static_cast<std::int64_t>(draw % range);
}

Rational random_rational(Rng& rng, const RandomSpec& spec) {
  Rational value(rng.uniform(spec.num_min, spec.num_max), static_cast<unsigned long>(rng.uniform(spec.den_min, spec.den_max)));
  value.canonicalize();
  return value;
}

RationalVector random_vector(Rng& rng, const RandomSpec& spec, std::size_t size) {
  RationalVector v;
  v.reserve(size);
  for (std::size_t k = 0; k < size; ++k) v.push_back(random_rational(rng, spec));
  return v;
}

namespace {

void check_spec(const RandomSpec& spec) {
  if (spec.s_min < 1 || spec.s_min > spec.s_max || spec.n_min < 1 || spec.n_min > spec.n_max ||
      spec.terms_min < 1 || spec.terms_min > spec.terms_max || spec.num_min > spec.num_max ||
      spec.den_min < 1 || spec.den_min > spec.den_max || spec.s_max > 62) {
    throw ValidationError("invalid random instance ranges");
  }
}

std::vector<std::size_t> random_index_set(Rng& rng, std::size_t s, std::size_t max_size) {
  const std::size_t limit = max_size == 0 ? s : std::min(max_size, s);
  while (true) {
    const auto mask = static_cast<std::uint64_t>(rng.uniform(1, static_cast<std::int64_t>((std::uint64_t{1} << s) - 1)));
    if (static_cast<std::size_t>(std::popcount(mask)) > limit) continue;
    std::vector<std::size_t> blocks;
    for (std::size_t j = 0; j < s; ++j) {
      if ((mask >> j) & 1U) blocks.push_back(j);
    }
    return blocks;
  }
}

std::vector<std::size_t> random_shape(Rng& rng, const RandomSpec& spec) {
  const auto s = static_cast<std::size_t>(rng.uniform(static_cast<std::int64_t>(spec.s_min), static_cast<std::int64_t>(spec.s_max)));
  std::vector<std::size_t> n(s);
  for (auto& nj : n) nj = static_cast<std::size_t>(rng.uniform(static_cast<std::int64_t>(spec.n_min), static_cast<std::int64_t>(spec.n_max)));
  return n;
}

}  // namespace

FactorizedInstance gen_random(const RandomSpec& spec) {
  check_spec(spec);
  Rng rng(spec.seed);
  FactorizedInstance inst;
  inst.n = random_shape(rng, spec);
  const auto terms = rng.uniform(static_cast<std::int64_t>(spec.terms_min), static_cast<std::int64_t>(spec.terms_max));
  for (std::int64_t t = 0; t < terms; ++t) {
    Term term;
    term.blocks = random_index_set(rng, inst.n.size(), spec.max_term_size);
    for (std::size_t j : term.blocks) term.coeffs.push_back(random_vector(rng, spec, inst.n[j]));
    inst.terms.push_back(std::move(term));
  }
  return inst;
}

AffineFactorizedInstance gen_random_affine(const RandomSpec& spec) {
  check_spec(spec);
  Rng rng(spec.seed);
  AffineFactorizedInstance inst;
  inst.n = random_shape(rng, spec);
  const auto terms = rng.uniform(static_cast<std::int64_t>(spec.terms_min), static_cast<std::int64_t>(spec.terms_max));
  for (std::int64_t t = 0; t < terms; ++t) {
    AffineTerm term;
    term.blocks = random_index_set(rng, inst.n.size(), spec.max_term_size);
    for (std::size_t j : term.blocks) {
      term.coeffs.push_back(random_vector(rng, spec, inst.n[j]));
      term.shifts.push_back(random_rational(rng, spec));
    }
    inst.terms.push_back(std::move(term));
  }
  return inst;
}

Optima brute_force_optima(const FactorizedInstance& inst, std::size_t cap, std::size_t max_kept) {
  validate(inst);
  check_cap(inst.variable_count(), cap);
  Optima out;
  std::optional<Wide> best_wide;
  std::optional<Rational> best_rational;
  std::set<Assignment> kept;
  enumerate_values(inst, [&](const Assignment& x, const auto& raw, const auto& value_of) {
    auto& best = [&]() -> auto& {
      if constexpr (std::is_same_v<std::decay_t<decltype(raw)>, Wide>) {
        return best_wide;
      } else {
        return best_rational;
      }
    }();
    if (!best || raw > *best) {
      best = raw;
      kept.clear();
      out.count = 0;
      out.value = value_of(raw);
    }
    if (raw == *best) {
      ++out.count;
      if (kept.size() < max_kept) {
        kept.insert(x);
      } else if (x < *kept.rbegin()) {
        kept.erase(std::prev(kept.end()));
        kept.insert(x);
      }
    }
  });
  out.assignments.assign(kept.begin(), kept.end());
  return out;
}

Solution brute_force(const FactorizedInstance& inst, std::size_t cap) {
  Optima optima = brute_force_optima(inst, cap, 1);
  Solution out;
  out.assignment = std::move(optima.assignments.front());
  out.value = std::move(optima.value);
  return out;
}

ExplicitOptimum brute_force_explicit(const ExplicitInstance& inst, std::size_t cap) {
  validate(inst);
  check_cap(inst.nodes, cap);
  ExplicitOptimum out;
  const std::uint64_t count = std::uint64_t{1} << inst.nodes;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    BitVector x(inst.nodes);
    for (std::size_t k = 0; k < inst.nodes; ++k) x[k] = (mask >> (inst.nodes - 1 - k)) & 1U;
    const Rational value = eval_explicit(inst, x);
    if (mask == 0 || value > out.value) {
      out.value = value;
      out.x = x;
      out.maximizers.clear();
    }
    if (value == out.value) out.maximizers.push_back(std::move(x));
  }
  return out;
}

TensorOptimum brute_force_btf(const DenseTensor& a, std::size_t t, std::size_t cap) {
  validate(a);
  if (t == 0) throw ValidationError("rank t must be at least 1");
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < t; ++i) sizes.insert(sizes.end(), a.dims.begin(), a.dims.end());
  std::size_t bits = 0;
  for (auto size : sizes) bits += size;
  check_cap(bits, cap);

  TensorOptimum out;
  bool first = true;
  for_each_assignment(sizes, [&](const Assignment& x) {
    DenseTensor b = recover_tensor(x.blocks, a.dims, t);
    Rational error = eval_tensor_objective(a, b);
    if (first || error < out.error) {
      first = false;
      out.error = std::move(error);
      out.approximation = std::move(b);
    }
  });
  return out;
}

void for_each_assignment(const std::vector<std::size_t>& n, const std::function<void(const Assignment&)>& visit) {
  Assignment x = zero_assignment(n);
  while (true) {
    visit(x);
    // Increment, last bit fastest.
    std::size_t j = n.size();
    bool carry = true;
    while (carry && j-- > 0) {
      std::size_t k = n[j];
      while (carry && k-- > 0) {
        x.blocks[j][k] ^= 1;
        carry = x.blocks[j][k] == 0;
      }
    }
    if (carry) return;
  }
}

void validate(const Graph& graph) {
  if (graph.nodes == 0) throw ValidationError("graph has no nodes");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    auto [a, b] = graph.edges[e];
    if (a > b) std::swap(a, b);
    const std::string label = "edge " + std::to_string(e + 1);
    if (b >= graph.nodes) throw ValidationError(label + ": node out of range");
    if (a == b) throw ValidationError(label + ": self-loop");
    if (!seen.insert({a, b}).second) throw ValidationError(label + ": repeated edge");
  }
}

FactorizedReduction maxcut_to_factorized(const Graph& graph) {
  validate(graph);
  const std::size_t n = graph.nodes;
  const auto big_n = static_cast<long>(n);
  // f(x) = sum_i x_i (|{j > i : ij in E}| - n), g(y) = sum_j y_j (|{i < j : ij in E}| - n),
  // h(x, y) = sum_i (2 x_i) (n y_i - sum_{j > i, ij in E} y_j).
  RationalVector f(n, Rational(-big_n)), g(n, Rational(-big_n));
  std::vector<RationalVector> h_right(n, RationalVector(n));
  for (std::size_t i = 0; i < n; ++i) h_right[i][i] = big_n;
  for (auto [a, b] : graph.edges) {
    if (a > b) std::swap(a, b);
    f[a] += 1;
    g[b] += 1;
    h_right[a][b] -= 1;
  }
  FactorizedReduction out;
  out.instance.n = {n, n};
  out.instance.terms.push_back(Term{{0}, {std::move(f)}});
  out.instance.terms.push_back(Term{{1}, {std::move(g)}});
  for (std::size_t i = 0; i < n; ++i) {
    RationalVector left(n);
    left[i] = 2;
    out.instance.terms.push_back(Term{{0, 1}, {std::move(left), std::move(h_right[i])}});
  }
  out.certificate.direction = "max-cut->factorized";
  out.certificate.recover = "cut side := x^1";
  out.certificate.value_exact = false;
  return out;
}

std::size_t cut_size(const Graph& graph, const BitVector& side) {
  if (side.size() != graph.nodes) throw DimensionError("cut vector has wrong length");
  std::size_t cut = 0;
  for (const auto& [a, b] : graph.edges) {
    if (side[a] != side[b]) ++cut;
  }
  return cut;
}

std::size_t max_cut_value(const Graph& graph) {
  validate(graph);
  check_cap(graph.nodes, kDefaultCap);
  std::size_t best = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << graph.nodes); ++mask) {
    BitVector side(graph.nodes);
    for (std::size_t k = 0; k < graph.nodes; ++k) side[k] = (mask >> k) & 1U;
    best = std::max(best, cut_size(graph, side));
  }
  return best;
}

}  // namespace facpoly::oracle
