#include "facpoly/reductions.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "facpoly/errors.hpp"

namespace facpoly {
namespace {

RationalVector unit_vector(std::size_t size, std::size_t k, const Rational& value = 1) {
  RationalVector v(size);
  v[k] = value;
  return v;
}

RationalVector scaled(RationalVector v, const Rational& factor) {
  for (auto& x : v) x *= factor;
  return v;
}

// Instances need at least one term; a constant objective gets a zero term.
void ensure_nonempty(FactorizedInstance& inst) {
  if (inst.terms.empty()) inst.terms.push_back(Term{{0}, {RationalVector(inst.n.at(0))}});
}

Rational abs_value(const Rational& v) { return v < 0 ? Rational(-v) : v; }

}  // namespace

// ---------------------------------------------------------------------------
// Quadratic instances

void validate(const QuadraticInstance& inst) {
  if (inst.n.empty()) throw ValidationError("instance has no blocks (s must be >= 1)");
  for (std::size_t j = 0; j < inst.n.size(); ++j) {
    if (inst.n[j] == 0) throw ValidationError("block " + std::to_string(j + 1) + " has size 0");
  }
  if (inst.c.size() != inst.n.size()) throw ValidationError("expected one linear vector c per block");
  for (std::size_t j = 0; j < inst.n.size(); ++j) {
    if (inst.c[j].size() != inst.n[j]) {
      throw ValidationError("linear vector of block " + std::to_string(j + 1) + " has wrong length");
    }
  }
  for (const auto& [key, matrix] : inst.q) {
    const auto [i, j] = key;
    const std::string label = "Q(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
    if (i >= j || j >= inst.n.size()) throw ValidationError(label + ": needs 1 <= i < j <= s");
    if (matrix.rows() != inst.n[i] || matrix.cols() != inst.n[j]) {
      throw ValidationError(label + ": expected " + std::to_string(inst.n[i]) + "x" + std::to_string(inst.n[j]));
    }
  }
}

Rational eval_quadratic(const QuadraticInstance& inst, const Assignment& x) {
  check_assignment(inst.n, x);
  Rational total = 0;
  for (const auto& [key, matrix] : inst.q) {
    const auto& xi = x.blocks[key.first];
    const auto& xj = x.blocks[key.second];
    for (std::size_t a = 0; a < matrix.rows(); ++a) {
      if (!xi[a]) continue;
      for (std::size_t b = 0; b < matrix.cols(); ++b) {
        if (xj[b]) total += matrix(a, b);
      }
    }
  }
  for (std::size_t j = 0; j < inst.n.size(); ++j) total += select_sum(inst.c[j], x.blocks[j]);
  return total;
}

// ---------------------------------------------------------------------------
// Explicit <-> factorized

FactorizedReduction explicit_to_factorized(const ExplicitInstance& inst) {
  validate(inst);
  if (inst.nodes == 0) throw ValidationError("explicit instance has no nodes");
  const std::size_t n = inst.nodes;

  FactorizedReduction out;
  out.certificate.direction = "explicit->factorized";
  out.certificate.recover = "x := x^1";

  if (inst.edges.empty()) {
    out.instance.n = {n};
    out.instance.terms.push_back(Term{{0}, {inst.node_cost}});
    return out;
  }

  std::size_t copies = 0;
  Rational penalty = 1;
  for (const auto& edge : inst.edges) {
    copies = std::max(copies, edge.nodes.size());
    penalty += abs_value(edge.cost);
  }
  out.certificate.value_exact = false;
  out.instance.n.assign(copies, n);

  // Linear part per copy: node costs on copy 1, -M on every copy.
  for (std::size_t j = 0; j < copies; ++j) {
    RationalVector linear(n, Rational(-penalty));
    if (j == 0) {
      for (std::size_t k = 0; k < n; ++k) linear[k] += inst.node_cost[k];
    }
    out.instance.terms.push_back(Term{{j}, {std::move(linear)}});
  }
  // The p-th smallest node of an edge goes to copy p.
  for (const auto& edge : inst.edges) {
    if (edge.cost == 0) continue;
    Term term;
    for (std::size_t p = 0; p < edge.nodes.size(); ++p) {
      term.blocks.push_back(p);
      term.coeffs.push_back(unit_vector(n, edge.nodes[p], p == 0 ? edge.cost : Rational(1)));
    }
    out.instance.terms.push_back(std::move(term));
  }
  // s M prod_j x^j_k for every node.
  const Rational agreement = penalty * static_cast<unsigned long>(copies);
  for (std::size_t k = 0; k < n; ++k) {
    Term term;
    for (std::size_t j = 0; j < copies; ++j) {
      term.blocks.push_back(j);
      term.coeffs.push_back(unit_vector(n, k, j == 0 ? agreement : Rational(1)));
    }
    out.instance.terms.push_back(std::move(term));
  }
  return out;
}

BitVector recover_first_copy(const Assignment& x) {
  if (x.blocks.empty()) throw DimensionError("assignment has no blocks");
  return x.blocks.front();
}

std::pair<ExplicitInstance, ReductionCertificate> factorized_to_explicit(const FactorizedInstance& inst,
                                                                         std::size_t budget) {
  validate(inst);
  std::vector<std::size_t> first_node(inst.n.size(), 0);
  for (std::size_t j = 1; j < inst.n.size(); ++j) first_node[j] = first_node[j - 1] + inst.n[j - 1];

  std::size_t monomials = 0;
  for (const auto& term : inst.terms) {
    std::size_t count = 1;
    for (const auto& c : term.coeffs) {
      const auto support = static_cast<std::size_t>(std::count_if(c.begin(), c.end(), [](const Rational& v) { return v != 0; }));
      count = support == 0 ? 0 : (count > budget / support ? budget + 1 : count * support);
    }
    monomials += count;
    if (monomials > budget) {
      throw BudgetError("expansion exceeds " + std::to_string(budget) + " monomials");
    }
  }

  ExplicitInstance out;
  out.nodes = inst.variable_count();
  out.node_cost.assign(out.nodes, Rational(0));
  std::map<std::vector<std::size_t>, Rational> edges;
  for (const auto& term : inst.terms) {
    std::vector<std::vector<std::size_t>> support(term.blocks.size());
    for (std::size_t p = 0; p < term.blocks.size(); ++p) {
      for (std::size_t k = 0; k < term.coeffs[p].size(); ++k) {
        if (term.coeffs[p][k] != 0) support[p].push_back(k);
      }
      if (support[p].empty()) break;
    }
    if (std::any_of(support.begin(), support.end(), [](const auto& s) { return s.empty(); })) continue;
    std::vector<std::size_t> pick(term.blocks.size(), 0);
    while (true) {
      Rational cost = 1;
      std::vector<std::size_t> nodes;
      for (std::size_t p = 0; p < term.blocks.size(); ++p) {
        const std::size_t k = support[p][pick[p]];
        cost *= term.coeffs[p][k];
        nodes.push_back(first_node[term.blocks[p]] + k);
      }
      if (nodes.size() == 1) {
        out.node_cost[nodes.front()] += cost;
      } else {
        edges[nodes] += cost;
      }
      std::size_t p = term.blocks.size();
      while (p-- > 0) {
        if (++pick[p] < support[p].size()) break;
        pick[p] = 0;
      }
      if (p == static_cast<std::size_t>(-1)) break;
    }
  }
  for (auto& [nodes, cost] : edges) {
    if (cost != 0) out.edges.push_back(Hyperedge{nodes, cost});
  }

  ReductionCertificate cert;
  cert.direction = "factorized->explicit";
  cert.recover = "x^j_k := x_{n_1+...+n_{j-1}+k}";
  cert.value_shift = inst.offset;
  return {std::move(out), std::move(cert)};
}

// ---------------------------------------------------------------------------
// Affine products

FactorizedInstance affine_to_linear(const AffineFactorizedInstance& inst, std::size_t budget) {
  validate(inst);
  std::size_t expanded = 0;
  for (const auto& term : inst.terms) {
    if (term.blocks.size() >= 63) throw BudgetError("affine term over too many blocks");
    expanded += (std::size_t{1} << term.blocks.size()) - 1;
    if (expanded > budget) throw BudgetError("affine expansion exceeds " + std::to_string(budget) + " terms");
  }

  FactorizedInstance out;
  out.n = inst.n;
  out.offset = inst.offset;
  for (const auto& term : inst.terms) {
    const std::size_t size = term.blocks.size();
    std::vector<std::size_t> masks((std::size_t{1} << size) - 1);
    std::iota(masks.begin(), masks.end(), std::size_t{1});
    // Larger subsets first; among equal sizes, earlier blocks first.
    auto bits_of = [size](std::size_t mask) {
      std::vector<std::size_t> positions;
      for (std::size_t p = 0; p < size; ++p) {
        if ((mask >> p) & 1U) positions.push_back(p);
      }
      return positions;
    };
    std::sort(masks.begin(), masks.end(), [&](std::size_t a, std::size_t b) {
      const auto pa = bits_of(a), pb = bits_of(b);
      if (pa.size() != pb.size()) return pa.size() > pb.size();
      return pa < pb;
    });
    for (std::size_t mask : masks) {
      Rational scale = 1;
      for (std::size_t p = 0; p < size; ++p) {
        if (!((mask >> p) & 1U)) scale *= term.shifts[p];
      }
      if (scale == 0) continue;
      Term linear;
      for (std::size_t p : bits_of(mask)) {
        linear.blocks.push_back(term.blocks[p]);
        linear.coeffs.push_back(term.coeffs[p]);
      }
      if (scale != 1) linear.coeffs.front() = scaled(std::move(linear.coeffs.front()), scale);
      out.terms.push_back(std::move(linear));
    }
    Rational constant = 1;
    for (const auto& d : term.shifts) constant *= d;
    out.offset += constant;
  }
  ensure_nonempty(out);
  return out;
}

// ---------------------------------------------------------------------------
// Tensors

FactorizedInstance factored_tensor_to_FU(const FactoredTensor& tensor) {
  validate(tensor);
  FactorizedInstance out;
  out.n = tensor.dims;
  std::vector<std::size_t> all(tensor.dims.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (const auto& factor : tensor.factors) out.terms.push_back(Term{all, factor});
  ensure_nonempty(out);
  return out;
}

FactoredTensor factor_dense(const DenseTensor& tensor) {
  validate(tensor);
  FactoredTensor out;
  out.dims = tensor.dims;
  if (tensor.order() == 2) {
    RationalMatrix m(tensor.dims[0], tensor.dims[1]);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = tensor.entries[i * m.cols() + j];
    }
    const auto rf = rank_factorization(m);
    for (std::size_t l = 0; l < rf.rank; ++l) out.factors.push_back({rf.left.column(l), rf.right.column(l)});
    return out;
  }
  std::vector<std::size_t> index(tensor.order(), 0);
  for (std::size_t flat = 0; flat < tensor.entries.size(); ++flat) {
    if (tensor.entries[flat] != 0) {
      std::vector<RationalVector> factor;
      for (std::size_t j = 0; j < tensor.order(); ++j) {
        factor.push_back(unit_vector(tensor.dims[j], index[j], j == 0 ? tensor.entries[flat] : Rational(1)));
      }
      out.factors.push_back(std::move(factor));
    }
    for (std::size_t j = tensor.order(); j-- > 0;) {
      if (++index[j] < tensor.dims[j]) break;
      index[j] = 0;
    }
  }
  return out;
}

Rational squared_norm(const FactoredTensor& tensor) {
  validate(tensor);
  // <sum_p (x)a^p, sum_p' (x)a^p'> = sum_{p,p'} prod_j <a^{p,j}, a^{p',j}>
  Rational total = 0;
  for (const auto& left : tensor.factors) {
    for (const auto& right : tensor.factors) {
      Rational product = 1;
      for (std::size_t j = 0; j < tensor.dims.size() && product != 0; ++j) product *= inner_product(left[j], right[j]);
      total += product;
    }
  }
  return total;
}

DenseTensor recover_tensor(const std::vector<BitVector>& x, const std::vector<std::size_t>& dims, std::size_t t) {
  const std::size_t s = dims.size();
  if (s == 0) throw DimensionError("tensor has order 0");
  if (x.size() != t * s) {
    throw DimensionError("expected " + std::to_string(t * s) + " factor vectors, got " + std::to_string(x.size()));
  }
  for (std::size_t v = 0; v < x.size(); ++v) {
    if (x[v].size() != dims[v % s]) {
      throw DimensionError("factor vector (" + std::to_string(v / s + 1) + "," + std::to_string(v % s + 1) +
                           ") has wrong length");
    }
  }
  DenseTensor out = DenseTensor::zeros(dims);
  std::vector<std::size_t> index(s, 0);
  for (std::size_t flat = 0; flat < out.entries.size(); ++flat) {
    unsigned long count = 0;
    for (std::size_t i = 0; i < t; ++i) {
      bool all = true;
      for (std::size_t j = 0; j < s && all; ++j) all = x[i * s + j][index[j]] != 0;
      if (all) ++count;
    }
    out.entries[flat] = count;
    for (std::size_t j = s; j-- > 0;) {
      if (++index[j] < dims[j]) break;
      index[j] = 0;
    }
  }
  return out;
}

DenseTensor TensorFactorizationModel::recover(const Assignment& x) const {
  return recover_tensor(x.blocks, dims, t);
}

Rational TensorFactorizationModel::error(const Rational& value) const {
  return certificate.value_scale * value + certificate.value_shift;
}

DenseTensor ExplicitTensorModel::recover(const BitVector& x) const {
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < t; ++i) sizes.insert(sizes.end(), dims.begin(), dims.end());
  return recover_tensor(split_assignment(x, sizes).blocks, dims, t);
}

Rational ExplicitTensorModel::error(const Rational& value) const {
  return certificate.value_scale * value + certificate.value_shift;
}

namespace {

ReductionCertificate tensor_certificate(std::string direction, Rational norm) {
  ReductionCertificate cert;
  cert.direction = std::move(direction);
  cert.recover = "B := sum_i x^{i,1} (x) ... (x) x^{i,s}";
  cert.value_scale = -1;
  cert.value_shift = std::move(norm);
  return cert;
}

}  // namespace

ExplicitTensorModel btf_to_explicit(const DenseTensor& a, std::size_t t, std::size_t budget) {
  validate(a);
  if (t == 0) throw ValidationError("rank t must be at least 1");
  const std::size_t s = a.order();
  const std::size_t entries = a.entries.size();
  if (entries > budget / (t * t)) throw BudgetError("explicit tensor model exceeds the expansion budget");

  std::size_t per_copy = 0;
  std::vector<std::size_t> first(s, 0);
  for (std::size_t j = 0; j < s; ++j) {
    first[j] = per_copy;
    per_copy += a.dims[j];
  }
  auto node = [&](std::size_t i, std::size_t j, std::size_t k) { return i * per_copy + first[j] + k; };

  ExplicitTensorModel out;
  out.dims = a.dims;
  out.t = t;
  out.instance.nodes = t * per_copy;
  out.instance.node_cost.assign(out.instance.nodes, Rational(0));
  Rational norm = 0;
  std::vector<std::size_t> index(s, 0);
  for (std::size_t flat = 0; flat < entries; ++flat) {
    const Rational& value = a.entries[flat];
    norm += value * value;
    const Rational weight = 2 * value - 1;
    for (std::size_t i = 0; i < t && weight != 0; ++i) {
      std::vector<std::size_t> nodes;
      for (std::size_t j = 0; j < s; ++j) nodes.push_back(node(i, j, index[j]));
      if (nodes.size() == 1) {
        out.instance.node_cost[nodes.front()] += weight;
      } else {
        out.instance.edges.push_back(Hyperedge{std::move(nodes), weight});
      }
    }
    for (std::size_t i = 0; i < t; ++i) {
      for (std::size_t i2 = i + 1; i2 < t; ++i2) {
        std::vector<std::size_t> nodes;
        for (std::size_t j = 0; j < s; ++j) nodes.push_back(node(i, j, index[j]));
        for (std::size_t j = 0; j < s; ++j) nodes.push_back(node(i2, j, index[j]));
        out.instance.edges.push_back(Hyperedge{std::move(nodes), Rational(-2)});
      }
    }
    for (std::size_t j = s; j-- > 0;) {
      if (++index[j] < a.dims[j]) break;
      index[j] = 0;
    }
  }
  out.certificate = tensor_certificate("binary-tensor-factorization->explicit", norm);
  return out;
}

std::size_t btf_term_count(const std::vector<std::size_t>& dims, std::size_t q, std::size_t t) {
  return t * (q + 1) + t * (t - 1) / 2 * tensor_size(dims);
}

TensorFactorizationModel btf_factored_to_F(const FactoredTensor& a, std::size_t t) {
  validate(a);
  if (t == 0) throw ValidationError("rank t must be at least 1");
  const std::size_t s = a.dims.size();

  TensorFactorizationModel out;
  out.dims = a.dims;
  out.t = t;
  for (std::size_t i = 0; i < t; ++i) out.instance.n.insert(out.instance.n.end(), a.dims.begin(), a.dims.end());

  for (std::size_t i = 0; i < t; ++i) {
    std::vector<std::size_t> blocks(s);
    std::iota(blocks.begin(), blocks.end(), i * s);
    for (const auto& factor : a.factors) {
      Term term{blocks, factor};
      term.coeffs.back() = scaled(std::move(term.coeffs.back()), 2);
      out.instance.terms.push_back(std::move(term));
    }
    Term ones{blocks, {}};
    for (std::size_t j = 0; j < s; ++j) ones.coeffs.emplace_back(a.dims[j], Rational(j + 1 == s ? -1 : 1));
    out.instance.terms.push_back(std::move(ones));
  }

  // -2 prod_j <x^{i,j}, x^{i',j}> expands into one term per index tuple.
  const std::size_t tuples = tensor_size(a.dims);
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t i2 = i + 1; i2 < t; ++i2) {
      std::vector<std::size_t> index(s, 0);
      for (std::size_t flat = 0; flat < tuples; ++flat) {
        Term term;
        for (std::size_t j = 0; j < s; ++j) {
          term.blocks.push_back(i * s + j);
          term.coeffs.push_back(unit_vector(a.dims[j], index[j]));
        }
        for (std::size_t j = 0; j < s; ++j) {
          term.blocks.push_back(i2 * s + j);
          term.coeffs.push_back(unit_vector(a.dims[j], index[j], j + 1 == s ? Rational(-2) : Rational(1)));
        }
        out.instance.terms.push_back(std::move(term));
        for (std::size_t j = s; j-- > 0;) {
          if (++index[j] < a.dims[j]) break;
          index[j] = 0;
        }
      }
    }
  }
  out.certificate = tensor_certificate("binary-tensor-factorization->factorized", squared_norm(a));
  return out;
}

TensorFactorizationModel r1btf_factored_to_FU(const FactoredTensor& a) { return btf_factored_to_F(a, 1); }

TensorFactorizationResult solve_btf(const FactoredTensor& a, std::size_t t, const SolveOptions& options) {
  const TensorFactorizationModel model = btf_factored_to_F(a, t);
  TensorFactorizationResult out;
  out.solution = solve(model.instance, options);
  out.factors = out.solution.assignment.blocks;
  out.approximation = model.recover(out.solution.assignment);
  out.error = model.error(out.solution.value);
  return out;
}

// ---------------------------------------------------------------------------
// Quadratic objectives and rank-1 matrix factorization

FactorizedInstance quadratic_to_F(const QuadraticInstance& inst) {
  validate(inst);
  FactorizedInstance out;
  out.n = inst.n;
  for (const auto& [key, matrix] : inst.q) {
    const auto rf = rank_factorization(matrix);
    for (std::size_t l = 0; l < rf.rank; ++l) {
      out.terms.push_back(Term{{key.first, key.second}, {rf.left.column(l), rf.right.column(l)}});
    }
  }
  for (std::size_t j = 0; j < inst.n.size(); ++j) {
    if (!is_zero(inst.c[j])) out.terms.push_back(Term{{j}, {inst.c[j]}});
  }
  ensure_nonempty(out);
  return out;
}

BmfResult bmf_rank1(const RationalMatrix& a, const SolveOptions& options) {
  if (a.rows() == 0 || a.cols() == 0) throw ValidationError("matrix must be nonempty");
  const auto rf = rank_factorization(a);
  FactoredTensor tensor;
  tensor.dims = {a.rows(), a.cols()};
  for (std::size_t l = 0; l < rf.rank; ++l) tensor.factors.push_back({rf.left.column(l), rf.right.column(l)});

  const TensorFactorizationModel model = r1btf_factored_to_FU(tensor);
  const Solution solution = solve(model.instance, options);
  BmfResult out{solution.assignment.blocks[0], solution.assignment.blocks[1], model.error(solution.value)};

  Rational direct = 0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Rational diff = a(i, j) - ((out.x[i] && out.y[j]) ? 1 : 0);
      direct += diff * diff;
    }
  }
  if (direct != out.error) throw std::logic_error("rank-1 factorization error disagrees with direct evaluation");
  return out;
}

}  // namespace facpoly
