#include "facpoly/instances.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "facpoly/errors.hpp"

namespace facpoly {
namespace {

std::string term_label(std::size_t t) { return "term " + std::to_string(t + 1); }
std::string block_label(std::size_t j) { return "block " + std::to_string(j + 1); }

template <typename TermT>
void validate_blocks(const std::vector<std::size_t>& n, const std::vector<TermT>& terms) {
  if (n.empty()) throw ValidationError("instance has no blocks (s must be >= 1)");
  for (std::size_t j = 0; j < n.size(); ++j) {
    if (n[j] == 0) throw ValidationError(block_label(j) + " has size 0");
  }
  if (terms.empty()) throw ValidationError("instance has no terms");
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const auto& term = terms[t];
    if (term.blocks.empty()) throw ValidationError(term_label(t) + ": empty index set");
    for (std::size_t p = 0; p < term.blocks.size(); ++p) {
      if (term.blocks[p] >= n.size()) {
        throw ValidationError(term_label(t) + ": block index " + std::to_string(term.blocks[p] + 1) +
                              " outside 1.." + std::to_string(n.size()));
      }
      if (p > 0 && term.blocks[p] <= term.blocks[p - 1]) {
        throw ValidationError(term_label(t) + ": index set not strictly increasing");
      }
    }
    if (term.coeffs.size() != term.blocks.size()) {
      throw ValidationError(term_label(t) + ": expected one coefficient vector per block");
    }
    for (std::size_t p = 0; p < term.blocks.size(); ++p) {
      if (term.coeffs[p].size() != n[term.blocks[p]]) {
        throw ValidationError(term_label(t) + ": coefficient vector for " + block_label(term.blocks[p]) +
                              " has length " + std::to_string(term.coeffs[p].size()) + ", expected " +
                              std::to_string(n[term.blocks[p]]));
      }
    }
  }
}

}  // namespace

const RationalVector& Term::coeff(std::size_t block) const {
  const auto it = std::lower_bound(blocks.begin(), blocks.end(), block);
  if (it == blocks.end() || *it != block) throw ValidationError("term does not contain " + block_label(block));
  return coeffs[static_cast<std::size_t>(it - blocks.begin())];
}

bool Term::contains(std::size_t block) const {
  return std::binary_search(blocks.begin(), blocks.end(), block);
}

std::size_t FactorizedInstance::variable_count() const {
  std::size_t total = 0;
  for (auto nj : n) total += nj;
  return total;
}

BitVector Assignment::flatten() const {
  BitVector flat;
  for (const auto& b : blocks) flat.insert(flat.end(), b.begin(), b.end());
  return flat;
}

Assignment zero_assignment(const std::vector<std::size_t>& n) {
  Assignment x;
  for (auto nj : n) x.blocks.emplace_back(nj, 0);
  return x;
}

Assignment split_assignment(const BitVector& flat, const std::vector<std::size_t>& n) {
  Assignment x;
  std::size_t pos = 0;
  for (auto nj : n) {
    if (pos + nj > flat.size()) throw DimensionError("flat assignment too short");
    x.blocks.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                          flat.begin() + static_cast<std::ptrdiff_t>(pos + nj));
    pos += nj;
  }
  if (pos != flat.size()) throw DimensionError("flat assignment too long");
  return x;
}

DenseTensor DenseTensor::zeros(const std::vector<std::size_t>& dims) {
  DenseTensor t;
  t.dims = dims;
  t.entries.assign(tensor_size(dims), Rational(0));
  return t;
}

std::size_t DenseTensor::flat_index(const std::vector<std::size_t>& index) const {
  if (index.size() != dims.size()) throw DimensionError("tensor index has wrong order");
  std::size_t flat = 0;
  for (std::size_t j = 0; j < dims.size(); ++j) {
    if (index[j] >= dims[j]) throw DimensionError("tensor index out of range in mode " + std::to_string(j + 1));
    flat = flat * dims[j] + index[j];
  }
  return flat;
}

std::size_t tensor_size(const std::vector<std::size_t>& dims) {
  std::size_t size = 1;
  for (auto d : dims) {
    if (d != 0 && size > std::numeric_limits<std::size_t>::max() / d) {
      return std::numeric_limits<std::size_t>::max();
    }
    size *= d;
  }
  return size;
}

void validate(const FactorizedInstance& inst) { validate_blocks(inst.n, inst.terms); }

void validate(const AffineFactorizedInstance& inst) {
  validate_blocks(inst.n, inst.terms);
  for (std::size_t t = 0; t < inst.terms.size(); ++t) {
    if (inst.terms[t].shifts.size() != inst.terms[t].blocks.size()) {
      throw ValidationError(term_label(t) + ": expected one shift d per block");
    }
  }
}

void validate(const ExplicitInstance& inst) {
  if (inst.node_cost.size() != inst.nodes) {
    throw ValidationError("nodeCost has length " + std::to_string(inst.node_cost.size()) + ", expected " +
                          std::to_string(inst.nodes));
  }
  for (std::size_t e = 0; e < inst.edges.size(); ++e) {
    const auto& nodes = inst.edges[e].nodes;
    const std::string label = "edge " + std::to_string(e + 1);
    if (nodes.size() < 2) throw ValidationError(label + ": cardinality below 2");
    for (std::size_t p = 0; p < nodes.size(); ++p) {
      if (nodes[p] >= inst.nodes) throw ValidationError(label + ": node " + std::to_string(nodes[p] + 1) + " out of range");
      if (p > 0 && nodes[p] <= nodes[p - 1]) throw ValidationError(label + ": nodes not strictly increasing");
    }
  }
}

void validate(const DenseTensor& tensor) {
  if (tensor.dims.empty()) throw ValidationError("tensor has order 0");
  if (tensor.entries.size() != tensor_size(tensor.dims)) {
    throw ValidationError("tensor has " + std::to_string(tensor.entries.size()) + " entries, expected " +
                          std::to_string(tensor_size(tensor.dims)));
  }
}

void validate(const FactoredTensor& tensor) {
  if (tensor.dims.empty()) throw ValidationError("tensor has order 0");
  for (std::size_t p = 0; p < tensor.factors.size(); ++p) {
    const auto& factor = tensor.factors[p];
    if (factor.size() != tensor.dims.size()) {
      throw ValidationError("factor " + std::to_string(p + 1) + ": expected one vector per mode");
    }
    for (std::size_t j = 0; j < factor.size(); ++j) {
      if (factor[j].size() != tensor.dims[j]) {
        throw ValidationError("factor " + std::to_string(p + 1) + ": vector for mode " + std::to_string(j + 1) +
                              " has wrong length");
      }
    }
  }
}

void check_assignment(const std::vector<std::size_t>& n, const Assignment& x) {
  if (x.blocks.size() != n.size()) {
    throw DimensionError("assignment has " + std::to_string(x.blocks.size()) + " blocks, expected " +
                         std::to_string(n.size()));
  }
  for (std::size_t j = 0; j < n.size(); ++j) {
    if (x.blocks[j].size() != n[j]) {
      throw DimensionError(block_label(j) + " has length " + std::to_string(x.blocks[j].size()) + ", expected " +
                           std::to_string(n[j]));
    }
  }
}

Rational eval_factorized(const FactorizedInstance& inst, const Assignment& x) {
  check_assignment(inst.n, x);
  Rational total = inst.offset;
  for (const auto& term : inst.terms) {
    Rational product = 1;
    for (std::size_t p = 0; p < term.blocks.size() && product != 0; ++p) {
      product *= select_sum(term.coeffs[p], x.blocks[term.blocks[p]]);
    }
    total += product;
  }
  return total;
}

Rational eval_affine(const AffineFactorizedInstance& inst, const Assignment& x) {
  check_assignment(inst.n, x);
  Rational total = inst.offset;
  for (const auto& term : inst.terms) {
    Rational product = 1;
    for (std::size_t p = 0; p < term.blocks.size() && product != 0; ++p) {
      product *= select_sum(term.coeffs[p], x.blocks[term.blocks[p]]) + term.shifts[p];
    }
    total += product;
  }
  return total;
}

Rational eval_explicit(const ExplicitInstance& inst, const BitVector& x) {
  if (x.size() != inst.nodes) {
    throw DimensionError("assignment has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(inst.nodes));
  }
  Rational total = select_sum(inst.node_cost, x);
  for (const auto& edge : inst.edges) {
    const bool all_set = std::all_of(edge.nodes.begin(), edge.nodes.end(), [&](std::size_t k) { return x[k] != 0; });
    if (all_set) total += edge.cost;
  }
  return total;
}

Rational eval_tensor_objective(const DenseTensor& a, const DenseTensor& b) {
  if (a.dims != b.dims || a.entries.size() != b.entries.size()) {
    throw DimensionError("tensor dimensions differ");
  }
  Rational total = 0;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    const Rational diff = a.entries[i] - b.entries[i];
    total += diff * diff;
  }
  return total;
}

std::vector<std::size_t> compute_m(const FactorizedInstance& inst) {
  std::vector<std::size_t> m(inst.n.size(), 0);
  for (const auto& term : inst.terms) {
    // Every block after the smallest one has a smaller partner.
    for (std::size_t p = 1; p < term.blocks.size(); ++p) ++m[term.blocks[p]];
  }
  return m;
}

DenseTensor materialize_tensor(const FactoredTensor& tensor, std::size_t budget) {
  validate(tensor);
  const std::size_t size = tensor_size(tensor.dims);
  if (size > budget) {
    throw BudgetError("dense tensor would have " + std::to_string(size) + " entries, budget is " +
                      std::to_string(budget));
  }
  DenseTensor out = DenseTensor::zeros(tensor.dims);
  const std::size_t order = tensor.dims.size();
  std::vector<std::size_t> index(order, 0);
  for (std::size_t flat = 0; flat < size; ++flat) {
    Rational sum = 0;
    for (const auto& factor : tensor.factors) {
      Rational product = 1;
      for (std::size_t j = 0; j < order && product != 0; ++j) product *= factor[j][index[j]];
      sum += product;
    }
    out.entries[flat] = sum;
    for (std::size_t j = order; j-- > 0;) {
      if (++index[j] < tensor.dims[j]) break;
      index[j] = 0;
    }
  }
  return out;
}

}  // namespace facpoly
