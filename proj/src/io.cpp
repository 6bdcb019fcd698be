#include "facpoly/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "facpoly/errors.hpp"

namespace facpoly::io {
namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

const Json& field(const Json& doc, const char* key, const std::string& where) {
  if (!doc.is_object()) fail(where, "expected an object");
  auto it = doc.find(key);
  if (it == doc.end()) fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

const Json& array_field(const Json& doc, const char* key, const std::string& where) {
  const Json& value = field(doc, key, where);
  if (!value.is_array()) fail(where + "." + key, "expected an array");
  return value;
}

std::size_t count_from_json(const Json& value, const std::string& where) {
  if (!value.is_number_integer() || value.get<long long>() < 0) fail(where, "expected a nonnegative integer");
  return value.get<std::size_t>();
}

// 1-based index in the file, 0-based in memory.
std::size_t index_from_json(const Json& value, const std::string& where) {
  if (!value.is_number_integer()) fail(where, "expected an integer index");
  const auto raw = value.get<long long>();
  if (raw < 1) fail(where, "index " + std::to_string(raw) + " out of range (indices start at 1)");
  return static_cast<std::size_t>(raw - 1);
}

std::vector<std::size_t> counts_from_json(const Json& value, const std::string& where) {
  if (!value.is_array()) fail(where, "expected an array");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < value.size(); ++i) out.push_back(count_from_json(value[i], where + "[" + std::to_string(i + 1) + "]"));
  return out;
}

RationalVector vector_from_json(const Json& value, const std::string& where) {
  if (!value.is_array()) fail(where, "expected an array of rationals");
  RationalVector out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) out.push_back(rational_from_json(value[i], where + "[" + std::to_string(i + 1) + "]"));
  return out;
}

Json vector_to_json(const RationalVector& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(rational_to_json(x));
  return out;
}

std::vector<RationalVector> rows_from_json(const Json& value, const std::string& where) {
  if (!value.is_array()) fail(where, "expected an array of rows");
  std::vector<RationalVector> rows;
  for (std::size_t i = 0; i < value.size(); ++i) rows.push_back(vector_from_json(value[i], where + "[" + std::to_string(i + 1) + "]"));
  return rows;
}

std::size_t check_s(const Json& doc, const std::vector<std::size_t>& n) {
  if (doc.contains("s")) {
    const std::size_t s = count_from_json(doc["s"], "s");
    if (s != n.size()) fail("s", "is " + std::to_string(s) + " but n has " + std::to_string(n.size()) + " entries");
  }
  return n.size();
}

// Index set plus the "c" (and optional "d") maps keyed by 1-based block.
struct RawTerm {
  std::vector<std::size_t> blocks;
  std::vector<RationalVector> coeffs;
  std::vector<Rational> shifts;
};

RawTerm term_from_json(const Json& doc, const std::string& where, bool affine) {
  RawTerm out;
  const Json& set = array_field(doc, "I", where);
  for (std::size_t p = 0; p < set.size(); ++p) out.blocks.push_back(index_from_json(set[p], where + ": block"));
  const Json& c = field(doc, "c", where);
  if (!c.is_object()) fail(where + ".c", "expected an object keyed by block");
  const Json* d = nullptr;
  if (affine) {
    d = &field(doc, "d", where);
    if (!d->is_object()) fail(where + ".d", "expected an object keyed by block");
  }
  for (std::size_t block : out.blocks) {
    const std::string key = std::to_string(block + 1);
    auto it = c.find(key);
    if (it == c.end()) fail(where + ".c", "missing coefficients for block " + key);
    out.coeffs.push_back(vector_from_json(*it, where + ".c." + key));
    if (affine) {
      auto dt = d->find(key);
      if (dt == d->end()) fail(where + ".d", "missing shift for block " + key);
      out.shifts.push_back(rational_from_json(*dt, where + ".d." + key));
    }
  }
  if (c.size() != out.blocks.size()) fail(where + ".c", "has entries for blocks outside I");
  if (affine && d->size() != out.blocks.size()) fail(where + ".d", "has entries for blocks outside I");
  return out;
}

template <typename TermT>
Json term_to_json(const TermT& term, bool affine) {
  Json set = Json::array();
  Json c = Json::object();
  Json d = Json::object();
  for (std::size_t p = 0; p < term.blocks.size(); ++p) {
    const std::string key = std::to_string(term.blocks[p] + 1);
    set.push_back(term.blocks[p] + 1);
    c[key] = vector_to_json(term.coeffs[p]);
    if constexpr (requires { term.shifts; }) {
      if (affine) d[key] = rational_to_json(term.shifts[p]);
    }
  }
  Json out = {{"I", set}, {"c", c}};
  if (affine) out["d"] = d;
  return out;
}

Rational offset_from_json(const Json& doc) {
  return doc.contains("offset") ? rational_from_json(doc["offset"], "offset") : Rational(0);
}

std::string term_where(std::size_t t) { return "terms[" + std::to_string(t + 1) + "]"; }

}  // namespace

Json rational_to_json(const Rational& value) { return to_string(value); }

Rational rational_from_json(const Json& value, const std::string& where) {
  if (value.is_number_integer()) return Rational(value.dump());
  if (!value.is_string()) fail(where, "expected a rational string \"p/q\" or an integer");
  try {
    return parse_rational(value.get<std::string>());
  } catch (const ValidationError& e) {
    fail(where, e.what());
  }
}

Json to_json(const FactorizedInstance& inst) {
  Json terms = Json::array();
  for (const auto& term : inst.terms) terms.push_back(term_to_json(term, false));
  return {{"s", inst.n.size()}, {"n", inst.n}, {"offset", rational_to_json(inst.offset)}, {"terms", terms}};
}

Json to_json(const AffineFactorizedInstance& inst) {
  Json terms = Json::array();
  for (const auto& term : inst.terms) terms.push_back(term_to_json(term, true));
  return {{"s", inst.n.size()}, {"n", inst.n}, {"offset", rational_to_json(inst.offset)}, {"terms", terms}};
}

FactorizedInstance factorized_from_json(const Json& doc) {
  FactorizedInstance inst;
  inst.n = counts_from_json(field(doc, "n", "instance"), "n");
  check_s(doc, inst.n);
  inst.offset = offset_from_json(doc);
  const Json& terms = array_field(doc, "terms", "instance");
  for (std::size_t t = 0; t < terms.size(); ++t) {
    RawTerm raw = term_from_json(terms[t], term_where(t), false);
    inst.terms.push_back(Term{std::move(raw.blocks), std::move(raw.coeffs)});
  }
  validate(inst);
  return inst;
}

AffineFactorizedInstance affine_from_json(const Json& doc) {
  AffineFactorizedInstance inst;
  inst.n = counts_from_json(field(doc, "n", "instance"), "n");
  check_s(doc, inst.n);
  inst.offset = offset_from_json(doc);
  const Json& terms = array_field(doc, "terms", "instance");
  for (std::size_t t = 0; t < terms.size(); ++t) {
    RawTerm raw = term_from_json(terms[t], term_where(t), true);
    inst.terms.push_back(AffineTerm{std::move(raw.blocks), std::move(raw.coeffs), std::move(raw.shifts)});
  }
  validate(inst);
  return inst;
}

Json to_json(const ExplicitInstance& inst) {
  Json edges = Json::array();
  for (const auto& edge : inst.edges) {
    Json set = Json::array();
    for (auto k : edge.nodes) set.push_back(k + 1);
    edges.push_back({{"set", set}, {"cost", rational_to_json(edge.cost)}});
  }
  return {{"nodes", inst.nodes}, {"nodeCost", vector_to_json(inst.node_cost)}, {"edges", edges}};
}

ExplicitInstance explicit_from_json(const Json& doc) {
  ExplicitInstance inst;
  inst.nodes = count_from_json(field(doc, "nodes", "instance"), "nodes");
  inst.node_cost = vector_from_json(field(doc, "nodeCost", "instance"), "nodeCost");
  const Json& edges = array_field(doc, "edges", "instance");
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::string where = "edges[" + std::to_string(e + 1) + "]";
    Hyperedge edge;
    const Json& set = array_field(edges[e], "set", where);
    for (const auto& k : set) edge.nodes.push_back(index_from_json(k, where + ": node"));
    edge.cost = rational_from_json(field(edges[e], "cost", where), where + ".cost");
    inst.edges.push_back(std::move(edge));
  }
  validate(inst);
  return inst;
}

Json to_json(const DenseTensor& tensor) {
  return {{"dims", tensor.dims}, {"entries", vector_to_json(tensor.entries)}};
}

DenseTensor dense_tensor_from_json(const Json& doc) {
  DenseTensor tensor;
  tensor.dims = counts_from_json(field(doc, "dims", "tensor"), "dims");
  tensor.entries = vector_from_json(field(doc, "entries", "tensor"), "entries");
  validate(tensor);
  return tensor;
}

Json to_json(const FactoredTensor& tensor) {
  Json factors = Json::array();
  for (const auto& factor : tensor.factors) {
    Json modes = Json::array();
    for (const auto& v : factor) modes.push_back(vector_to_json(v));
    factors.push_back(modes);
  }
  return {{"dims", tensor.dims}, {"factors", factors}};
}

FactoredTensor factored_tensor_from_json(const Json& doc) {
  FactoredTensor tensor;
  tensor.dims = counts_from_json(field(doc, "dims", "tensor"), "dims");
  const Json& factors = array_field(doc, "factors", "tensor");
  for (std::size_t p = 0; p < factors.size(); ++p) {
    tensor.factors.push_back(rows_from_json(factors[p], "factors[" + std::to_string(p + 1) + "]"));
  }
  validate(tensor);
  return tensor;
}

Json to_json(const RationalMatrix& matrix) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < matrix.rows(); ++i) rows.push_back(vector_to_json(matrix.row(i)));
  return {{"matrix", rows}};
}

RationalMatrix matrix_from_json(const Json& doc) {
  const auto rows = rows_from_json(field(doc, "matrix", "document"), "matrix");
  if (rows.empty() || rows.front().empty()) fail("matrix", "must have at least one row and one column");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) fail("matrix[" + std::to_string(i + 1) + "]", "row length differs from row 1");
  }
  return RationalMatrix::from_rows(rows);
}

Json to_json(const QuadraticInstance& inst) {
  Json q = Json::array();
  for (const auto& [key, matrix] : inst.q) {
    q.push_back({{"i", key.first + 1}, {"j", key.second + 1}, {"matrix", to_json(matrix)["matrix"]}});
  }
  Json c = Json::object();
  for (std::size_t j = 0; j < inst.c.size(); ++j) c[std::to_string(j + 1)] = vector_to_json(inst.c[j]);
  return {{"s", inst.n.size()}, {"n", inst.n}, {"Q", q}, {"c", c}};
}

QuadraticInstance quadratic_from_json(const Json& doc) {
  QuadraticInstance inst;
  inst.n = counts_from_json(field(doc, "n", "instance"), "n");
  const std::size_t s = check_s(doc, inst.n);
  const Json& q = array_field(doc, "Q", "instance");
  for (std::size_t b = 0; b < q.size(); ++b) {
    const std::string where = "Q[" + std::to_string(b + 1) + "]";
    const std::size_t i = index_from_json(field(q[b], "i", where), where + ".i");
    const std::size_t j = index_from_json(field(q[b], "j", where), where + ".j");
    const auto rows = rows_from_json(field(q[b], "matrix", where), where + ".matrix");
    if (i >= s || j >= s || i >= j) fail(where, "needs 1 <= i < j <= s");
    if (inst.q.contains({i, j})) fail(where, "repeats the block pair");
    if (rows.size() != inst.n[i]) fail(where, "matrix has " + std::to_string(rows.size()) + " rows, expected n_i");
    for (const auto& row : rows) {
      if (row.size() != inst.n[j]) fail(where, "matrix row length differs from n_j");
    }
    RationalMatrix m(inst.n[i], inst.n[j]);
    for (std::size_t a = 0; a < rows.size(); ++a) {
      for (std::size_t b2 = 0; b2 < rows[a].size(); ++b2) m(a, b2) = rows[a][b2];
    }
    inst.q.emplace(std::make_pair(i, j), std::move(m));
  }
  inst.c.resize(s);
  for (std::size_t j = 0; j < s; ++j) inst.c[j].assign(inst.n[j], Rational(0));
  if (doc.contains("c")) {
    const Json& c = doc["c"];
    if (!c.is_object()) fail("c", "expected an object keyed by block");
    for (const auto& [key, value] : c.items()) {
      std::size_t block = 0;
      try {
        block = std::stoul(key);
      } catch (const std::exception&) {
        fail("c", "key \"" + key + "\" is not a block index");
      }
      if (block < 1 || block > s) fail("c", "block " + key + " out of range");
      inst.c[block - 1] = vector_from_json(value, "c." + key);
    }
  }
  validate(inst);
  return inst;
}

Json to_json(const std::vector<AffineFunctional>& functionals) {
  Json list = Json::array();
  const std::size_t dim = functionals.empty() ? 0 : functionals.front().dim();
  for (const auto& h : functionals) list.push_back({{"linear", vector_to_json(h.linear)}, {"constant", rational_to_json(h.constant)}});
  return {{"dim", dim}, {"functionals", list}};
}

std::vector<AffineFunctional> functionals_from_json(const Json& doc) {
  const std::size_t dim = count_from_json(field(doc, "dim", "document"), "dim");
  const Json& list = array_field(doc, "functionals", "document");
  std::vector<AffineFunctional> out;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string where = "functionals[" + std::to_string(k + 1) + "]";
    AffineFunctional h;
    h.linear = vector_from_json(field(list[k], "linear", where), where + ".linear");
    if (h.linear.size() != dim) fail(where, "linear part has length " + std::to_string(h.linear.size()) + ", expected dim");
    if (list[k].contains("constant")) h.constant = rational_from_json(list[k]["constant"], where + ".constant");
    out.push_back(std::move(h));
  }
  return out;
}

Json bits_to_json(const BitVector& x) {
  Json row = Json::array();
  for (auto bit : x) row.push_back(static_cast<int>(bit));
  return row;
}

Json bits_to_json(const Assignment& x) {
  Json rows = Json::array();
  for (const auto& block : x.blocks) rows.push_back(bits_to_json(block));
  return rows;
}

Json to_json(const Solution& solution) {
  return {{"value", rational_to_json(solution.value)},
          {"assignment", bits_to_json(solution.assignment)},
          {"leaves_explored", solution.leaves_explored}};
}

Solution solution_from_json(const Json& doc) {
  Solution out;
  out.value = rational_from_json(field(doc, "value", "solution"), "value");
  const Json& rows = array_field(doc, "assignment", "solution");
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const std::string where = "assignment[" + std::to_string(j + 1) + "]";
    if (!rows[j].is_array()) fail(where, "expected an array of bits");
    BitVector block;
    for (const auto& bit : rows[j]) {
      if (!bit.is_number_integer() || (bit.get<int>() != 0 && bit.get<int>() != 1)) fail(where, "entries must be 0 or 1");
      block.push_back(static_cast<std::uint8_t>(bit.get<int>()));
    }
    out.assignment.blocks.push_back(std::move(block));
  }
  if (doc.contains("leaves_explored")) out.leaves_explored = count_from_json(doc["leaves_explored"], "leaves_explored");
  return out;
}

Json to_json(const oracle::Graph& graph) {
  Json edges = Json::array();
  for (const auto& [a, b] : graph.edges) edges.push_back({a + 1, b + 1});
  return {{"nodes", graph.nodes}, {"edges", edges}};
}

oracle::Graph graph_from_json(const Json& doc) {
  oracle::Graph graph;
  graph.nodes = count_from_json(field(doc, "nodes", "graph"), "nodes");
  const Json& edges = array_field(doc, "edges", "graph");
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::string where = "edges[" + std::to_string(e + 1) + "]";
    if (!edges[e].is_array() || edges[e].size() != 2) fail(where, "expected a pair of nodes");
    graph.edges.emplace_back(index_from_json(edges[e][0], where), index_from_json(edges[e][1], where));
  }
  oracle::validate(graph);
  return graph;
}

Json to_json(const ReductionCertificate& certificate) {
  return {{"direction", certificate.direction},
          {"recover", certificate.recover},
          {"value_scale", rational_to_json(certificate.value_scale)},
          {"value_shift", rational_to_json(certificate.value_shift)},
          {"value_exact", certificate.value_exact}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw IoError(path.string() + ": not valid JSON (" + e.what() + ")");
  }
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace facpoly::io
