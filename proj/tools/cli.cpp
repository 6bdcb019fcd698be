#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "facpoly/errors.hpp"
#include "facpoly/io.hpp"
#include "facpoly/oracle.hpp"
#include "facpoly/reductions.hpp"
#include "facpoly/solver.hpp"

namespace facpoly::cli {
namespace {

using io::Json;

struct Options {
  std::string in;
  std::string out;
  bool json = false;
  std::string order = "auto";
  std::optional<std::uint64_t> budget;
  std::size_t cap = oracle::kDefaultCap;
  std::string from;
  std::string to = "factorized";
  std::size_t t = 1;
  std::uint64_t cell_limit = ArrangementOptions{}.cell_limit;
  std::string kind = "auto";
  // gen
  std::uint64_t seed = 0;
  std::size_t s = 3;
  std::size_t nmax = 4;
  std::size_t terms = 3;
  std::int64_t num = 3;
  std::int64_t den = 1;
  bool affine = false;
};

// What a command hands back: a result payload plus optional report fields.
struct Outcome {
  Json result;
  std::string text;
  Json instance;  // null when not applicable
  Json budget;
};

std::uint64_t resolve_budget(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("FACPOLY_BUDGET")) {
    const std::string text(env);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
      throw ValidationError("FACPOLY_BUDGET must be a nonnegative integer, got \"" + text + "\"");
    }
    return value;
  }
  return kDefaultLeafBudget;
}

SolveOptions solve_options(const Options& opt) {
  SolveOptions so;
  so.order = opt.order == "identity" ? OrderPolicy::Identity : OrderPolicy::Auto;
  so.leaf_budget = resolve_budget(opt.budget);
  return so;
}

std::string detect_kind(const Json& doc) {
  if (!doc.is_object()) throw ValidationError("document: expected a JSON object");
  if (doc.contains("functionals")) return "functionals";
  if (doc.contains("matrix")) return "matrix";
  if (doc.contains("Q")) return "quadratic";
  if (doc.contains("nodeCost")) return "explicit";
  if (doc.contains("dims")) return doc.contains("factors") ? "factored" : "tensor";
  if (doc.contains("nodes")) return "graph";
  if (doc.contains("terms") && doc["terms"].is_array()) {
    for (const auto& term : doc["terms"]) {
      if (term.is_object() && term.contains("d")) return "affine";
    }
  }
  return "factorized";
}

std::string bits_text(const BitVector& x) {
  std::string s;
  for (auto bit : x) s += bit ? '1' : '0';
  return s;
}

std::string assignment_text(const Assignment& x) {
  std::string s;
  for (std::size_t j = 0; j < x.blocks.size(); ++j) {
    if (j > 0) s += ' ';
    s += bits_text(x.blocks[j]);
  }
  return s;
}

Json summary(const FactorizedInstance& inst) {
  return {{"s", inst.n.size()}, {"n", inst.n}, {"terms", inst.terms.size()}, {"m", compute_m(inst)}};
}

Json budget_json(const BudgetReport& report) {
  Json per_level = Json::array();
  for (const auto& v : report.per_level) per_level.push_back(v.get_str());
  return {{"m", report.m},
          {"per_level", per_level},
          {"total", report.total.get_str()},
          {"limit", report.limit},
          {"within_limit", report.within_limit()}};
}

// The report the solver would compute, without running it.
BudgetReport predicted_budget(const FactorizedInstance& inst, const SolveOptions& so) {
  std::vector<std::size_t> perm(inst.n.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  if (so.order == OrderPolicy::Auto) perm = choose_order(inst);
  return check_budget(permute_blocks(inst, perm), so.leaf_budget);
}

FactorizedInstance read_objective(const Json& doc, std::optional<AffineFactorizedInstance>* affine) {
  if (detect_kind(doc) == "affine") {
    *affine = io::affine_from_json(doc);
    return affine_to_linear(**affine);
  }
  return io::factorized_from_json(doc);
}

Json solution_json(const Solution& solution) { return io::to_json(solution); }

std::string solution_text(const Solution& solution, bool leaves) {
  std::ostringstream os;
  os << "value: " << to_string(solution.value) << '\n' << "assignment: " << assignment_text(solution.assignment) << '\n';
  if (leaves) os << "leaves explored: " << solution.leaves_explored << '\n';
  return os.str();
}

Outcome cmd_solve(const Options& opt) {
  const Json doc = io::read_json_file(opt.in);
  std::optional<AffineFactorizedInstance> affine;
  const FactorizedInstance inst = read_objective(doc, &affine);
  const SolveOptions so = solve_options(opt);
  Outcome o;
  o.instance = summary(inst);
  o.budget = budget_json(predicted_budget(inst, so));
  const Solution solution = affine ? solve_affine(*affine, so) : solve(inst, so);
  o.result = solution_json(solution);
  o.text = solution_text(solution, true);
  if (!opt.out.empty()) io::write_json_file(opt.out, o.result);
  return o;
}

Outcome cmd_brute(const Options& opt) {
  const Json doc = io::read_json_file(opt.in);
  std::optional<AffineFactorizedInstance> affine;
  const FactorizedInstance inst = read_objective(doc, &affine);
  Outcome o;
  o.instance = summary(inst);
  const Solution solution = oracle::brute_force(inst, opt.cap);
  o.result = solution_json(solution);
  o.text = solution_text(solution, false);
  if (!opt.out.empty()) io::write_json_file(opt.out, o.result);
  return o;
}

FactoredTensor read_tensor(const Json& doc) {
  const std::string kind = detect_kind(doc);
  if (kind == "factored") return io::factored_tensor_from_json(doc);
  if (kind == "tensor") return factor_dense(io::dense_tensor_from_json(doc));
  throw ValidationError("document: expected a dense or factored tensor");
}

Outcome cmd_reduce(const Options& opt) {
  const Json doc = io::read_json_file(opt.in);
  FactorizedReduction reduction;
  if (opt.from == "explicit") {
    reduction = explicit_to_factorized(io::explicit_from_json(doc));
  } else if (opt.from == "affine") {
    reduction.instance = affine_to_linear(io::affine_from_json(doc));
    reduction.certificate = {"affine->factorized", "identity", 1, 0, true};
  } else if (opt.from == "quadratic") {
    reduction.instance = quadratic_to_F(io::quadratic_from_json(doc));
    reduction.certificate = {"quadratic->factorized", "identity", 1, 0, true};
  } else {
    reduction.instance = factored_tensor_to_FU(read_tensor(doc));
    reduction.certificate = {"tensor->factorized", "identity", 1, 0, true};
  }
  Outcome o;
  o.instance = summary(reduction.instance);
  const Json written = io::to_json(reduction.instance);
  o.result = {{"instance", written}, {"certificate", io::to_json(reduction.certificate)}};
  if (!opt.out.empty()) {
    io::write_json_file(opt.out, written);
    o.text = "wrote " + opt.out + ": s=" + std::to_string(reduction.instance.n.size()) +
             ", terms=" + std::to_string(reduction.instance.terms.size()) + '\n';
  } else {
    o.text = written.dump(2) + '\n';
  }
  return o;
}

Outcome cmd_btf(const Options& opt) {
  if (opt.t == 0) throw ValidationError("--t must be at least 1");
  const FactoredTensor tensor = read_tensor(io::read_json_file(opt.in));
  const SolveOptions so = solve_options(opt);
  const TensorFactorizationModel model = btf_factored_to_F(tensor, opt.t);
  Outcome o;
  o.instance = summary(model.instance);
  o.budget = budget_json(predicted_budget(model.instance, so));
  const TensorFactorizationResult r = solve_btf(tensor, opt.t, so);

  const std::size_t s = tensor.dims.size();
  Json factors = Json::array();
  std::ostringstream text;
  text << "error: " << to_string(r.error) << '\n';
  for (std::size_t i = 0; i < opt.t; ++i) {
    Json modes = Json::array();
    text << "factor " << i + 1 << ":";
    for (std::size_t j = 0; j < s; ++j) {
      modes.push_back(io::bits_to_json(r.factors[i * s + j]));
      text << (j == 0 ? " " : " x ") << bits_text(r.factors[i * s + j]);
    }
    text << '\n';
    factors.push_back(modes);
  }
  o.result = {{"error", io::rational_to_json(r.error)}, {"factors", factors}, {"approximation", io::to_json(r.approximation)}};
  o.text = text.str();
  return o;
}

Outcome cmd_bmf(const Options& opt) {
  const RationalMatrix a = io::matrix_from_json(io::read_json_file(opt.in));
  const BmfResult r = bmf_rank1(a, solve_options(opt));
  Outcome o;
  o.result = {{"error", io::rational_to_json(r.error)}, {"x", io::bits_to_json(r.x)}, {"y", io::bits_to_json(r.y)}};
  o.text = "error: " + to_string(r.error) + "\nx: " + bits_text(r.x) + "\ny: " + bits_text(r.y) + '\n';
  return o;
}

Outcome cmd_cells(const Options& opt) {
  const auto functionals = io::functionals_from_json(io::read_json_file(opt.in));
  ArrangementOptions ao;
  ao.cell_limit = opt.cell_limit;
  const auto cells = enumerate_cells(functionals, ao);
  Outcome o;
  Json list = Json::array();
  for (const auto& cell : cells) {
    std::string line;
    for (auto sgn : cell) line += sgn > 0 ? '+' : '-';
    list.push_back(line);
    o.text += line + '\n';
  }
  o.result = {{"count", cells.size()}, {"cells", list}};
  return o;
}

Outcome cmd_gen(const Options& opt) {
  oracle::RandomSpec spec;
  spec.seed = opt.seed;
  spec.s_min = spec.s_max = opt.s;
  spec.n_min = 1;
  spec.n_max = opt.nmax;
  spec.terms_min = spec.terms_max = opt.terms;
  spec.num_min = -opt.num;
  spec.num_max = opt.num;
  spec.den_max = opt.den;
  Json doc;
  Outcome o;
  if (opt.affine) {
    const auto inst = oracle::gen_random_affine(spec);
    doc = io::to_json(inst);
    o.instance = summary(affine_to_linear(inst));
  } else {
    const auto inst = oracle::gen_random(spec);
    doc = io::to_json(inst);
    o.instance = summary(inst);
  }
  o.result = {{"instance", doc}};
  if (!opt.out.empty()) {
    io::write_json_file(opt.out, doc);
    o.text = "wrote " + opt.out + '\n';
  } else {
    o.text = doc.dump(2) + '\n';
  }
  return o;
}

Outcome cmd_validate(const Options& opt) {
  const Json doc = io::read_json_file(opt.in);
  const std::string kind = opt.kind == "auto" ? detect_kind(doc) : opt.kind;
  Outcome o;
  if (kind == "factorized") {
    o.instance = summary(io::factorized_from_json(doc));
  } else if (kind == "affine") {
    o.instance = summary(affine_to_linear(io::affine_from_json(doc)));
  } else if (kind == "explicit") {
    io::explicit_from_json(doc);
  } else if (kind == "tensor") {
    io::dense_tensor_from_json(doc);
  } else if (kind == "factored") {
    io::factored_tensor_from_json(doc);
  } else if (kind == "quadratic") {
    io::quadratic_from_json(doc);
  } else if (kind == "matrix") {
    io::matrix_from_json(doc);
  } else if (kind == "functionals") {
    io::functionals_from_json(doc);
  } else {
    io::graph_from_json(doc);
  }
  o.result = {{"valid", true}, {"kind", kind}};
  o.text = "ok: " + kind + '\n';
  return o;
}

const std::vector<std::string> kKinds = {"auto",      "factorized", "affine", "explicit",    "tensor",
                                         "factored", "quadratic",  "matrix", "functionals", "graph"};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact optimization of factorized binary polynomials", "facpoly"};
  app.require_subcommand(1);
  Options opt;

  auto add_in = [&](CLI::App* sub) { sub->add_option("--in", opt.in, "input JSON file")->required(); };
  auto add_json = [&](CLI::App* sub) { sub->add_flag("--json", opt.json, "print a JSON run report"); };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--order", opt.order, "block order")->check(CLI::IsMember({"auto", "identity"}));
    sub->add_option("--budget", opt.budget, "leaf budget (overrides FACPOLY_BUDGET)");
  };

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve a factorized (or affine) instance exactly");
  add_in(solve_cmd);
  add_solver(solve_cmd);
  solve_cmd->add_option("--out", opt.out, "write the solution JSON here");
  add_json(solve_cmd);

  CLI::App* brute_cmd = app.add_subcommand("brute", "exhaustive search over all assignments");
  add_in(brute_cmd);
  brute_cmd->add_option("--cap", opt.cap, "refuse above this many variables");
  brute_cmd->add_option("--out", opt.out, "write the solution JSON here");
  add_json(brute_cmd);

  CLI::App* reduce_cmd = app.add_subcommand("reduce", "rewrite an instance as a factorized instance");
  reduce_cmd->add_option("--from", opt.from, "source form")
      ->required()
      ->check(CLI::IsMember({"explicit", "affine", "quadratic", "tensor"}));
  reduce_cmd->add_option("--to", opt.to, "target form")->check(CLI::IsMember({"factorized"}));
  add_in(reduce_cmd);
  reduce_cmd->add_option("--out", opt.out, "write the factorized instance here");
  add_json(reduce_cmd);

  CLI::App* btf_cmd = app.add_subcommand("btf", "binary rank-t tensor factorization");
  add_in(btf_cmd);
  btf_cmd->add_option("--t", opt.t, "number of rank-1 binary terms");
  add_solver(btf_cmd);
  add_json(btf_cmd);

  CLI::App* bmf_cmd = app.add_subcommand("bmf", "rank-1 binary matrix factorization");
  add_in(bmf_cmd);
  add_solver(bmf_cmd);
  add_json(bmf_cmd);

  CLI::App* cells_cmd = app.add_subcommand("cells", "sign vectors of a hyperplane arrangement");
  add_in(cells_cmd);
  cells_cmd->add_option("--limit", opt.cell_limit, "refuse above this many predicted cells");
  add_json(cells_cmd);

  CLI::App* gen_cmd = app.add_subcommand("gen", "random factorized instance");
  gen_cmd->add_option("--seed", opt.seed, "random seed");
  gen_cmd->add_option("--s", opt.s, "number of blocks")->check(CLI::Range(1, 62));
  gen_cmd->add_option("--nmax", opt.nmax, "largest block size")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--terms", opt.terms, "number of terms")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--num", opt.num, "numerators drawn from [-num, num]")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--den", opt.den, "denominators drawn from [1, den]")->check(CLI::PositiveNumber);
  gen_cmd->add_flag("--affine", opt.affine, "emit an affine instance");
  gen_cmd->add_option("--out", opt.out, "write the instance here");
  add_json(gen_cmd);

  CLI::App* validate_cmd = app.add_subcommand("validate", "check an input file");
  add_in(validate_cmd);
  validate_cmd->add_option("--kind", opt.kind, "document type")->check(CLI::IsMember(kKinds));
  add_json(validate_cmd);

  if (!args.empty() && !args.front().starts_with('-')) {
    try {
      static_cast<void>(app.get_subcommand(args.front()));
    } catch (const CLI::OptionNotFound&) {
      err << "unknown subcommand \"" << args.front() << "\"\n" << app.help();
      return kUsage;
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << app.help();
    return kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  Json report = {{"command", args}};

  auto fail = [&](int code, const char* kind, const std::string& message) {
    err << "error: " << message << '\n';
    if (opt.json) {
      report["error"] = {{"kind", kind}, {"message", message}};
      out << report.dump(2) << '\n';
    }
    return code;
  };

  const auto start = std::chrono::steady_clock::now();
  try {
    Outcome o;
    if (name == "solve") {
      o = cmd_solve(opt);
    } else if (name == "brute") {
      o = cmd_brute(opt);
    } else if (name == "reduce") {
      o = cmd_reduce(opt);
    } else if (name == "btf") {
      o = cmd_btf(opt);
    } else if (name == "bmf") {
      o = cmd_bmf(opt);
    } else if (name == "cells") {
      o = cmd_cells(opt);
    } else if (name == "gen") {
      o = cmd_gen(opt);
    } else {
      o = cmd_validate(opt);
    }
    const auto elapsed = std::chrono::steady_clock::now() - start;
    if (opt.json) {
      report["instance"] = o.instance;
      report["budget"] = o.budget;
      report["wall_time_us"] = std::chrono::duration_cast<std::chrono::microseconds>(elapsed).count();
      report["result"] = o.result;
      out << report.dump(2) << '\n';
    } else {
      out << o.text;
    }
    return kOk;
  } catch (const BudgetExceeded& e) {
    report["budget"] = budget_json(e.report());
    return fail(kBudget, "budget", e.what());
  } catch (const BudgetError& e) {
    return fail(kBudget, "budget", e.what());
  } catch (const ValidationError& e) {
    return fail(kValidation, "validation", e.what());
  } catch (const IoError& e) {
    return fail(kIo, "io", e.what());
  }
}

}  // namespace facpoly::cli
