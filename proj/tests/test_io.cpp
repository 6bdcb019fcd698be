#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "facpoly/errors.hpp"
#include "facpoly/io.hpp"
#include "facpoly/oracle.hpp"
#include "test_support.hpp"

namespace facpoly {
namespace {

using io::Json;
using testing::bits;
using testing::q;
using testing::vec;

std::string message_of(const std::function<void()>& action) {
  try {
    action();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

TEST(Io, RationalEncoding) {
  EXPECT_EQ(io::rational_to_json(q(-3, 6)), Json("-1/2"));
  EXPECT_EQ(io::rational_to_json(Rational(4)), Json("4"));
  EXPECT_EQ(io::rational_from_json(Json(7), "x"), 7);
  EXPECT_EQ(io::rational_from_json(Json(-2), "x"), -2);
  EXPECT_EQ(io::rational_from_json(Json("6/4"), "x"), q(3, 2));
  EXPECT_THROW(io::rational_from_json(Json(0.5), "x"), ValidationError);
  EXPECT_THROW(io::rational_from_json(Json("1/0"), "x"), ValidationError);
  EXPECT_THROW(io::rational_from_json(Json("a"), "x"), ValidationError);
  EXPECT_NE(message_of([] { io::rational_from_json(Json(true), "terms[2].c.1[3]"); }).find("terms[2].c.1[3]"), std::string::npos);
}

TEST(Io, FactorizedDocumentIsOneBased) {
  const auto doc = Json::parse(R"({
    "s": 2, "n": [2, 2],
    "terms": [
      {"I": [1, 2], "c": {"1": [1, -1], "2": ["1/2", 2]}},
      {"I": [2], "c": {"2": [-1, 0]}}
    ]})");
  const auto inst = io::factorized_from_json(doc);
  EXPECT_EQ(inst.n, (std::vector<std::size_t>{2, 2}));
  ASSERT_EQ(inst.terms.size(), 2U);
  EXPECT_EQ(inst.terms[0].blocks, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(inst.terms[0].coeffs[1], (RationalVector{q(1, 2), 2}));
  EXPECT_EQ(inst.terms[1].blocks, (std::vector<std::size_t>{1}));
  EXPECT_EQ(inst.offset, 0);
  const Json back = io::to_json(inst);
  EXPECT_EQ(back["terms"][0]["I"], Json::parse("[1, 2]"));
  EXPECT_EQ(back["terms"][0]["c"]["2"], Json::parse(R"(["1/2", "2"])"));
}

TEST(Io, RoundTripsRandomInstances) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    oracle::RandomSpec spec;
    spec.seed = seed;
    spec.den_max = 5;
    auto inst = oracle::gen_random(spec);
    inst.offset = q(static_cast<long>(seed) - 20, 3);
    EXPECT_EQ(io::factorized_from_json(Json::parse(io::to_json(inst).dump())), inst);
    const auto affine = oracle::gen_random_affine(spec);
    EXPECT_EQ(io::affine_from_json(Json::parse(io::to_json(affine).dump())), affine);
  }
}

TEST(Io, RoundTripsOtherKinds) {
  ExplicitInstance e{3, vec({1, 0, -2}), {Hyperedge{{0, 2}, q(5, 2)}, Hyperedge{{0, 1, 2}, -1}}};
  EXPECT_EQ(io::explicit_from_json(io::to_json(e)), e);
  EXPECT_EQ(io::to_json(e)["edges"][0]["set"], Json::parse("[1, 3]"));

  DenseTensor d{{2, 3}, {1, 2, 3, q(1, 2), 0, -1}};
  EXPECT_EQ(io::dense_tensor_from_json(io::to_json(d)), d);

  FactoredTensor f{{2, 1}, {{vec({1, 2}), vec({3})}, {vec({0, -1}), vec({1})}}};
  EXPECT_EQ(io::factored_tensor_from_json(io::to_json(f)), f);

  QuadraticInstance qi;
  qi.n = {2, 1, 2};
  qi.q.emplace(std::make_pair(std::size_t{0}, std::size_t{2}), RationalMatrix::from_rows({vec({1, 2}), vec({3, 4})}));
  qi.c = {vec({1, 0}), vec({-1}), vec({0, 0})};
  EXPECT_EQ(io::quadratic_from_json(io::to_json(qi)), qi);
  EXPECT_EQ(io::to_json(qi)["Q"][0]["j"], 3);

  const auto m = RationalMatrix::from_rows({vec({1, 0, 2}), vec({0, 1, -1})});
  EXPECT_EQ(io::matrix_from_json(io::to_json(m)), m);

  std::vector<AffineFunctional> h(2);
  h[0].linear = vec({1, -1});
  h[0].constant = q(1, 2);
  h[1].linear = vec({0, 0});
  const auto h_back = io::functionals_from_json(io::to_json(h));
  ASSERT_EQ(h_back.size(), 2U);
  EXPECT_EQ(h_back[0].linear, h[0].linear);
  EXPECT_EQ(h_back[0].constant, h[0].constant);
  EXPECT_EQ(h_back[1].constant, 0);

  Solution s{Assignment{{bits("01"), bits("1")}}, q(7, 3), 4};
  const auto s_back = io::solution_from_json(io::to_json(s));
  EXPECT_EQ(s_back.assignment, s.assignment);
  EXPECT_EQ(s_back.value, s.value);
  EXPECT_EQ(s_back.leaves_explored, 4U);

  oracle::Graph g{3, {{0, 1}, {1, 2}}};
  const auto g_back = io::graph_from_json(io::to_json(g));
  EXPECT_EQ(g_back.nodes, 3U);
  EXPECT_EQ(g_back.edges, g.edges);
  EXPECT_EQ(io::to_json(g)["edges"][0], Json::parse("[1, 2]"));
}

TEST(Io, QuadraticLinearPartOptional) {
  const auto inst = io::quadratic_from_json(Json::parse(R"({"n": [1, 2], "Q": [{"i": 1, "j": 2, "matrix": [[1, -1]]}]})"));
  EXPECT_EQ(inst.c, (std::vector<RationalVector>{vec({0}), vec({0, 0})}));
}

TEST(Io, ErrorsNameTheLocation) {
  auto load = [](const char* text) { return [text] { io::factorized_from_json(Json::parse(text)); }; };
  const auto zero_block = message_of(load(R"({"n": [2], "terms": [{"I": [1], "c": {"1": [1, 1]}}, {"I": [0], "c": {"0": [1, 1]}}]})"));
  EXPECT_NE(zero_block.find("terms[2]"), std::string::npos) << zero_block;
  EXPECT_NE(zero_block.find("start at 1"), std::string::npos) << zero_block;

  EXPECT_NE(message_of(load(R"({"s": 3, "n": [2], "terms": []})")).find("s"), std::string::npos);
  EXPECT_NE(message_of(load(R"({"n": [2], "terms": [{"I": [1], "c": {}}]})")).find("block 1"), std::string::npos);
  EXPECT_NE(message_of(load(R"({"n": [2], "terms": [{"I": [1], "c": {"1": [1, 1], "2": [0]}}]})")).find("outside I"), std::string::npos);
  EXPECT_NE(message_of(load(R"({"terms": []})")).find("\"n\""), std::string::npos);
  EXPECT_NE(message_of(load(R"({"n": [2], "terms": [{"I": [1], "c": {"1": [1, "x"]}}]})")).find("terms[1].c.1[2]"), std::string::npos);
  // Wrong vector length is caught by instance validation.
  EXPECT_FALSE(message_of(load(R"({"n": [2], "terms": [{"I": [1], "c": {"1": [1]}}]})")).empty());
  EXPECT_FALSE(message_of(load(R"({"n": [2], "terms": [{"I": [3], "c": {"3": [1, 1]}}]})")).empty());
  EXPECT_FALSE(message_of([] { io::affine_from_json(Json::parse(R"({"n": [1], "terms": [{"I": [1], "c": {"1": [1]}}]})")); }).empty());
  EXPECT_FALSE(message_of([] { io::matrix_from_json(Json::parse(R"({"matrix": [[1, 2], [3]]})")); }).empty());
  EXPECT_FALSE(message_of([] { io::quadratic_from_json(Json::parse(R"({"n": [1, 1], "Q": [{"i": 2, "j": 1, "matrix": [[1]]}]})")); }).empty());
  EXPECT_FALSE(message_of([] { io::solution_from_json(Json::parse(R"({"value": "1", "assignment": [[2]]})")); }).empty());
  EXPECT_FALSE(message_of([] { io::graph_from_json(Json::parse(R"({"nodes": 2, "edges": [[1, 1]]})")); }).empty());
}

TEST(Io, Files) {
  const auto dir = std::filesystem::temp_directory_path() / "facpoly_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "doc.json";
  io::write_json_file(path, Json{{"a", 1}});
  EXPECT_EQ(io::read_json_file(path), (Json{{"a", 1}}));
  {
    std::ofstream bad(dir / "bad.json");
    bad << "{ not json";
  }
  EXPECT_THROW(io::read_json_file(dir / "bad.json"), IoError);
  EXPECT_THROW(io::read_json_file(dir / "missing.json"), IoError);
  std::filesystem::remove_all(dir);
}

TEST(Io, BitsEncoding) {
  EXPECT_EQ(io::bits_to_json(Assignment{{bits("10"), bits("011")}}), Json::parse("[[1, 0], [0, 1, 1]]"));
}

}  // namespace
}  // namespace facpoly
