#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nlg/errors.hpp"
#include "nlg/hypnorm.hpp"

namespace nlg {
namespace {

GameTensor chsh_tensor() { return uniform_tensor({2, 2}, {1, 1, 1, -1}); }

// Oracle: literal expectation over every tuple of maps phi_i: V_i -> X_i.
Rational naive_expectation(const GameTensor& t, const Hypergraph& h) {
  std::vector<int> radix, owner;
  for (int i = 0; i < t.players(); ++i)
    for (std::size_t v = 0; v < h.parts[i].size(); ++v) {
      radix.push_back(t.dims[i]);
      owner.push_back(i);
    }
  std::vector<int> offset(t.players(), 0);
  for (int i = 1; i < t.players(); ++i) offset[i] = offset[i - 1] + static_cast<int>(h.parts[i - 1].size());
  std::vector<int> d(radix.size(), 0);
  Rational total = 0;
  while (true) {
    Rational w = 1;
    for (std::size_t k = 0; k < d.size(); ++k) w *= t.marginals[owner[k]][d[k]];
    int prod = 1;
    for (const auto& e : h.edges) {
      std::size_t idx = 0;
      for (int i = 0; i < t.players(); ++i) idx = idx * t.dims[i] + d[offset[i] + e[i]];
      prod *= t.entries[idx];
    }
    total += w * prod;
    int k = static_cast<int>(d.size());
    while (k-- > 0) {
      if (++d[k] < radix[k]) break;
      d[k] = 0;
    }
    if (k < 0) break;
  }
  return total;
}

// Every sign strategy, for checking optimality claims.
template <typename F>
void for_each_strategy(const GameTensor& t, F&& f) {
  int bits = 0;
  for (int d : t.dims) bits += d;
  for (std::uint64_t mask = 0; mask < (1ULL << bits); ++mask) {
    SignStrategy s;
    int b = 0;
    for (int d : t.dims) {
      std::vector<int> a;
      for (int x = 0; x < d; ++x, ++b) a.push_back((mask >> b) & 1 ? -1 : 1);
      s.push_back(std::move(a));
    }
    f(s);
  }
}

TEST(BuildHt, TwoPlayerTable) {
  const Hypergraph h = build_Ht(2);
  EXPECT_EQ(h.parts[0], (std::vector<std::string>{"v1_00", "v1_01"}));
  EXPECT_EQ(h.parts[1], (std::vector<std::string>{"v2_00", "v2_10"}));
  EXPECT_EQ(h.edges, (std::vector<std::vector<int>>{{0, 0}, {1, 0}, {0, 1}, {1, 1}}));
}

TEST(BuildHt, SizesAndProperties) {
  for (int t = 2; t <= 6; ++t) {
    const Hypergraph h = build_Ht(t);
    EXPECT_EQ(h.edges.size(), 1u << t);
    for (const auto& p : h.parts) EXPECT_EQ(p.size(), 1u << (t - 1));
    const HypergraphReport r = verify_Ht_properties(h);
    EXPECT_TRUE(r.ok()) << t << ": " << (r.violations.empty() ? "" : r.violations[0]);
  }
  EXPECT_THROW(build_Ht(1), Error);
}

TEST(BuildHt, ViolationsAreReported) {
  Hypergraph dup = build_Ht(2);
  dup.edges.push_back(dup.edges[0]);
  HypergraphReport r = verify_Ht_properties(dup);
  EXPECT_FALSE(r.regular);
  EXPECT_FALSE(r.violations.empty());

  Hypergraph single{{{"a"}, {"b"}, {"c"}}, {{0, 0, 0}}};
  r = verify_Ht_properties(single);
  EXPECT_FALSE(r.regular);
  EXPECT_TRUE(r.partite);

  Hypergraph broken{{{"a"}, {"b"}}, {{0, 3}}};
  EXPECT_FALSE(verify_Ht_properties(broken).partite);
}

TEST(HypergraphNorm, ClosedForms) {
  const NormResult chsh = hypergraph_norm(chsh_tensor(), build_Ht(2));
  ASSERT_TRUE(chsh.exact_expectation);
  EXPECT_EQ(*chsh.exact_expectation, Rational(1, 2));
  EXPECT_NEAR(chsh.norm, std::pow(2.0, -0.25), 1e-12);

  const NormResult ones = hypergraph_norm(uniform_tensor({2, 3, 2}, std::vector<std::int8_t>(12, 1)), build_Ht(3));
  EXPECT_EQ(*ones.exact_expectation, 1);

  const std::vector<int> a = {1, -1}, b = {-1, -1, 1}, c = {1, -1};
  std::vector<std::int8_t> e;
  for (int x : a)
    for (int y : b)
      for (int z : c) e.push_back(static_cast<std::int8_t>(x * y * z));
  EXPECT_EQ(*hypergraph_norm(uniform_tensor({2, 3, 2}, e), build_Ht(3)).exact_expectation, 1);
}

TEST(HypergraphNorm, MatchesNaiveExpectation) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    GameTensor t = random_tensor(rng, {2, 2, 2});
    t.marginals[0] = {Rational(1, 3), Rational(2, 3)};
    t.marginals[2] = {Rational(3, 4), Rational(1, 4)};
    const Hypergraph h = build_Ht(3);
    const NormResult r = hypergraph_norm(t, h);
    const Rational want = naive_expectation(t, h);
    EXPECT_EQ(*r.exact_expectation, want);
    NormOptions floating;
    floating.exact_limit = 0;
    EXPECT_NEAR(hypergraph_norm(t, h, floating).expectation, want.get_d(), 1e-14);
  }
  const GameTensor two = random_tensor(rng, {3, 2});
  EXPECT_EQ(*hypergraph_norm(two, build_Ht(2)).exact_expectation, naive_expectation(two, build_Ht(2)));
}

TEST(HypergraphNorm, WorkerCountDoesNotChangeResult) {
  std::mt19937_64 rng(9);
  const GameTensor t = random_tensor(rng, {3, 3, 3});
  NormOptions a, b;
  a.workers = 1;
  b.workers = 4;
  a.exact_limit = b.exact_limit = 0;
  EXPECT_EQ(hypergraph_norm(t, build_Ht(3), a).expectation, hypergraph_norm(t, build_Ht(3), b).expectation);
}

TEST(HypergraphNorm, BudgetIsEnforced) {
  std::mt19937_64 rng(1);
  NormOptions o;
  o.budget = 100;
  try {
    hypergraph_norm(random_tensor(rng, {2, 2, 2}), build_Ht(3), o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExceeded);
  }
}

TEST(HypergraphNorm, BoundsEveryClassicalStrategy) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const GameTensor t = random_tensor(rng, {2, 2, 2});
    const double norm = hypergraph_norm(t, build_Ht(3)).norm;
    for_each_strategy(t, [&](const SignStrategy& s) {
      EXPECT_LE(std::abs(strategy_bias(t, s).get_d()), norm + 1e-9);
    });
  }
}

TEST(ClassicalBias, MatchesBruteForceAndGameCore) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    GameTensor t = random_tensor(rng, {2, 3, 2});
    t.marginals[1] = {Rational(1, 2), Rational(1, 3), Rational(1, 6)};
    Rational best = 0;
    for_each_strategy(t, [&](const SignStrategy& s) { best = std::max(best, Rational(abs(strategy_bias(t, s)))); });
    const ClassicalBias cb = free_game_classical_bias(t);
    EXPECT_EQ(cb.bias, best);
    EXPECT_EQ(strategy_bias(t, cb.strategy), best);
    EXPECT_EQ(bias_from_value(classical_value(free_xor_game(t)).omega, 2), best);
  }
}

TEST(Extraction, ReachesNormPower) {
  const Extraction chsh = extract_classical_strategy(chsh_tensor());
  EXPECT_EQ(chsh.bias, Rational(1, 2));
  EXPECT_EQ(strategy_bias(chsh_tensor(), chsh.strategy), Rational(1, 2));

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const GameTensor t = random_tensor(rng, {2, 2, 2});
    const NormResult n = hypergraph_norm(t, build_Ht(3));
    const Extraction e = extract_classical_strategy(t);
    EXPECT_GE(e.bias, Rational(abs(*n.exact_expectation)));
    EXPECT_GE(e.bias.get_d(), std::pow(n.norm, 8) - 1e-12);
    EXPECT_EQ(strategy_bias(t, e.strategy), e.bias);
  }

  const std::vector<int> a = {1, -1, -1}, b = {-1, 1};
  std::vector<std::int8_t> r1;
  for (int x : a)
    for (int y : b) r1.push_back(static_cast<std::int8_t>(x * y));
  EXPECT_EQ(extract_classical_strategy(uniform_tensor({3, 2}, r1)).bias, 1);
}

TEST(TensorJson, RoundTripAndErrors) {
  GameTensor t = chsh_tensor();
  t.marginals[0] = {Rational(1, 5), Rational(4, 5)};
  const GameTensor back = tensor_from_json(tensor_to_json(t));
  EXPECT_EQ(back.entries, t.entries);
  EXPECT_EQ(back.marginals, t.marginals);
  EXPECT_EQ(tensor_from_json(Json::parse(R"({"dims":[2],"entries":[1,-1]})")).marginals[0][1], Rational(1, 2));
  EXPECT_THROW(tensor_from_json(Json::parse(R"({"dims":[2],"entries":[1,0]})")), Error);
  EXPECT_THROW(tensor_from_json(Json::parse(R"({"dims":[2]})")), Error);
  EXPECT_EQ(free_xor_game(t).support().size(), 4u);
}

}  // namespace
}  // namespace nlg
