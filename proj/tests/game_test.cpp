#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "nlg/errors.hpp"
#include "nlg/game.hpp"
#include "nlg/json_io.hpp"
#include "test_games.hpp"

namespace nlg {
namespace {

using testing::chsh_game;
using testing::mermin_game;
using testing::random_game;

// Full enumeration of every deterministic strategy; no pruning, no best
// response. Used as the oracle for the exact search.
Rational brute_force_value(const ModMGame& game) {
  std::vector<std::pair<int, int>> slots;
  for (int p = 0; p < game.players(); ++p)
    for (int q = 0; q < game.question_count(p); ++q) slots.emplace_back(p, q);
  DeterministicStrategy s;
  s.answers.resize(game.players());
  for (int p = 0; p < game.players(); ++p) s.answers[p].assign(game.question_count(p), 0);
  Rational best = -1;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == slots.size()) {
      best = std::max(best, evaluate_strategy(game, s));
      return;
    }
    for (int a = 0; a < game.modulus(); ++a) {
      s.answers[slots[i].first][slots[i].second] = a;
      rec(i + 1);
    }
  };
  rec(0);
  return best;
}

TEST(ClassicalValueTest, MerminGame) {
  auto r = classical_value(mermin_game());
  EXPECT_EQ(r.omega, Rational(3, 4));
  EXPECT_EQ(r.beta, Rational(1, 2));
  EXPECT_EQ(evaluate_strategy(mermin_game(), r.witness), r.omega);
}

TEST(ClassicalValueTest, ChshGame) {
  auto r = classical_value(chsh_game());
  EXPECT_EQ(r.omega, Rational(3, 4));
}

TEST(ClassicalValueTest, ConstantTargetIsWinnable) {
  std::mt19937_64 rng(3);
  auto g = random_game(rng, {3, 2, 2}, 3, 0.7);
  std::vector<SupportEntry> sup = g.support();
  for (auto& e : sup) e.target = 0;
  ModMGame zero(3, {g.questions(0), g.questions(1), g.questions(2)}, sup);
  auto r = classical_value(zero);
  EXPECT_EQ(r.omega, 1);
  EXPECT_EQ(r.beta, 1);
  for (const auto& a : r.witness.answers)
    for (int v : a) EXPECT_EQ(v, 0);
}

TEST(ClassicalValueTest, MatchesFullEnumeration) {
  std::mt19937_64 rng(11);
  const std::vector<std::vector<int>> shapes = {{2, 2}, {3, 2}, {2, 2, 2}, {4, 4}, {2, 2, 2, 2}, {1, 3, 2}, {3}};
  for (int m = 2; m <= 3; ++m)
    for (const auto& dims : shapes)
      for (int rep = 0; rep < 15; ++rep) {
        auto g = random_game(rng, dims, m, rep % 3 == 0 ? 1.0 : 0.6);
        auto r = classical_value(g);
        ASSERT_EQ(r.omega, brute_force_value(g));
        ASSERT_EQ(evaluate_strategy(g, r.witness), r.omega);
        ASSERT_GE(r.omega, Rational(1, m));
        ASSERT_LE(r.omega, 1);
        ASSERT_GE(r.beta, 0);
        ASSERT_LE(r.beta, 1);
      }
}

TEST(ClassicalValueTest, WorkerCountDoesNotChangeResult) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    auto g = random_game(rng, {4, 4, 3}, 2, 0.5);
    auto one = classical_value(g, {.budget = 0, .workers = 1});
    auto many = classical_value(g, {.budget = 0, .workers = 7});
    EXPECT_EQ(one.omega, many.omega);
    EXPECT_EQ(one.witness.answers, many.witness.answers);
  }
}

TEST(ClassicalValueTest, WitnessIsLexicographicallyFirst) {
  // The second player sees which tuple was drawn, so every prefix is
  // optimal and the witness must use the all-zero prefix.
  std::vector<std::vector<std::string>> q(2, {"a", "b"});
  std::vector<SupportEntry> s = {{{0, 0}, Rational(1, 2), 1}, {{1, 1}, Rational(1, 2), 0}};
  auto r = classical_value(ModMGame(2, q, s));
  EXPECT_EQ(r.omega, 1);
  EXPECT_EQ(r.witness.answers[0], (std::vector<int>{0, 0}));
  EXPECT_EQ(r.witness.answers[1], (std::vector<int>{1, 0}));
}

TEST(ClassicalValueTest, BudgetIsEnforced) {
  std::mt19937_64 rng(1);
  auto g = random_game(rng, {6, 6, 2}, 3);
  try {
    classical_value(g, {.budget = 100, .workers = 1});
    FAIL() << "expected budget error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExceeded);
  }
}

TEST(ClassicalValueTest, ShiftInvarianceOfValue) {
  std::mt19937_64 rng(9);
  auto g = random_game(rng, {3, 3, 2}, 3);
  DeterministicStrategy s{{{0, 2, 1}, {1, 1, 0}, {2, 0}}};
  DeterministicStrategy shifted = s;
  const int c[3] = {1, 2, 0};
  for (int p = 0; p < 3; ++p)
    for (int& a : shifted.answers[p]) a = (a + c[p]) % 3;
  EXPECT_EQ(evaluate_strategy(g, s), evaluate_strategy(g, shifted));
}

TEST(EvaluateStrategyTest, RejectsIncompleteStrategy) {
  DeterministicStrategy s{{{0, 0}, {0, 0}, {0}}};
  try {
    evaluate_strategy(mermin_game(), s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncompleteStrategy);
  }
}

TEST(EvaluateStrategyTest, UniformAverageOverMerminStrategies) {
  // Average over all 64 strategies equals 1/2 by symmetry of each input.
  auto g = mermin_game();
  Rational sum = 0;
  for (int code = 0; code < 64; ++code) {
    DeterministicStrategy s;
    for (int p = 0; p < 3; ++p) s.answers.push_back({(code >> (2 * p)) & 1, (code >> (2 * p + 1)) & 1});
    Rational v = evaluate_strategy(g, s);
    EXPECT_GE(v, 0);
    EXPECT_LE(v, 1);
    sum += v;
  }
  EXPECT_EQ(sum / 64, Rational(1, 2));
}

TEST(GameValidationTest, RejectsBadGames) {
  std::vector<std::vector<std::string>> q(2, {"0", "1"});
  auto expect_invalid = [](auto&& make) {
    try {
      make();
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidGame);
    }
  };
  expect_invalid([&] { ModMGame(2, q, {}); });
  expect_invalid([&] { ModMGame(2, q, {{{0, 0}, Rational(1, 2), 0}}); });
  expect_invalid([&] { ModMGame(2, q, {{{0, 0}, Rational(1, 2), 0}, {{0, 0}, Rational(1, 2), 1}}); });
  expect_invalid([&] { ModMGame(1, q, {{{0, 0}, Rational(1), 0}}); });
  expect_invalid([&] { ModMGame(2, q, {{{0, 0}, Rational(1), 2}}); });
  expect_invalid([&] { ModMGame(2, q, {{{0, 0}, Rational(1), 0}, {{1, 0}, Rational(0), 0}}); });
}

TEST(RepetitionTest, SingleCopyIsIsomorphic) {
  auto g = mermin_game();
  for (auto mode : {RepetitionMode::kXor, RepetitionMode::kAnd}) {
    auto r = xor_parallel_repetition(g, 1, mode);
    ASSERT_EQ(r.support().size(), g.support().size());
    for (std::size_t i = 0; i < g.support().size(); ++i) {
      EXPECT_EQ(r.support()[i].questions, g.support()[i].questions);
      EXPECT_EQ(r.support()[i].target, g.support()[i].target);
    }
    EXPECT_EQ(classical_value(r).omega, Rational(3, 4));
  }
}

TEST(RepetitionTest, XorModeOnMermin) {
  auto g = mermin_game();
  auto r = xor_parallel_repetition(g, 2, RepetitionMode::kXor);
  ASSERT_EQ(r.support().size(), 16u);
  EXPECT_EQ(r.question_count(0), 4);
  EXPECT_EQ(r.questions(0)[1], "0,1");
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      const auto& e = r.support()[a * 4 + b];
      EXPECT_EQ(e.target, g.support()[a].target ^ g.support()[b].target);
      EXPECT_EQ(e.weight, Rational(1, 16));
    }
}

TEST(RepetitionTest, AndModeOfConstantGame) {
  std::vector<std::vector<std::string>> q(2, {"0", "1"});
  std::vector<SupportEntry> s;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) s.push_back({{x, y}, Rational(1, 4), 0});
  auto r = xor_parallel_repetition(ModMGame(2, q, s), 3, RepetitionMode::kAnd);
  EXPECT_EQ(r.modulus(), 8);
  EXPECT_EQ(classical_value(r).omega, 1);
}

TEST(RepetitionTest, AndModeValueIsAtMostBaseValue) {
  auto r = xor_parallel_repetition(chsh_game(), 2, RepetitionMode::kAnd);
  auto v = classical_value(r).omega;
  EXPECT_LE(v, Rational(3, 4));
  EXPECT_GE(v, Rational(9, 16));
}

TEST(RepetitionTest, RejectsNonBinaryGames) {
  std::mt19937_64 rng(2);
  auto g = random_game(rng, {2, 2}, 3);
  EXPECT_THROW(xor_parallel_repetition(g, 2, RepetitionMode::kXor), Error);
}

DeterministicStrategy random_strategy(const ModMGame& g, std::mt19937_64& rng) {
  DeterministicStrategy s;
  for (int p = 0; p < g.players(); ++p) {
    std::vector<int> a;
    for (int q = 0; q < g.question_count(p); ++q) a.push_back(static_cast<int>(rng() % g.modulus()));
    s.answers.push_back(a);
  }
  return s;
}

TEST(CleveSlofstraTest, SidesAgreeOnRandomStrategies) {
  std::mt19937_64 rng(21);
  auto g = mermin_game();
  for (int k = 1; k <= 2; ++k) {
    auto product = xor_parallel_repetition(g, k, RepetitionMode::kAnd);
    for (int rep = 0; rep < 100; ++rep) {
      auto sides = cleve_slofstra_check(g, random_strategy(product, rng), k);
      ASSERT_EQ(sides.lhs, sides.rhs);
    }
  }
}

TEST(CleveSlofstraTest, SingleCopyIsHalfOnePlusBias) {
  std::mt19937_64 rng(4);
  auto g = chsh_game();
  for (int rep = 0; rep < 20; ++rep) {
    auto s = random_strategy(g, rng);
    auto sides = cleve_slofstra_check(g, s, 1);
    Rational eps = 2 * evaluate_strategy(g, s) - 1;
    EXPECT_EQ(sides.lhs, (1 + eps) / 2);
    EXPECT_EQ(sides.rhs, (1 + eps) / 2);
  }
}

TEST(CleveSlofstraTest, PerfectStrategyOnConstantGame) {
  std::vector<std::vector<std::string>> q(2, {"0", "1"});
  std::vector<SupportEntry> s = {{{0, 0}, Rational(1, 2), 0}, {{1, 1}, Rational(1, 2), 0}};
  ModMGame g(2, q, s);
  auto product = xor_parallel_repetition(g, 2, RepetitionMode::kAnd);
  DeterministicStrategy zero{{std::vector<int>(4, 0), std::vector<int>(4, 0)}};
  auto sides = cleve_slofstra_check(g, zero, 2);
  EXPECT_EQ(sides.lhs, 1);
  EXPECT_EQ(sides.rhs, 1);
}

TEST(ConnectionGraphTest, TotalGameIsConnected) {
  std::mt19937_64 rng(8);
  auto g = random_game(rng, {3, 2, 2}, 2);
  EXPECT_TRUE(is_total(g));
  EXPECT_TRUE(is_connected(connection_graph(g)));
}

TEST(ConnectionGraphTest, MerminIsDisconnected) {
  auto graph = connection_graph(mermin_game());
  EXPECT_EQ(graph.vertices, 4);
  EXPECT_TRUE(graph.edges.empty());
  EXPECT_FALSE(is_connected(graph));
  EXPECT_FALSE(is_total(mermin_game()));
  EXPECT_EQ(connected_components(graph), (std::vector<int>{0, 1, 2, 3}));
}

TEST(ConnectionGraphTest, SingleInput) {
  std::vector<std::vector<std::string>> q(2, {"0", "1"});
  ModMGame g(2, q, {{{1, 0}, Rational(1), 1}});
  EXPECT_TRUE(is_connected(connection_graph(g)));
  EXPECT_FALSE(is_total(g));
}

TEST(ConnectionGraphTest, EdgesDifferInOneCoordinate) {
  std::mt19937_64 rng(6);
  auto g = random_game(rng, {3, 3, 2}, 2, 0.5);
  auto graph = connection_graph(g);
  for (auto [a, b] : graph.edges) {
    int same = 0;
    for (int p = 0; p < 3; ++p) same += g.support()[a].questions[p] == g.support()[b].questions[p];
    EXPECT_EQ(same, 2);
    EXPECT_LT(a, b);
  }
}

TEST(GameJsonTest, RoundTrip) {
  auto g = mermin_game();
  auto back = game_from_json(game_to_json(g));
  EXPECT_EQ(game_to_json(back), game_to_json(g));
  auto r = classical_value(back);
  Json out = report_to_json(back, r);
  EXPECT_EQ(out["omega"], "3/4");
  EXPECT_EQ(out["beta"], "1/2");
  EXPECT_EQ(strategy_from_json(back, out["witness"]).answers, r.witness.answers);
  EXPECT_EQ(report_csv_row("mermin", r), "mermin,3/4,1/2");
}

TEST(GameJsonTest, AcceptsNumericLabelsAndDecimalWeights) {
  Json doc = Json::parse(R"({"t":2,"m":2,"questions":[[0,1],[0]],
      "support":[{"x":[0,0],"w":0.25,"target":0},{"x":[1,0],"w":"3/4","target":1}]})");
  auto g = game_from_json(doc);
  EXPECT_EQ(g.support()[0].weight, Rational(1, 4));
  EXPECT_EQ(classical_value(g).omega, 1);
}

TEST(GameJsonTest, RejectsZeroWeightAndUnknownLabel) {
  Json zero = Json::parse(R"({"t":1,"m":2,"questions":[["a","b"]],
      "support":[{"x":["a"],"w":"1","target":0},{"x":["b"],"w":"0","target":0}]})");
  EXPECT_THROW(game_from_json(zero), Error);
  Json unknown = Json::parse(R"({"t":1,"m":2,"questions":[["a"]],"support":[{"x":["c"],"w":"1","target":0}]})");
  EXPECT_THROW(game_from_json(unknown), Error);
}

TEST(RationalTest, ParsesAndPrints) {
  EXPECT_EQ(parse_rational("6/8"), Rational(3, 4));
  EXPECT_EQ(parse_rational("-0.125"), Rational(-1, 8));
  EXPECT_EQ(parse_rational("2.5e-1"), Rational(1, 4));
  EXPECT_EQ(to_string(Rational(4, 2)), "2");
  EXPECT_THROW(parse_rational("1/0"), Error);
  EXPECT_THROW(parse_rational("abc"), Error);
  EXPECT_EQ(simplest_between(Rational(3, 10), Rational(4, 10)), Rational(1, 3));
  EXPECT_EQ(simplest_between(Rational(1, 2), Rational(1, 2)), Rational(1, 2));
}

}  // namespace
}  // namespace nlg
