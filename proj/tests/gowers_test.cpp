#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlg/errors.hpp"
#include "nlg/gowers.hpp"

namespace nlg {
namespace {

std::complex<double> e_p(long k, int p) {
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(((k % p) + p) % p) / p);
}

GroupFunction random_function(std::mt19937_64& rng, const FiniteAbelianGroup& g) {
  std::uniform_real_distribution<double> r(0.0, 1.0);
  GroupFunction f{g, {}};
  for (int x = 0; x < g.size(); ++x) f.values.push_back(std::polar(r(rng), 2.0 * std::numbers::pi * r(rng)));
  return f;
}

// Oracle: the U^2 expectation written out over x, h1, h2.
double naive_u2(const GroupFunction& f) {
  const auto& g = f.group;
  std::complex<double> acc = 0.0;
  for (int x = 0; x < g.size(); ++x)
    for (int a = 0; a < g.size(); ++a)
      for (int b = 0; b < g.size(); ++b)
        acc += f.values[x] * std::conj(f.values[g.add(x, a)]) * std::conj(f.values[g.add(x, b)]) *
               f.values[g.add(g.add(x, a), b)];
  return std::pow(acc.real() / std::pow(g.size(), 3), 0.25);
}

LinearFormsSystem system_of(const FiniteAbelianGroup& g, std::vector<std::vector<long>> coeffs) {
  LinearFormsSystem s{g, static_cast<int>(coeffs[0].size()), {}};
  for (auto& c : coeffs) s.forms.push_back({0, std::move(c)});
  return s;
}

TEST(GowersNorm, ClosedForms) {
  const auto z7 = FiniteAbelianGroup::vector_space(7, 1);
  GroupFunction constant{z7, std::vector<std::complex<double>>(7, {0.0, 0.5})};
  EXPECT_NEAR(gowers_norm(constant, 1).norm, 0.5, 1e-12);

  for (int p : {5, 7}) {
    const auto g = FiniteAbelianGroup::vector_space(p, 1);
    GroupFunction quad{g, {}}, character{g, {}};
    for (int x = 0; x < p; ++x) {
      quad.values.push_back(e_p(static_cast<long>(x) * x, p));
      character.values.push_back(e_p(3L * x, p));
    }
    EXPECT_NEAR(gowers_norm(quad, 2).norm, std::pow(p, -0.25), 1e-12);
    EXPECT_NEAR(gowers_norm(quad, 3).norm, 1.0, 1e-12);
    EXPECT_NEAR(gowers_norm(character, 2).norm, 1.0, 1e-12);
    EXPECT_NEAR(gowers_norm(character, 1).norm, 0.0, 1e-12);
  }
}

TEST(GowersNorm, MatchesNaiveAndIsMonotone) {
  std::mt19937_64 rng(11);
  for (const auto& moduli : {std::vector<int>{6}, std::vector<int>{2, 3}, std::vector<int>{3, 3}}) {
    for (int trial = 0; trial < 10; ++trial) {
      const GroupFunction f = random_function(rng, FiniteAbelianGroup(moduli));
      const double u1 = gowers_norm(f, 1).norm, u2 = gowers_norm(f, 2).norm, u3 = gowers_norm(f, 3).norm;
      EXPECT_NEAR(u2, naive_u2(f), 1e-12);
      EXPECT_LE(u1, u2 + 1e-12);
      EXPECT_LE(u2, u3 + 1e-12);
    }
  }
}

TEST(GowersNorm, BudgetIsEnforced) {
  const GroupFunction f = sign_function(FiniteAbelianGroup::vector_space(3, 2), magic_square_tau());
  try {
    gowers_norm(f, 3, 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExceeded);
  }
}

TEST(Group, Arithmetic) {
  const FiniteAbelianGroup g({4, 6});
  EXPECT_EQ(g.size(), 24);
  EXPECT_EQ(g.characteristic(), 2);
  EXPECT_EQ(FiniteAbelianGroup({9, 15}).characteristic(), 3);
  for (int a = 0; a < g.size(); ++a) {
    EXPECT_EQ(g.encode(g.decode(a)), a);
    EXPECT_EQ(g.add(a, g.neg(a)), 0);
    EXPECT_EQ(g.scale(3, a), g.add(a, g.add(a, a)));
  }
}

TEST(CsComplexity, Examples) {
  const auto z3 = FiniteAbelianGroup::vector_space(3, 1);
  EXPECT_EQ(cs_complexity(system_of(z3, {{1, 1}, {1, 0}, {0, 1}})), 1);
  const auto tau = std::vector<int>(3, 0);
  EXPECT_EQ(cs_complexity(line_game(2, 3, 1, tau).system), 1);
  EXPECT_EQ(cs_complexity(line_game(3, 3, 1, tau).system), 2);
  EXPECT_EQ(cs_complexity(line_game(4, 5, 1, std::vector<int>(5, 0)).system), 3);
  EXPECT_EQ(cs_complexity(system_of(z3, {{1, 0}, {1, 0}, {0, 1}})), std::nullopt);
}

TEST(LineGame, CharacteristicGuard) {
  try {
    line_game(3, 2, 2, std::vector<int>(4, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCharacteristic);
  }
  EXPECT_THROW(line_game(2, 4, 1, std::vector<int>(4, 0)), Error);
  EXPECT_THROW(line_game(2, 3, 1, std::vector<int>(2, 0)), Error);
}

TEST(LinearFormsBias, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> tau(3);
    for (int& v : tau) v = static_cast<int>(rng() % 2);
    const LinearFormsGame game = line_game(2, 3, 1, tau);
    Rational best = 0;
    for (int mask = 0; mask < 64; ++mask) {
      GroupSignStrategy s(2, std::vector<int>(3));
      for (int b = 0; b < 6; ++b) s[b / 3][b % 3] = (mask >> b) & 1 ? -1 : 1;
      best = std::max(best, Rational(abs(linear_forms_strategy_bias(game, s))));
    }
    const LinearFormsBias b = linear_forms_bias(game);
    EXPECT_TRUE(b.complete);
    EXPECT_EQ(b.bias, best);
    EXPECT_EQ(Rational(abs(linear_forms_strategy_bias(game, b.strategy))), best);
    EXPECT_EQ(bias_from_value(classical_value(linear_forms_to_game(game)).omega, 2), best);
  }
}

TEST(LinearFormsBias, BudgetReportsPartialSearch) {
  const LinearFormsGame game = line_game(3, 3, 2, magic_square_tau());
  const LinearFormsBias b = linear_forms_bias(game, 1000);
  EXPECT_FALSE(b.complete);
  EXPECT_EQ(b.searched, 1000u);
  EXPECT_EQ(Rational(abs(linear_forms_strategy_bias(game, b.strategy))), b.bias);
}

TEST(VonNeumann, MagicSquareBoundedByU3) {
  const VonNeumannCheck c = von_neumann_check(line_game(3, 3, 2, magic_square_tau()));
  EXPECT_EQ(c.s, 2);
  EXPECT_TRUE(c.holds);
  EXPECT_LE(c.beta.get_d(), c.u_norm + 1e-12);
  EXPECT_GT(c.beta, 0);
}

TEST(PolynomialSplit, WorkedExamples) {
  FpPolynomial y{3, 1, {{{1}, 1}}};
  const auto parts = polynomial_split(y, 2);
  EXPECT_EQ(parts[0].coeffs, (std::map<std::vector<int>, int>{{{1}, 2}}));
  EXPECT_EQ(parts[1].coeffs, (std::map<std::vector<int>, int>{{{1}, 1}}));

  FpPolynomial c{5, 1, {{{0}, 3}}};
  const auto cparts = polynomial_split(c, 3);
  EXPECT_EQ(cparts[0].coeffs, c.coeffs);
  EXPECT_TRUE(cparts[1].coeffs.empty());
  EXPECT_TRUE(verify_split(c, cparts));
}

TEST(PolynomialSplit, ExhaustiveOverF5) {
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      for (int c = 0; c < 5; ++c) {
        FpPolynomial p{5, 1, {{{0}, a}, {{1}, b}, {{2}, c}}};
        p.normalize();
        EXPECT_TRUE(verify_split(p, polynomial_split(p, 3))) << a << b << c;
      }
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    FpPolynomial p{5, 2, {}};
    for (int i = 0; i <= 2; ++i)
      for (int j = 0; i + j <= 2; ++j) p.coeffs[{i, j}] = static_cast<int>(rng() % 5);
    p.normalize();
    EXPECT_TRUE(verify_split(p, polynomial_split(p, 3)));
  }
}

TEST(PolynomialSplit, Guards) {
  FpPolynomial p{3, 1, {{{2}, 1}}};
  try {
    polynomial_split(p, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularSystem);
  }
  EXPECT_THROW(polynomial_split(p, 2), Error);
  FpPolynomial high{3, 1, {{{4}, 1}}};
  high.normalize();
  EXPECT_EQ(high.degree(), 2);
}

TEST(ComplexRounding, IdentityWithinThreeSigma) {
  for (const std::complex<double> z : {std::complex<double>(1.0, 0.0), std::complex<double>(0.0, 1.0),
                                       std::polar(1.0, std::numbers::pi / 7)}) {
    const ComplexEstimate e = complex_rounding_identity(z, 42, 200000);
    EXPECT_LE(std::abs(e.mean.real() - z.real()), 3 * e.std_error_real + 1e-12);
    EXPECT_LE(std::abs(e.mean.imag() - z.imag()), 3 * e.std_error_imag + 1e-12);
  }
}

TEST(Witness, FindsPlantedPhase) {
  const auto g = FiniteAbelianGroup::vector_space(5, 1);
  GroupFunction f{g, {}};
  for (int x = 0; x < 5; ++x) f.values.push_back(e_p(2L * x * x + x, 5));
  const Witness w = witness_search(f, 5, 2);
  EXPECT_TRUE(w.complete);
  EXPECT_NEAR(w.correlation, 1.0, 1e-12);
  EXPECT_EQ(w.poly.coeffs, (std::map<std::vector<int>, int>{{{1}, 4}, {{2}, 3}}));
  EXPECT_THROW(witness_search(f, 5, 5), Error);
}

TEST(Witness, StrategyReproducesCorrelation) {
  const LinearFormsGame game = line_game(3, 3, 2, magic_square_tau());
  const GroupFunction f = sign_function(game.system.group, game.rho);
  const Witness w = witness_search(f, 3, 2);
  const WitnessStrategy s = strategy_from_witness(game, w.poly, 3, 20000);
  EXPECT_NEAR(s.correlation, w.correlation, 1e-12);
  EXPECT_EQ(linear_forms_strategy_bias(game, s.rounded.strategy), s.rounded.bias);
  EXPECT_GE(s.rounded.bias, 0);
  EXPECT_LE(s.rounded.bias, linear_forms_bias(game).bias);
  const double scale = std::pow(std::numbers::pi / 2.0, 3);
  EXPECT_LE(std::abs(s.rounded.complex_bias.mean) / scale,
            w.correlation + 4 * (s.rounded.complex_bias.std_error_real + s.rounded.complex_bias.std_error_imag));
}

TEST(Repetition, ProductOfNorms) {
  std::mt19937_64 rng(3);
  const GroupFunction f = random_function(rng, FiniteAbelianGroup::vector_space(3, 1));
  for (int s = 1; s <= 2; ++s) {
    const ProductCheck c = gowers_product_check(f, 2, s);
    EXPECT_NEAR(c.lhs, c.rhs, 1e-9);
  }
}

TEST(Repetition, BoundHoldsOnTwoFoldGame) {
  const auto z3 = FiniteAbelianGroup::vector_space(3, 1);
  for (const std::vector<int>& rho : {std::vector<int>{0, 1, 1}, std::vector<int>{0, 0, 1}}) {
    const LinearFormsGame game{system_of(z3, {{1, 1}, {1, 0}, {0, 1}}), rho};
    const ModMGame twice = xor_parallel_repetition(linear_forms_to_game(game), 2, RepetitionMode::kAnd);
    const double omega2 = classical_value(twice).omega.get_d();
    EXPECT_LE(omega2, parallel_repetition_bound(game, 2) + 1e-12);
  }
}

TEST(GowersJson, RoundTrip) {
  std::mt19937_64 rng(2);
  const GroupFunction f = random_function(rng, FiniteAbelianGroup({2, 3}));
  const GroupFunction back = group_function_from_json(group_function_to_json(f));
  EXPECT_EQ(back.group.moduli(), f.group.moduli());
  EXPECT_EQ(back.values, f.values);
  EXPECT_THROW(group_function_from_json(Json::parse(R"({"moduli":[3],"values":[1,1]})")), Error);

  FpPolynomial p{5, 2, {{{1, 1}, 2}, {{0, 2}, 4}}};
  EXPECT_EQ(fp_polynomial_from_json(fp_polynomial_to_json(p)).coeffs, p.coeffs);
  EXPECT_THROW(fp_polynomial_from_json(Json::parse(R"({"p":4,"n":1})")), Error);
}

}  // namespace
}  // namespace nlg
