#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "nlg/angle_game.hpp"
#include "nlg/game.hpp"
#include "nlg/monte_carlo.hpp"
#include "nlg/polynomial.hpp"
#include "nlg/quantum.hpp"

namespace nlg {

struct SnapOptions {
  double tolerance = 1e-9;
  // Largest denominator accepted when snapping angles; 0 picks
  // m * (largest question count).
  std::int64_t max_denominator = 0;
};

struct SchmidtReduction {
  AngleGameDiscrete game;
  std::vector<std::vector<double>> raw_angles;  // [player][question], turns
  double max_promise_residual = 0.0;            // before snapping
};

// Reads one phase per player and question off sum_a w^a P_a (first entry of
// modulus above 1e-9, row-major) and returns the induced angle game.
SchmidtReduction schmidt_reduce(const ModMGame& game, const SchmidtStrategySpec& spec, const SnapOptions& options = {});

// Perfect classical strategy for an angle game whose inputs are connected.
// Questions are indexed as in g.to_game().
DeterministicStrategy synthesize_perfect_strategy(const AngleGameDiscrete& g);

// Probability of each answer given the last player's angle x in (0, 1),
// for the uniform angle game where the other t-1 angles are independent
// and uniform. One polynomial per answer, valid on the whole of (0, 1).
struct ConditionalProfile {
  int players = 0;
  int modulus = 0;
  std::vector<Polynomial> answer_density;  // unnormalized, per answer l
  Polynomial total_density;                // sum over l (identically 1)
};

ConditionalProfile uag_conditional_profile(int t, int m);

struct ProfileRow {
  Rational x;
  int answer = 0;
  Rational probability;
};

struct ProfileTable {
  std::vector<ProfileRow> rows;  // grouped by x, answers ascending
  std::vector<int> argmax;       // per grid point, smallest answer on ties
};

// Grid points x_i = (2i + 1) / (2N), i = 0..N-1.
ProfileTable uag_profile_table(int t, int m, int grid);

struct SemiTrivialValue {
  bool exact = false;
  Rational value;  // set when exact
  Rational lower;  // certified bounds; equal to value when exact
  Rational upper;
  // Points where the optimal answer changes; exact ones only.
  std::vector<Rational> breakpoints;
  // Switch points that could not be certified rational.
  std::vector<std::pair<Rational, Rational>> irrational_breakpoints;
  std::vector<int> piece_answers;  // optimal answer on each piece, left to right
};

// Winning probability when the first t-1 players answer 0 and the last one
// best-responds to its own angle.
SemiTrivialValue semi_trivial_value(int t, int m);

// Answer of player `player` (0-based) on reduced angle phi in [0, 1).
using UagOracle = std::function<int(int player, double phi)>;
UagOracle semi_trivial_oracle(int t, int m);

struct BoyerSearchEntry {
  int inputs = 0;
  GameValueReport report;
};

struct BoyerSearchReport {
  std::vector<BoyerSearchEntry> completed;
  std::vector<int> skipped;  // input counts left out by the budget
  std::optional<Rational> best;
  std::optional<int> best_inputs;
  bool partial() const { return !skipped.empty(); }
};

// Exact classical optimum for each input count D in [d_min, d_max]; the best
// entry is the minimum over D.
BoyerSearchReport boyer_strategy_search(int t, int m, int d_min, int d_max, const SearchOptions& options = {});

// Shared-randomness guessing strategy on the uniform angle game: each player
// rounds t * angle down, the players share guesses of the first t-1 rounded
// values, and the last player answers as if the guesses were right.
MonteCarloEstimate floor_strategy_trial(int t, int m, std::uint64_t seed, std::uint64_t samples, int workers = 0);

// Rotates inputs of g by shared random angles, reduces to the uniform angle
// game and plays `oracle` there. Estimates the winning probability on g.
MonteCarloEstimate reduce_to_uag(const AngleGameDiscrete& g, const UagOracle& oracle, std::uint64_t seed,
                                 std::uint64_t samples, int workers = 0);

// Four players, D = 2^e inputs, modulus 2: the first three answer 0, the
// fourth answers 1 exactly on inputs 0 and 1. Exact winning probability.
Rational power_of_two_strategy_value(int e);

}  // namespace nlg
