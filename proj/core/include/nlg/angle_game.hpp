#pragma once

#include <vector>

#include "nlg/game.hpp"
#include "nlg/rational.hpp"

namespace nlg {

// Discrete angle game family: t players, D inputs each, modulus M. Inputs
// x in [0, D)^t with sum divisible by D; target (sum / D) mod M.
struct BoyerGame {
  int players = 0;
  int inputs = 0;
  int modulus = 0;
};

void validate(const BoyerGame& b);
ModMGame boyer_to_game(const BoyerGame& b);

// Angles are stored in turns (fractions of a full circle), reduced to [0, 1).
struct AngleTuple {
  std::vector<Rational> angles;
  Rational weight;
  int target = 0;
};

class AngleGameDiscrete {
 public:
  // Checks that sum of angles == target / m (mod 1) exactly for every tuple.
  AngleGameDiscrete(int modulus, std::vector<AngleTuple> support);

  int players() const { return players_; }
  int modulus() const { return modulus_; }
  const std::vector<AngleTuple>& support() const { return support_; }
  // Distinct angles of each player in ascending order; these are the
  // player's questions, in this order, in to_game().
  const std::vector<std::vector<Rational>>& angles() const { return angles_; }
  int question_index(int player, const Rational& angle) const;

  ModMGame to_game() const;

 private:
  int players_ = 0;
  int modulus_ = 0;
  std::vector<AngleTuple> support_;
  std::vector<std::vector<Rational>> angles_;
};

AngleGameDiscrete boyer_to_angle(const BoyerGame& b);

}  // namespace nlg
