#pragma once

#include <random>
#include <string>
#include <vector>

#include "nlg/game.hpp"

namespace nlg::testing {

inline ModMGame mermin_game() {
  std::vector<std::vector<std::string>> q(3, {"0", "1"});
  std::vector<SupportEntry> s = {
      {{0, 0, 0}, Rational(1, 4), 0},
      {{1, 1, 0}, Rational(1, 4), 1},
      {{1, 0, 1}, Rational(1, 4), 1},
      {{0, 1, 1}, Rational(1, 4), 1},
  };
  return ModMGame(2, q, s);
}

inline ModMGame chsh_game() {
  std::vector<std::vector<std::string>> q(2, {"0", "1"});
  std::vector<SupportEntry> s;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) s.push_back({{x, y}, Rational(1, 4), x & y});
  return ModMGame(2, q, s);
}

// Random game with the given question counts; each tuple is kept with
// probability `density` (at least one is kept) and gets a random weight.
inline ModMGame random_game(std::mt19937_64& rng, std::vector<int> dims, int m, double density = 1.0) {
  std::vector<std::vector<std::string>> labels;
  for (int d : dims) {
    std::vector<std::string> l;
    for (int i = 0; i < d; ++i) l.push_back("q" + std::to_string(i));
    labels.push_back(l);
  }
  std::vector<std::vector<int>> tuples;
  std::vector<int> cur(dims.size(), 0);
  while (true) {
    tuples.push_back(cur);
    std::size_t i = dims.size();
    while (i-- > 0) {
      if (++cur[i] < dims[i]) break;
      cur[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> wdist(1, 9), tdist(0, m - 1);
  std::vector<SupportEntry> sup;
  for (const auto& tup : tuples)
    if (coin(rng) < density) sup.push_back({tup, Rational(wdist(rng)), tdist(rng)});
  if (sup.empty()) sup.push_back({tuples[0], Rational(1), tdist(rng)});
  Rational total = 0;
  for (const auto& e : sup) total += e.weight;
  for (auto& e : sup) {
    e.weight /= total;
    e.weight.canonicalize();
  }
  return ModMGame(m, labels, sup);
}

}  // namespace nlg::testing
