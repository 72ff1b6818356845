#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nlg/rational.hpp"

namespace nlg {

// How answers combine. Cyclic is Z_m. BitwiseXor is (Z_2)^k with m = 2^k and
// stands in for the conjunction of k binary games.
enum class AnswerGroup { kCyclic, kBitwiseXor };

struct SupportEntry {
  std::vector<int> questions;  // one question index per player
  Rational weight;
  int target = 0;
};

class ModMGame {
 public:
  ModMGame(int modulus, std::vector<std::vector<std::string>> question_labels,
           std::vector<SupportEntry> support, AnswerGroup group = AnswerGroup::kCyclic);

  int players() const { return static_cast<int>(labels_.size()); }
  int modulus() const { return modulus_; }
  AnswerGroup answer_group() const { return group_; }
  const std::vector<std::string>& questions(int player) const { return labels_[player]; }
  int question_count(int player) const { return static_cast<int>(labels_[player].size()); }
  const std::vector<SupportEntry>& support() const { return support_; }

  // Index of a label for a player, or -1.
  int find_question(int player, const std::string& label) const;

  int add(int a, int b) const;
  int sub(int a, int b) const;

 private:
  int modulus_;
  AnswerGroup group_;
  std::vector<std::vector<std::string>> labels_;
  std::vector<SupportEntry> support_;
};

struct DeterministicStrategy {
  // answers[player][question] in [0, m).
  std::vector<std::vector<int>> answers;
};

struct GameValueReport {
  Rational omega;
  Rational beta;
  DeterministicStrategy witness;
};

struct SearchOptions {
  // Maximum number of strategy prefixes to enumerate; 0 means unlimited.
  std::uint64_t budget = 0;
  int workers = 0;
};

// m/(m-1) * (omega - 1/m). Negative for strategies worse than random.
Rational bias_from_value(const Rational& omega, int m);

Rational evaluate_strategy(const ModMGame& game, const DeterministicStrategy& s);

// Number of prefixes the exact search enumerates (saturating at UINT64_MAX).
std::uint64_t classical_search_size(const ModMGame& game);

GameValueReport classical_value(const ModMGame& game, const SearchOptions& options = {});

enum class RepetitionMode { kXor, kAnd };

// Product questions are labelled "q1,q2,...,qk" with coordinate 1 most
// significant in the question index. In AND mode the result uses bitwise
// answers over m = 2^k: bit i of an answer (and of a target) belongs to
// coordinate i + 1.
ModMGame xor_parallel_repetition(const ModMGame& game, int k, RepetitionMode mode);

struct IdentitySides {
  Rational lhs;
  Rational rhs;
};

// Left side: value of `strategy` on the k-fold conjunction of `game`.
// Right side: 2^-k times the sum over coordinate subsets M of the bias of the
// same strategy on the parity of the coordinates in M.
IdentitySides cleve_slofstra_check(const ModMGame& game, const DeterministicStrategy& strategy, int k);

struct ConnectionGraph {
  int vertices = 0;  // indices into the game's support
  std::vector<std::pair<int, int>> edges;
};

ConnectionGraph connection_graph(const ModMGame& game);
bool is_connected(const ConnectionGraph& graph);
// Component id per vertex, numbered in order of first appearance.
std::vector<int> connected_components(const ConnectionGraph& graph);
bool is_total(const ModMGame& game);

}  // namespace nlg
