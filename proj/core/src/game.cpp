#include "nlg/game.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "nlg/errors.hpp"
#include "nlg/parallel.hpp"

namespace nlg {

ModMGame::ModMGame(int modulus, std::vector<std::vector<std::string>> question_labels,
                   std::vector<SupportEntry> support, AnswerGroup group)
    : modulus_(modulus), group_(group), labels_(std::move(question_labels)), support_(std::move(support)) {
  require(!labels_.empty(), ErrorCode::kInvalidGame, "game needs at least one player");
  require(modulus_ >= 2, ErrorCode::kInvalidGame, "modulus must be at least 2");
  if (group_ == AnswerGroup::kBitwiseXor)
    require((modulus_ & (modulus_ - 1)) == 0, ErrorCode::kInvalidGame, "bitwise answers need a power-of-two modulus");
  for (std::size_t p = 0; p < labels_.size(); ++p) {
    require(!labels_[p].empty(), ErrorCode::kInvalidGame, "player " + std::to_string(p + 1) + " has no questions");
    std::set<std::string> seen(labels_[p].begin(), labels_[p].end());
    require(seen.size() == labels_[p].size(), ErrorCode::kInvalidGame,
            "duplicate question label for player " + std::to_string(p + 1));
  }
  require(!support_.empty(), ErrorCode::kInvalidGame, "empty support");

  const int t = players();
  Rational total = 0;
  std::set<std::vector<int>> tuples;
  for (const auto& e : support_) {
    require(static_cast<int>(e.questions.size()) == t, ErrorCode::kInvalidGame, "support tuple has wrong arity");
    for (int p = 0; p < t; ++p)
      require(e.questions[p] >= 0 && e.questions[p] < question_count(p), ErrorCode::kInvalidGame,
              "support tuple uses an unknown question");
    require(e.target >= 0 && e.target < modulus_, ErrorCode::kInvalidGame, "target out of range");
    require(e.weight > 0, ErrorCode::kInvalidGame, "support weights must be positive");
    require(tuples.insert(e.questions).second, ErrorCode::kInvalidGame, "duplicate support tuple");
    total += e.weight;
  }
  require(total == 1, ErrorCode::kInvalidGame, "support weights sum to " + to_string(total) + ", not 1");
}

int ModMGame::find_question(int player, const std::string& label) const {
  const auto& l = labels_[player];
  auto it = std::find(l.begin(), l.end(), label);
  return it == l.end() ? -1 : static_cast<int>(it - l.begin());
}

int ModMGame::add(int a, int b) const {
  return group_ == AnswerGroup::kBitwiseXor ? (a ^ b) : (a + b) % modulus_;
}

int ModMGame::sub(int a, int b) const {
  return group_ == AnswerGroup::kBitwiseXor ? (a ^ b) : ((a - b) % modulus_ + modulus_) % modulus_;
}

Rational bias_from_value(const Rational& omega, int m) {
  Rational r = Rational(m, m - 1) * (omega - Rational(1, m));
  r.canonicalize();
  return r;
}

namespace {

void check_strategy_shape(const ModMGame& game, const DeterministicStrategy& s) {
  require(static_cast<int>(s.answers.size()) == game.players(), ErrorCode::kIncompleteStrategy,
          "strategy has " + std::to_string(s.answers.size()) + " players, game has " + std::to_string(game.players()));
  for (int p = 0; p < game.players(); ++p) {
    require(static_cast<int>(s.answers[p].size()) == game.question_count(p), ErrorCode::kIncompleteStrategy,
            "strategy for player " + std::to_string(p + 1) + " does not cover every question");
    for (int a : s.answers[p])
      require(a >= 0 && a < game.modulus(), ErrorCode::kInvalidGame, "answer out of range");
  }
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

// Integer numerators of the support weights over their common denominator.
struct ScaledWeights {
  std::vector<std::int64_t> numerators;
  Rational denominator;
};

ScaledWeights scale_weights(const ModMGame& game) {
  mpz_class l = 1;
  for (const auto& e : game.support()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), e.weight.get_den_mpz_t());
  require(l < (mpz_class(1) << 60), ErrorCode::kUnsupported, "weight denominators too large for the exact search");
  ScaledWeights w;
  w.denominator = Rational(l);
  for (const auto& e : game.support()) {
    mpz_class n = e.weight.get_num() * (l / e.weight.get_den());
    w.numerators.push_back(n.get_si());
  }
  return w;
}

struct FreeDigit {
  int player;
  int question;
  std::vector<int> entries;  // support entries asking this player this question
};

// State of the incremental search for one contiguous index range.
class PrefixSearch {
 public:
  PrefixSearch(const ModMGame& game, const std::vector<FreeDigit>& digits, const std::vector<std::int64_t>& weights)
      : game_(game), digits_(digits), weights_(weights), m_(game.modulus()), last_(game.players() - 1) {
    const auto& sup = game.support();
    partial_.assign(sup.size(), 0);
    row_.resize(sup.size());
    for (std::size_t e = 0; e < sup.size(); ++e) row_[e] = sup[e].questions[last_];
    rows_ = game.question_count(last_);
    tally_.assign(static_cast<std::size_t>(rows_) * m_, 0);
    rowmax_.assign(rows_, 0);
    dirty_.assign(rows_, 0);
    value_.assign(digits.size(), 0);
  }

  void reset(std::uint64_t index) {
    for (std::size_t d = digits_.size(); d-- > 0;) {
      value_[d] = static_cast<int>(index % m_);
      index /= m_;
    }
    std::fill(partial_.begin(), partial_.end(), 0);
    for (std::size_t d = 0; d < digits_.size(); ++d)
      for (int e : digits_[d].entries) partial_[e] = game_.add(partial_[e], value_[d]);
    std::fill(tally_.begin(), tally_.end(), 0);
    const auto& sup = game_.support();
    for (std::size_t e = 0; e < sup.size(); ++e)
      tally_[row_[e] * m_ + game_.sub(sup[e].target, partial_[e])] += weights_[e];
    total_ = 0;
    for (int r = 0; r < rows_; ++r) {
      rowmax_[r] = *std::max_element(tally_.begin() + r * m_, tally_.begin() + (r + 1) * m_);
      total_ += rowmax_[r];
    }
  }

  std::int64_t value() const { return total_; }

  // Advances to the next index in lexicographic order.
  void step() {
    std::size_t d = digits_.size();
    while (d-- > 0) {
      int old = value_[d];
      int nxt = old + 1 == m_ ? 0 : old + 1;
      change_digit(d, old, nxt);
      if (nxt != 0) break;
    }
    for (int r : touched_) {
      dirty_[r] = 0;
      total_ -= rowmax_[r];
      rowmax_[r] = *std::max_element(tally_.begin() + r * m_, tally_.begin() + (r + 1) * m_);
      total_ += rowmax_[r];
    }
    touched_.clear();
  }

 private:
  void change_digit(std::size_t d, int old, int nxt) {
    value_[d] = nxt;
    const auto& sup = game_.support();
    for (int e : digits_[d].entries) {
      const int r = row_[e];
      const int target = sup[e].target;
      tally_[r * m_ + game_.sub(target, partial_[e])] -= weights_[e];
      partial_[e] = game_.add(game_.sub(partial_[e], old), nxt);
      tally_[r * m_ + game_.sub(target, partial_[e])] += weights_[e];
      if (!dirty_[r]) {
        dirty_[r] = 1;
        touched_.push_back(r);
      }
    }
  }

  const ModMGame& game_;
  const std::vector<FreeDigit>& digits_;
  const std::vector<std::int64_t>& weights_;
  int m_;
  int last_;
  int rows_ = 0;
  std::vector<int> partial_;
  std::vector<int> row_;
  std::vector<std::int64_t> tally_;
  std::vector<std::int64_t> rowmax_;
  std::vector<char> dirty_;
  std::vector<int> touched_;
  std::vector<int> value_;
  std::int64_t total_ = 0;
};

std::vector<FreeDigit> free_digits(const ModMGame& game) {
  std::vector<FreeDigit> digits;
  for (int p = 0; p + 1 < game.players(); ++p)
    for (int q = 1; q < game.question_count(p); ++q) digits.push_back({p, q, {}});
  const auto& sup = game.support();
  for (auto& d : digits)
    for (std::size_t e = 0; e < sup.size(); ++e)
      if (sup[e].questions[d.player] == d.question) d.entries.push_back(static_cast<int>(e));
  return digits;
}

}  // namespace

Rational evaluate_strategy(const ModMGame& game, const DeterministicStrategy& s) {
  check_strategy_shape(game, s);
  Rational value = 0;
  for (const auto& e : game.support()) {
    int sum = 0;
    for (int p = 0; p < game.players(); ++p) sum = game.add(sum, s.answers[p][e.questions[p]]);
    if (sum == e.target) value += e.weight;
  }
  return value;
}

std::uint64_t classical_search_size(const ModMGame& game) {
  std::uint64_t total = 1;
  for (int p = 0; p + 1 < game.players(); ++p)
    for (int q = 1; q < game.question_count(p); ++q) total = saturating_mul(total, game.modulus());
  return total;
}

GameValueReport classical_value(const ModMGame& game, const SearchOptions& options) {
  const std::uint64_t total = classical_search_size(game);
  if (options.budget > 0 && total > options.budget)
    fail(ErrorCode::kBudgetExceeded, "classical search needs " + std::to_string(total) +
                                         " strategy prefixes, budget is " + std::to_string(options.budget));
  require(total < (std::uint64_t{1} << 62), ErrorCode::kBudgetExceeded, "classical search space too large");

  const auto digits = free_digits(game);
  const ScaledWeights weights = scale_weights(game);

  const int workers = resolve_workers(options.workers);
  const std::uint64_t chunks = std::min<std::uint64_t>(total, static_cast<std::uint64_t>(workers) * 8);
  std::vector<std::int64_t> best_value(chunks, -1);
  std::vector<std::uint64_t> best_index(chunks, 0);

  parallel_chunks(static_cast<std::int64_t>(chunks), workers, [&](std::int64_t c) {
    const std::uint64_t lo = total / chunks * c + std::min<std::uint64_t>(c, total % chunks);
    const std::uint64_t hi = lo + total / chunks + (static_cast<std::uint64_t>(c) < total % chunks ? 1 : 0);
    PrefixSearch search(game, digits, weights.numerators);
    search.reset(lo);
    std::int64_t bv = -1;
    std::uint64_t bi = lo;
    for (std::uint64_t i = lo; i < hi; ++i) {
      if (search.value() > bv) {
        bv = search.value();
        bi = i;
      }
      if (i + 1 < hi) search.step();
    }
    best_value[c] = bv;
    best_index[c] = bi;
  });

  std::size_t win = 0;
  for (std::size_t c = 1; c < chunks; ++c)
    if (best_value[c] > best_value[win]) win = c;

  // Rebuild the witness: decode the prefix, then best-respond per question.
  const int t = game.players();
  const int m = game.modulus();
  DeterministicStrategy witness;
  witness.answers.resize(t);
  for (int p = 0; p < t; ++p) witness.answers[p].assign(game.question_count(p), 0);
  std::uint64_t index = best_index[win];
  for (std::size_t d = digits.size(); d-- > 0;) {
    witness.answers[digits[d].player][digits[d].question] = static_cast<int>(index % m);
    index /= m;
  }
  std::vector<std::int64_t> tally(static_cast<std::size_t>(game.question_count(t - 1)) * m, 0);
  const auto& sup = game.support();
  for (std::size_t e = 0; e < sup.size(); ++e) {
    int partial = 0;
    for (int p = 0; p + 1 < t; ++p) partial = game.add(partial, witness.answers[p][sup[e].questions[p]]);
    tally[sup[e].questions[t - 1] * m + game.sub(sup[e].target, partial)] += weights.numerators[e];
  }
  for (int q = 0; q < game.question_count(t - 1); ++q) {
    auto row = tally.begin() + q * m;
    witness.answers[t - 1][q] = static_cast<int>(std::max_element(row, row + m) - row);
  }

  GameValueReport report;
  report.omega = Rational(best_value[win]) / weights.denominator;
  report.omega.canonicalize();
  report.beta = bias_from_value(report.omega, m);
  report.witness = std::move(witness);
  return report;
}

ModMGame xor_parallel_repetition(const ModMGame& game, int k, RepetitionMode mode) {
  require(game.modulus() == 2, ErrorCode::kUnsupported, "parallel repetition needs a binary (XOR) game");
  require(k >= 1, ErrorCode::kPrecondition, "repetition count must be at least 1");
  require(k <= 16, ErrorCode::kUnsupported, "repetition count above 16 is not supported");
  const int t = game.players();

  std::vector<std::vector<std::string>> labels(t);
  for (int p = 0; p < t; ++p) {
    const int n = game.question_count(p);
    std::uint64_t count = 1;
    for (int i = 0; i < k; ++i) count = saturating_mul(count, n);
    require(count <= (1u << 24), ErrorCode::kBudgetExceeded, "repeated question set too large");
    labels[p].reserve(count);
    std::vector<int> digit(k, 0);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      std::string label;
      for (int i = 0; i < k; ++i) {
        if (i) label += ',';
        label += game.questions(p)[digit[i]];
      }
      labels[p].push_back(std::move(label));
      for (int i = k - 1; i >= 0; --i) {
        if (++digit[i] < n) break;
        digit[i] = 0;
      }
    }
  }

  const auto& sup = game.support();
  const std::size_t s = sup.size();
  std::uint64_t combos = 1;
  for (int i = 0; i < k; ++i) combos = saturating_mul(combos, s);
  require(combos <= (1u << 24), ErrorCode::kBudgetExceeded, "repeated support too large");

  std::vector<SupportEntry> out;
  out.reserve(combos);
  std::vector<std::size_t> pick(k, 0);
  for (std::uint64_t idx = 0; idx < combos; ++idx) {
    SupportEntry e;
    e.questions.assign(t, 0);
    e.weight = 1;
    e.target = 0;
    for (int i = 0; i < k; ++i) {
      const auto& base = sup[pick[i]];
      for (int p = 0; p < t; ++p) e.questions[p] = e.questions[p] * game.question_count(p) + base.questions[p];
      e.weight *= base.weight;
      if (mode == RepetitionMode::kXor)
        e.target ^= base.target;
      else
        e.target |= base.target << i;
    }
    out.push_back(std::move(e));
    for (int i = k - 1; i >= 0; --i) {
      if (++pick[i] < s) break;
      pick[i] = 0;
    }
  }
  if (mode == RepetitionMode::kXor) return ModMGame(2, std::move(labels), std::move(out));
  return ModMGame(1 << k, std::move(labels), std::move(out), AnswerGroup::kBitwiseXor);
}

IdentitySides cleve_slofstra_check(const ModMGame& game, const DeterministicStrategy& strategy, int k) {
  const ModMGame product = xor_parallel_repetition(game, k, RepetitionMode::kAnd);
  IdentitySides sides;
  sides.lhs = evaluate_strategy(product, strategy);

  // mismatch[e] has bit i set when coordinate i of entry e is answered wrongly.
  const auto& sup = product.support();
  std::vector<int> mismatch(sup.size());
  for (std::size_t e = 0; e < sup.size(); ++e) {
    int sum = 0;
    for (int p = 0; p < product.players(); ++p) sum ^= strategy.answers[p][sup[e].questions[p]];
    mismatch[e] = sum ^ sup[e].target;
  }
  Rational total = 0;
  for (int subset = 0; subset < (1 << k); ++subset) {
    Rational bias = 0;
    for (std::size_t e = 0; e < sup.size(); ++e) {
      if (__builtin_popcount(mismatch[e] & subset) % 2 == 0)
        bias += sup[e].weight;
      else
        bias -= sup[e].weight;
    }
    total += bias;
  }
  sides.rhs = total / Rational(1 << k);
  sides.rhs.canonicalize();
  return sides;
}

ConnectionGraph connection_graph(const ModMGame& game) {
  const auto& sup = game.support();
  ConnectionGraph g;
  g.vertices = static_cast<int>(sup.size());
  for (std::size_t a = 0; a < sup.size(); ++a)
    for (std::size_t b = a + 1; b < sup.size(); ++b) {
      int differ = 0;
      for (int p = 0; p < game.players() && differ < 2; ++p)
        if (sup[a].questions[p] != sup[b].questions[p]) ++differ;
      if (differ == 1) g.edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
    }
  return g;
}

std::vector<int> connected_components(const ConnectionGraph& graph) {
  std::vector<std::vector<int>> adj(graph.vertices);
  for (auto [a, b] : graph.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> comp(graph.vertices, -1);
  int next = 0;
  for (int v = 0; v < graph.vertices; ++v) {
    if (comp[v] >= 0) continue;
    std::queue<int> q;
    q.push(v);
    comp[v] = next;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int w : adj[u])
        if (comp[w] < 0) {
          comp[w] = next;
          q.push(w);
        }
    }
    ++next;
  }
  return comp;
}

bool is_connected(const ConnectionGraph& graph) {
  auto comp = connected_components(graph);
  return std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
}

bool is_total(const ModMGame& game) {
  std::uint64_t product = 1;
  for (int p = 0; p < game.players(); ++p) product = saturating_mul(product, game.question_count(p));
  return product == game.support().size();
}

}  // namespace nlg
