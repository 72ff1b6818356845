#include "nlg/angle_game.hpp"

#include <algorithm>
#include <set>

#include "nlg/errors.hpp"

namespace nlg {

void validate(const BoyerGame& b) {
  require(b.players >= 2, ErrorCode::kPrecondition, "angle game family needs at least 2 players");
  require(b.inputs >= 1, ErrorCode::kPrecondition, "angle game family needs at least 1 input");
  require(b.modulus >= 2, ErrorCode::kPrecondition, "angle game family needs modulus at least 2");
}

namespace {

// Calls f(x) for every promise-satisfying input tuple, in lexicographic order.
template <typename F>
void for_each_promise_tuple(const BoyerGame& b, F&& f) {
  std::vector<int> x(b.players, 0);
  while (true) {
    int sum = 0;
    for (int v : x) sum += v;
    if (sum % b.inputs == 0) f(x, sum);
    int i = b.players;
    while (i-- > 0) {
      if (++x[i] < b.inputs) break;
      x[i] = 0;
    }
    if (i < 0) break;
  }
}

std::size_t promise_count(const BoyerGame& b) {
  std::size_t n = 1;
  for (int i = 0; i + 1 < b.players; ++i) n *= b.inputs;
  return n;
}

}  // namespace

ModMGame boyer_to_game(const BoyerGame& b) {
  validate(b);
  std::vector<std::string> labels;
  for (int i = 0; i < b.inputs; ++i) labels.push_back(std::to_string(i));
  const Rational w(1, static_cast<long>(promise_count(b)));
  std::vector<SupportEntry> support;
  for_each_promise_tuple(b, [&](const std::vector<int>& x, int sum) {
    support.push_back({x, w, (sum / b.inputs) % b.modulus});
  });
  return ModMGame(b.modulus, std::vector<std::vector<std::string>>(b.players, labels), std::move(support));
}

AngleGameDiscrete boyer_to_angle(const BoyerGame& b) {
  validate(b);
  const Rational w(1, static_cast<long>(promise_count(b)));
  std::vector<AngleTuple> support;
  for_each_promise_tuple(b, [&](const std::vector<int>& x, int sum) {
    AngleTuple t;
    for (int v : x) t.angles.push_back(Rational(v, static_cast<long>(b.modulus) * b.inputs));
    t.weight = w;
    t.target = (sum / b.inputs) % b.modulus;
    support.push_back(std::move(t));
  });
  return AngleGameDiscrete(b.modulus, std::move(support));
}

AngleGameDiscrete::AngleGameDiscrete(int modulus, std::vector<AngleTuple> support)
    : modulus_(modulus), support_(std::move(support)) {
  require(modulus_ >= 2, ErrorCode::kInvalidGame, "modulus must be at least 2");
  require(!support_.empty(), ErrorCode::kInvalidGame, "empty support");
  players_ = static_cast<int>(support_[0].angles.size());
  require(players_ >= 1, ErrorCode::kInvalidGame, "angle game needs at least one player");
  Rational total = 0;
  std::set<std::vector<Rational>> seen;
  for (auto& t : support_) {
    require(static_cast<int>(t.angles.size()) == players_, ErrorCode::kInvalidGame, "angle tuple has wrong arity");
    t.weight.canonicalize();
    require(t.weight > 0, ErrorCode::kInvalidGame, "support weights must be positive");
    require(t.target >= 0 && t.target < modulus_, ErrorCode::kInvalidGame, "target out of range");
    Rational sum = 0;
    for (auto& a : t.angles) {
      a.canonicalize();
      a = frac(a);
      sum += a;
    }
    require(frac(sum - Rational(t.target, modulus_)) == 0, ErrorCode::kPrecondition,
            "angle tuple violates the promise: angles sum to " + to_string(sum) + ", target " +
                std::to_string(t.target) + "/" + std::to_string(modulus_));
    require(seen.insert(t.angles).second, ErrorCode::kInvalidGame, "duplicate angle tuple");
    total += t.weight;
  }
  require(total == 1, ErrorCode::kInvalidGame, "support weights sum to " + to_string(total) + ", not 1");
  angles_.resize(players_);
  for (int p = 0; p < players_; ++p) {
    std::set<Rational> distinct;
    for (const auto& t : support_) distinct.insert(t.angles[p]);
    angles_[p].assign(distinct.begin(), distinct.end());
  }
}

int AngleGameDiscrete::question_index(int player, const Rational& angle) const {
  const auto& a = angles_[player];
  auto it = std::lower_bound(a.begin(), a.end(), angle);
  return it != a.end() && *it == angle ? static_cast<int>(it - a.begin()) : -1;
}

ModMGame AngleGameDiscrete::to_game() const {
  std::vector<std::vector<std::string>> labels(players_);
  for (int p = 0; p < players_; ++p)
    for (const auto& a : angles_[p]) labels[p].push_back(to_string(a));
  std::vector<SupportEntry> support;
  for (const auto& t : support_) {
    SupportEntry e;
    for (int p = 0; p < players_; ++p) e.questions.push_back(question_index(p, t.angles[p]));
    e.weight = t.weight;
    e.target = t.target;
    support.push_back(std::move(e));
  }
  return ModMGame(modulus_, std::move(labels), std::move(support));
}

}  // namespace nlg
