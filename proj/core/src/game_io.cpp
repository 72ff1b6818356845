#include <algorithm>
#include <fstream>
#include <sstream>

#include "nlg/errors.hpp"
#include "nlg/json_io.hpp"

namespace nlg {

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kParse, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::kParse, "malformed JSON in '" + path + "': " + e.what());
  }
}

Rational rational_from_json(const Json& value) {
  if (value.is_string()) return parse_rational(value.get<std::string>());
  if (value.is_number_integer()) return Rational(value.get<long>());
  if (value.is_number_float()) return parse_rational(value.dump());
  fail(ErrorCode::kParse, "expected a rational, got " + value.dump());
}

std::string label_from_json(const Json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number() || value.is_boolean()) return value.dump();
  fail(ErrorCode::kParse, "question labels must be strings or numbers, got " + value.dump());
}

namespace {

const Json& field(const Json& doc, const char* name) {
  require(doc.is_object() && doc.contains(name), ErrorCode::kParse, std::string("missing field '") + name + "'");
  return doc.at(name);
}

int int_field(const Json& doc, const char* name) {
  const Json& v = field(doc, name);
  require(v.is_number_integer(), ErrorCode::kParse, std::string("field '") + name + "' must be an integer");
  return v.get<int>();
}

}  // namespace

ModMGame game_from_json(const Json& doc) {
  const int t = int_field(doc, "t");
  const int m = int_field(doc, "m");
  require(t >= 1, ErrorCode::kInvalidGame, "t must be at least 1");
  const Json& qs = field(doc, "questions");
  require(qs.is_array() && static_cast<int>(qs.size()) == t, ErrorCode::kParse, "'questions' must list one array per player");
  std::vector<std::vector<std::string>> labels(t);
  for (int p = 0; p < t; ++p) {
    require(qs[p].is_array(), ErrorCode::kParse, "'questions' entries must be arrays");
    for (const auto& l : qs[p]) labels[p].push_back(label_from_json(l));
  }
  AnswerGroup group = AnswerGroup::kCyclic;
  if (doc.contains("answers")) {
    const std::string kind = doc.at("answers").get<std::string>();
    if (kind == "xor")
      group = AnswerGroup::kBitwiseXor;
    else
      require(kind == "cyclic", ErrorCode::kParse, "unknown answer combination '" + kind + "'");
  }
  const Json& sup = field(doc, "support");
  require(sup.is_array(), ErrorCode::kParse, "'support' must be an array");
  std::vector<SupportEntry> entries;
  for (const auto& item : sup) {
    const Json& x = field(item, "x");
    require(x.is_array() && static_cast<int>(x.size()) == t, ErrorCode::kInvalidGame, "support tuple has wrong arity");
    SupportEntry e;
    for (int p = 0; p < t; ++p) {
      const std::string label = label_from_json(x[p]);
      auto it = std::find(labels[p].begin(), labels[p].end(), label);
      require(it != labels[p].end(), ErrorCode::kInvalidGame,
              "label '" + label + "' is not a question of player " + std::to_string(p + 1));
      e.questions.push_back(static_cast<int>(it - labels[p].begin()));
    }
    e.weight = rational_from_json(field(item, "w"));
    e.target = int_field(item, "target");
    if (e.weight == 0) fail(ErrorCode::kInvalidGame, "zero-weight support tuple");
    entries.push_back(std::move(e));
  }
  return ModMGame(m, std::move(labels), std::move(entries), group);
}

Json game_to_json(const ModMGame& game) {
  Json doc;
  doc["t"] = game.players();
  doc["m"] = game.modulus();
  if (game.answer_group() == AnswerGroup::kBitwiseXor) doc["answers"] = "xor";
  Json qs = Json::array();
  for (int p = 0; p < game.players(); ++p) qs.push_back(game.questions(p));
  doc["questions"] = qs;
  Json sup = Json::array();
  for (const auto& e : game.support()) {
    Json x = Json::array();
    for (int p = 0; p < game.players(); ++p) x.push_back(game.questions(p)[e.questions[p]]);
    sup.push_back({{"x", x}, {"w", to_string(e.weight)}, {"target", e.target}});
  }
  doc["support"] = sup;
  return doc;
}

DeterministicStrategy strategy_from_json(const ModMGame& game, const Json& doc) {
  const Json& answers = field(doc, "answers");
  require(answers.is_array() && static_cast<int>(answers.size()) == game.players(), ErrorCode::kIncompleteStrategy,
          "strategy must list one answer map per player");
  DeterministicStrategy s;
  s.answers.resize(game.players());
  for (int p = 0; p < game.players(); ++p) {
    require(answers[p].is_object(), ErrorCode::kParse, "answer maps must be objects");
    for (const auto& label : game.questions(p)) {
      require(answers[p].contains(label), ErrorCode::kIncompleteStrategy,
              "strategy for player " + std::to_string(p + 1) + " misses question '" + label + "'");
      s.answers[p].push_back(answers[p].at(label).get<int>());
    }
  }
  return s;
}

Json strategy_to_json(const ModMGame& game, const DeterministicStrategy& s) {
  Json answers = Json::array();
  for (int p = 0; p < game.players(); ++p) {
    Json map = Json::object();
    for (int q = 0; q < game.question_count(p); ++q) map[game.questions(p)[q]] = s.answers[p][q];
    answers.push_back(map);
  }
  return Json{{"answers", answers}};
}

Json report_to_json(const ModMGame& game, const GameValueReport& report) {
  return Json{{"omega", to_string(report.omega)},
              {"beta", to_string(report.beta)},
              {"witness", strategy_to_json(game, report.witness)}};
}

std::string report_csv_header() { return "game_id,omega,beta"; }

std::string report_csv_row(const std::string& game_id, const GameValueReport& report) {
  return game_id + "," + to_string(report.omega) + "," + to_string(report.beta);
}

}  // namespace nlg
