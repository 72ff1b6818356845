#pragma once

#include <nlohmann/json.hpp>

#include <string>

#include "nlg/game.hpp"
#include "nlg/rational.hpp"

namespace nlg {

using Json = nlohmann::json;

// Reads and parses a JSON file; malformed input raises a parse error.
Json load_json_file(const std::string& path);

// Rationals may be given as "p/q" strings, integers or decimal numbers.
Rational rational_from_json(const Json& value);
std::string label_from_json(const Json& value);

// {"t", "m", "questions": [[labels]...], "support": [{"x", "w", "target"}]}.
// The optional "answers": "xor" selects bitwise answer combination.
ModMGame game_from_json(const Json& doc);
Json game_to_json(const ModMGame& game);

// {"answers": [{label: answer, ...} per player]}.
DeterministicStrategy strategy_from_json(const ModMGame& game, const Json& doc);
Json strategy_to_json(const ModMGame& game, const DeterministicStrategy& s);

Json report_to_json(const ModMGame& game, const GameValueReport& report);
std::string report_csv_header();
std::string report_csv_row(const std::string& game_id, const GameValueReport& report);

}  // namespace nlg
