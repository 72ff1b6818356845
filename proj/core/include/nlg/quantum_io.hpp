#pragma once

#include "nlg/json_io.hpp"
#include "nlg/quantum.hpp"

namespace nlg {

// Matrices are flat row-major lists of [re, im] pairs. Measurements are
// given per player as {question label: [P_0, ..., P_{m-1}]}.
CMatrix matrix_from_json(const Json& flat, int dim);
Json matrix_to_json(const CMatrix& m);

// {"d", "c": [...], "measurements": [...]}.
SchmidtStrategySpec schmidt_spec_from_json(const ModMGame& game, const Json& doc);
Json schmidt_spec_to_json(const ModMGame& game, const SchmidtStrategySpec& spec);

// {"dims": [...], "state": [[re, im], ...], "measurements": [...]}.
QuantumStrategy quantum_strategy_from_json(const ModMGame& game, const Json& doc);
Json quantum_strategy_to_json(const ModMGame& game, const QuantumStrategy& s);

}  // namespace nlg
