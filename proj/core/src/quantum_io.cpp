#include <cmath>

#include "nlg/errors.hpp"
#include "nlg/quantum_io.hpp"

namespace nlg {

namespace {

std::complex<double> complex_from_json(const Json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  require(v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number(), ErrorCode::kParse,
          "complex numbers are written as [re, im], got " + v.dump());
  return {v[0].get<double>(), v[1].get<double>()};
}

Json complex_to_json(std::complex<double> z) { return Json::array({z.real(), z.imag()}); }

std::vector<std::vector<Measurement>> measurements_from_json(const ModMGame& game, const Json& doc,
                                                             const std::vector<int>& dims) {
  require(doc.is_object() && doc.contains("measurements"), ErrorCode::kParse, "missing field 'measurements'");
  const Json& ms = doc.at("measurements");
  require(ms.is_array() && static_cast<int>(ms.size()) == game.players(), ErrorCode::kDimensionMismatch,
          "'measurements' must list one object per player");
  std::vector<std::vector<Measurement>> out(game.players());
  for (int p = 0; p < game.players(); ++p) {
    require(ms[p].is_object(), ErrorCode::kParse, "per-player measurements must be objects keyed by question");
    for (const auto& label : game.questions(p)) {
      require(ms[p].contains(label), ErrorCode::kIncompleteStrategy,
              "no measurement for question '" + label + "' of player " + std::to_string(p + 1));
      const Json& list = ms[p].at(label);
      require(list.is_array(), ErrorCode::kParse, "a measurement is a list of projectors");
      Measurement m;
      for (const auto& flat : list) m.push_back(matrix_from_json(flat, dims[p]));
      out[p].push_back(std::move(m));
    }
  }
  return out;
}

Json measurements_to_json(const ModMGame& game, const std::vector<std::vector<Measurement>>& ms) {
  Json out = Json::array();
  for (int p = 0; p < game.players(); ++p) {
    Json player = Json::object();
    for (int x = 0; x < game.question_count(p); ++x) {
      Json list = Json::array();
      for (const auto& proj : ms[p][x]) list.push_back(matrix_to_json(proj));
      player[game.questions(p)[x]] = list;
    }
    out.push_back(player);
  }
  return out;
}

}  // namespace

CMatrix matrix_from_json(const Json& flat, int dim) {
  require(flat.is_array() && static_cast<int>(flat.size()) == dim * dim, ErrorCode::kDimensionMismatch,
          "matrix must have " + std::to_string(dim * dim) + " entries");
  CMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = complex_from_json(flat[i * dim + j]);
  return m;
}

Json matrix_to_json(const CMatrix& m) {
  Json out = Json::array();
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j) out.push_back(complex_to_json(m(i, j)));
  return out;
}

SchmidtStrategySpec schmidt_spec_from_json(const ModMGame& game, const Json& doc) {
  require(doc.is_object() && doc.contains("d") && doc.contains("c"), ErrorCode::kParse,
          "Schmidt strategy needs 'd', 'c' and 'measurements'");
  SchmidtStrategySpec spec;
  spec.d = doc.at("d").get<int>();
  require(spec.d >= 1, ErrorCode::kDimensionMismatch, "Schmidt rank must be positive");
  for (const auto& c : doc.at("c")) spec.c.push_back(c.get<double>());
  spec.measurements = measurements_from_json(game, doc, std::vector<int>(game.players(), spec.d));
  return spec;
}

Json schmidt_spec_to_json(const ModMGame& game, const SchmidtStrategySpec& spec) {
  return Json{{"d", spec.d}, {"c", spec.c}, {"measurements", measurements_to_json(game, spec.measurements)}};
}

QuantumStrategy quantum_strategy_from_json(const ModMGame& game, const Json& doc) {
  require(doc.is_object() && doc.contains("dims") && doc.contains("state"), ErrorCode::kParse,
          "quantum strategy needs 'dims', 'state' and 'measurements'");
  QuantumStrategy s;
  s.state.dims = doc.at("dims").get<std::vector<int>>();
  const Json& amps = doc.at("state");
  s.state.amplitudes = CVector(static_cast<long>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) s.state.amplitudes[static_cast<long>(i)] = complex_from_json(amps[i]);
  require(static_cast<int>(s.state.dims.size()) == game.players(), ErrorCode::kDimensionMismatch,
          "'dims' must list one dimension per player");
  s.measurements = measurements_from_json(game, doc, s.state.dims);
  return s;
}

Json quantum_strategy_to_json(const ModMGame& game, const QuantumStrategy& s) {
  Json amps = Json::array();
  for (long i = 0; i < s.state.amplitudes.size(); ++i) amps.push_back(complex_to_json(s.state.amplitudes[i]));
  return Json{{"dims", s.state.dims}, {"state", amps}, {"measurements", measurements_to_json(game, s.measurements)}};
}

}  // namespace nlg
