// Command-line entry point: one subcommand per library operation.
//
// Exit status: 0 success, 1 domain error, 2 budget exhausted or partial
// result, 3 unreadable or malformed input, 4 usage error.

#include <CLI/CLI.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nlg/angle.hpp"
#include "nlg/errors.hpp"
#include "nlg/game.hpp"
#include "nlg/gowers.hpp"
#include "nlg/hypnorm.hpp"
#include "nlg/json_io.hpp"
#include "nlg/quantum.hpp"
#include "nlg/quantum_io.hpp"
#include "nlg/ugsdp.hpp"

namespace {

using nlg::ErrorCode;
using nlg::Json;
using nlg::Rational;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitPartial = 2;
constexpr int kExitInput = 3;
constexpr int kExitUsage = 4;

struct Common {
  std::string output;
  std::uint64_t budget = 0;
  int workers = 0;
};

void emit(const Common& c, const std::string& text) {
  if (c.output.empty() || c.output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(c.output);
  nlg::require(static_cast<bool>(out), ErrorCode::kParse, "cannot write '" + c.output + "'");
  out << text;
}

void emit_json(const Common& c, const Json& doc) { emit(c, doc.dump(2) + "\n"); }

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dots = part.find("..");
    try {
      if (dots == std::string::npos) {
        out.push_back(std::stoi(part));
      } else {
        const int lo = std::stoi(part.substr(0, dots)), hi = std::stoi(part.substr(dots + 2));
        if (hi < lo) throw CLI::ValidationError("range " + part + " is empty");
        for (int v = lo; v <= hi; ++v) out.push_back(v);
      }
    } catch (const std::logic_error&) {
      throw CLI::ValidationError("cannot read '" + part + "' as an integer or range");
    }
  }
  if (out.empty()) throw CLI::ValidationError("empty integer list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      out.push_back(std::stod(part));
    } catch (const std::logic_error&) {
      throw CLI::ValidationError("cannot read '" + part + "' as a number");
    }
  }
  if (out.empty()) throw CLI::ValidationError("empty number list");
  return out;
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

Json complex_json(std::complex<double> z) { return Json::array({z.real(), z.imag()}); }

Json estimate_json(const nlg::MonteCarloEstimate& e) {
  return Json{{"mean", e.mean}, {"std_error", e.std_error}, {"samples", e.samples}};
}

Json rationals_json(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const auto& q : v) out.push_back(nlg::to_string(q));
  return out;
}

void add_common(CLI::App* sub, Common& c, bool budget = false, bool workers = false) {
  sub->add_option("-o,--output", c.output, "Output file (default: stdout)");
  if (budget) sub->add_option("--budget", c.budget, "Work limit (0 = unlimited)");
  if (workers) sub->add_option("--workers", c.workers, "Worker threads (0 = all cores)");
}

// ---- game-core ---------------------------------------------------------

int cmd_classical(const Common& c, const std::string& game_path, bool csv) {
  const nlg::ModMGame game = nlg::game_from_json(nlg::load_json_file(game_path));
  const nlg::GameValueReport r = nlg::classical_value(game, {c.budget, c.workers});
  if (csv)
    emit(c, nlg::report_csv_header() + "\n" + nlg::report_csv_row(stem(game_path), r) + "\n");
  else
    emit_json(c, nlg::report_to_json(game, r));
  return kExitOk;
}

int cmd_evaluate(const Common& c, const std::string& game_path, const std::string& strategy_path) {
  const nlg::ModMGame game = nlg::game_from_json(nlg::load_json_file(game_path));
  const auto s = nlg::strategy_from_json(game, nlg::load_json_file(strategy_path));
  const Rational v = nlg::evaluate_strategy(game, s);
  emit_json(c, Json{{"value", nlg::to_string(v)}, {"bias", nlg::to_string(nlg::bias_from_value(v, game.modulus()))}});
  return kExitOk;
}

int cmd_repeat(const Common& c, const std::string& game_path, int k, const std::string& mode) {
  const nlg::ModMGame game = nlg::game_from_json(nlg::load_json_file(game_path));
  const auto m = mode == "and" ? nlg::RepetitionMode::kAnd : nlg::RepetitionMode::kXor;
  emit_json(c, nlg::game_to_json(nlg::xor_parallel_repetition(game, k, m)));
  return kExitOk;
}

int cmd_connectivity(const Common& c, const std::string& game_path) {
  const nlg::ModMGame game = nlg::game_from_json(nlg::load_json_file(game_path));
  const nlg::ConnectionGraph g = nlg::connection_graph(game);
  emit_json(c, Json{{"connected", nlg::is_connected(g)},
                    {"components", nlg::connected_components(g)},
                    {"total", nlg::is_total(game)}});
  return kExitOk;
}

int cmd_cs_identity(const Common& c, const std::string& game_path, const std::string& strategy_path, int k) {
  const nlg::ModMGame game = nlg::game_from_json(nlg::load_json_file(game_path));
  const auto s = nlg::strategy_from_json(game, nlg::load_json_file(strategy_path));
  const nlg::IdentitySides sides = nlg::cleve_slofstra_check(game, s, k);
  emit_json(c, Json{{"lhs", nlg::to_string(sides.lhs)}, {"rhs", nlg::to_string(sides.rhs)}, {"equal", sides.lhs == sides.rhs}});
  return kExitOk;
}

// ---- angle -------------------------------------------------------------

int cmd_uag_table(const Common& c, const std::string& ms, const std::string& ts) {
  std::string out = "t,m,value,exact,lower,upper\n";
  for (int m : parse_int_list(ms))
    for (int t : parse_int_list(ts)) {
      const nlg::SemiTrivialValue v = nlg::semi_trivial_value(t, m);
      out += std::to_string(t) + "," + std::to_string(m) + "," + nlg::to_string(v.exact ? v.value : v.lower) + "," +
             (v.exact ? "1" : "0") + "," + nlg::to_string(v.lower) + "," + nlg::to_string(v.upper) + "\n";
    }
  emit(c, out);
  return kExitOk;
}

int cmd_uag_profile(const Common& c, int t, int m, int grid) {
  const nlg::ProfileTable table = nlg::uag_profile_table(t, m, grid);
  std::string out = "x,answer,probability,argmax\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const int best = table.argmax[r / m];
    out += nlg::to_string(row.x) + "," + std::to_string(row.answer) + "," + nlg::to_string(row.probability) + "," +
           (row.answer == best ? "1" : "0") + "\n";
  }
  emit(c, out);
  return kExitOk;
}

int cmd_boyer_search(const Common& c, int t, int m, int d_min, int d_max) {
  const nlg::BoyerSearchReport r = nlg::boyer_strategy_search(t, m, d_min, d_max, {c.budget, c.workers});
  Json completed = Json::array();
  for (const auto& e : r.completed)
    completed.push_back(
        {{"inputs", e.inputs}, {"omega", nlg::to_string(e.report.omega)}, {"beta", nlg::to_string(e.report.beta)}});
  Json doc{{"t", t}, {"m", m}, {"completed", completed}, {"skipped", r.skipped}, {"partial", r.partial()}};
  doc["best"] = r.best ? Json(nlg::to_string(*r.best)) : Json();
  doc["best_inputs"] = r.best_inputs ? Json(*r.best_inputs) : Json();
  emit_json(c, doc);
  return r.partial() ? kExitPartial : kExitOk;
}

int cmd_boyer_game(const Common& c, int t, int m, int d) {
  emit_json(c, nlg::game_to_json(nlg::boyer_to_game({t, d, m})));
  return kExitOk;
}

Json angle_game_json(const nlg::AngleGameDiscrete& g) {
  Json angles = Json::array(), support = Json::array();
  for (const auto& a : g.angles()) angles.push_back(rationals_json(a));
  for (const auto& t : g.support())
    support.push_back({{"angles", rationals_json(t.angles)}, {"w", nlg::to_string(t.weight)}, {"target", t.target}});
  return Json{{"m", g.modulus()}, {"angles", angles}, {"support", support}};
}

int cmd_schmidt_reduce(const Common& c, const std::string& game_path, const std::string& strategy_path, double tol,
                       std::int64_t max_den) {
  const nlg::ModMGame game = nlg::game_from_json(nlg::load_json_file(game_path));
  const auto spec = nlg::schmidt_spec_from_json(game, nlg::load_json_file(strategy_path));
  const nlg::SchmidtReduction r = nlg::schmidt_reduce(game, spec, {tol, max_den});
  emit_json(c, Json{{"angle_game", angle_game_json(r.game)},
                    {"raw_angles", r.raw_angles},
                    {"max_promise_residual", r.max_promise_residual}});
  return kExitOk;
}

int cmd_synthesize(const Common& c, int t, int m, int d) {
  const nlg::AngleGameDiscrete g = nlg::boyer_to_angle({t, d, m});
  const nlg::ModMGame game = g.to_game();
  const auto s = nlg::synthesize_perfect_strategy(g);
  emit_json(c, Json{{"strategy", nlg::strategy_to_json(game, s)},
                    {"value", nlg::to_string(nlg::evaluate_strategy(game, s))}});
  return kExitOk;
}

int cmd_floor_trial(const Common& c, int t, int m, std::uint64_t samples, std::uint64_t seed) {
  const nlg::MonteCarloEstimate e = nlg::floor_strategy_trial(t, m, seed, samples, c.workers);
  const double predicted = 1.0 / m + (m - 1.0) / m * std::pow(t, 1.0 - t);
  Json doc = estimate_json(e);
  doc["predicted"] = predicted;
  doc["z_score"] = e.std_error > 0 ? (e.mean - predicted) / e.std_error : 0.0;
  emit_json(c, doc);
  return kExitOk;
}

// ---- quantum-sim -------------------------------------------------------

int cmd_qeval(const Common& c, const std::string& game_path, const std::string& strategy_path) {
  const nlg::ModMGame game = nlg::game_from_json(nlg::load_json_file(game_path));
  const Json doc = nlg::load_json_file(strategy_path);
  const nlg::QuantumStrategy s = doc.contains("c") ? nlg::strategy_from_schmidt(nlg::schmidt_spec_from_json(game, doc),
                                                                                 game.players())
                                                   : nlg::quantum_strategy_from_json(game, doc);
  emit_json(c, Json{{"winning_probability", nlg::winning_probability(game, s)}});
  return kExitOk;
}

// ---- hypnorm -----------------------------------------------------------

int cmd_hypnorm(const Common& c, const std::string& tensor_path, int t) {
  const nlg::GameTensor tensor = nlg::tensor_from_json(nlg::load_json_file(tensor_path));
  if (t == 0) t = tensor.players();
  nlg::require(t == tensor.players(), ErrorCode::kDimensionMismatch,
               "--t must equal the tensor's player count " + std::to_string(tensor.players()));
  nlg::NormOptions o;
  if (c.budget) o.budget = c.budget;
  o.workers = c.workers;
  const nlg::NormResult r = nlg::hypergraph_norm(tensor, nlg::build_Ht(t), o);
  Json doc{{"t", t}, {"norm", r.norm}, {"expectation", r.expectation}, {"terms", r.terms}};
  doc["exact_expectation"] = r.exact_expectation ? Json(nlg::to_string(*r.exact_expectation)) : Json();
  emit_json(c, doc);
  return kExitOk;
}

int cmd_extract(const Common& c, const std::string& tensor_path) {
  const nlg::GameTensor tensor = nlg::tensor_from_json(nlg::load_json_file(tensor_path));
  nlg::NormOptions o;
  if (c.budget) o.budget = c.budget;
  o.workers = c.workers;
  const nlg::Extraction e = nlg::extract_classical_strategy(tensor, o);
  emit_json(c, Json{{"bias", nlg::to_string(e.bias)}, {"strategy", e.strategy}, {"assignments", e.assignments}});
  return kExitOk;
}

int cmd_ht(const Common& c, int t) {
  const nlg::Hypergraph h = nlg::build_Ht(t);
  const nlg::HypergraphReport r = nlg::verify_Ht_properties(h);
  emit_json(c, Json{{"hypergraph", nlg::hypergraph_to_json(h)},
                    {"partite", r.partite},
                    {"regular", r.regular},
                    {"disjoint", r.disjoint},
                    {"violations", r.violations}});
  return r.ok() ? kExitOk : kExitDomain;
}

// ---- gowers ------------------------------------------------------------

int cmd_gowers(const Common& c, const std::string& fn_path, int s) {
  const nlg::GroupFunction f = nlg::group_function_from_json(nlg::load_json_file(fn_path));
  const nlg::GowersResult r = c.budget ? nlg::gowers_norm(f, s, c.budget) : nlg::gowers_norm(f, s);
  emit_json(c, Json{{"s", s}, {"norm", r.norm}, {"inner", complex_json(r.inner)}});
  return kExitOk;
}

std::vector<int> load_tau(const std::string& source) {
  if (source == "magic-square") return nlg::magic_square_tau();
  const Json doc = nlg::load_json_file(source);
  try {
    return (doc.is_object() ? doc.at("values") : doc).get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    nlg::fail(ErrorCode::kParse, std::string("malformed predicate file: ") + e.what());
  }
}

Json sign_strategy_json(const nlg::GroupSignStrategy& s) { return Json(s); }

int cmd_linegame(const Common& c, int p, int n, int t, const std::string& tau_source, const std::string& mode, int k,
                 const std::optional<std::uint64_t>& seed, std::uint64_t samples) {
  const nlg::LinearFormsGame game = nlg::line_game(t, p, n, load_tau(tau_source));
  const std::uint64_t budget = c.budget ? c.budget : 100000000;
  if (mode == "bias") {
    const nlg::LinearFormsBias b = nlg::linear_forms_bias(game, budget, c.workers);
    emit_json(c, Json{{"bias", nlg::to_string(b.bias)},
                      {"complete", b.complete},
                      {"searched", b.searched},
                      {"strategy", sign_strategy_json(b.strategy)}});
    return b.complete ? kExitOk : kExitPartial;
  }
  if (mode == "vonneumann") {
    const nlg::VonNeumannCheck v = nlg::von_neumann_check(game, budget);
    emit_json(c, Json{{"beta", nlg::to_string(v.beta)}, {"u_norm", v.u_norm}, {"s", v.s}, {"holds", v.holds}});
    return kExitOk;
  }
  if (mode == "witness") {
    if (!seed) throw CLI::RequiredError("--seed");
    const nlg::Witness w =
        nlg::witness_search(nlg::sign_function(game.system.group, game.rho), p, t - 1, budget);
    const nlg::WitnessStrategy s = nlg::strategy_from_witness(game, w.poly, *seed, samples);
    Json parts = Json::array();
    for (const auto& q : s.parts) parts.push_back(nlg::fp_polynomial_to_json(q));
    emit_json(c, Json{{"witness", nlg::fp_polynomial_to_json(w.poly)},
                      {"correlation", w.correlation},
                      {"complete", w.complete},
                      {"searched", w.searched},
                      {"parts", parts},
                      {"strategy_correlation", s.correlation},
                      {"rounded_bias", nlg::to_string(s.rounded.bias)},
                      {"rounded_strategy", sign_strategy_json(s.rounded.strategy)},
                      {"mean_abs_bias", estimate_json(s.rounded.mean_abs_bias)},
                      {"complex_estimate", complex_json(s.rounded.complex_bias.mean)}});
    return w.complete ? kExitOk : kExitPartial;
  }
  // parrep
  const double bound = nlg::parallel_repetition_bound(game, k);
  Json doc{{"k", k}, {"bound", bound}};
  int status = kExitOk;
  try {
    const nlg::ModMGame base = nlg::linear_forms_to_game(game);
    const nlg::ModMGame rep = nlg::xor_parallel_repetition(base, k, nlg::RepetitionMode::kAnd);
    const Rational omega = nlg::classical_value(rep, {budget, c.workers}).omega;
    doc["omega_k"] = nlg::to_string(omega);
    doc["holds"] = omega.get_d() <= bound + 1e-12;
  } catch (const nlg::Error& e) {
    if (e.code() != ErrorCode::kBudgetExceeded) throw;
    doc["omega_k"] = Json();
    doc["note"] = e.what();
    status = kExitPartial;
  }
  emit_json(c, doc);
  return status;
}

// ---- ugsdp -------------------------------------------------------------

int cmd_ugsdp_solve(const Common& c, const std::string& game_path, const nlg::SdpOptions& o) {
  const nlg::UniqueGame game = nlg::unique_game_from_json(nlg::load_json_file(game_path));
  const nlg::VectorSolution sol = nlg::solve_sdp(game, o);
  emit_json(c, nlg::solution_to_json(game, sol));
  return sol.converged ? kExitOk : kExitPartial;
}

int cmd_ugsdp_round(const Common& c, const std::string& sol_path, const std::string& game_path, std::uint64_t seed,
                    bool diagnose) {
  const Json doc = nlg::load_json_file(sol_path);
  const nlg::UniqueGame game = game_path.empty() ? nlg::unique_game_from_json(doc.value("game", Json()))
                                                 : nlg::unique_game_from_json(nlg::load_json_file(game_path));
  const nlg::VectorSolution sol = nlg::solution_from_json(doc);
  if (diagnose)
    emit_json(c, nlg::diagnostics_to_json(nlg::diagnostics(sol, game, seed)));
  else
    emit_json(c, nlg::rounding_to_json(game, nlg::round_solution(sol, game, seed)));
  return kExitOk;
}

int cmd_ugsdp_study(const Common& c, int k, const std::string& eps, int seeds, int questions, bool json) {
  const nlg::StudyReport r = nlg::perturbation_study(k, parse_double_list(eps), seeds, questions, c.workers);
  if (!json) {
    emit(c, nlg::study_csv(r));
    return kExitOk;
  }
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"epsilon", row.epsilon},
                    {"mean_loss", row.mean_loss},
                    {"std_error", row.std_error},
                    {"sqrt_eps_log_k", row.scale},
                    {"ratio", row.ratio}});
  emit_json(c, Json{{"k", r.k}, {"rows", rows}, {"empirical_constant", r.empirical_constant}});
  return kExitOk;
}

int cmd_ugsdp_planted(const Common& c, int k, int questions, double eps, std::uint64_t seed) {
  const nlg::PlantedInstance inst = nlg::planted_instance(k, questions, eps, seed);
  emit_json(c, nlg::solution_to_json(inst.game, inst.perturbed));
  return kExitOk;
}

int cmd_xor_bias(const Common& c, const std::string& game_path, const nlg::SdpOptions& o) {
  const nlg::XorBias b = nlg::xor2_entangled_bias(nlg::game_from_json(nlg::load_json_file(game_path)), o);
  emit_json(c, Json{{"bias", b.bias}, {"converged", b.converged}});
  return b.converged ? kExitOk : kExitPartial;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
      return kExitInput;
    case ErrorCode::kBudgetExceeded:
      return kExitPartial;
    default:
      return kExitDomain;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal game toolkit: classical values, angle games, quantum strategies, hypergraph and "
               "Gowers norms, unique-game SDP rounding."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  int status = kExitOk;
  Common c;
  std::string game_path, strategy_path, tensor_path, fn_path, sol_path, tau, mode = "xor", ms = "2", ts = "2..9";
  int k = 2, t = 3, m = 2, d = 2, d_min = 1, d_max = 0, grid = 64, s = 2, p = 3, n = 1, seeds = 100, questions = 4;
  std::uint64_t samples = 1000000;
  std::optional<std::uint64_t> seed;
  bool csv = false, json = false;
  double tol = 1e-9, eps_value = 0.01;
  std::int64_t max_den = 0;
  std::string eps = "0.04,0.01,0.0025";
  nlg::SdpOptions sdp;
  bool drop_nonneg = false;

  auto* classical = app.add_subcommand("classical", "Exact classical value and bias of a game (exhaustive search)");
  classical->add_option("--game", game_path, "Game JSON")->required();
  classical->add_flag("--csv", csv, "Emit a CSV row instead of JSON");
  add_common(classical, c, true, true);
  classical->callback([&] { status = cmd_classical(c, game_path, csv); });

  auto* evaluate = app.add_subcommand("evaluate", "Winning probability of a deterministic strategy");
  evaluate->add_option("--game", game_path, "Game JSON")->required();
  evaluate->add_option("--strategy", strategy_path, "Strategy JSON")->required();
  add_common(evaluate, c);
  evaluate->callback([&] { status = cmd_evaluate(c, game_path, strategy_path); });

  auto* repeat = app.add_subcommand("repeat", "k-fold parallel repetition of a game");
  repeat->add_option("--game", game_path, "Game JSON")->required();
  repeat->add_option("--k", k, "Number of copies")->check(CLI::PositiveNumber);
  repeat->add_option("--mode", mode, "xor: answers add up coordinate-wise; and: every coordinate must win")
      ->check(CLI::IsMember({"xor", "and"}));
  add_common(repeat, c);
  repeat->callback([&] { status = cmd_repeat(c, game_path, k, mode); });

  auto* connectivity = app.add_subcommand("connectivity", "Connection graph of a game's support");
  connectivity->add_option("--game", game_path, "Game JSON")->required();
  add_common(connectivity, c);
  connectivity->callback([&] { status = cmd_connectivity(c, game_path); });

  auto* cs = app.add_subcommand("cs-identity", "Conjunction-versus-XOR bias identity for a strategy");
  cs->add_option("--game", game_path, "Game JSON")->required();
  cs->add_option("--strategy", strategy_path, "Strategy JSON")->required();
  cs->add_option("--k", k, "Number of copies")->check(CLI::PositiveNumber);
  add_common(cs, c);
  cs->callback([&] { status = cmd_cs_identity(c, game_path, strategy_path, k); });

  auto* uag_table = app.add_subcommand("uag-table", "Exact value of the semi-trivial uniform angle game strategy");
  uag_table->add_option("--m", ms, "Moduli, e.g. 2 or 2,3");
  uag_table->add_option("--t", ts, "Player counts, e.g. 2..9");
  add_common(uag_table, c);
  uag_table->callback([&] { status = cmd_uag_table(c, ms, ts); });

  auto* uag_profile = app.add_subcommand("uag-profile", "Answer probabilities given the last player's angle (CSV)");
  uag_profile->add_option("--t", t, "Players")->required();
  uag_profile->add_option("--m", m, "Modulus")->required();
  uag_profile->add_option("--grid", grid, "Grid points")->check(CLI::PositiveNumber);
  add_common(uag_profile, c);
  uag_profile->callback([&] { status = cmd_uag_profile(c, t, m, grid); });

  auto* boyer_search = app.add_subcommand("boyer-search", "Classical optimum of the discretized angle game per input count");
  boyer_search->add_option("--t", t, "Players")->required();
  boyer_search->add_option("--m", m, "Modulus")->required();
  boyer_search->add_option("--d-min", d_min, "Smallest input count");
  boyer_search->add_option("--d-max", d_max, "Largest input count")->required();
  add_common(boyer_search, c, true, true);
  boyer_search->callback([&] { status = cmd_boyer_search(c, t, m, d_min, d_max); });

  auto* boyer_game = app.add_subcommand("boyer-game", "Write the discretized angle game as game JSON");
  boyer_game->add_option("--t", t, "Players")->required();
  boyer_game->add_option("--m", m, "Modulus")->required();
  boyer_game->add_option("--d", d, "Inputs per player")->required();
  add_common(boyer_game, c);
  boyer_game->callback([&] { status = cmd_boyer_game(c, t, m, d); });

  auto* schmidt = app.add_subcommand("schmidt-reduce", "Angle game induced by a perfect Schmidt-basis strategy");
  schmidt->add_option("--game", game_path, "Game JSON")->required();
  schmidt->add_option("--strategy", strategy_path, "Schmidt strategy JSON")->required();
  schmidt->add_option("--tol", tol, "Angle snapping tolerance");
  schmidt->add_option("--max-den", max_den, "Largest accepted angle denominator (0 = automatic)");
  add_common(schmidt, c);
  schmidt->callback([&] { status = cmd_schmidt_reduce(c, game_path, strategy_path, tol, max_den); });

  auto* synthesize = app.add_subcommand("synthesize", "Perfect classical strategy for a connected angle game");
  synthesize->add_option("--t", t, "Players")->required();
  synthesize->add_option("--m", m, "Modulus")->required();
  synthesize->add_option("--d", d, "Inputs per player")->required();
  add_common(synthesize, c);
  synthesize->callback([&] { status = cmd_synthesize(c, t, m, d); });

  auto* floor_trial = app.add_subcommand("floor-trial", "Monte Carlo value of the rounding-down guessing strategy");
  floor_trial->add_option("--t", t, "Players")->required();
  floor_trial->add_option("--m", m, "Modulus")->required();
  floor_trial->add_option("--samples", samples, "Samples")->check(CLI::PositiveNumber);
  floor_trial->add_option("--seed", seed, "Random seed")->required();
  add_common(floor_trial, c, false, true);
  floor_trial->callback([&] { status = cmd_floor_trial(c, t, m, samples, *seed); });

  auto* qeval = app.add_subcommand("qeval", "Winning probability of a quantum strategy");
  qeval->add_option("--game", game_path, "Game JSON")->required();
  qeval->add_option("--strategy", strategy_path, "Quantum or Schmidt strategy JSON")->required();
  add_common(qeval, c);
  qeval->callback([&] { status = cmd_qeval(c, game_path, strategy_path); });

  auto* hypnorm = app.add_subcommand("hypnorm", "Hypergraph norm of a free game tensor");
  hypnorm->add_option("--tensor", tensor_path, "Tensor JSON")->required();
  int ht_t = 0;
  hypnorm->add_option("--t", ht_t, "Hypergraph order (default: the tensor's player count)");
  add_common(hypnorm, c, true, true);
  hypnorm->callback([&] { status = cmd_hypnorm(c, tensor_path, ht_t); });

  auto* extract = app.add_subcommand("extract", "Classical strategy read off the hypergraph norm expansion");
  extract->add_option("--tensor", tensor_path, "Tensor JSON")->required();
  add_common(extract, c, true, true);
  extract->callback([&] { status = cmd_extract(c, tensor_path); });

  auto* ht = app.add_subcommand("ht", "Build the hypergraph for t players and check its properties");
  ht->add_option("--t", t, "Players")->required();
  add_common(ht, c);
  ht->callback([&] { status = cmd_ht(c, t); });

  auto* gowers = app.add_subcommand("gowers", "Gowers uniformity norm of a function on a finite abelian group");
  gowers->add_option("--fn", fn_path, "Function JSON")->required();
  gowers->add_option("--s", s, "Norm order")->check(CLI::PositiveNumber);
  add_common(gowers, c, true);
  gowers->callback([&] { status = cmd_gowers(c, fn_path, s); });

  auto* linegame = app.add_subcommand("linegame", "Line games on F_p^n: bias, norm bound, witness strategy, repetition");
  linegame->add_option("mode", mode, "bias | vonneumann | witness | parrep")
      ->required()
      ->check(CLI::IsMember({"bias", "vonneumann", "witness", "parrep"}));
  linegame->add_option("--p", p, "Field size (prime)")->required();
  linegame->add_option("--n", n, "Dimension")->required();
  linegame->add_option("--t", t, "Players")->required();
  linegame->add_option("--tau", tau, "Predicate JSON, or magic-square")->required();
  linegame->add_option("--k", k, "Repetitions for parrep")->check(CLI::PositiveNumber);
  linegame->add_option("--seed", seed, "Random seed (witness mode)");
  linegame->add_option("--samples", samples, "Rounding samples (witness mode)")->check(CLI::PositiveNumber);
  add_common(linegame, c, true, true);
  linegame->callback([&] { status = cmd_linegame(c, p, n, t, tau, mode, k, seed, samples); });

  auto* ugsdp = app.add_subcommand("ugsdp", "Unique-game vector relaxation, rounding and diagnostics");
  ugsdp->require_subcommand(1);
  auto add_sdp_options = [&](CLI::App* sub) {
    sub->add_option("--tol", sdp.tol, "Residual tolerance");
    sub->add_option("--max-iter", sdp.max_iter, "Iteration limit")->check(CLI::PositiveNumber);
    sub->add_option("--rank-cap", sdp.rank_cap, "Largest vector dimension (0 = no cap)");
  };
  auto* solve = ugsdp->add_subcommand("solve", "Solve the vector relaxation");
  solve->add_option("--game", game_path, "Unique game JSON")->required();
  add_sdp_options(solve);
  solve->add_flag("--drop-nonnegativity", drop_nonneg, "Allow negative first/second player inner products");
  add_common(solve, c);
  solve->callback([&] {
    sdp.nonnegativity = !drop_nonneg;
    status = cmd_ugsdp_solve(c, game_path, sdp);
  });
  auto* round = ugsdp->add_subcommand("round", "Round a vector solution to a classical strategy");
  round->add_option("--sol", sol_path, "Solution JSON")->required();
  round->add_option("--game", game_path, "Unique game JSON (default: the one stored in the solution)");
  round->add_option("--seed", seed, "Random seed")->required();
  add_common(round, c);
  round->callback([&] { status = cmd_ugsdp_round(c, sol_path, game_path, *seed, false); });
  auto* diagnose = ugsdp->add_subcommand("diagnose", "Per-pair rounding error terms and their bounds");
  diagnose->add_option("--sol", sol_path, "Solution JSON")->required();
  diagnose->add_option("--game", game_path, "Unique game JSON (default: the one stored in the solution)");
  diagnose->add_option("--seed", seed, "Random seed")->required();
  add_common(diagnose, c);
  diagnose->callback([&] { status = cmd_ugsdp_round(c, sol_path, game_path, *seed, true); });
  auto* study = ugsdp->add_subcommand("study", "Rounding loss on planted instances as the perturbation shrinks");
  study->add_option("--k", k, "Answers")->check(CLI::Range(2, 64));
  study->add_option("--eps", eps, "Comma-separated perturbation sizes");
  study->add_option("--seeds", seeds, "Instances per size")->check(CLI::PositiveNumber);
  study->add_option("--questions", questions, "Questions per player")->check(CLI::PositiveNumber);
  study->add_flag("--json", json, "Emit JSON with the empirical constant instead of CSV");
  add_common(study, c, false, true);
  study->callback([&] { status = cmd_ugsdp_study(c, k, eps, seeds, questions, json); });
  auto* planted = ugsdp->add_subcommand("planted", "Planted instance with a perturbed solution");
  planted->add_option("--k", k, "Answers")->check(CLI::PositiveNumber);
  planted->add_option("--questions", questions, "Questions per player")->check(CLI::PositiveNumber);
  planted->add_option("--eps", eps_value, "Perturbation size")->check(CLI::Range(0.0, 1.0));
  planted->add_option("--seed", seed, "Random seed")->required();
  add_common(planted, c);
  planted->callback([&] { status = cmd_ugsdp_planted(c, k, questions, eps_value, *seed); });
  auto* xor_bias = ugsdp->add_subcommand("xor-bias", "Entangled bias of a two-player XOR game");
  xor_bias->add_option("--game", game_path, "Game JSON")->required();
  add_sdp_options(xor_bias);
  add_common(xor_bias, c);
  xor_bias->callback([&] { status = cmd_xor_bias(c, game_path, sdp); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  } catch (const nlg::Error& e) {
    std::cerr << "error [" << nlg::error_code_name(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return status;
}
