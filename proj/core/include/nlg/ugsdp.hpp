#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlg/game.hpp"
#include "nlg/json_io.hpp"
#include "nlg/quantum.hpp"
#include "nlg/rational.hpp"

namespace nlg {

// Two-player game in which every answer of the first player is matched by
// exactly one answer of the second: b = perm(a). Answers are 0-based
// internally and 1-based in JSON.
struct UniquePair {
  int x = 0;
  int y = 0;
  Rational weight;
  std::vector<int> perm;
};

struct UniqueGame {
  int k = 0;
  std::vector<std::string> x_labels;
  std::vector<std::string> y_labels;
  std::vector<UniquePair> pairs;

  void validate() const;
};

// b = target - a mod m; requires two players.
UniqueGame unique_game_from_modm(const ModMGame& game);

Rational unique_strategy_value(const UniqueGame& game, const std::vector<int>& a, const std::vector<int>& b);

struct UniqueClassical {
  Rational value;
  std::vector<int> a;
  std::vector<int> b;
};

// First player enumerated, second best-responds.
UniqueClassical unique_game_classical_value(const UniqueGame& game, std::uint64_t budget = 100000000);

struct VectorSolution {
  int dimension = 0;
  std::vector<std::vector<Eigen::VectorXd>> u;  // [x][answer]
  std::vector<std::vector<Eigen::VectorXd>> v;  // [y][answer]
  double objective = 0.0;
  bool converged = true;
  int iterations = 0;
  std::vector<double> objective_history;  // incumbent objective after each iteration
};

struct FeasibilityReport {
  double orthogonality = 0.0;  // largest |<u_i, u_j>|, i != j, same question
  double normalization = 0.0;  // largest |sum_i |u_i|^2 - 1|
  double nonnegativity = 0.0;  // largest max(0, -<u_i^x, v_j^y>)
  double worst() const;
};

FeasibilityReport feasibility(const UniqueGame& game, const VectorSolution& sol);
// E_xy sum_i <u_i^x, v_perm(i)^y>.
double solution_objective(const UniqueGame& game, const VectorSolution& sol);

struct SdpOptions {
  double tol = 1e-7;
  int max_iter = 20000;
  int rank_cap = 0;            // 0 keeps every positive eigenvalue
  bool nonnegativity = true;   // keep <u, v> >= 0 for every u, v pair
  double feasibility_tol = 1e-6;
};

// ADMM on the Gram matrix: projection onto the PSD cone by eigendecomposition
// alternates with projection onto the linear constraints. The returned
// solution is the best iterate whose constraint residual is within
// feasibility_tol; converged is false when max_iter ran out first.
VectorSolution solve_sdp(const UniqueGame& game, const SdpOptions& options = {},
                         const std::optional<VectorSolution>& start = std::nullopt);

// Indicator vectors in dimension 1.
VectorSolution classical_to_vectors(const UniqueGame& game, const std::vector<int>& a, const std::vector<int>& b);

// u_i^x = (P_i^x (x) Id) psi and v_j^y = (Id (x) Q_j^y) psi with real and
// imaginary parts interleaved. Measurement questions follow the game's
// x and y indices.
VectorSolution quantum_strategy_to_vectors(const UniqueGame& game, const QuantumStrategy& s);

struct RoundingResult {
  std::vector<int> a;
  std::vector<int> b;
  Rational win_probability;
  double r = 0.0;
};

// [x]_r = floor(x) + (frac(x) > r).
int round_at(double x, double r);

// Gaussian-projection rounding with 2k shared vectors and per-answer sample
// counts [2k |u_i|^2]_r. Ties in |xi| go to the smallest (answer, sample).
RoundingResult round_solution(const VectorSolution& sol, const UniqueGame& game, std::uint64_t seed,
                              double feasibility_tol = 1e-6);

struct PairDiagnostics {
  int x = 0;
  int y = 0;
  double epsilon = 0.0;
  std::vector<double> epsilon_i;  // per first-player answer
  std::vector<int> s_x;           // counts at the seeded r
  std::vector<int> s_y;           // indexed by first-player answer through perm
  int m_size = 0;
  int mc_size = 0;
  // Exact expectations over r, from the piecewise-constant counts.
  double expected_mc = 0.0;
  double min_m = 0.0;
  double expected_matched_epsilon = 0.0;
  double mc_bound = 0.0;       // 4k sqrt(2 eps)
  double m_bound = 0.0;        // k / 2
  double matched_bound = 0.0;  // 4 eps
  // Epsilon is recomputed from the vectors, so allow rounding at the boundary.
  bool in_small_regime() const { return epsilon <= 1.0 / 128.0 + 1e-12; }
  bool bounds_hold(double slack = 1e-9) const;
};

struct RoundingDiagnostics {
  double r = 0.0;
  std::vector<PairDiagnostics> pairs;
};

RoundingDiagnostics diagnostics(const VectorSolution& sol, const UniqueGame& game, std::uint64_t seed);

struct PlantedInstance {
  UniqueGame game;
  VectorSolution perfect;
  VectorSolution perturbed;  // every pair has epsilon_xy equal to the target
  std::vector<int> labeling_a;
  std::vector<int> labeling_b;
};

// Questions per side, random answer relabelings with a consistent labeling,
// uniform weights over all pairs. The perturbation moves second-player mass
// between answers and rotates each second-player vector in a plane with a
// fresh coordinate.
PlantedInstance planted_instance(int k, int questions, double epsilon, std::uint64_t seed);

struct StudyRow {
  double epsilon = 0.0;
  double mean_loss = 0.0;
  double std_error = 0.0;
  double scale = 0.0;  // sqrt(epsilon log k)
  double ratio = 0.0;  // mean_loss / scale, 0 when scale is 0
};

struct StudyReport {
  int k = 0;
  std::vector<StudyRow> rows;
  double empirical_constant = 0.0;  // largest ratio
};

// Instance seeds 0..seeds-1 are shared across epsilons.
StudyReport perturbation_study(int k, const std::vector<double>& epsilons, int seeds, int questions = 4,
                               int workers = 0);
std::string study_csv(const StudyReport& report);

struct XorBias {
  double bias = 0.0;
  std::vector<Eigen::VectorXd> a;
  std::vector<Eigen::VectorXd> b;
  bool converged = true;
};

// max E_xy T(x, y) <a_x, b_y> over unit vectors; two-player m = 2 games only.
XorBias xor2_entangled_bias(const ModMGame& game, const SdpOptions& options = {});

UniqueGame unique_game_from_json(const Json& doc);
Json unique_game_to_json(const UniqueGame& game);
// Includes the game so a solution file is self-contained.
Json solution_to_json(const UniqueGame& game, const VectorSolution& sol);
VectorSolution solution_from_json(const Json& doc);
Json rounding_to_json(const UniqueGame& game, const RoundingResult& r);
Json diagnostics_to_json(const RoundingDiagnostics& d);

}  // namespace nlg
