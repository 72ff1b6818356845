#pragma once

#include <Eigen/Dense>

#include <vector>

#include "nlg/angle_game.hpp"
#include "nlg/game.hpp"

namespace nlg {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Player 1 is the most significant tensor factor.
struct PureState {
  std::vector<int> dims;
  CVector amplitudes;
};

// One projector per outcome.
using Measurement = std::vector<CMatrix>;

struct QuantumStrategy {
  PureState state;
  std::vector<std::vector<Measurement>> measurements;  // [player][question]
};

// State sum_i c_i |i>^{\otimes t} with one projective measurement per
// player and question, written in the Schmidt basis.
struct SchmidtStrategySpec {
  int d = 0;
  std::vector<double> c;
  std::vector<std::vector<Measurement>> measurements;  // [player][question]
};

constexpr double kProjectorTolerance = 1e-9;

// Largest entry-wise deviation from Hermitian, idempotent, orthogonal and
// complete.
double projective_residual(const Measurement& m);

// Throws unless the state is normalized and every measurement has
// game.modulus() outcomes of the right size and is projective within tol.
void validate_strategy(const ModMGame& game, const QuantumStrategy& s, double tol = kProjectorTolerance);

// Probability of each answer tuple (mixed radix, player 1 most significant)
// when the players receive the given questions.
std::vector<double> outcome_distribution(const QuantumStrategy& s, const std::vector<int>& questions, int outcomes);

double winning_probability(const ModMGame& game, const QuantumStrategy& s, double tol = kProjectorTolerance);

// One-dimensional embedding of a deterministic strategy.
QuantumStrategy embed_deterministic(const ModMGame& game, const DeterministicStrategy& s);

// m-dimensional GHZ state; on angle theta a player applies the phase
// diag(e^{2 pi i k theta}), then the inverse Fourier transform, and measures
// in the computational basis. Questions follow game.angles() order.
QuantumStrategy ghz_angle_strategy(const AngleGameDiscrete& game);
QuantumStrategy ghz_angle_strategy(const BoyerGame& game);

PureState schmidt_state(const SchmidtStrategySpec& spec, int players);
QuantumStrategy strategy_from_schmidt(const SchmidtStrategySpec& spec, int players);

struct PerfectionReport {
  bool is_perfect = false;
  double residual = 0.0;  // 1 - winning probability
};

PerfectionReport verify_schmidt_perfection(const ModMGame& game, const SchmidtStrategySpec& spec,
                                           double tol = kProjectorTolerance);

// Largest singular value by power iteration on M^* M.
double operator_norm(const CMatrix& m);

struct CauchySchwarzSides {
  double lhs = 0.0;  // || sum A_i B_i ||
  double rhs = 0.0;  // || sum A_i A_i^* ||^{1/2} || sum B_i^* B_i ||^{1/2}
};

CauchySchwarzSides operator_cs_check(const std::vector<CMatrix>& a, const std::vector<CMatrix>& b);

}  // namespace nlg
