#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "nlg/game.hpp"
#include "nlg/json_io.hpp"
#include "nlg/monte_carlo.hpp"
#include "nlg/rational.hpp"

namespace nlg {

// Z_{n_1} x ... x Z_{n_r}; elements are indexed mixed-radix with the first
// component most significant.
class FiniteAbelianGroup {
 public:
  explicit FiniteAbelianGroup(std::vector<int> moduli);
  static FiniteAbelianGroup vector_space(int p, int n) { return FiniteAbelianGroup(std::vector<int>(n, p)); }

  const std::vector<int>& moduli() const { return moduli_; }
  int rank() const { return static_cast<int>(moduli_.size()); }
  int size() const { return size_; }
  // Least order of a non-identity element: the smallest prime dividing a modulus.
  int characteristic() const;

  std::vector<int> decode(int index) const;
  int encode(const std::vector<int>& components) const;
  int add(int a, int b) const { return add_[static_cast<std::size_t>(a) * size_ + b]; }
  int neg(int a) const { return neg_[a]; }
  int scale(long c, int a) const;

 private:
  std::vector<int> moduli_;
  int size_ = 1;
  std::vector<int> add_;
  std::vector<int> neg_;
};

struct GroupFunction {
  FiniteAbelianGroup group;
  std::vector<std::complex<double>> values;
};

// (-1)^rho for a 0/1 map.
GroupFunction sign_function(const FiniteAbelianGroup& g, const std::vector<int>& rho);

struct GowersResult {
  double norm = 0.0;
  std::complex<double> inner;  // expectation before taking the 2^-s root
};

// Expectation over h_1..h_s, x of the iterated multiplicative derivative;
// throws when it is not a nonnegative real within 1e-9.
GowersResult gowers_norm(const GroupFunction& f, int s, std::uint64_t budget = 200000000);

// psi(g_1..g_m) = constant + sum_j coeffs[j] g_j.
struct AffineForm {
  int constant = 0;  // group element
  std::vector<long> coeffs;
};

struct LinearFormsSystem {
  FiniteAbelianGroup group;
  int variables = 0;
  std::vector<AffineForm> forms;  // forms[0] feeds the predicate

  int players() const { return static_cast<int>(forms.size()) - 1; }
  int evaluate(int form, const std::vector<int>& g) const;
};

// Least s <= s_max with a partition of the other forms into s + 1 classes
// avoiding each form's span (over the rationals, constant terms included as
// an extra coordinate); nullopt when none exists up to s_max.
std::optional<int> cs_complexity(const LinearFormsSystem& sys, int s_max = 4);

struct LinearFormsGame {
  LinearFormsSystem system;
  std::vector<int> rho;  // 0/1 per group element
};

// t players on F_p^n; the referee sends x + (i-1) y to player i and the
// parity must equal tau(y).
LinearFormsGame line_game(int t, int p, int n, const std::vector<int>& tau);
// tau on F_3^2 that is 0 exactly on the directions (1,0) and (2,0).
std::vector<int> magic_square_tau();

// Signs per player, indexed by group element.
using GroupSignStrategy = std::vector<std::vector<int>>;

// E_g (-1)^rho(psi_0 g) prod_i a_i(psi_i g), exact.
Rational linear_forms_strategy_bias(const LinearFormsGame& game, const GroupSignStrategy& s);

struct LinearFormsBias {
  Rational bias;
  GroupSignStrategy strategy;
  bool complete = true;  // false when the budget cut the search short
  std::uint64_t searched = 0;
};

// Maximum |bias| over sign strategies: all but the last player enumerated,
// the last best-responds.
LinearFormsBias linear_forms_bias(const LinearFormsGame& game, std::uint64_t budget = 100000000, int workers = 0);

// Same game as a ModMGame over questions = group elements; rejects games in
// which one question tuple carries two different predicate values.
ModMGame linear_forms_to_game(const LinearFormsGame& game);

struct VonNeumannCheck {
  Rational beta;
  double u_norm = 0.0;
  int s = 0;  // complexity bound used; the norm is U^{s+1}
  bool holds = false;
};

VonNeumannCheck von_neumann_check(const LinearFormsGame& game, std::uint64_t budget = 100000000);

// Polynomial over F_p in n variables; monomials keyed by exponent vectors
// with every exponent below p.
struct FpPolynomial {
  int p = 2;
  int n = 1;
  std::map<std::vector<int>, int> coeffs;

  int degree() const;  // -1 for zero
  int operator()(const std::vector<int>& x) const;
  void normalize();
};

// Q_0..Q_{d-1} with P(y) = sum_j Q_j(x + j y) for all x, y.
std::vector<FpPolynomial> polynomial_split(const FpPolynomial& poly, int d);
bool verify_split(const FpPolynomial& poly, const std::vector<FpPolynomial>& parts, std::uint64_t budget = 100000000);

// (pi/2) E_w [sign(Re(z conj w)) |z| w] with w uniform on the unit circle.
ComplexEstimate complex_rounding_identity(std::complex<double> z, std::uint64_t seed, std::uint64_t samples);

struct RoundedStrategy {
  GroupSignStrategy strategy;  // best sampled rounding
  Rational bias;               // its exact bias
  MonteCarloEstimate mean_abs_bias;
  ComplexEstimate complex_bias;  // (pi/2)^t-rescaled estimate of the unit-strategy bias
};

// Rounds unit-modulus strategies z_i: Gamma -> C to signs by sign(Re(z conj w_i))
// with independent uniform w_i, sign(0) = +1.
RoundedStrategy complex_round(const LinearFormsGame& game, const std::vector<std::vector<std::complex<double>>>& z,
                              std::uint64_t seed, std::uint64_t samples);

struct Witness {
  FpPolynomial poly;
  double correlation = 0.0;  // |E f(x) e(P(x)/p)|
  bool complete = true;
  std::uint64_t searched = 0;
};

// Exhaustive search over polynomials of degree <= s on F_p^n.
Witness witness_search(const GroupFunction& f, int p, int s, std::uint64_t budget = 100000000);

struct WitnessStrategy {
  std::vector<FpPolynomial> parts;  // one per player
  double correlation = 0.0;         // |E f(psi_0) prod e(P_i(psi_i)/p)|
  RoundedStrategy rounded;
};

WitnessStrategy strategy_from_witness(const LinearFormsGame& game, const FpPolynomial& poly, std::uint64_t seed,
                                      std::uint64_t samples);

// ((1 + ||(-1)^rho||_{U^t}) / 2)^k.
double parallel_repetition_bound(const LinearFormsGame& game, int k);

struct ProductCheck {
  double lhs = 0.0;  // norm of the k-fold tensor power on the product group
  double rhs = 0.0;  // k-th power of the norm
};

ProductCheck gowers_product_check(const GroupFunction& f, int k, int s);

GroupFunction group_function_from_json(const Json& doc);
Json group_function_to_json(const GroupFunction& f);
FpPolynomial fp_polynomial_from_json(const Json& doc);
Json fp_polynomial_to_json(const FpPolynomial& poly);

}  // namespace nlg
