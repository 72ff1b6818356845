#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nlg/game.hpp"
#include "nlg/json_io.hpp"
#include "nlg/rational.hpp"

namespace nlg {

// Sign tensor of a free XOR game: entries over X_1 x ... x X_t, row-major
// with player 1 most significant, and one question distribution per player.
struct GameTensor {
  std::vector<int> dims;
  std::vector<std::int8_t> entries;
  std::vector<std::vector<Rational>> marginals;

  int players() const { return static_cast<int>(dims.size()); }
  std::size_t size() const;
  void validate() const;
};

GameTensor uniform_tensor(std::vector<int> dims, std::vector<std::int8_t> entries);
GameTensor random_tensor(std::mt19937_64& rng, const std::vector<int>& dims);

// XOR game whose target on x is 0 when T(x) = 1 and 1 when T(x) = -1, with
// product weights; zero-weight tuples are dropped.
ModMGame free_xor_game(const GameTensor& t);

// t-partite t-uniform hypergraph; edges[e][i] indexes parts[i].
struct Hypergraph {
  std::vector<std::vector<std::string>> parts;
  std::vector<std::vector<int>> edges;

  int arity() const { return static_cast<int>(parts.size()); }
};

// Doubling construction: start from one edge of all-zero labels and, for
// j = t, t-1, ..., 1, append a copy of every existing edge with bit j of every
// label outside part j flipped. Labels read "v<i>_<bits>".
Hypergraph build_Ht(int t);

struct HypergraphReport {
  bool partite = true;
  bool regular = true;
  bool disjoint = true;
  std::vector<std::string> violations;

  bool ok() const { return partite && regular && disjoint; }
};

// t-partiteness, 2-regularity and: for each vertex v in edges e, e' and each
// w in e other than v, with e'' the other edge at w, e' and e'' share no vertex.
HypergraphReport verify_Ht_properties(const Hypergraph& h);

struct NormOptions {
  std::uint64_t budget = 100000000;
  // Assignment counts up to this size are also summed in exact arithmetic.
  std::uint64_t exact_limit = 2000000;
  int workers = 0;
};

struct NormResult {
  double norm = 0.0;
  double expectation = 0.0;               // signed edge-product average
  std::optional<Rational> exact_expectation;
  std::uint64_t terms = 0;
};

// |E prod_{e} T(phi(e))|^{1/|E|} over independent maps phi_i: V_i -> X_i
// drawn from the marginals.
NormResult hypergraph_norm(const GameTensor& t, const Hypergraph& h, const NormOptions& options = {});

// Per-player sign strategies a_i: X_i -> {+1, -1}.
using SignStrategy = std::vector<std::vector<int>>;

// E_x T(x) prod_i a_i(x_i), exact.
Rational strategy_bias(const GameTensor& t, const SignStrategy& s);

struct ClassicalBias {
  Rational bias;
  SignStrategy strategy;
};

// Best |strategy_bias| by enumerating all but the last player.
ClassicalBias free_game_classical_bias(const GameTensor& t, std::uint64_t budget = 100000000);

struct Extraction {
  SignStrategy strategy;
  Rational bias;
  std::uint64_t assignments = 0;
};

// Strategy read off the first edge of build_Ht(t) and its neighbours; the
// returned bias is nonnegative and at least the t-th doubled norm raised to 2^t.
Extraction extract_classical_strategy(const GameTensor& t, const NormOptions& options = {});

// {"dims", "entries", "marginals"}; marginals default to uniform.
GameTensor tensor_from_json(const Json& doc);
Json tensor_to_json(const GameTensor& t);
Json hypergraph_to_json(const Hypergraph& h);

}  // namespace nlg
