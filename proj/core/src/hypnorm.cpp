#include "nlg/hypnorm.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "nlg/errors.hpp"
#include "nlg/parallel.hpp"

namespace nlg {

namespace {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

std::uint64_t saturating_pow(std::uint64_t base, std::size_t exp) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r = saturating_mul(r, base);
  return r;
}

// Marginals as integers over a per-player common denominator.
struct IntegerMarginals {
  std::vector<std::vector<std::int64_t>> w;
  std::vector<mpz_class> denom;
};

IntegerMarginals integer_marginals(const GameTensor& t) {
  IntegerMarginals out;
  for (const auto& p : t.marginals) {
    mpz_class l = 1;
    for (const auto& r : p) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), r.get_den_mpz_t());
    require(l < (mpz_class(1) << 30), ErrorCode::kUnsupported, "marginal denominators are too large");
    std::vector<std::int64_t> w;
    for (const auto& r : p) w.push_back(mpz_class(r.get_num() * (l / r.get_den())).get_si());
    out.w.push_back(std::move(w));
    out.denom.push_back(l);
  }
  return out;
}

// Row-major strides with player 1 most significant.
std::vector<std::size_t> strides(const std::vector<int>& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i) s[i] = s[i + 1] * dims[i + 1];
  return s;
}

// Mixed-radix counter, most significant digit first.
struct Odometer {
  std::vector<int> radix;
  std::vector<int> digit;

  void set(std::uint64_t index) {
    digit.assign(radix.size(), 0);
    for (int i = static_cast<int>(radix.size()) - 1; i >= 0; --i) {
      digit[i] = static_cast<int>(index % radix[i]);
      index /= radix[i];
    }
  }
  void next() {
    for (int i = static_cast<int>(radix.size()) - 1; i >= 0; --i) {
      if (++digit[i] < radix[i]) return;
      digit[i] = 0;
    }
  }
};

constexpr std::uint64_t kChunk = 4096;

}  // namespace

std::size_t GameTensor::size() const {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  return n;
}

void GameTensor::validate() const {
  require(players() >= 1, ErrorCode::kInvalidGame, "tensor needs at least one player");
  for (int d : dims) require(d >= 1, ErrorCode::kInvalidGame, "tensor dimensions must be positive");
  require(entries.size() == size(), ErrorCode::kInvalidGame,
          "tensor has " + std::to_string(entries.size()) + " entries, expected " + std::to_string(size()));
  for (auto e : entries) require(e == 1 || e == -1, ErrorCode::kInvalidGame, "tensor entries must be +1 or -1");
  require(static_cast<int>(marginals.size()) == players(), ErrorCode::kInvalidGame, "one marginal per player needed");
  for (int i = 0; i < players(); ++i) {
    require(static_cast<int>(marginals[i].size()) == dims[i], ErrorCode::kInvalidGame, "marginal has wrong length");
    Rational total = 0;
    for (const auto& p : marginals[i]) {
      require(p >= 0, ErrorCode::kInvalidGame, "marginals must be nonnegative");
      total += p;
    }
    require(total == 1, ErrorCode::kInvalidGame, "marginal of player " + std::to_string(i + 1) + " sums to " +
                                                     to_string(total));
  }
}

GameTensor uniform_tensor(std::vector<int> dims, std::vector<std::int8_t> entries) {
  GameTensor t;
  t.dims = std::move(dims);
  t.entries = std::move(entries);
  for (int d : t.dims) t.marginals.push_back(std::vector<Rational>(d, Rational(1, d)));
  t.validate();
  return t;
}

GameTensor random_tensor(std::mt19937_64& rng, const std::vector<int>& dims) {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  std::vector<std::int8_t> e(n);
  for (auto& v : e) v = (rng() & 1) ? 1 : -1;
  return uniform_tensor(dims, std::move(e));
}

ModMGame free_xor_game(const GameTensor& t) {
  t.validate();
  std::vector<std::vector<std::string>> labels;
  for (int d : t.dims) {
    std::vector<std::string> l;
    for (int x = 0; x < d; ++x) l.push_back(std::to_string(x));
    labels.push_back(std::move(l));
  }
  std::vector<SupportEntry> support;
  Odometer od{t.dims, {}};
  od.set(0);
  for (std::size_t k = 0; k < t.size(); ++k, od.next()) {
    Rational w = 1;
    for (int i = 0; i < t.players(); ++i) w *= t.marginals[i][od.digit[i]];
    if (w != 0) support.push_back({od.digit, w, t.entries[k] == 1 ? 0 : 1});
  }
  return ModMGame(2, std::move(labels), std::move(support));
}

Hypergraph build_Ht(int t) {
  require(t >= 2, ErrorCode::kPrecondition, "H(t) needs t >= 2");
  require(t <= 16, ErrorCode::kUnsupported, "H(t) is limited to t <= 16");
  using Row = std::vector<std::string>;  // one bit string per part
  std::vector<Row> rows = {Row(t, std::string(t, '0'))};
  for (int j = t - 1; j >= 0; --j) {
    const std::size_t n = rows.size();
    for (std::size_t r = 0; r < n; ++r) {
      Row copy = rows[r];
      for (int i = 0; i < t; ++i)
        if (i != j) copy[i][j] = copy[i][j] == '0' ? '1' : '0';
      rows.push_back(std::move(copy));
    }
  }
  Hypergraph h;
  h.parts.resize(t);
  std::vector<std::map<std::string, int>> index(t);
  for (const auto& row : rows) {
    std::vector<int> edge;
    for (int i = 0; i < t; ++i) {
      auto [it, inserted] = index[i].try_emplace(row[i], static_cast<int>(h.parts[i].size()));
      if (inserted) h.parts[i].push_back("v" + std::to_string(i + 1) + "_" + row[i]);
      edge.push_back(it->second);
    }
    h.edges.push_back(std::move(edge));
  }
  return h;
}

HypergraphReport verify_Ht_properties(const Hypergraph& h) {
  HypergraphReport rep;
  const int t = h.arity();
  std::vector<std::vector<std::vector<int>>> incident(t);
  for (int i = 0; i < t; ++i) incident[i].resize(h.parts[i].size());
  for (std::size_t e = 0; e < h.edges.size(); ++e) {
    const auto& edge = h.edges[e];
    if (static_cast<int>(edge.size()) != t) {
      rep.partite = false;
      rep.violations.push_back("edge " + std::to_string(e) + " does not have one vertex per part");
      continue;
    }
    bool in_range = true;
    for (int i = 0; i < t; ++i)
      if (edge[i] < 0 || edge[i] >= static_cast<int>(h.parts[i].size())) in_range = false;
    if (!in_range) {
      rep.partite = false;
      rep.violations.push_back("edge " + std::to_string(e) + " references a missing vertex");
      continue;
    }
    for (int i = 0; i < t; ++i) incident[i][edge[i]].push_back(static_cast<int>(e));
  }
  for (int i = 0; i < t; ++i)
    for (std::size_t v = 0; v < h.parts[i].size(); ++v)
      if (incident[i][v].size() != 2) {
        rep.regular = false;
        rep.violations.push_back("vertex " + h.parts[i][v] + " has degree " + std::to_string(incident[i][v].size()));
      }
  auto share_vertex = [&](int a, int b) {
    for (int i = 0; i < t; ++i)
      if (h.edges[a][i] == h.edges[b][i]) return true;
    return false;
  };
  for (int i = 0; i < t; ++i)
    for (std::size_t v = 0; v < h.parts[i].size(); ++v) {
      if (incident[i][v].size() != 2) continue;
      for (int side = 0; side < 2; ++side) {
        const int e = incident[i][v][side], e1 = incident[i][v][1 - side];
        for (int j = 0; j < t; ++j) {
          if (j == i) continue;
          const auto& at_w = incident[j][h.edges[e][j]];
          if (at_w.size() != 2) continue;
          const int e2 = at_w[0] == e ? at_w[1] : at_w[0];
          if (share_vertex(e1, e2)) {
            rep.disjoint = false;
            rep.violations.push_back("vertex " + h.parts[i][v] + " with neighbour " + h.parts[j][h.edges[e][j]] +
                                     ": edges " + std::to_string(e1) + " and " + std::to_string(e2) + " intersect");
          }
        }
      }
    }
  return rep;
}

NormResult hypergraph_norm(const GameTensor& t, const Hypergraph& h, const NormOptions& options) {
  t.validate();
  const int n = t.players();
  require(h.arity() == n, ErrorCode::kDimensionMismatch, "hypergraph arity differs from the number of players");
  require(!h.edges.empty(), ErrorCode::kPrecondition, "hypergraph has no edges");
  const int last = n - 1;

  // Free digits: every vertex outside the last part.
  std::vector<std::pair<int, int>> vertices;  // (part, vertex)
  Odometer base;
  for (int i = 0; i < last; ++i)
    for (std::size_t v = 0; v < h.parts[i].size(); ++v) {
      vertices.emplace_back(i, static_cast<int>(v));
      base.radix.push_back(t.dims[i]);
    }
  std::uint64_t assignments = 1;
  for (int r : base.radix) assignments = saturating_mul(assignments, r);
  const std::uint64_t terms =
      saturating_mul(assignments, saturating_mul(h.parts[last].size(), static_cast<std::uint64_t>(t.dims[last])));
  require(options.budget == 0 || terms <= options.budget, ErrorCode::kBudgetExceeded,
          "hypergraph norm needs " + std::to_string(terms) + " terms, budget " + std::to_string(options.budget));

  std::vector<std::vector<int>> digit_of(last);  // [part][vertex] -> digit position
  for (int i = 0; i < last; ++i) digit_of[i].resize(h.parts[i].size());
  for (std::size_t d = 0; d < vertices.size(); ++d) digit_of[vertices[d].first][vertices[d].second] = static_cast<int>(d);
  std::vector<std::vector<int>> edges_at(h.parts[last].size());
  for (std::size_t e = 0; e < h.edges.size(); ++e) edges_at[h.edges[e][last]].push_back(static_cast<int>(e));

  const auto stride = strides(t.dims);
  const IntegerMarginals im = integer_marginals(t);
  std::vector<std::vector<double>> pd(n);
  for (int i = 0; i < n; ++i)
    for (const auto& p : t.marginals[i]) pd[i].push_back(p.get_d());
  const bool exact = assignments <= options.exact_limit;

  const std::uint64_t chunks = (assignments + kChunk - 1) / kChunk;
  std::vector<double> sums(chunks, 0.0), comps(chunks, 0.0);
  std::vector<mpz_class> exact_sums(exact ? chunks : 0);
  parallel_chunks(static_cast<std::int64_t>(chunks), options.workers, [&](std::int64_t c) {
    Odometer od = base;
    const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunk;
    const std::uint64_t end = std::min(assignments, begin + kChunk);
    od.set(begin);
    std::vector<std::size_t> offset(h.edges.size());
    double s = 0.0, comp = 0.0;
    mpz_class es = 0, term;
    for (std::uint64_t a = begin; a < end; ++a, od.next()) {
      double w = 1.0;
      term = 1;
      for (std::size_t d = 0; d < vertices.size(); ++d) {
        const int part = vertices[d].first;
        w *= pd[part][od.digit[d]];
        if (exact) term *= im.w[part][od.digit[d]];
      }
      if (w == 0.0 && !exact) continue;
      for (std::size_t e = 0; e < h.edges.size(); ++e) {
        std::size_t off = 0;
        for (int i = 0; i < last; ++i) off += stride[i] * od.digit[digit_of[i][h.edges[e][i]]];
        offset[e] = off;
      }
      double value = w;
      for (std::size_t v = 0; v < edges_at.size() && value != 0.0; ++v) {
        double f = 0.0;
        std::int64_t fi = 0;
        for (int x = 0; x < t.dims[last]; ++x) {
          int sign = 1;
          for (int e : edges_at[v]) sign *= t.entries[offset[e] + x];
          f += sign * pd[last][x];
          fi += sign * im.w[last][x];
        }
        value *= f;
        if (exact) term *= fi;
      }
      // Neumaier summation.
      const double y = s + value;
      comp += std::abs(s) >= std::abs(value) ? (s - y) + value : (value - y) + s;
      s = y;
      if (exact) es += term;
    }
    sums[c] = s;
    comps[c] = comp;
    if (exact) exact_sums[c] = es;
  });

  NormResult out;
  out.terms = terms;
  double s = 0.0, comp = 0.0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    const double y = s + sums[c];
    comp += (std::abs(s) >= std::abs(sums[c]) ? (s - y) + sums[c] : (sums[c] - y) + s) + comps[c];
    s = y;
  }
  out.expectation = s + comp;
  if (exact) {
    mpz_class total = 0;
    for (const auto& e : exact_sums) total += e;
    mpz_class denom = 1;
    for (int i = 0; i < n; ++i) {
      mpz_class p;
      mpz_pow_ui(p.get_mpz_t(), im.denom[i].get_mpz_t(), h.parts[i].size());
      denom *= p;
    }
    Rational q(total, denom);
    q.canonicalize();
    out.exact_expectation = q;
    out.expectation = q.get_d();
  }
  out.norm = std::pow(std::abs(out.expectation), 1.0 / static_cast<double>(h.edges.size()));
  return out;
}

namespace {

// Integer product weights over the common denominator of all marginals.
struct ProductWeights {
  std::vector<std::int64_t> w;  // per flat index
  mpz_class denom;
};

ProductWeights product_weights(const GameTensor& t) {
  const IntegerMarginals im = integer_marginals(t);
  mpz_class denom = 1;
  for (const auto& d : im.denom) denom *= d;
  require(denom < (mpz_class(1) << 62) / static_cast<long>(t.size()), ErrorCode::kUnsupported,
          "marginal denominators are too large");
  ProductWeights out;
  out.denom = denom;
  Odometer od{t.dims, {}};
  od.set(0);
  for (std::size_t k = 0; k < t.size(); ++k, od.next()) {
    std::int64_t w = 1;
    for (int i = 0; i < t.players(); ++i) w *= im.w[i][od.digit[i]];
    out.w.push_back(w);
  }
  return out;
}

__int128 signed_sum(const GameTensor& t, const ProductWeights& pw, const SignStrategy& s) {
  Odometer od{t.dims, {}};
  od.set(0);
  __int128 acc = 0;
  for (std::size_t k = 0; k < t.size(); ++k, od.next()) {
    int sign = t.entries[k];
    for (int i = 0; i < t.players(); ++i) sign *= s[i][od.digit[i]];
    acc += static_cast<__int128>(sign) * pw.w[k];
  }
  return acc;
}

Rational to_rational(__int128 v, const mpz_class& denom) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
  mpz_class hi(static_cast<unsigned long>(u >> 64)), lo(static_cast<unsigned long>(u & 0xffffffffffffffffULL));
  mpz_class n = (hi << 64) + lo;
  if (neg) n = -n;
  Rational q(n, denom);
  q.canonicalize();
  return q;
}

}  // namespace

Rational strategy_bias(const GameTensor& t, const SignStrategy& s) {
  t.validate();
  require(static_cast<int>(s.size()) == t.players(), ErrorCode::kIncompleteStrategy, "one sign map per player needed");
  for (int i = 0; i < t.players(); ++i) {
    require(static_cast<int>(s[i].size()) == t.dims[i], ErrorCode::kIncompleteStrategy, "sign map has wrong length");
    for (int v : s[i]) require(v == 1 || v == -1, ErrorCode::kIncompleteStrategy, "strategy signs must be +1 or -1");
  }
  const ProductWeights pw = product_weights(t);
  return to_rational(signed_sum(t, pw, s), pw.denom);
}

ClassicalBias free_game_classical_bias(const GameTensor& t, std::uint64_t budget) {
  t.validate();
  const int n = t.players();
  const int last = n - 1;
  Odometer base;
  for (int i = 0; i < last; ++i)
    for (int x = 0; x < t.dims[i]; ++x) base.radix.push_back(2);
  const std::uint64_t count = saturating_pow(2, base.radix.size());
  require(budget == 0 || saturating_mul(count, t.size()) <= budget, ErrorCode::kBudgetExceeded,
          "classical bias search exceeds the budget");
  const ProductWeights pw = product_weights(t);
  const auto stride = strides(t.dims);
  const std::uint64_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<__int128> best(chunks, -1);
  std::vector<std::uint64_t> best_at(chunks, 0);
  parallel_chunks(static_cast<std::int64_t>(chunks), 0, [&](std::int64_t c) {
    Odometer od = base;
    const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunk;
    const std::uint64_t end = std::min(count, begin + kChunk);
    od.set(begin);
    std::vector<__int128> col(t.dims[last]);
    for (std::uint64_t a = begin; a < end; ++a, od.next()) {
      std::fill(col.begin(), col.end(), 0);
      Odometer x{std::vector<int>(t.dims.begin(), t.dims.end() - 1), {}};
      x.set(0);
      const std::size_t rows = t.size() / t.dims[last];
      for (std::size_t r = 0; r < rows; ++r, x.next()) {
        int sign = 1;
        std::size_t off = 0, digit = 0;
        for (int i = 0; i < last; ++i) {
          if (od.digit[digit + x.digit[i]]) sign = -sign;
          digit += t.dims[i];
          off += stride[i] * x.digit[i];
        }
        for (int z = 0; z < t.dims[last]; ++z) col[z] += static_cast<__int128>(sign * t.entries[off + z]) * pw.w[off + z];
      }
      __int128 total = 0;
      for (auto v : col) total += v < 0 ? -v : v;
      if (total > best[c]) {
        best[c] = total;
        best_at[c] = a;
      }
    }
  });
  std::uint64_t c_best = 0;
  for (std::uint64_t c = 1; c < chunks; ++c)
    if (best[c] > best[c_best]) c_best = c;
  Odometer od = base;
  od.set(best_at[c_best]);
  ClassicalBias out;
  std::size_t digit = 0;
  for (int i = 0; i < last; ++i) {
    std::vector<int> a;
    for (int x = 0; x < t.dims[i]; ++x) a.push_back(od.digit[digit++] ? -1 : 1);
    out.strategy.push_back(std::move(a));
  }
  // Best response of the last player: the sign of its column sum.
  out.strategy.push_back(std::vector<int>(t.dims[last], 1));
  std::vector<__int128> col(t.dims[last], 0);
  Odometer x{t.dims, {}};
  x.set(0);
  for (std::size_t k = 0; k < t.size(); ++k, x.next()) {
    int sign = t.entries[k];
    for (int i = 0; i < last; ++i) sign *= out.strategy[i][x.digit[i]];
    col[x.digit[last]] += static_cast<__int128>(sign) * pw.w[k];
  }
  for (int z = 0; z < t.dims[last]; ++z) out.strategy[last][z] = col[z] < 0 ? -1 : 1;
  out.bias = to_rational(best[c_best], pw.denom);
  return out;
}

Extraction extract_classical_strategy(const GameTensor& t, const NormOptions& options) {
  t.validate();
  const int n = t.players();
  require(n >= 2, ErrorCode::kPrecondition, "extraction needs at least 2 players");
  const Hypergraph h = build_Ht(n);
  const auto& star = h.edges[0];
  std::vector<const std::vector<int>*> companion(n);
  for (int i = 0; i < n; ++i)
    for (std::size_t e = 1; e < h.edges.size(); ++e)
      if (h.edges[e][i] == star[i]) companion[i] = &h.edges[e];

  // Only vertices on the companion edges affect the extracted strategy.
  std::map<std::pair<int, int>, int> digit_of;
  Odometer base;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      auto key = std::make_pair(j, (*companion[i])[j]);
      if (digit_of.count(key)) continue;
      digit_of[key] = static_cast<int>(base.radix.size());
      base.radix.push_back(t.dims[j]);
    }
  std::uint64_t count = 1;
  for (int r : base.radix) count = saturating_mul(count, r);
  require(options.budget == 0 || saturating_mul(count, t.size()) <= options.budget, ErrorCode::kBudgetExceeded,
          "extraction needs " + std::to_string(count) + " assignments");

  const ProductWeights pw = product_weights(t);
  const auto stride = strides(t.dims);
  auto strategy_for = [&](const Odometer& od) {
    SignStrategy s(n);
    for (int i = 0; i < n; ++i) {
      std::size_t off = 0;
      for (int j = 0; j < n; ++j)
        if (j != i) off += stride[j] * od.digit[digit_of.at({j, (*companion[i])[j]})];
      for (int x = 0; x < t.dims[i]; ++x) s[i].push_back(t.entries[off + stride[i] * x]);
    }
    return s;
  };

  const std::uint64_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<__int128> best(chunks, -1);
  std::vector<std::uint64_t> best_at(chunks, 0);
  parallel_chunks(static_cast<std::int64_t>(chunks), options.workers, [&](std::int64_t c) {
    Odometer od = base;
    const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunk;
    const std::uint64_t end = std::min(count, begin + kChunk);
    od.set(begin);
    for (std::uint64_t a = begin; a < end; ++a, od.next()) {
      __int128 v = signed_sum(t, pw, strategy_for(od));
      if (v < 0) v = -v;
      if (v > best[c]) {
        best[c] = v;
        best_at[c] = a;
      }
    }
  });
  std::uint64_t c_best = 0;
  for (std::uint64_t c = 1; c < chunks; ++c)
    if (best[c] > best[c_best]) c_best = c;
  Odometer od = base;
  od.set(best_at[c_best]);
  Extraction out;
  out.strategy = strategy_for(od);
  if (signed_sum(t, pw, out.strategy) < 0)
    for (auto& v : out.strategy[0]) v = -v;
  out.bias = to_rational(best[c_best], pw.denom);
  out.assignments = count;
  return out;
}

GameTensor tensor_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("dims") || !doc.contains("entries"))
    fail(ErrorCode::kParse, "tensor needs \"dims\" and \"entries\"");
  GameTensor t;
  try {
    t.dims = doc.at("dims").get<std::vector<int>>();
    for (const auto& e : doc.at("entries")) t.entries.push_back(static_cast<std::int8_t>(e.get<int>()));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed tensor: ") + e.what());
  }
  if (doc.contains("marginals")) {
    for (const auto& row : doc.at("marginals")) {
      std::vector<Rational> p;
      for (const auto& v : row) p.push_back(rational_from_json(v));
      t.marginals.push_back(std::move(p));
    }
  } else {
    for (int d : t.dims) t.marginals.push_back(std::vector<Rational>(std::max(d, 1), Rational(1, std::max(d, 1))));
  }
  t.validate();
  return t;
}

Json tensor_to_json(const GameTensor& t) {
  Json doc;
  doc["dims"] = t.dims;
  Json entries = Json::array();
  for (auto e : t.entries) entries.push_back(static_cast<int>(e));
  doc["entries"] = entries;
  Json marg = Json::array();
  for (const auto& p : t.marginals) {
    Json row = Json::array();
    for (const auto& r : p) row.push_back(to_string(r));
    marg.push_back(row);
  }
  doc["marginals"] = marg;
  return doc;
}

Json hypergraph_to_json(const Hypergraph& h) {
  Json doc;
  doc["parts"] = h.parts;
  Json edges = Json::array();
  for (const auto& e : h.edges) {
    Json row = Json::array();
    for (int i = 0; i < h.arity(); ++i) row.push_back(h.parts[i][e[i]]);
    edges.push_back(row);
  }
  doc["edges"] = edges;
  return doc;
}

}  // namespace nlg
