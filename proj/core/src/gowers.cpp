#include "nlg/gowers.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nlg/errors.hpp"
#include "nlg/parallel.hpp"

namespace nlg {

namespace {

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

int mod(long a, int p) { return static_cast<int>(((a % p) + p) % p); }

int pow_mod(long b, long e, int p) {
  long r = 1 % p;
  b = mod(b, p);
  while (e > 0) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return static_cast<int>(r);
}

std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > UINT64_MAX / base) return UINT64_MAX;
    r *= base;
  }
  return r;
}

std::complex<double> root_of_unity(int k, int p) {
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(mod(k, p)) / p);
}

constexpr int kAddTableLimit = 2048;

Rational ratio(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace

FiniteAbelianGroup::FiniteAbelianGroup(std::vector<int> moduli) : moduli_(std::move(moduli)) {
  require(!moduli_.empty(), ErrorCode::kPrecondition, "group needs at least one factor");
  for (int n : moduli_) {
    require(n >= 2, ErrorCode::kPrecondition, "group moduli must be at least 2");
    require(static_cast<long>(size_) * n <= (1L << 26), ErrorCode::kUnsupported, "group is too large");
    size_ *= n;
  }
  neg_.resize(size_);
  for (int a = 0; a < size_; ++a) {
    auto c = decode(a);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = mod(-c[i], moduli_[i]);
    neg_[a] = encode(c);
  }
  if (size_ <= kAddTableLimit) {
    add_.resize(static_cast<std::size_t>(size_) * size_);
    for (int a = 0; a < size_; ++a) {
      const auto ca = decode(a);
      for (int b = 0; b < size_; ++b) {
        auto cb = decode(b);
        for (std::size_t i = 0; i < cb.size(); ++i) cb[i] = (cb[i] + ca[i]) % moduli_[i];
        add_[static_cast<std::size_t>(a) * size_ + b] = encode(cb);
      }
    }
  }
}

int FiniteAbelianGroup::characteristic() const {
  int best = 0;
  for (int n : moduli_) {
    int q = n;
    for (int d = 2; d <= n; ++d)
      if (n % d == 0) {
        q = d;
        break;
      }
    if (best == 0 || q < best) best = q;
  }
  return best;
}

std::vector<int> FiniteAbelianGroup::decode(int index) const {
  std::vector<int> c(moduli_.size());
  for (int i = rank() - 1; i >= 0; --i) {
    c[i] = index % moduli_[i];
    index /= moduli_[i];
  }
  return c;
}

int FiniteAbelianGroup::encode(const std::vector<int>& components) const {
  int index = 0;
  for (int i = 0; i < rank(); ++i) index = index * moduli_[i] + mod(components[i], moduli_[i]);
  return index;
}

int FiniteAbelianGroup::scale(long c, int a) const {
  auto comp = decode(a);
  for (int i = 0; i < rank(); ++i) comp[i] = mod(c * comp[i], moduli_[i]);
  return encode(comp);
}

GroupFunction sign_function(const FiniteAbelianGroup& g, const std::vector<int>& rho) {
  require(static_cast<int>(rho.size()) == g.size(), ErrorCode::kDimensionMismatch, "predicate has wrong length");
  GroupFunction f{g, {}};
  for (int v : rho) {
    require(v == 0 || v == 1, ErrorCode::kPrecondition, "predicate values must be 0 or 1");
    f.values.emplace_back(v ? -1.0 : 1.0, 0.0);
  }
  return f;
}

namespace {

// Adds b to every element when the table is unavailable.
int group_add(const FiniteAbelianGroup& g, int a, int b) {
  if (g.size() <= kAddTableLimit) return g.add(a, b);
  auto ca = g.decode(a), cb = g.decode(b);
  for (int i = 0; i < g.rank(); ++i) ca[i] += cb[i];
  return g.encode(ca);
}

std::complex<double> gowers_inner(const FiniteAbelianGroup& g, const std::vector<std::complex<double>>& f, int s) {
  const int n = g.size();
  if (s == 0) {
    std::complex<double> acc = 0.0;
    for (const auto& v : f) acc += v;
    return acc / static_cast<double>(n);
  }
  std::vector<std::complex<double>> d(n);
  std::complex<double> acc = 0.0;
  for (int h = 0; h < n; ++h) {
    for (int x = 0; x < n; ++x) d[x] = f[group_add(g, x, h)] * std::conj(f[x]);
    acc += gowers_inner(g, d, s - 1);
  }
  return acc / static_cast<double>(n);
}

}  // namespace

GowersResult gowers_norm(const GroupFunction& f, int s, std::uint64_t budget) {
  require(s >= 1, ErrorCode::kPrecondition, "Gowers norm order must be at least 1");
  require(static_cast<int>(f.values.size()) == f.group.size(), ErrorCode::kDimensionMismatch,
          "function has wrong number of values");
  const std::uint64_t cost = saturating_pow(f.group.size(), s + 1);
  require(budget == 0 || cost <= budget, ErrorCode::kBudgetExceeded,
          "Gowers norm needs " + std::to_string(cost) + " terms");
  GowersResult r;
  r.inner = gowers_inner(f.group, f.values, s);
  double scale = 1.0;
  for (const auto& v : f.values) scale = std::max(scale, std::abs(v));
  const double tol = 1e-9 * std::pow(scale, std::ldexp(1.0, s));
  require(std::abs(r.inner.imag()) <= tol && r.inner.real() >= -tol, ErrorCode::kPrecondition,
          "Gowers expectation is not a nonnegative real");
  r.norm = std::pow(std::max(0.0, r.inner.real()), std::ldexp(1.0, -s));
  return r;
}

int LinearFormsSystem::evaluate(int form, const std::vector<int>& g) const {
  const AffineForm& f = forms[form];
  int acc = f.constant;
  for (int j = 0; j < variables; ++j)
    if (f.coeffs[j] != 0) acc = group_add(group, acc, group.scale(f.coeffs[j], g[j]));
  return acc;
}

namespace {

int rational_rank(std::vector<std::vector<Rational>> rows) {
  int rank = 0;
  const int cols = rows.empty() ? 0 : static_cast<int>(rows[0].size());
  for (int c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    int pivot = -1;
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
      if (rows[r][c] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(rows[rank], rows[pivot]);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
      if (r == rank || rows[r][c] == 0) continue;
      const Rational f = rows[r][c] / rows[rank][c];
      for (int k = c; k < cols; ++k) rows[r][k] -= f * rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

bool in_span(const std::vector<std::vector<Rational>>& basis, const std::vector<Rational>& v) {
  if (basis.empty()) {
    for (const auto& x : v)
      if (x != 0) return false;
    return true;
  }
  auto with = basis;
  with.push_back(v);
  return rational_rank(with) == rational_rank(basis);
}

}  // namespace

std::optional<int> cs_complexity(const LinearFormsSystem& sys, int s_max) {
  const int count = static_cast<int>(sys.forms.size());
  require(count >= 2, ErrorCode::kPrecondition, "a system needs at least two forms");
  std::vector<std::vector<Rational>> vec;
  for (const auto& f : sys.forms) {
    std::vector<Rational> v;
    for (int c : sys.group.decode(f.constant)) v.emplace_back(c);
    for (long c : f.coeffs) v.emplace_back(c);
    vec.push_back(std::move(v));
  }
  int worst = 0;
  for (int i = 0; i < count; ++i) {
    std::vector<int> others;
    for (int j = 0; j < count; ++j)
      if (j != i) others.push_back(j);
    int found = -1;
    for (int s = 0; s <= s_max && found < 0; ++s) {
      const int classes = s + 1;
      std::vector<int> assign(others.size(), 0);
      while (true) {
        bool ok = true;
        for (int c = 0; c < classes && ok; ++c) {
          std::vector<std::vector<Rational>> basis;
          for (std::size_t k = 0; k < others.size(); ++k)
            if (assign[k] == c) basis.push_back(vec[others[k]]);
          if (in_span(basis, vec[i])) ok = false;
        }
        if (ok) {
          found = s;
          break;
        }
        int k = static_cast<int>(assign.size());
        while (k-- > 0) {
          if (++assign[k] < classes) break;
          assign[k] = 0;
        }
        if (k < 0) break;
      }
    }
    if (found < 0) return std::nullopt;
    worst = std::max(worst, found);
  }
  return worst;
}

LinearFormsGame line_game(int t, int p, int n, const std::vector<int>& tau) {
  require(t >= 1, ErrorCode::kPrecondition, "line game needs at least one player");
  require(is_prime(p), ErrorCode::kPrecondition, "line game needs a prime field");
  require(p >= t, ErrorCode::kCharacteristic,
          "field characteristic " + std::to_string(p) + " is below the player count " + std::to_string(t));
  require(n >= 1, ErrorCode::kPrecondition, "line game needs dimension at least 1");
  LinearFormsGame g{{FiniteAbelianGroup::vector_space(p, n), 2, {}}, tau};
  require(static_cast<int>(tau.size()) == g.system.group.size(), ErrorCode::kDimensionMismatch,
          "predicate needs one value per point of F_p^n");
  for (int v : tau) require(v == 0 || v == 1, ErrorCode::kPrecondition, "predicate values must be 0 or 1");
  g.system.forms.push_back({0, {0, 1}});
  for (int i = 1; i <= t; ++i) g.system.forms.push_back({0, {1, i - 1}});
  return g;
}

std::vector<int> magic_square_tau() {
  const FiniteAbelianGroup g = FiniteAbelianGroup::vector_space(3, 2);
  std::vector<int> tau(g.size(), 1);
  tau[g.encode({1, 0})] = 0;
  tau[g.encode({2, 0})] = 0;
  return tau;
}

namespace {

// Question of every form at every point of Gamma^m.
struct PointTable {
  int points = 0;
  std::vector<std::vector<int>> q;  // [point][form]
};

PointTable point_table(const LinearFormsSystem& sys) {
  PointTable t;
  const std::uint64_t n = saturating_pow(sys.group.size(), sys.variables);
  require(n <= (1u << 24), ErrorCode::kUnsupported, "too many referee points");
  t.points = static_cast<int>(n);
  std::vector<int> g(sys.variables, 0);
  for (int k = 0; k < t.points; ++k) {
    std::vector<int> row;
    for (int f = 0; f < static_cast<int>(sys.forms.size()); ++f) row.push_back(sys.evaluate(f, g));
    t.q.push_back(std::move(row));
    int j = sys.variables;
    while (j-- > 0) {
      if (++g[j] < sys.group.size()) break;
      g[j] = 0;
    }
  }
  return t;
}

void check_game(const LinearFormsGame& game) {
  require(static_cast<int>(game.rho.size()) == game.system.group.size(), ErrorCode::kDimensionMismatch,
          "predicate has wrong length");
  require(game.system.players() >= 1, ErrorCode::kPrecondition, "game needs at least one player");
  for (const auto& f : game.system.forms)
    require(static_cast<int>(f.coeffs.size()) == game.system.variables, ErrorCode::kDimensionMismatch,
            "form has wrong number of coefficients");
}

long signed_total(const LinearFormsGame& game, const PointTable& pts, const GroupSignStrategy& s) {
  long acc = 0;
  const int t = game.system.players();
  for (const auto& row : pts.q) {
    int sign = game.rho[row[0]] ? -1 : 1;
    for (int i = 1; i <= t; ++i) sign *= s[i - 1][row[i]];
    acc += sign;
  }
  return acc;
}

}  // namespace

Rational linear_forms_strategy_bias(const LinearFormsGame& game, const GroupSignStrategy& s) {
  check_game(game);
  require(static_cast<int>(s.size()) == game.system.players(), ErrorCode::kIncompleteStrategy,
          "one sign map per player needed");
  for (const auto& a : s) {
    require(static_cast<int>(a.size()) == game.system.group.size(), ErrorCode::kIncompleteStrategy,
            "sign map has wrong length");
    for (int v : a) require(v == 1 || v == -1, ErrorCode::kIncompleteStrategy, "strategy signs must be +1 or -1");
  }
  const PointTable pts = point_table(game.system);
  return ratio(signed_total(game, pts, s), pts.points);
}

LinearFormsBias linear_forms_bias(const LinearFormsGame& game, std::uint64_t budget, int workers) {
  check_game(game);
  const PointTable pts = point_table(game.system);
  const int t = game.system.players();
  const int n = game.system.group.size();
  const std::uint64_t bits = static_cast<std::uint64_t>(n) * (t - 1);
  const std::uint64_t total = bits >= 63 ? UINT64_MAX : (1ULL << bits);
  LinearFormsBias out;
  out.complete = budget == 0 || total <= budget;
  const std::uint64_t count = out.complete ? total : budget;
  require(count != UINT64_MAX, ErrorCode::kBudgetExceeded, "strategy space is too large to search without a budget");
  out.searched = count;

  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<long> best(chunks, -1);
  std::vector<std::uint64_t> best_at(chunks, 0);
  auto sign_of = [&](std::uint64_t prefix, int player, int x) {
    return (prefix >> (static_cast<std::uint64_t>(player) * n + x)) & 1 ? -1 : 1;
  };
  parallel_chunks(static_cast<std::int64_t>(chunks), workers, [&](std::int64_t c) {
    std::vector<long> col(n);
    const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunk;
    const std::uint64_t end = std::min(count, begin + kChunk);
    for (std::uint64_t a = begin; a < end; ++a) {
      std::fill(col.begin(), col.end(), 0);
      for (const auto& row : pts.q) {
        int sign = game.rho[row[0]] ? -1 : 1;
        for (int i = 1; i < t; ++i) sign *= sign_of(a, i - 1, row[i]);
        col[row[t]] += sign;
      }
      long v = 0;
      for (long x : col) v += x < 0 ? -x : x;
      if (v > best[c]) {
        best[c] = v;
        best_at[c] = a;
      }
    }
  });
  std::uint64_t cb = 0;
  for (std::uint64_t c = 1; c < chunks; ++c)
    if (best[c] > best[cb]) cb = c;
  const std::uint64_t a = best_at[cb];
  out.strategy.assign(t, std::vector<int>(n, 1));
  for (int i = 0; i + 1 < t; ++i)
    for (int x = 0; x < n; ++x) out.strategy[i][x] = sign_of(a, i, x);
  std::vector<long> col(n, 0);
  for (const auto& row : pts.q) {
    int sign = game.rho[row[0]] ? -1 : 1;
    for (int i = 1; i < t; ++i) sign *= out.strategy[i - 1][row[i]];
    col[row[t]] += sign;
  }
  for (int x = 0; x < n; ++x) out.strategy[t - 1][x] = col[x] < 0 ? -1 : 1;
  out.bias = ratio(best[cb], pts.points);
  return out;
}

ModMGame linear_forms_to_game(const LinearFormsGame& game) {
  check_game(game);
  const PointTable pts = point_table(game.system);
  const int t = game.system.players();
  std::map<std::vector<int>, std::pair<int, long>> merged;
  for (const auto& row : pts.q) {
    std::vector<int> q(row.begin() + 1, row.end());
    auto [it, inserted] = merged.try_emplace(q, game.rho[row[0]], 0);
    require(it->second.first == game.rho[row[0]], ErrorCode::kUnsupported,
            "one question tuple carries two predicate values");
    ++it->second.second;
  }
  std::vector<std::string> labels;
  for (int x = 0; x < game.system.group.size(); ++x) labels.push_back(std::to_string(x));
  std::vector<SupportEntry> support;
  for (const auto& [q, v] : merged) support.push_back({q, ratio(v.second, pts.points), v.first});
  return ModMGame(2, std::vector<std::vector<std::string>>(t, labels), std::move(support));
}

VonNeumannCheck von_neumann_check(const LinearFormsGame& game, std::uint64_t budget) {
  check_game(game);
  const auto s = cs_complexity(game.system);
  require(s.has_value(), ErrorCode::kPrecondition, "system has no finite complexity up to 4");
  const LinearFormsBias b = linear_forms_bias(game, budget);
  require(b.complete, ErrorCode::kBudgetExceeded, "bias search exceeds the budget");
  VonNeumannCheck out;
  out.beta = b.bias;
  out.s = *s;
  out.u_norm = gowers_norm(sign_function(game.system.group, game.rho), *s + 1, budget).norm;
  out.holds = b.bias.get_d() <= out.u_norm + 1e-9;
  return out;
}

void FpPolynomial::normalize() {
  std::map<std::vector<int>, int> out;
  for (const auto& [key, c] : coeffs) {
    std::vector<int> e = key;
    require(static_cast<int>(e.size()) == n, ErrorCode::kDimensionMismatch, "monomial has wrong number of exponents");
    for (int& x : e) {
      require(x >= 0, ErrorCode::kPrecondition, "negative exponent");
      if (x >= p) x = (x - 1) % (p - 1) + 1;
    }
    int& slot = out[e];
    slot = mod(static_cast<long>(slot) + c, p);
  }
  coeffs.clear();
  for (const auto& [e, c] : out)
    if (c != 0) coeffs.emplace(e, c);
}

int FpPolynomial::degree() const {
  int d = -1;
  for (const auto& [e, c] : coeffs) {
    if (mod(c, p) == 0) continue;
    int s = 0;
    for (int x : e) s += x;
    d = std::max(d, s);
  }
  return d;
}

int FpPolynomial::operator()(const std::vector<int>& x) const {
  long acc = 0;
  for (const auto& [e, c] : coeffs) {
    long term = mod(c, p);
    for (int k = 0; k < n; ++k) term = term * pow_mod(x[k], e[k], p) % p;
    acc = (acc + term) % p;
  }
  return static_cast<int>(acc);
}

namespace {

// Solves V alpha = e_target mod p with V[k][j] = j^k, 0 <= j, k < d.
std::vector<int> vandermonde_solve(int d, int p, int target) {
  std::vector<std::vector<long>> a(d, std::vector<long>(d + 1, 0));
  for (int k = 0; k < d; ++k) {
    for (int j = 0; j < d; ++j) a[k][j] = (k == 0) ? 1 : pow_mod(j, k, p);
    a[k][d] = k == target ? 1 : 0;
  }
  for (int c = 0; c < d; ++c) {
    int pivot = -1;
    for (int r = c; r < d; ++r)
      if (a[r][c] % p != 0) {
        pivot = r;
        break;
      }
    require(pivot >= 0, ErrorCode::kSingularSystem, "Vandermonde system is singular mod " + std::to_string(p));
    std::swap(a[c], a[pivot]);
    const long inv = pow_mod(a[c][c], p - 2, p);
    for (auto& v : a[c]) v = v * inv % p;
    for (int r = 0; r < d; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const long f = a[r][c];
      for (int k = 0; k <= d; ++k) a[r][k] = mod(a[r][k] - f * a[c][k], p);
    }
  }
  std::vector<int> alpha(d);
  for (int j = 0; j < d; ++j) alpha[j] = static_cast<int>(a[j][d]);
  return alpha;
}

}  // namespace

std::vector<FpPolynomial> polynomial_split(const FpPolynomial& poly, int d) {
  require(is_prime(poly.p), ErrorCode::kPrecondition, "polynomial field size must be prime");
  require(d >= 1, ErrorCode::kPrecondition, "split needs at least one part");
  require(d <= poly.p, ErrorCode::kSingularSystem,
          "split into " + std::to_string(d) + " parts needs p >= " + std::to_string(d));
  FpPolynomial P = poly;
  P.normalize();
  require(P.degree() <= d - 1, ErrorCode::kPrecondition, "polynomial degree must be below the number of parts");
  std::vector<FpPolynomial> parts(d, FpPolynomial{P.p, P.n, {}});
  for (int i = 0; i <= std::max(P.degree(), 0); ++i) {
    const std::vector<int> alpha = vandermonde_solve(d, P.p, i);
    for (const auto& [e, c] : P.coeffs) {
      int s = 0;
      for (int x : e) s += x;
      if (s != i) continue;
      for (int j = 0; j < d; ++j) parts[j].coeffs[e] = mod(static_cast<long>(alpha[j]) * c, P.p);
    }
  }
  for (auto& q : parts) q.normalize();
  return parts;
}

bool verify_split(const FpPolynomial& poly, const std::vector<FpPolynomial>& parts, std::uint64_t budget) {
  const FiniteAbelianGroup g = FiniteAbelianGroup::vector_space(poly.p, poly.n);
  const std::uint64_t cost = saturating_pow(g.size(), 2);
  require(budget == 0 || cost <= budget, ErrorCode::kBudgetExceeded, "split verification exceeds the budget");
  for (int x = 0; x < g.size(); ++x)
    for (int y = 0; y < g.size(); ++y) {
      const auto cx = g.decode(x), cy = g.decode(y);
      long acc = 0;
      for (std::size_t j = 0; j < parts.size(); ++j) {
        std::vector<int> pt(poly.n);
        for (int k = 0; k < poly.n; ++k) pt[k] = mod(cx[k] + static_cast<long>(j) * cy[k], poly.p);
        acc += parts[j](pt);
      }
      if (mod(acc, poly.p) != poly(cy)) return false;
    }
  return true;
}

namespace {

std::complex<double> unit_sample(Rng& rng) { return std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform01()); }

int round_sign(std::complex<double> z, std::complex<double> w) { return (z * std::conj(w)).real() >= 0.0 ? 1 : -1; }

}  // namespace

ComplexEstimate complex_rounding_identity(std::complex<double> z, std::uint64_t seed, std::uint64_t samples) {
  require(samples >= 1, ErrorCode::kPrecondition, "rounding needs at least one sample");
  return monte_carlo_complex(seed, samples, 0, [z](Rng& rng) {
    const std::complex<double> w = unit_sample(rng);
    return std::numbers::pi / 2.0 * static_cast<double>(round_sign(z, w)) * std::abs(z) * w;
  });
}

RoundedStrategy complex_round(const LinearFormsGame& game, const std::vector<std::vector<std::complex<double>>>& z,
                              std::uint64_t seed, std::uint64_t samples) {
  check_game(game);
  require(samples >= 1, ErrorCode::kPrecondition, "rounding needs at least one sample");
  const int t = game.system.players();
  const int n = game.system.group.size();
  require(static_cast<int>(z.size()) == t, ErrorCode::kDimensionMismatch, "one unit strategy per player needed");
  for (const auto& zi : z) {
    require(static_cast<int>(zi.size()) == n, ErrorCode::kDimensionMismatch, "unit strategy has wrong length");
    for (const auto& v : zi)
      require(std::abs(std::abs(v) - 1.0) <= 1e-9, ErrorCode::kPrecondition, "strategies must have unit modulus");
  }
  const PointTable pts = point_table(game.system);
  const double scale = std::pow(std::numbers::pi / 2.0, t);

  constexpr std::uint64_t kChunk = kMonteCarloChunk;
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  struct ChunkResult {
    double abs_sum = 0.0, abs_sq = 0.0;
    std::complex<double> c_sum = 0.0;
    double re_sq = 0.0, im_sq = 0.0;
    long best = -1;
    GroupSignStrategy best_strategy;
  };
  std::vector<ChunkResult> res(chunks);
  parallel_chunks(static_cast<std::int64_t>(chunks), 0, [&](std::int64_t c) {
    Rng rng(substream_seed(seed, static_cast<std::uint64_t>(c)));
    ChunkResult& r = res[c];
    const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunk;
    const std::uint64_t end = std::min(samples, begin + kChunk);
    GroupSignStrategy s(t, std::vector<int>(n));
    for (std::uint64_t k = begin; k < end; ++k) {
      std::complex<double> wprod = 1.0;
      for (int i = 0; i < t; ++i) {
        const std::complex<double> w = unit_sample(rng);
        wprod *= w;
        for (int x = 0; x < n; ++x) s[i][x] = round_sign(z[i][x], w);
      }
      const long total = signed_total(game, pts, s);
      const double b = static_cast<double>(total) / pts.points;
      r.abs_sum += std::abs(b);
      r.abs_sq += b * b;
      const std::complex<double> est = scale * b * wprod;
      r.c_sum += est;
      r.re_sq += est.real() * est.real();
      r.im_sq += est.imag() * est.imag();
      const long a = total < 0 ? -total : total;
      if (a > r.best) {
        r.best = a;
        r.best_strategy = s;
      }
    }
  });
  RoundedStrategy out;
  double abs_sum = 0.0, abs_sq = 0.0, re_sq = 0.0, im_sq = 0.0;
  std::complex<double> c_sum = 0.0;
  std::size_t best = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    abs_sum += res[c].abs_sum;
    abs_sq += res[c].abs_sq;
    c_sum += res[c].c_sum;
    re_sq += res[c].re_sq;
    im_sq += res[c].im_sq;
    if (res[c].best > res[best].best) best = c;
  }
  const double m = static_cast<double>(samples);
  auto error = [&](double sq, double mean) {
    return samples < 2 ? 0.0 : std::sqrt(std::max(0.0, (sq - m * mean * mean) / (m - 1)) / m);
  };
  out.mean_abs_bias = {abs_sum / m, error(abs_sq, abs_sum / m), samples};
  out.complex_bias.mean = c_sum / m;
  out.complex_bias.std_error_real = error(re_sq, out.complex_bias.mean.real());
  out.complex_bias.std_error_imag = error(im_sq, out.complex_bias.mean.imag());
  out.complex_bias.samples = samples;
  out.strategy = res[best].best_strategy;
  // Flip the first player if needed so the reported bias is nonnegative.
  if (signed_total(game, pts, out.strategy) < 0)
    for (auto& v : out.strategy[0]) v = -v;
  out.bias = ratio(signed_total(game, pts, out.strategy), pts.points);
  return out;
}

Witness witness_search(const GroupFunction& f, int p, int s, std::uint64_t budget) {
  require(is_prime(p), ErrorCode::kPrecondition, "witness search needs a prime field");
  for (int q : f.group.moduli()) require(q == p, ErrorCode::kPrecondition, "function must live on F_p^n");
  require(p > s, ErrorCode::kCharacteristic, "witness search needs p > s");
  require(s >= 0, ErrorCode::kPrecondition, "degree must be nonnegative");
  const int n = f.group.rank();
  const int size = f.group.size();

  // Monomials by total degree, lexicographic within a degree.
  std::vector<std::vector<int>> monomials;
  for (int deg = 0; deg <= s; ++deg) {
    std::vector<int> e(n, 0);
    while (true) {
      int total = 0;
      for (int x : e) total += x;
      if (total == deg) monomials.push_back(e);
      int k = n;
      while (k-- > 0) {
        if (++e[k] < p) break;
        e[k] = 0;
      }
      if (k < 0) break;
    }
  }
  std::sort(monomials.begin(), monomials.end(), [](const auto& a, const auto& b) {
    int da = 0, db = 0;
    for (int x : a) da += x;
    for (int x : b) db += x;
    if (da != db) return da < db;
    return a > b;
  });
  const int m = static_cast<int>(monomials.size());
  std::vector<std::vector<int>> mono_value(m, std::vector<int>(size));
  for (int k = 0; k < m; ++k)
    for (int x = 0; x < size; ++x) {
      const auto c = f.group.decode(x);
      long v = 1;
      for (int j = 0; j < n; ++j) v = v * pow_mod(c[j], monomials[k][j], p) % p;
      mono_value[k][x] = static_cast<int>(v);
    }
  std::vector<std::complex<double>> phase(p);
  for (int j = 0; j < p; ++j) phase[j] = root_of_unity(j, p);

  const std::uint64_t total = saturating_pow(p, m);
  Witness out;
  out.complete = budget == 0 || total <= budget;
  const std::uint64_t count = out.complete ? total : budget;
  require(count != UINT64_MAX, ErrorCode::kBudgetExceeded, "polynomial space is too large to search without a budget");
  out.searched = count;

  constexpr std::uint64_t kChunk = 4096;
  constexpr double kTie = 1e-12;
  const std::uint64_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<double> best(chunks, -1.0);
  std::vector<std::uint64_t> best_at(chunks, 0);
  parallel_chunks(static_cast<std::int64_t>(chunks), 0, [&](std::int64_t c) {
    const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunk;
    const std::uint64_t end = std::min(count, begin + kChunk);
    std::vector<int> digit(m);
    std::uint64_t idx = begin;
    for (int k = m - 1; k >= 0; --k) {
      digit[k] = static_cast<int>(idx % p);
      idx /= p;
    }
    std::vector<int> value(size, 0);
    for (int x = 0; x < size; ++x) {
      long v = 0;
      for (int k = 0; k < m; ++k) v += static_cast<long>(digit[k]) * mono_value[k][x];
      value[x] = static_cast<int>(v % p);
    }
    for (std::uint64_t a = begin; a < end; ++a) {
      std::complex<double> acc = 0.0;
      for (int x = 0; x < size; ++x) acc += f.values[x] * phase[value[x]];
      const double corr = std::abs(acc) / size;
      if (corr > best[c] + kTie) {
        best[c] = corr;
        best_at[c] = a;
      }
      for (int k = m - 1; k >= 0; --k) {
        if (++digit[k] < p) {
          for (int x = 0; x < size; ++x) value[x] = (value[x] + mono_value[k][x]) % p;
          break;
        }
        digit[k] = 0;
        for (int x = 0; x < size; ++x) value[x] = mod(value[x] - static_cast<long>(p - 1) * mono_value[k][x], p);
      }
    }
  });
  std::uint64_t cb = 0;
  for (std::uint64_t c = 1; c < chunks; ++c)
    if (best[c] > best[cb] + kTie) cb = c;
  out.correlation = best[cb];
  out.poly = FpPolynomial{p, n, {}};
  std::uint64_t idx = best_at[cb];
  for (int k = m - 1; k >= 0; --k) {
    const int d = static_cast<int>(idx % p);
    idx /= p;
    if (d != 0) out.poly.coeffs[monomials[k]] = d;
  }
  return out;
}

WitnessStrategy strategy_from_witness(const LinearFormsGame& game, const FpPolynomial& poly, std::uint64_t seed,
                                      std::uint64_t samples) {
  check_game(game);
  const int t = game.system.players();
  const auto& moduli = game.system.group.moduli();
  for (int q : moduli) require(q == poly.p, ErrorCode::kDimensionMismatch, "polynomial field differs from the game's");
  require(static_cast<int>(moduli.size()) == poly.n, ErrorCode::kDimensionMismatch,
          "polynomial dimension differs from the game's");
  require(poly.p >= t, ErrorCode::kCharacteristic, "field characteristic is below the player count");
  WitnessStrategy out;
  out.parts = polynomial_split(poly, t);
  const int n = game.system.group.size();
  std::vector<std::vector<std::complex<double>>> z(t, std::vector<std::complex<double>>(n));
  for (int i = 0; i < t; ++i)
    for (int x = 0; x < n; ++x) z[i][x] = root_of_unity(out.parts[i](game.system.group.decode(x)), poly.p);
  const PointTable pts = point_table(game.system);
  std::complex<double> acc = 0.0;
  for (const auto& row : pts.q) {
    std::complex<double> v = game.rho[row[0]] ? -1.0 : 1.0;
    for (int i = 1; i <= t; ++i) v *= z[i - 1][row[i]];
    acc += v;
  }
  out.correlation = std::abs(acc) / pts.points;
  out.rounded = complex_round(game, z, seed, samples);
  return out;
}

double parallel_repetition_bound(const LinearFormsGame& game, int k) {
  check_game(game);
  require(k >= 1, ErrorCode::kPrecondition, "repetition count must be positive");
  const double u = gowers_norm(sign_function(game.system.group, game.rho), game.system.players()).norm;
  return std::pow((1.0 + u) / 2.0, k);
}

ProductCheck gowers_product_check(const GroupFunction& f, int k, int s) {
  require(k >= 1, ErrorCode::kPrecondition, "power must be positive");
  std::vector<int> moduli;
  for (int i = 0; i < k; ++i) moduli.insert(moduli.end(), f.group.moduli().begin(), f.group.moduli().end());
  GroupFunction power{FiniteAbelianGroup(moduli), {}};
  const int n = f.group.size();
  for (int x = 0; x < power.group.size(); ++x) {
    std::complex<double> v = 1.0;
    int rest = x;
    for (int i = 0; i < k; ++i) {
      v *= f.values[rest % n];
      rest /= n;
    }
    power.values.push_back(v);
  }
  ProductCheck out;
  out.lhs = gowers_norm(power, s + 1).norm;
  out.rhs = std::pow(gowers_norm(f, s + 1).norm, k);
  return out;
}

GroupFunction group_function_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("moduli") || !doc.contains("values"))
    fail(ErrorCode::kParse, "function needs \"moduli\" and \"values\"");
  std::vector<int> moduli;
  std::vector<std::complex<double>> values;
  try {
    moduli = doc.at("moduli").get<std::vector<int>>();
    for (const auto& v : doc.at("values")) {
      if (v.is_array() && v.size() == 2)
        values.emplace_back(v[0].get<double>(), v[1].get<double>());
      else
        values.emplace_back(v.get<double>(), 0.0);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed function: ") + e.what());
  }
  GroupFunction f{FiniteAbelianGroup(moduli), std::move(values)};
  require(static_cast<int>(f.values.size()) == f.group.size(), ErrorCode::kDimensionMismatch,
          "function has " + std::to_string(f.values.size()) + " values for a group of size " +
              std::to_string(f.group.size()));
  return f;
}

Json group_function_to_json(const GroupFunction& f) {
  Json doc;
  doc["moduli"] = f.group.moduli();
  Json values = Json::array();
  for (const auto& v : f.values) values.push_back({v.real(), v.imag()});
  doc["values"] = values;
  return doc;
}

FpPolynomial fp_polynomial_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("p") || !doc.contains("n"))
    fail(ErrorCode::kParse, "polynomial needs \"p\" and \"n\"");
  FpPolynomial poly;
  try {
    poly.p = doc.at("p").get<int>();
    poly.n = doc.at("n").get<int>();
    if (doc.contains("coeffs"))
      for (const auto& [key, c] : doc.at("coeffs").items()) {
        std::vector<int> e;
        std::stringstream ss(key);
        std::string part;
        while (std::getline(ss, part, ',')) e.push_back(std::stoi(part));
        poly.coeffs[e] = c.get<int>();
      }
  } catch (const std::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed polynomial: ") + e.what());
  }
  require(is_prime(poly.p), ErrorCode::kPrecondition, "polynomial field size must be prime");
  poly.normalize();
  return poly;
}

Json fp_polynomial_to_json(const FpPolynomial& poly) {
  Json doc;
  doc["p"] = poly.p;
  doc["n"] = poly.n;
  Json coeffs = Json::object();
  for (const auto& [e, c] : poly.coeffs) {
    std::string key;
    for (std::size_t k = 0; k < e.size(); ++k) key += (k ? "," : "") + std::to_string(e[k]);
    coeffs[key] = c;
  }
  doc["coeffs"] = coeffs;
  return doc;
}

}  // namespace nlg
