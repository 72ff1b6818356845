#include "nlg/angle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <queue>

#include "nlg/errors.hpp"

namespace nlg {

namespace {

double wrap_turns(double x) {
  x -= std::floor(x);
  return x >= 1.0 ? 0.0 : x;
}

// Distance from x to the nearest integer.
double integer_distance(double x) { return std::abs(x - std::round(x)); }

}  // namespace

SchmidtReduction schmidt_reduce(const ModMGame& game, const SchmidtStrategySpec& spec, const SnapOptions& options) {
  require(game.answer_group() == AnswerGroup::kCyclic, ErrorCode::kUnsupported,
          "angle reduction needs cyclic answers");
  const PerfectionReport perf = verify_schmidt_perfection(game, spec, options.tolerance);
  require(perf.is_perfect, ErrorCode::kPrecondition,
          "strategy is not perfect: losing probability " + std::to_string(perf.residual));
  const int t = game.players();
  const int m = game.modulus();
  std::int64_t max_den = options.max_denominator;
  if (max_den <= 0) {
    int most = 1;
    for (int p = 0; p < t; ++p) most = std::max(most, game.question_count(p));
    max_den = static_cast<std::int64_t>(m) * most;
  }

  const std::complex<double> omega = std::polar(1.0, 2.0 * std::numbers::pi / m);
  std::vector<std::vector<double>> raw(t);
  std::vector<std::vector<Rational>> snapped(t);
  for (int p = 0; p < t; ++p) {
    for (int q = 0; q < game.question_count(p); ++q) {
      const Measurement& meas = spec.measurements[p][q];
      CMatrix u = CMatrix::Zero(spec.d, spec.d);
      for (int a = 0; a < m; ++a) u += std::pow(omega, a) * meas[a];
      double angle = -1.0;
      for (int i = 0; i < spec.d && angle < 0; ++i)
        for (int j = 0; j < spec.d; ++j)
          if (std::abs(u(i, j)) > 1e-9) {
            angle = wrap_turns(std::arg(u(i, j)) / (2.0 * std::numbers::pi));
            break;
          }
      if (angle < 0)
        fail(ErrorCode::kDegenerateUnitary,
             "no nonzero entry for player " + std::to_string(p + 1) + " question " + game.questions(p)[q]);
      raw[p].push_back(angle);
      const Rational x(angle);
      const Rational tol(options.tolerance);
      Rational s = simplest_between(x - tol, x + tol);
      require(s.get_den() <= max_den, ErrorCode::kPrecondition,
              "angle " + std::to_string(angle) + " is not within tolerance of a rational with denominator <= " +
                  std::to_string(max_den));
      snapped[p].push_back(frac(s));
    }
  }

  double residual = 0.0;
  std::map<std::vector<Rational>, AngleTuple> merged;
  for (const auto& e : game.support()) {
    double sum = 0.0;
    std::vector<Rational> angles;
    for (int p = 0; p < t; ++p) {
      sum += raw[p][e.questions[p]];
      angles.push_back(snapped[p][e.questions[p]]);
    }
    residual = std::max(residual, integer_distance(sum - static_cast<double>(e.target) / m));
    auto [it, inserted] = merged.try_emplace(angles, AngleTuple{angles, e.weight, e.target});
    if (!inserted) {
      require(it->second.target == e.target, ErrorCode::kPrecondition,
              "two inputs with different targets reduce to the same angles");
      it->second.weight += e.weight;
    }
  }
  require(residual <= options.tolerance, ErrorCode::kPrecondition,
          "extracted angles miss the promise by " + std::to_string(residual));
  std::vector<AngleTuple> support;
  for (auto& [k, v] : merged) support.push_back(std::move(v));
  return SchmidtReduction{AngleGameDiscrete(m, std::move(support)), std::move(raw), residual};
}

DeterministicStrategy synthesize_perfect_strategy(const AngleGameDiscrete& g) {
  const ModMGame game = g.to_game();
  const ConnectionGraph graph = connection_graph(game);
  const std::vector<int> comp = connected_components(graph);
  const auto it = std::find_if(comp.begin(), comp.end(), [](int c) { return c != 0; });
  if (it != comp.end()) {
    auto describe = [&](int v) {
      std::string s = "(";
      for (int p = 0; p < g.players(); ++p) s += (p ? "," : "") + to_string(g.support()[v].angles[p]);
      return s + ")";
    };
    fail(ErrorCode::kConnectivity, "inputs are not connected: " + describe(0) + " and " +
                                       describe(static_cast<int>(it - comp.begin())) +
                                       " lie in different components");
  }

  const int t = game.players();
  const int m = game.modulus();
  const auto& support = game.support();
  std::vector<std::vector<int>> adj(support.size());
  for (auto [a, b] : graph.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  DeterministicStrategy s;
  s.answers.resize(t);
  for (int p = 0; p < t; ++p) s.answers[p].assign(game.question_count(p), -1);
  s.answers[0][support[0].questions[0]] = support[0].target;
  for (int p = 1; p < t; ++p) s.answers[p][support[0].questions[p]] = 0;

  std::vector<bool> seen(support.size(), false);
  std::queue<int> todo;
  seen[0] = true;
  todo.push(0);
  while (!todo.empty()) {
    const int v = todo.front();
    todo.pop();
    for (int w : adj[v]) {
      if (seen[w]) continue;
      seen[w] = true;
      const auto& e = support[w];
      int changed = 0;
      while (e.questions[changed] == support[v].questions[changed]) ++changed;
      int& slot = s.answers[changed][e.questions[changed]];
      if (slot < 0) {
        int rest = 0;
        for (int p = 0; p < t; ++p)
          if (p != changed) rest += s.answers[p][e.questions[p]];
        slot = ((e.target - rest) % m + m) % m;
      }
      todo.push(w);
    }
  }
  require(evaluate_strategy(game, s) == 1, ErrorCode::kPrecondition,
          "synthesized strategy is not perfect; angle game is inconsistent");
  return s;
}

ConditionalProfile uag_conditional_profile(int t, int m) {
  require(t >= 2, ErrorCode::kPrecondition, "profile needs at least 2 players");
  require(m >= 2, ErrorCode::kPrecondition, "profile needs modulus at least 2");
  const PiecewisePolynomial f = irwin_hall_pdf(t - 1);
  ConditionalProfile out;
  out.players = t;
  out.modulus = m;
  out.answer_density.assign(m, Polynomial());
  // On x in (0, 1), k - x lies in (k - 1, k), where the density is piece k - 1.
  for (int k = 1; k <= t - 1; ++k) {
    Polynomial term = f.pieces[k - 1].compose_affine(Rational(k), Rational(-1));
    out.answer_density[k % m] = out.answer_density[k % m] + term;
  }
  for (const auto& g : out.answer_density) out.total_density = out.total_density + g;
  return out;
}

ProfileTable uag_profile_table(int t, int m, int grid) {
  require(grid >= 1, ErrorCode::kPrecondition, "grid needs at least one point");
  const ConditionalProfile prof = uag_conditional_profile(t, m);
  ProfileTable table;
  for (int i = 0; i < grid; ++i) {
    const Rational x(2 * i + 1, 2L * grid);
    const Rational total = prof.total_density(x);
    int best = 0;
    Rational best_p = -1;
    for (int l = 0; l < m; ++l) {
      Rational p = prof.answer_density[l](x) / total;
      if (p > best_p) {
        best_p = p;
        best = l;
      }
      table.rows.push_back({x, l, p});
    }
    table.argmax.push_back(best);
  }
  return table;
}

namespace {

int argmax_at(const std::vector<Polynomial>& g, const Rational& x) {
  int best = 0;
  Rational best_v = g[0](x);
  for (std::size_t l = 1; l < g.size(); ++l) {
    Rational v = g[l](x);
    if (v > best_v) {
      best_v = v;
      best = static_cast<int>(l);
    }
  }
  return best;
}

bool has_root_in_closed(const Polynomial& p, const Rational& a, const Rational& b) {
  if (p(a) == 0 || p(b) == 0) return true;
  return count_roots(sturm_sequence(squarefree_part(p)), a, b) > 0;
}

}  // namespace

SemiTrivialValue semi_trivial_value(int t, int m) {
  const ConditionalProfile prof = uag_conditional_profile(t, m);
  const auto& g = prof.answer_density;
  const Rational zero(0), one(1);
  const Rational width = Rational(1) / Rational(mpz_class(1) << 80);

  // Every point where two answer densities cross, as exact points or
  // isolating intervals, then merged into disjoint clusters.
  std::vector<IsolatedRoot> roots;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      Polynomial d = g[a] - g[b];
      if (d.is_zero()) continue;
      for (auto& r : isolate_roots(d, zero, one, width)) roots.push_back(r);
    }
  std::sort(roots.begin(), roots.end(), [](const IsolatedRoot& x, const IsolatedRoot& y) { return x.lo < y.lo; });
  std::vector<std::pair<Rational, Rational>> clusters;
  for (const auto& r : roots) {
    if (!clusters.empty() && r.lo <= clusters.back().second)
      clusters.back().second = std::max(clusters.back().second, r.hi);
    else
      clusters.emplace_back(r.lo, r.hi);
  }

  // Gaps between clusters have a constant argmax.
  std::vector<std::pair<Rational, Rational>> gaps;
  Rational left = zero;
  for (const auto& c : clusters) {
    gaps.emplace_back(left, c.first);
    left = c.second;
  }
  gaps.emplace_back(left, one);
  std::vector<int> gap_answer;
  for (const auto& [a, b] : gaps) gap_answer.push_back(argmax_at(g, (a + b) / 2));

  SemiTrivialValue out;
  out.exact = true;
  Rational lower = 0, upper = 0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const Rational v = g[gap_answer[i]].integrate(gaps[i].first, gaps[i].second);
    lower += v;
    upper += v;
  }
  out.piece_answers.push_back(gap_answer[0]);
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const auto& [a, b] = clusters[i];
    const int la = gap_answer[i], lb = gap_answer[i + 1];
    if (la != lb) out.piece_answers.push_back(lb);
    if (a == b) {
      if (la != lb) out.breakpoints.push_back(a);
      continue;
    }
    bool dominant = la == lb;
    for (int l = 0; dominant && l < m; ++l) {
      if (l == la) continue;
      Polynomial d = g[la] - g[l];
      if (!d.is_zero() && has_root_in_closed(d, a, b)) dominant = false;
    }
    if (dominant) {
      const Rational v = g[la].integrate(a, b);
      lower += v;
      upper += v;
      continue;
    }
    // The densities sum to one, so the best answer scores at most b - a here.
    out.exact = false;
    if (la != lb) out.irrational_breakpoints.emplace_back(a, b);
    lower += std::max(g[la].integrate(a, b), g[lb].integrate(a, b));
    upper += b - a;
  }
  out.lower = lower;
  out.upper = upper;
  if (out.exact) out.value = lower;
  return out;
}

UagOracle semi_trivial_oracle(int t, int m) {
  const ConditionalProfile prof = uag_conditional_profile(t, m);
  std::vector<std::vector<double>> coeffs;
  for (const auto& g : prof.answer_density) {
    std::vector<double> c;
    for (const auto& r : g.coeffs()) c.push_back(r.get_d());
    coeffs.push_back(std::move(c));
  }
  return [t, coeffs](int player, double phi) {
    if (player < t - 1) return 0;
    int best = 0;
    double best_v = -1.0;
    for (std::size_t l = 0; l < coeffs.size(); ++l) {
      double v = 0.0;
      for (auto it = coeffs[l].rbegin(); it != coeffs[l].rend(); ++it) v = v * phi + *it;
      if (v > best_v) {
        best_v = v;
        best = static_cast<int>(l);
      }
    }
    return best;
  };
}

BoyerSearchReport boyer_strategy_search(int t, int m, int d_min, int d_max, const SearchOptions& options) {
  require(d_min >= 1 && d_min <= d_max, ErrorCode::kPrecondition, "input count range is empty");
  BoyerSearchReport out;
  for (int d = d_min; d <= d_max; ++d) {
    const ModMGame game = boyer_to_game({t, d, m});
    if (options.budget != 0 && classical_search_size(game) > options.budget) {
      out.skipped.push_back(d);
      continue;
    }
    GameValueReport r = classical_value(game, options);
    if (!out.best || r.omega < *out.best) {
      out.best = r.omega;
      out.best_inputs = d;
    }
    out.completed.push_back({d, std::move(r)});
  }
  return out;
}

namespace {

// One input from the uniform angle game in units where the angles sum to an
// integer: the first t-1 angles are uniform on [0, 1), the last one closes
// the sum to the next integer K, and the target is K mod m.
struct UagSample {
  std::vector<double> phi;
  long sum = 0;
};

void sample_uag(Rng& rng, int t, UagSample& s) {
  s.phi.resize(t);
  double total = 0.0;
  for (int j = 0; j + 1 < t; ++j) {
    s.phi[j] = rng.uniform01();
    total += s.phi[j];
  }
  const double k = std::ceil(total);
  s.phi[t - 1] = std::min(std::max(k - total, 0.0), std::nextafter(1.0, 0.0));
  s.sum = static_cast<long>(k);
}

}  // namespace

MonteCarloEstimate floor_strategy_trial(int t, int m, std::uint64_t seed, std::uint64_t samples, int workers) {
  require(t >= 2 && m >= 2, ErrorCode::kPrecondition, "trial needs t >= 2 and m >= 2");
  require(samples >= 1, ErrorCode::kPrecondition, "trial needs at least one sample");
  return monte_carlo(seed, samples, workers, [t, m](Rng& rng) {
    UagSample s;
    sample_uag(rng, t, s);
    long guess_sum = 0;
    long answer_sum = 0;
    for (int j = 0; j + 1 < t; ++j) {
      const long x = static_cast<long>(std::floor(t * s.phi[j]));
      const long r = static_cast<long>(rng.below(t));
      guess_sum += r;
      if (x != r) answer_sum += static_cast<long>(rng.below(m));
    }
    const long xt = static_cast<long>(std::floor(t * s.phi[t - 1]));
    const long ceil_div = (guess_sum + xt + t - 1) / t;
    answer_sum += ceil_div % m;
    return (answer_sum - s.sum) % m == 0 ? 1.0 : 0.0;
  });
}

MonteCarloEstimate reduce_to_uag(const AngleGameDiscrete& g, const UagOracle& oracle, std::uint64_t seed,
                                 std::uint64_t samples, int workers) {
  require(samples >= 1, ErrorCode::kPrecondition, "reduction needs at least one sample");
  const int t = g.players();
  const int m = g.modulus();
  // Cumulative weights for sampling a support tuple.
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& e : g.support()) cumulative.push_back(acc += e.weight.get_d());
  std::vector<std::vector<double>> scaled;  // angles times m
  for (const auto& e : g.support()) {
    std::vector<double> v;
    for (const auto& a : e.angles) v.push_back(to_double(a * m));
    scaled.push_back(std::move(v));
  }
  return monte_carlo(seed, samples, workers, [&](Rng& rng) {
    const double u = rng.uniform01() * acc;
    std::size_t idx = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                               cumulative.begin());
    idx = std::min(idx, cumulative.size() - 1);
    const auto& e = g.support()[idx];
    double shift_total = 0.0;
    long answer = 0;
    for (int j = 0; j < t; ++j) {
      double shift;
      if (j + 1 < t) {
        shift = rng.uniform01() * m;
        shift_total += shift;
      } else {
        shift = -shift_total;
      }
      double rotated = scaled[idx][j] + shift;
      rotated -= std::floor(rotated / m) * m;
      double whole = std::floor(rotated);
      double part = rotated - whole;
      if (part >= 1.0) {
        part = 0.0;
        whole += 1.0;
      }
      answer += static_cast<long>(oracle(j, part)) + static_cast<long>(whole);
    }
    return ((answer - e.target) % m + m) % m == 0 ? 1.0 : 0.0;
  });
}

Rational power_of_two_strategy_value(int e) {
  require(e >= 1 && e <= 8, ErrorCode::kPrecondition, "exponent must lie in [1, 8]");
  const int d = 1 << e;
  const ModMGame game = boyer_to_game({4, d, 2});
  DeterministicStrategy s;
  s.answers.assign(4, std::vector<int>(d, 0));
  s.answers[3][0] = 1;
  s.answers[3][1] = 1;
  return evaluate_strategy(game, s);
}

}  // namespace nlg
