#include "nlg/ugsdp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "nlg/errors.hpp"
#include "nlg/parallel.hpp"
#include "nlg/random.hpp"

namespace nlg {

void UniqueGame::validate() const {
  require(k >= 1, ErrorCode::kInvalidGame, "unique game needs k >= 1");
  require(!pairs.empty(), ErrorCode::kInvalidGame, "unique game has no question pairs");
  Rational total = 0;
  std::set<std::pair<int, int>> seen;
  for (const auto& p : pairs) {
    require(p.x >= 0 && p.x < static_cast<int>(x_labels.size()) && p.y >= 0 &&
                p.y < static_cast<int>(y_labels.size()),
            ErrorCode::kInvalidGame, "question index out of range");
    require(seen.insert({p.x, p.y}).second, ErrorCode::kInvalidGame,
            "duplicate question pair (" + x_labels[p.x] + ", " + y_labels[p.y] + ")");
    require(p.weight >= 0, ErrorCode::kInvalidGame, "negative pair weight");
    require(static_cast<int>(p.perm.size()) == k, ErrorCode::kInvalidGame, "permutation has wrong length");
    std::vector<bool> hit(k, false);
    for (int v : p.perm) {
      require(v >= 0 && v < k && !hit[v], ErrorCode::kInvalidGame, "pair map is not a permutation");
      hit[v] = true;
    }
    total += p.weight;
  }
  require(total == 1, ErrorCode::kInvalidGame, "pair weights sum to " + to_string(total) + ", not 1");
}

UniqueGame unique_game_from_modm(const ModMGame& game) {
  require(game.players() == 2, ErrorCode::kUnsupported, "unique games have two players");
  require(game.answer_group() == AnswerGroup::kCyclic, ErrorCode::kUnsupported, "cyclic answers required");
  UniqueGame u;
  u.k = game.modulus();
  u.x_labels = game.questions(0);
  u.y_labels = game.questions(1);
  for (const auto& e : game.support()) {
    UniquePair p{e.questions[0], e.questions[1], e.weight, {}};
    for (int i = 0; i < u.k; ++i) p.perm.push_back(((e.target - i) % u.k + u.k) % u.k);
    u.pairs.push_back(std::move(p));
  }
  u.validate();
  return u;
}

Rational unique_strategy_value(const UniqueGame& game, const std::vector<int>& a, const std::vector<int>& b) {
  require(a.size() == game.x_labels.size() && b.size() == game.y_labels.size(), ErrorCode::kIncompleteStrategy,
          "strategy needs one answer per question");
  Rational won = 0;
  for (const auto& p : game.pairs) {
    require(a[p.x] >= 0 && a[p.x] < game.k && b[p.y] >= 0 && b[p.y] < game.k, ErrorCode::kIncompleteStrategy,
            "answer out of range");
    if (p.perm[a[p.x]] == b[p.y]) won += p.weight;
  }
  return won;
}

UniqueClassical unique_game_classical_value(const UniqueGame& game, std::uint64_t budget) {
  game.validate();
  const int nx = static_cast<int>(game.x_labels.size());
  const int ny = static_cast<int>(game.y_labels.size());
  std::uint64_t total = 1;
  for (int x = 0; x < nx; ++x) {
    require(total <= budget / game.k, ErrorCode::kBudgetExceeded, "first-player strategy space exceeds the budget");
    total *= game.k;
  }
  // Integer weights over a common denominator.
  mpz_class den = 1;
  for (const auto& p : game.pairs) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), p.weight.get_den_mpz_t());
  require(den.fits_slong_p() && den < (1L << 40), ErrorCode::kUnsupported, "weight denominators are too large");
  std::vector<long> w;
  for (const auto& p : game.pairs) w.push_back(mpz_class(p.weight * den).get_si());

  long best = -1;
  std::vector<int> a(nx, 0), best_a;
  std::vector<long> score(static_cast<std::size_t>(ny) * game.k);
  for (std::uint64_t n = 0; n < total; ++n) {
    std::fill(score.begin(), score.end(), 0);
    for (std::size_t q = 0; q < game.pairs.size(); ++q) {
      const auto& p = game.pairs[q];
      score[static_cast<std::size_t>(p.y) * game.k + p.perm[a[p.x]]] += w[q];
    }
    long v = 0;
    for (int y = 0; y < ny; ++y) v += *std::max_element(score.begin() + y * game.k, score.begin() + (y + 1) * game.k);
    if (v > best) {
      best = v;
      best_a = a;
    }
    int x = nx;
    while (x-- > 0) {
      if (++a[x] < game.k) break;
      a[x] = 0;
    }
  }
  UniqueClassical out;
  out.a = best_a;
  std::fill(score.begin(), score.end(), 0);
  for (std::size_t q = 0; q < game.pairs.size(); ++q) {
    const auto& p = game.pairs[q];
    score[static_cast<std::size_t>(p.y) * game.k + p.perm[best_a[p.x]]] += w[q];
  }
  for (int y = 0; y < ny; ++y)
    out.b.push_back(static_cast<int>(std::max_element(score.begin() + y * game.k, score.begin() + (y + 1) * game.k) -
                                     (score.begin() + y * game.k)));
  out.value = unique_strategy_value(game, out.a, out.b);
  return out;
}

double FeasibilityReport::worst() const { return std::max({orthogonality, normalization, nonnegativity}); }

namespace {

void check_shape(const UniqueGame& game, const VectorSolution& sol) {
  require(sol.u.size() == game.x_labels.size() && sol.v.size() == game.y_labels.size(), ErrorCode::kDimensionMismatch,
          "solution has the wrong number of questions");
  for (const auto* side : {&sol.u, &sol.v})
    for (const auto& block : *side) {
      require(static_cast<int>(block.size()) == game.k, ErrorCode::kDimensionMismatch,
              "solution has the wrong number of answers");
      for (const auto& vec : block)
        require(vec.size() == sol.dimension, ErrorCode::kDimensionMismatch, "vector has the wrong dimension");
    }
}

}  // namespace

FeasibilityReport feasibility(const UniqueGame& game, const VectorSolution& sol) {
  check_shape(game, sol);
  FeasibilityReport r;
  for (const auto* side : {&sol.u, &sol.v})
    for (const auto& block : *side) {
      double total = 0.0;
      for (int i = 0; i < game.k; ++i) {
        total += block[i].squaredNorm();
        for (int j = i + 1; j < game.k; ++j) r.orthogonality = std::max(r.orthogonality, std::abs(block[i].dot(block[j])));
      }
      r.normalization = std::max(r.normalization, std::abs(total - 1.0));
    }
  for (const auto& bu : sol.u)
    for (const auto& bv : sol.v)
      for (const auto& uu : bu)
        for (const auto& vv : bv) r.nonnegativity = std::max(r.nonnegativity, -uu.dot(vv));
  return r;
}

double solution_objective(const UniqueGame& game, const VectorSolution& sol) {
  check_shape(game, sol);
  double acc = 0.0;
  for (const auto& p : game.pairs) {
    double s = 0.0;
    for (int i = 0; i < game.k; ++i) s += sol.u[p.x][i].dot(sol.v[p.y][p.perm[i]]);
    acc += p.weight.get_d() * s;
  }
  return acc;
}

namespace {

// max <C, X> over PSD X with unit-trace groups, forced zeros and
// nonnegative entries.
struct GramProblem {
  int n = 0;
  Eigen::MatrixXd cost;
  std::vector<std::vector<int>> unit_groups;
  std::vector<std::pair<int, int>> zeros;
  std::vector<std::pair<int, int>> nonnegative;
};

void project_constraints(const GramProblem& prob, Eigen::MatrixXd& z) {
  z = (z + z.transpose()).eval() * 0.5;
  for (const auto& g : prob.unit_groups) {
    double total = 0.0;
    for (int i : g) total += z(i, i);
    const double shift = (1.0 - total) / static_cast<double>(g.size());
    for (int i : g) z(i, i) += shift;
  }
  for (const auto& [i, j] : prob.zeros) z(i, j) = z(j, i) = 0.0;
  for (const auto& [i, j] : prob.nonnegative)
    if (z(i, j) < 0.0) z(i, j) = z(j, i) = 0.0;
}

double constraint_residual(const GramProblem& prob, const Eigen::MatrixXd& x) {
  double r = 0.0;
  for (const auto& g : prob.unit_groups) {
    double total = 0.0;
    for (int i : g) total += x(i, i);
    r = std::max(r, std::abs(total - 1.0));
  }
  for (const auto& [i, j] : prob.zeros) r = std::max(r, std::abs(x(i, j)));
  for (const auto& [i, j] : prob.nonnegative) r = std::max(r, -x(i, j));
  return r;
}

struct AdmmResult {
  Eigen::MatrixXd factor;  // rows are vectors
  bool converged = false;
  int iterations = 0;
  std::vector<double> history;
};

Eigen::MatrixXd factor_from_eigen(const Eigen::VectorXd& values, const Eigen::MatrixXd& vectors, int rank_cap) {
  const int n = static_cast<int>(values.size());
  const double top = n > 0 ? std::max(0.0, values.maxCoeff()) : 0.0;
  std::vector<int> keep;
  for (int i = n - 1; i >= 0; --i)
    if (values(i) > 1e-14 * std::max(1.0, top)) keep.push_back(i);
  if (rank_cap > 0 && static_cast<int>(keep.size()) > rank_cap) keep.resize(rank_cap);
  Eigen::MatrixXd f(n, std::max<std::size_t>(keep.size(), 1));
  f.setZero();
  for (std::size_t c = 0; c < keep.size(); ++c) f.col(c) = vectors.col(keep[c]) * std::sqrt(values(keep[c]));
  return f;
}

AdmmResult run_admm(const GramProblem& prob, const Eigen::MatrixXd& start, const SdpOptions& opt) {
  AdmmResult out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  double best = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_values;
  Eigen::MatrixXd best_vectors;
  auto consider = [&](const Eigen::MatrixXd& x, const Eigen::VectorXd& values, const Eigen::MatrixXd& vectors) {
    if (constraint_residual(prob, x) > opt.feasibility_tol) return;
    const double obj = prob.cost.cwiseProduct(x).sum();
    if (obj > best) {
      best = obj;
      best_values = values;
      best_vectors = vectors;
    }
  };
  eig.compute(start);
  consider(start, eig.eigenvalues().cwiseMax(0.0), eig.eigenvectors());

  Eigen::MatrixXd z = start, u = Eigen::MatrixXd::Zero(prob.n, prob.n), x;
  project_constraints(prob, z);
  double rho = 1.0;
  for (int it = 0; it < opt.max_iter; ++it) {
    eig.compute(z - u + prob.cost / rho);
    const Eigen::VectorXd values = eig.eigenvalues().cwiseMax(0.0);
    x = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
    consider(x, values, eig.eigenvectors());
    out.history.push_back(best);
    const Eigen::MatrixXd z_prev = z;
    z = x + u;
    project_constraints(prob, z);
    u += x - z;
    out.iterations = it + 1;
    const double primal = (x - z).cwiseAbs().maxCoeff();
    const double dual = rho * (z - z_prev).cwiseAbs().maxCoeff();
    if (primal <= opt.tol && dual <= opt.tol) {
      out.converged = true;
      break;
    }
    if (it % 10 == 9) {
      if (primal > 10 * dual) {
        rho *= 2;
        u /= 2;
      } else if (dual > 10 * primal) {
        rho /= 2;
        u *= 2;
      }
    }
  }
  require(best > -std::numeric_limits<double>::infinity(), ErrorCode::kInfeasible,
          "no iterate met the feasibility tolerance");
  out.factor = factor_from_eigen(best_values, best_vectors, opt.rank_cap);
  return out;
}

int u_index(const UniqueGame& g, int x, int i) { return x * g.k + i; }
int v_index(const UniqueGame& g, int y, int j) { return (static_cast<int>(g.x_labels.size()) + y) * g.k + j; }

Eigen::MatrixXd gram_of(const UniqueGame& game, const VectorSolution& sol) {
  const int n = static_cast<int>(game.x_labels.size() + game.y_labels.size()) * game.k;
  Eigen::MatrixXd w(n, std::max(sol.dimension, 1));
  w.setZero();
  for (std::size_t x = 0; x < sol.u.size(); ++x)
    for (int i = 0; i < game.k; ++i)
      if (sol.dimension > 0) w.row(u_index(game, static_cast<int>(x), i)) = sol.u[x][i].transpose();
  for (std::size_t y = 0; y < sol.v.size(); ++y)
    for (int j = 0; j < game.k; ++j)
      if (sol.dimension > 0) w.row(v_index(game, static_cast<int>(y), j)) = sol.v[y][j].transpose();
  return w * w.transpose();
}

}  // namespace

VectorSolution classical_to_vectors(const UniqueGame& game, const std::vector<int>& a, const std::vector<int>& b) {
  require(a.size() == game.x_labels.size() && b.size() == game.y_labels.size(), ErrorCode::kIncompleteStrategy,
          "strategy needs one answer per question");
  VectorSolution sol;
  sol.dimension = 1;
  auto block = [&](int answer) {
    require(answer >= 0 && answer < game.k, ErrorCode::kIncompleteStrategy, "answer out of range");
    std::vector<Eigen::VectorXd> vs(game.k, Eigen::VectorXd::Zero(1));
    vs[answer](0) = 1.0;
    return vs;
  };
  for (int ax : a) sol.u.push_back(block(ax));
  for (int by : b) sol.v.push_back(block(by));
  sol.objective = solution_objective(game, sol);
  return sol;
}

VectorSolution solve_sdp(const UniqueGame& game, const SdpOptions& options, const std::optional<VectorSolution>& start) {
  game.validate();
  const int nx = static_cast<int>(game.x_labels.size());
  const int ny = static_cast<int>(game.y_labels.size());
  GramProblem prob;
  prob.n = (nx + ny) * game.k;
  prob.cost = Eigen::MatrixXd::Zero(prob.n, prob.n);
  for (const auto& p : game.pairs)
    for (int i = 0; i < game.k; ++i) {
      const int a = u_index(game, p.x, i), b = v_index(game, p.y, p.perm[i]);
      prob.cost(a, b) += p.weight.get_d() / 2;
      prob.cost(b, a) += p.weight.get_d() / 2;
    }
  for (int q = 0; q < nx + ny; ++q) {
    std::vector<int> g;
    for (int i = 0; i < game.k; ++i) {
      g.push_back(q * game.k + i);
      for (int j = i + 1; j < game.k; ++j) prob.zeros.emplace_back(q * game.k + i, q * game.k + j);
    }
    prob.unit_groups.push_back(std::move(g));
  }
  if (options.nonnegativity)
    for (int a = 0; a < nx * game.k; ++a)
      for (int b = nx * game.k; b < prob.n; ++b) prob.nonnegative.emplace_back(a, b);

  const VectorSolution initial =
      start ? *start : classical_to_vectors(game, std::vector<int>(nx, 0), std::vector<int>(ny, 0));
  check_shape(game, initial);
  const AdmmResult res = run_admm(prob, gram_of(game, initial), options);

  VectorSolution sol;
  sol.dimension = static_cast<int>(res.factor.cols());
  for (int x = 0; x < nx; ++x) {
    sol.u.emplace_back();
    for (int i = 0; i < game.k; ++i) sol.u.back().push_back(res.factor.row(u_index(game, x, i)).transpose());
  }
  for (int y = 0; y < ny; ++y) {
    sol.v.emplace_back();
    for (int j = 0; j < game.k; ++j) sol.v.back().push_back(res.factor.row(v_index(game, y, j)).transpose());
  }
  // Rescale each block so the squared norms sum to one exactly.
  for (auto* side : {&sol.u, &sol.v})
    for (auto& block : *side) {
      double total = 0.0;
      for (const auto& vec : block) total += vec.squaredNorm();
      if (total > 0.0)
        for (auto& vec : block) vec /= std::sqrt(total);
    }
  sol.objective = solution_objective(game, sol);
  sol.converged = res.converged;
  sol.iterations = res.iterations;
  sol.objective_history = res.history;
  return sol;
}

VectorSolution quantum_strategy_to_vectors(const UniqueGame& game, const QuantumStrategy& s) {
  require(s.state.dims.size() == 2, ErrorCode::kDimensionMismatch, "strategy must have two players");
  const int da = s.state.dims[0], db = s.state.dims[1];
  require(s.state.amplitudes.size() == static_cast<Eigen::Index>(da) * db, ErrorCode::kDimensionMismatch,
          "state size does not match its dimensions");
  require(s.measurements.size() == 2 && s.measurements[0].size() == game.x_labels.size() &&
              s.measurements[1].size() == game.y_labels.size(),
          ErrorCode::kDimensionMismatch, "strategy must have one measurement per question");
  CMatrix psi(da, db);
  for (int a = 0; a < da; ++a)
    for (int b = 0; b < db; ++b) psi(a, b) = s.state.amplitudes(a * db + b);
  auto realify = [&](const CMatrix& m) {
    Eigen::VectorXd r(2 * da * db);
    for (int a = 0; a < da; ++a)
      for (int b = 0; b < db; ++b) {
        r(2 * (a * db + b)) = m(a, b).real();
        r(2 * (a * db + b) + 1) = m(a, b).imag();
      }
    return r;
  };
  VectorSolution sol;
  sol.dimension = 2 * da * db;
  for (const auto& meas : s.measurements[0]) {
    require(static_cast<int>(meas.size()) == game.k, ErrorCode::kDimensionMismatch, "measurement needs k outcomes");
    sol.u.emplace_back();
    for (const auto& p : meas) {
      require(p.rows() == da && p.cols() == da, ErrorCode::kDimensionMismatch, "projector has the wrong size");
      sol.u.back().push_back(realify(p * psi));
    }
  }
  for (const auto& meas : s.measurements[1]) {
    require(static_cast<int>(meas.size()) == game.k, ErrorCode::kDimensionMismatch, "measurement needs k outcomes");
    sol.v.emplace_back();
    for (const auto& q : meas) {
      require(q.rows() == db && q.cols() == db, ErrorCode::kDimensionMismatch, "projector has the wrong size");
      sol.v.back().push_back(realify(psi * q.transpose()));
    }
  }
  sol.objective = solution_objective(game, sol);
  return sol;
}

int round_at(double x, double r) {
  const double fl = std::floor(x);
  return static_cast<int>(fl) + (x - fl > r ? 1 : 0);
}

namespace {

int pick_answer(const std::vector<Eigen::VectorXd>& block, const std::vector<Eigen::VectorXd>& g, int k, double r) {
  double best = -1.0;
  int answer = 0;
  for (int i = 0; i < k; ++i) {
    const double norm = block[i].norm();
    if (norm == 0.0) continue;
    const int s = std::clamp(round_at(2.0 * k * block[i].squaredNorm(), r), 0, 2 * k);
    for (int t = 0; t < s; ++t) {
      const double xi = std::abs(g[t].dot(block[i]) / norm);
      if (xi > best) {
        best = xi;
        answer = i;
      }
    }
  }
  return answer;
}

}  // namespace

RoundingResult round_solution(const VectorSolution& sol, const UniqueGame& game, std::uint64_t seed,
                              double feasibility_tol) {
  game.validate();
  const FeasibilityReport f = feasibility(game, sol);
  require(f.worst() <= feasibility_tol, ErrorCode::kInfeasible,
          "solution is infeasible: orthogonality " + std::to_string(f.orthogonality) + ", normalization " +
              std::to_string(f.normalization) + ", nonnegativity " + std::to_string(f.nonnegativity));
  Rng rng(seed);
  RoundingResult out;
  out.r = rng.uniform01();
  std::vector<Eigen::VectorXd> g(2 * game.k, Eigen::VectorXd(sol.dimension));
  for (auto& vec : g)
    for (int c = 0; c < sol.dimension; ++c) vec(c) = rng.normal();
  for (const auto& block : sol.u) out.a.push_back(pick_answer(block, g, game.k, out.r));
  for (const auto& block : sol.v) out.b.push_back(pick_answer(block, g, game.k, out.r));
  out.win_probability = unique_strategy_value(game, out.a, out.b);
  return out;
}

bool PairDiagnostics::bounds_hold(double slack) const {
  if (!in_small_regime()) return true;
  return expected_mc <= mc_bound + slack && min_m >= m_bound - slack &&
         expected_matched_epsilon <= matched_bound + slack;
}

RoundingDiagnostics diagnostics(const VectorSolution& sol, const UniqueGame& game, std::uint64_t seed) {
  game.validate();
  check_shape(game, sol);
  RoundingDiagnostics out;
  out.r = Rng(seed).uniform01();
  const int k = game.k;
  auto unit = [](const Eigen::VectorXd& v) {
    const double n = v.norm();
    return n == 0.0 ? Eigen::VectorXd(Eigen::VectorXd::Zero(v.size())) : Eigen::VectorXd(v / n);
  };
  for (const auto& p : game.pairs) {
    PairDiagnostics d;
    d.x = p.x;
    d.y = p.y;
    std::vector<double> mass_x(k), mass_y(k);
    for (int i = 0; i < k; ++i) {
      const auto& ui = sol.u[p.x][i];
      const auto& vi = sol.v[p.y][p.perm[i]];
      d.epsilon += 0.5 * (ui - vi).squaredNorm();
      d.epsilon_i.push_back(0.5 * (unit(ui) - unit(vi)).squaredNorm());
      mass_x[i] = 2.0 * k * ui.squaredNorm();
      mass_y[i] = 2.0 * k * vi.squaredNorm();
    }
    auto counts = [&](double r, std::vector<int>& sx, std::vector<int>& sy) {
      sx.assign(k, 0);
      sy.assign(k, 0);
      int m = 0, mc = 0;
      double matched = 0.0;
      for (int i = 0; i < k; ++i) {
        sx[i] = std::clamp(round_at(mass_x[i], r), 0, 2 * k);
        sy[i] = std::clamp(round_at(mass_y[i], r), 0, 2 * k);
        m += std::min(sx[i], sy[i]);
        mc += std::abs(sx[i] - sy[i]);
        matched += std::min(sx[i], sy[i]) * d.epsilon_i[i];
      }
      return std::tuple<int, int, double>(m, mc, m > 0 ? matched / m : 0.0);
    };
    std::tie(d.m_size, d.mc_size, std::ignore) = counts(out.r, d.s_x, d.s_y);

    // Counts only change where r crosses a fractional part.
    std::vector<double> cuts = {0.0, 1.0};
    for (int i = 0; i < k; ++i) {
      cuts.push_back(mass_x[i] - std::floor(mass_x[i]));
      cuts.push_back(mass_y[i] - std::floor(mass_y[i]));
    }
    std::sort(cuts.begin(), cuts.end());
    d.min_m = std::numeric_limits<double>::infinity();
    std::vector<int> sx, sy;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double len = cuts[c + 1] - cuts[c];
      if (len <= 0.0) continue;
      const auto [m, mc, matched] = counts(0.5 * (cuts[c] + cuts[c + 1]), sx, sy);
      d.expected_mc += len * mc;
      d.expected_matched_epsilon += len * matched;
      d.min_m = std::min(d.min_m, static_cast<double>(m));
    }
    d.mc_bound = 4.0 * k * std::sqrt(2.0 * d.epsilon);
    d.m_bound = k / 2.0;
    d.matched_bound = 4.0 * d.epsilon;
    out.pairs.push_back(std::move(d));
  }
  return out;
}

namespace {

std::vector<int> random_permutation(Rng& rng, int k) {
  std::vector<int> p(k);
  for (int i = 0; i < k; ++i) p[i] = i;
  for (int i = k - 1; i > 0; --i) std::swap(p[i], p[rng.below(i + 1)]);
  return p;
}

std::vector<double> random_distribution(Rng& rng, int k) {
  std::vector<double> p(k);
  double total = 0.0;
  for (double& v : p) total += (v = 0.5 + rng.uniform01());
  for (double& v : p) v /= total;
  return p;
}

double overlap(const std::vector<double>& p, const std::vector<double>& q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::sqrt(p[i] * q[i]);
  return acc;
}

}  // namespace

PlantedInstance planted_instance(int k, int questions, double epsilon, std::uint64_t seed) {
  require(k >= 1 && questions >= 1, ErrorCode::kPrecondition, "planted instance needs k >= 1 and questions >= 1");
  require(epsilon >= 0.0 && epsilon <= 1.0, ErrorCode::kPrecondition, "epsilon must lie in [0, 1]");
  Rng rng(seed);
  PlantedInstance inst;
  UniqueGame& g = inst.game;
  g.k = k;
  std::vector<std::vector<int>> color_x, color_y, inverse_y;
  for (int q = 0; q < questions; ++q) {
    g.x_labels.push_back("x" + std::to_string(q));
    color_x.push_back(random_permutation(rng, k));
  }
  for (int q = 0; q < questions; ++q) {
    g.y_labels.push_back("y" + std::to_string(q));
    color_y.push_back(random_permutation(rng, k));
    inverse_y.emplace_back(k);
    for (int j = 0; j < k; ++j) inverse_y.back()[color_y.back()[j]] = j;
  }
  const Rational w(1, questions * questions);
  for (int x = 0; x < questions; ++x)
    for (int y = 0; y < questions; ++y) {
      UniquePair p{x, y, w, std::vector<int>(k)};
      for (int i = 0; i < k; ++i) p.perm[i] = inverse_y[y][color_x[x][i]];
      g.pairs.push_back(std::move(p));
    }
  for (int x = 0; x < questions; ++x)
    inst.labeling_a.push_back(static_cast<int>(std::find(color_x[x].begin(), color_x[x].end(), 0) - color_x[x].begin()));
  for (int y = 0; y < questions; ++y) inst.labeling_b.push_back(inverse_y[y][0]);

  const std::vector<double> mass = random_distribution(rng, k);
  const int dim = 2 * k;
  auto axis = [&](int c, double scale) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
    e(c) = scale;
    return e;
  };
  for (int x = 0; x < questions; ++x) {
    inst.perfect.u.emplace_back();
    for (int i = 0; i < k; ++i) inst.perfect.u.back().push_back(axis(color_x[x][i], std::sqrt(mass[color_x[x][i]])));
  }
  inst.perturbed.u = inst.perfect.u;
  for (int y = 0; y < questions; ++y) {
    inst.perfect.v.emplace_back();
    for (int j = 0; j < k; ++j) inst.perfect.v.back().push_back(axis(color_y[y][j], std::sqrt(mass[color_y[y][j]])));

    // Half of epsilon from moving mass between answers, the rest from the rotation.
    const std::vector<double> target = random_distribution(rng, k);
    auto mixed = [&](double lambda) {
      std::vector<double> q(k);
      for (int c = 0; c < k; ++c) q[c] = (1 - lambda) * mass[c] + lambda * target[c];
      return q;
    };
    double lambda = 1.0;
    if (1.0 - overlap(mass, mixed(1.0)) > epsilon / 2) {
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (1.0 - overlap(mass, mixed(mid)) > epsilon / 2 ? hi : lo) = mid;
      }
      lambda = lo;
    }
    const std::vector<double> q = mixed(lambda);
    const double cos_t = std::min(1.0, (1.0 - epsilon) / overlap(mass, q));
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    Eigen::MatrixXd gauss(k, k);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) gauss(r, c) = rng.normal();
    const Eigen::MatrixXd rot = Eigen::HouseholderQR<Eigen::MatrixXd>(gauss).householderQ();
    inst.perturbed.v.emplace_back();
    for (int j = 0; j < k; ++j) {
      const int c = color_y[y][j];
      Eigen::VectorXd vec = axis(c, cos_t);
      vec.tail(k) = sin_t * rot.col(c);
      inst.perturbed.v.back().push_back(std::sqrt(q[c]) * vec);
    }
  }
  for (auto* sol : {&inst.perfect, &inst.perturbed}) {
    sol->dimension = dim;
    sol->objective = solution_objective(g, *sol);
  }
  return inst;
}

StudyReport perturbation_study(int k, const std::vector<double>& epsilons, int seeds, int questions, int workers) {
  require(seeds >= 1, ErrorCode::kPrecondition, "study needs at least one seed");
  require(k >= 2, ErrorCode::kPrecondition, "study needs k >= 2");
  StudyReport report;
  report.k = k;
  for (double eps : epsilons) {
    std::vector<double> loss(seeds);
    parallel_chunks(seeds, workers, [&](std::int64_t s) {
      const PlantedInstance inst = planted_instance(k, questions, eps, static_cast<std::uint64_t>(s));
      const RoundingResult r = round_solution(inst.perturbed, inst.game, substream_seed(s, 1));
      loss[s] = 1.0 - r.win_probability.get_d();
    });
    StudyRow row;
    row.epsilon = eps;
    double sum = 0.0, sq = 0.0;
    for (double l : loss) {
      sum += l;
      sq += l * l;
    }
    row.mean_loss = sum / seeds;
    row.std_error =
        seeds > 1 ? std::sqrt(std::max(0.0, (sq - seeds * row.mean_loss * row.mean_loss) / (seeds - 1)) / seeds) : 0.0;
    row.scale = std::sqrt(eps * std::log(static_cast<double>(k)));
    row.ratio = row.scale > 0.0 ? row.mean_loss / row.scale : 0.0;
    report.empirical_constant = std::max(report.empirical_constant, row.ratio);
    report.rows.push_back(row);
  }
  return report;
}

std::string study_csv(const StudyReport& report) {
  std::string out = "k,epsilon,mean_loss,std_error,sqrt_eps_log_k,ratio\n";
  char buf[256];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.10g,%.10g,%.10g\n", report.k, r.epsilon, r.mean_loss, r.std_error,
                  r.scale, r.ratio);
    out += buf;
  }
  return out;
}

XorBias xor2_entangled_bias(const ModMGame& game, const SdpOptions& options) {
  require(game.players() == 2 && game.modulus() == 2, ErrorCode::kUnsupported,
          "entangled bias needs a two-player XOR game");
  const int nx = game.question_count(0), ny = game.question_count(1);
  GramProblem prob;
  prob.n = nx + ny;
  prob.cost = Eigen::MatrixXd::Zero(prob.n, prob.n);
  for (const auto& e : game.support()) {
    const double w = e.weight.get_d() * (e.target == 0 ? 1.0 : -1.0);
    prob.cost(e.questions[0], nx + e.questions[1]) += w / 2;
    prob.cost(nx + e.questions[1], e.questions[0]) += w / 2;
  }
  for (int i = 0; i < prob.n; ++i) prob.unit_groups.push_back({i});
  const AdmmResult res = run_admm(prob, Eigen::MatrixXd::Ones(prob.n, prob.n), options);
  XorBias out;
  out.converged = res.converged;
  for (int i = 0; i < prob.n; ++i) {
    Eigen::VectorXd vec = res.factor.row(i).transpose();
    const double n = vec.norm();
    if (n > 0.0) vec /= n;
    (i < nx ? out.a : out.b).push_back(vec);
  }
  for (const auto& e : game.support())
    out.bias += e.weight.get_d() * (e.target == 0 ? 1.0 : -1.0) * out.a[e.questions[0]].dot(out.b[e.questions[1]]);
  return out;
}

namespace {

const Json& field(const Json& doc, const char* name) {
  require(doc.is_object() && doc.contains(name), ErrorCode::kParse, std::string("missing field '") + name + "'");
  return doc.at(name);
}

Json vectors_to_json(const std::vector<std::vector<Eigen::VectorXd>>& side) {
  Json out = Json::array();
  for (const auto& block : side) {
    Json b = Json::array();
    for (const auto& vec : block) b.push_back(std::vector<double>(vec.data(), vec.data() + vec.size()));
    out.push_back(b);
  }
  return out;
}

std::vector<std::vector<Eigen::VectorXd>> vectors_from_json(const Json& doc) {
  std::vector<std::vector<Eigen::VectorXd>> side;
  for (const auto& b : doc) {
    side.emplace_back();
    for (const auto& vec : b) {
      const auto values = vec.get<std::vector<double>>();
      side.back().push_back(Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
    }
  }
  return side;
}

}  // namespace

UniqueGame unique_game_from_json(const Json& doc) {
  UniqueGame g;
  std::map<std::string, int> xi, yi;
  try {
    g.k = field(doc, "k").get<int>();
    for (const auto& p : field(doc, "pairs")) {
      const std::string x = label_from_json(field(p, "x")), y = label_from_json(field(p, "y"));
      if (!xi.count(x)) {
        xi[x] = static_cast<int>(g.x_labels.size());
        g.x_labels.push_back(x);
      }
      if (!yi.count(y)) {
        yi[y] = static_cast<int>(g.y_labels.size());
        g.y_labels.push_back(y);
      }
      UniquePair pair{xi[x], yi[y], rational_from_json(field(p, "w")), {}};
      for (int v : field(p, "perm").get<std::vector<int>>()) pair.perm.push_back(v - 1);
      g.pairs.push_back(std::move(pair));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed unique game: ") + e.what());
  }
  g.validate();
  return g;
}

Json unique_game_to_json(const UniqueGame& game) {
  Json doc;
  doc["k"] = game.k;
  Json pairs = Json::array();
  for (const auto& p : game.pairs) {
    std::vector<int> perm;
    for (int v : p.perm) perm.push_back(v + 1);
    pairs.push_back({{"x", game.x_labels[p.x]}, {"y", game.y_labels[p.y]}, {"w", to_string(p.weight)}, {"perm", perm}});
  }
  doc["pairs"] = pairs;
  return doc;
}

Json solution_to_json(const UniqueGame& game, const VectorSolution& sol) {
  Json doc;
  doc["game"] = unique_game_to_json(game);
  doc["dimension"] = sol.dimension;
  doc["objective"] = sol.objective;
  doc["converged"] = sol.converged;
  doc["iterations"] = sol.iterations;
  doc["u"] = vectors_to_json(sol.u);
  doc["v"] = vectors_to_json(sol.v);
  return doc;
}

VectorSolution solution_from_json(const Json& doc) {
  VectorSolution sol;
  try {
    sol.dimension = field(doc, "dimension").get<int>();
    sol.u = vectors_from_json(field(doc, "u"));
    sol.v = vectors_from_json(field(doc, "v"));
    if (doc.contains("objective")) sol.objective = doc.at("objective").get<double>();
    if (doc.contains("converged")) sol.converged = doc.at("converged").get<bool>();
    if (doc.contains("iterations")) sol.iterations = doc.at("iterations").get<int>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed solution: ") + e.what());
  }
  return sol;
}

Json rounding_to_json(const UniqueGame& game, const RoundingResult& r) {
  Json doc;
  Json a = Json::object(), b = Json::object();
  for (std::size_t x = 0; x < r.a.size(); ++x) a[game.x_labels[x]] = r.a[x] + 1;
  for (std::size_t y = 0; y < r.b.size(); ++y) b[game.y_labels[y]] = r.b[y] + 1;
  doc["a"] = a;
  doc["b"] = b;
  doc["win_probability"] = to_string(r.win_probability);
  doc["r"] = r.r;
  return doc;
}

Json diagnostics_to_json(const RoundingDiagnostics& d) {
  Json doc;
  doc["r"] = d.r;
  Json pairs = Json::array();
  for (const auto& p : d.pairs) {
    pairs.push_back({{"x", p.x},
                     {"y", p.y},
                     {"epsilon", p.epsilon},
                     {"epsilon_i", p.epsilon_i},
                     {"s_x", p.s_x},
                     {"s_y", p.s_y},
                     {"m", p.m_size},
                     {"m_c", p.mc_size},
                     {"expected_m_c", p.expected_mc},
                     {"m_c_bound", p.mc_bound},
                     {"min_m", p.min_m},
                     {"m_bound", p.m_bound},
                     {"expected_matched_epsilon", p.expected_matched_epsilon},
                     {"matched_bound", p.matched_bound},
                     {"small_regime", p.in_small_regime()},
                     {"bounds_hold", p.bounds_hold()}});
  }
  doc["pairs"] = pairs;
  return doc;
}

}  // namespace nlg
