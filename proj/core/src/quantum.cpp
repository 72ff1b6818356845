#include "nlg/quantum.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "nlg/errors.hpp"

namespace nlg {

namespace {

using Complex = std::complex<double>;

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Applies op to tensor factor `player` of v.
CVector apply_local(const CVector& v, const std::vector<int>& dims, int player, const CMatrix& op) {
  long left = 1, right = 1;
  for (int p = 0; p < player; ++p) left *= dims[p];
  for (std::size_t p = player + 1; p < dims.size(); ++p) right *= dims[p];
  const long d = dims[player];
  CVector out = CVector::Zero(v.size());
  for (long l = 0; l < left; ++l)
    for (long i = 0; i < d; ++i)
      for (long k = 0; k < d; ++k) {
        const Complex c = op(i, k);
        if (c == Complex(0)) continue;
        for (long r = 0; r < right; ++r) out[(l * d + i) * right + r] += c * v[(l * d + k) * right + r];
      }
  return out;
}

}  // namespace

double projective_residual(const Measurement& m) {
  if (m.empty()) return 0.0;
  const long d = m[0].rows();
  double r = 0.0;
  CMatrix sum = CMatrix::Zero(d, d);
  for (std::size_t a = 0; a < m.size(); ++a) {
    const CMatrix& p = m[a];
    r = std::max(r, max_abs(p - p.adjoint()));
    r = std::max(r, max_abs(p * p - p));
    for (std::size_t b = a + 1; b < m.size(); ++b) r = std::max(r, max_abs(p * m[b]));
    sum += p;
  }
  return std::max(r, max_abs(sum - CMatrix::Identity(d, d)));
}

void validate_strategy(const ModMGame& game, const QuantumStrategy& s, double tol) {
  const int t = game.players();
  require(static_cast<int>(s.state.dims.size()) == t, ErrorCode::kDimensionMismatch,
          "state has " + std::to_string(s.state.dims.size()) + " factors, game has " + std::to_string(t) + " players");
  long total = 1;
  for (int d : s.state.dims) {
    require(d >= 1, ErrorCode::kDimensionMismatch, "local dimensions must be positive");
    total *= d;
  }
  require(total == s.state.amplitudes.size(), ErrorCode::kDimensionMismatch,
          "state length does not match the product of local dimensions");
  require(std::abs(s.state.amplitudes.squaredNorm() - 1.0) <= tol, ErrorCode::kPrecondition, "state is not normalized");
  require(static_cast<int>(s.measurements.size()) == t, ErrorCode::kDimensionMismatch, "one measurement list per player expected");
  for (int p = 0; p < t; ++p) {
    require(static_cast<int>(s.measurements[p].size()) == game.question_count(p), ErrorCode::kDimensionMismatch,
            "player " + std::to_string(p + 1) + " needs one measurement per question");
    for (const auto& m : s.measurements[p]) {
      require(static_cast<int>(m.size()) == game.modulus(), ErrorCode::kDimensionMismatch,
              "each measurement needs one projector per answer");
      for (const auto& proj : m)
        require(proj.rows() == s.state.dims[p] && proj.cols() == s.state.dims[p], ErrorCode::kDimensionMismatch,
                "projector size does not match the local dimension");
      const double r = projective_residual(m);
      require(r <= tol, ErrorCode::kNonProjective,
              "measurement of player " + std::to_string(p + 1) + " is not projective (residual " + std::to_string(r) + ")");
    }
  }
}

std::vector<double> outcome_distribution(const QuantumStrategy& s, const std::vector<int>& questions, int outcomes) {
  const int t = static_cast<int>(s.state.dims.size());
  std::size_t size = 1;
  for (int i = 0; i < t; ++i) size *= outcomes;
  std::vector<double> probs(size, 0.0);
  // Depth-first over players, projecting one factor at a time.
  std::vector<CVector> stack(t + 1);
  stack[0] = s.state.amplitudes;
  std::vector<int> answer(t, 0);
  int level = 0;
  std::vector<int> next(t + 1, 0);
  while (level >= 0) {
    if (level == t) {
      std::size_t idx = 0;
      for (int a : answer) idx = idx * outcomes + a;
      probs[idx] = stack[t].squaredNorm();
      --level;
      continue;
    }
    if (next[level] == outcomes) {
      next[level] = 0;
      --level;
      continue;
    }
    const int a = next[level]++;
    answer[level] = a;
    stack[level + 1] = apply_local(stack[level], s.state.dims, level, s.measurements[level][questions[level]][a]);
    ++level;
  }
  return probs;
}

double winning_probability(const ModMGame& game, const QuantumStrategy& s, double tol) {
  validate_strategy(game, s, tol);
  const int t = game.players();
  const int m = game.modulus();
  double value = 0.0;
  for (const auto& e : game.support()) {
    auto probs = outcome_distribution(s, e.questions, m);
    double total = 0.0, win = 0.0;
    std::vector<int> a(t, 0);
    for (std::size_t idx = 0; idx < probs.size(); ++idx) {
      std::size_t rest = idx;
      int sum = 0;
      for (int p = t - 1; p >= 0; --p) {
        a[p] = static_cast<int>(rest % m);
        rest /= m;
      }
      for (int p = 0; p < t; ++p) sum = game.add(sum, a[p]);
      total += probs[idx];
      if (sum == e.target) win += probs[idx];
    }
    require(std::abs(total - 1.0) <= tol, ErrorCode::kNonProjective, "outcome distribution does not sum to 1");
    value += e.weight.get_d() * win;
  }
  return value;
}

QuantumStrategy embed_deterministic(const ModMGame& game, const DeterministicStrategy& s) {
  QuantumStrategy q;
  q.state.dims.assign(game.players(), 1);
  q.state.amplitudes = CVector::Ones(1);
  q.measurements.resize(game.players());
  for (int p = 0; p < game.players(); ++p)
    for (int x = 0; x < game.question_count(p); ++x) {
      Measurement m(game.modulus(), CMatrix::Zero(1, 1));
      m[s.answers[p][x]](0, 0) = 1.0;
      q.measurements[p].push_back(m);
    }
  return q;
}

namespace {

Measurement angle_measurement(int m, double turns) {
  CMatrix v(m, m);
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  for (int a = 0; a < m; ++a)
    for (int k = 0; k < m; ++k) {
      // (F^dagger)_{ak} = w^{-ak}/sqrt(m), then the phase e^{2 pi i k theta}.
      const double angle = 2.0 * std::numbers::pi * (-static_cast<double>(a * k % m) / m + k * turns);
      v(a, k) = norm * std::polar(1.0, angle);
    }
  Measurement out;
  for (int a = 0; a < m; ++a) {
    CVector row = v.row(a).adjoint();
    out.push_back(row * row.adjoint());
  }
  return out;
}

}  // namespace

QuantumStrategy ghz_angle_strategy(const AngleGameDiscrete& game) {
  const int t = game.players();
  const int m = game.modulus();
  QuantumStrategy q;
  q.state.dims.assign(t, m);
  long size = 1;
  for (int i = 0; i < t; ++i) size *= m;
  q.state.amplitudes = CVector::Zero(size);
  long stride = 0;
  for (int i = 0; i < t; ++i) stride = stride * m + 1;
  for (int k = 0; k < m; ++k) q.state.amplitudes[k * stride] = 1.0 / std::sqrt(static_cast<double>(m));
  q.measurements.resize(t);
  for (int p = 0; p < t; ++p)
    for (const auto& angle : game.angles()[p]) q.measurements[p].push_back(angle_measurement(m, angle.get_d()));
  return q;
}

QuantumStrategy ghz_angle_strategy(const BoyerGame& game) { return ghz_angle_strategy(boyer_to_angle(game)); }

PureState schmidt_state(const SchmidtStrategySpec& spec, int players) {
  require(spec.d >= 1 && static_cast<int>(spec.c.size()) == spec.d, ErrorCode::kDimensionMismatch,
          "Schmidt coefficients must have length d");
  double norm = 0.0;
  for (double c : spec.c) {
    require(c > 0, ErrorCode::kPrecondition, "Schmidt coefficients must be positive");
    norm += c * c;
  }
  require(std::abs(norm - 1.0) <= 1e-9, ErrorCode::kPrecondition, "Schmidt coefficients must have unit 2-norm");
  PureState s;
  s.dims.assign(players, spec.d);
  long size = 1;
  for (int i = 0; i < players; ++i) size *= spec.d;
  s.amplitudes = CVector::Zero(size);
  long stride = 0;
  for (int i = 0; i < players; ++i) stride = stride * spec.d + 1;
  for (int i = 0; i < spec.d; ++i) s.amplitudes[i * stride] = spec.c[i];
  return s;
}

QuantumStrategy strategy_from_schmidt(const SchmidtStrategySpec& spec, int players) {
  QuantumStrategy q;
  q.state = schmidt_state(spec, players);
  q.measurements = spec.measurements;
  return q;
}

PerfectionReport verify_schmidt_perfection(const ModMGame& game, const SchmidtStrategySpec& spec, double tol) {
  const double value = winning_probability(game, strategy_from_schmidt(spec, game.players()), tol);
  PerfectionReport r;
  r.residual = std::max(0.0, 1.0 - value);
  r.is_perfect = r.residual <= tol;
  return r;
}

double operator_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  const CMatrix h = m.adjoint() * m;
  const long n = h.rows();
  const double scale = max_abs(h);
  if (scale == 0.0) return 0.0;
  // Fixed, generic starting vector so repeated calls agree.
  CVector v(n);
  for (long i = 0; i < n; ++i) v[i] = Complex(1.0 + 0.37 * i, 0.21 * ((i * 7) % 5));
  v.normalize();
  double lambda = 0.0;
  constexpr int kMaxIterations = 200000;
  for (int it = 0; it < kMaxIterations; ++it) {
    CVector w = h * v;
    lambda = v.dot(w).real();
    const double residual = (w - lambda * v).norm();
    const double wn = w.norm();
    if (wn == 0.0) break;
    v = w / wn;
    if (residual <= 1e-12 * std::max(1.0, scale)) break;
  }
  // Rayleigh quotient of the final iterate.
  lambda = v.dot(h * v).real();
  return std::sqrt(std::max(0.0, lambda));
}

CauchySchwarzSides operator_cs_check(const std::vector<CMatrix>& a, const std::vector<CMatrix>& b) {
  require(a.size() == b.size() && !a.empty(), ErrorCode::kDimensionMismatch, "need equally many A and B matrices");
  const long n = a[0].rows();
  CMatrix ab = CMatrix::Zero(n, n), aa = CMatrix::Zero(n, n), bb = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(a[i].rows() == n && a[i].cols() == n && b[i].rows() == n && b[i].cols() == n,
            ErrorCode::kDimensionMismatch, "all matrices must be square of the same size");
    ab += a[i] * b[i];
    aa += a[i] * a[i].adjoint();
    bb += b[i].adjoint() * b[i];
  }
  return {operator_norm(ab), std::sqrt(operator_norm(aa)) * std::sqrt(operator_norm(bb))};
}

}  // namespace nlg
