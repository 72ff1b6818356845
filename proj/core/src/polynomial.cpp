#include "nlg/polynomial.hpp"

#include <algorithm>

#include "nlg/errors.hpp"

namespace nlg {

Polynomial::Polynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  for (auto& c : coeffs_) c.canonicalize();
  trim();
}

Polynomial Polynomial::constant(const Rational& c) { return Polynomial({c}); }

Polynomial Polynomial::monomial(const Rational& c, int degree) {
  std::vector<Rational> v(degree + 1, Rational(0));
  v[degree] = c;
  return Polynomial(std::move(v));
}

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational Polynomial::operator()(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Polynomial::eval(double x) const {
  double acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + it->get_d();
  return acc;
}

Polynomial Polynomial::derivative() const {
  std::vector<Rational> d;
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d.push_back(coeffs_[i] * static_cast<long>(i));
  return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
  if (is_zero()) return {};
  std::vector<Rational> a(coeffs_.size() + 1, Rational(0));
  for (std::size_t i = 0; i < coeffs_.size(); ++i) a[i + 1] = coeffs_[i] / static_cast<long>(i + 1);
  return Polynomial(std::move(a));
}

Polynomial Polynomial::compose_affine(const Rational& a, const Rational& b) const {
  Polynomial inner({a, b});
  Polynomial acc;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * inner + constant(*it);
  return acc;
}

Rational Polynomial::integrate(const Rational& lo, const Rational& hi) const {
  Polynomial a = antiderivative();
  return a(hi) - a(lo);
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<Rational> c(std::max(a.coeffs_.size(), b.coeffs_.size()), Rational(0));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + Rational(-1) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> c(a.coeffs_.size() + b.coeffs_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Polynomial(std::move(c));
}

Polynomial operator*(const Rational& c, const Polynomial& p) {
  std::vector<Rational> v = p.coeffs_;
  for (auto& x : v) x *= c;
  return Polynomial(std::move(v));
}

std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b) {
  require(!b.is_zero(), ErrorCode::kPrecondition, "polynomial division by zero");
  std::vector<Rational> rem = a.coeffs();
  const int db = b.degree();
  if (a.degree() < db) return {Polynomial(), a};
  std::vector<Rational> quo(a.degree() - db + 1, Rational(0));
  for (int i = a.degree(); i >= db; --i) {
    Rational f = rem[i] / b.leading();
    quo[i - db] = f;
    if (f == 0) continue;
    for (int j = 0; j <= db; ++j) rem[i - db + j] -= f * b.coeff(j);
  }
  rem.resize(db);
  return {Polynomial(std::move(quo)), Polynomial(std::move(rem))};
}

namespace {

Polynomial monic(const Polynomial& p) {
  if (p.is_zero()) return p;
  return (1 / p.leading()) * p;
}

int sign_of(const Rational& r) { return sgn(r); }

// Coefficients scaled to coprime integers; returns |leading coefficient|.
mpz_class primitive_leading(const Polynomial& p) {
  mpz_class l = 1;
  for (const auto& c : p.coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  mpz_class g = 0;
  for (const auto& c : p.coeffs()) {
    mpz_class n = c.get_num() * (l / c.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
  }
  mpz_class lead = p.leading().get_num() * (l / p.leading().get_den()) / g;
  return abs(lead);
}

}  // namespace

Polynomial gcd(Polynomial a, Polynomial b) {
  while (!b.is_zero()) {
    Polynomial r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

Polynomial squarefree_part(const Polynomial& p) {
  if (p.degree() <= 0) return monic(p);
  Polynomial g = gcd(p, p.derivative());
  return monic(divmod(p, g).first);
}

std::vector<Polynomial> sturm_sequence(const Polynomial& p) {
  std::vector<Polynomial> seq;
  if (p.is_zero()) return seq;
  seq.push_back(p);
  Polynomial d = p.derivative();
  if (d.is_zero()) return seq;
  seq.push_back(d);
  while (true) {
    Polynomial r = divmod(seq[seq.size() - 2], seq.back()).second;
    if (r.is_zero()) break;
    seq.push_back(Rational(-1) * r);
  }
  return seq;
}

namespace {

int sign_variations(const std::vector<Polynomial>& seq, const Rational& x) {
  int count = 0, prev = 0;
  for (const auto& q : seq) {
    int s = sign_of(q(x));
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++count;
    prev = s;
  }
  return count;
}

}  // namespace

int count_roots(const std::vector<Polynomial>& sturm, const Rational& lo, const Rational& hi) {
  return sign_variations(sturm, lo) - sign_variations(sturm, hi);
}

std::vector<IsolatedRoot> isolate_roots(const Polynomial& p, const Rational& lo, const Rational& hi,
                                        const Rational& width) {
  std::vector<IsolatedRoot> out;
  if (p.degree() <= 0) return out;
  const Polynomial q = squarefree_part(p);
  if (q.degree() <= 0) return out;
  const auto seq = sturm_sequence(q);
  const mpz_class lead = primitive_leading(q);
  // Two distinct rationals with denominators dividing `lead` are at least
  // 1/lead^2 apart; below that width the simplest rational in an isolating
  // interval is the only possible rational root.
  const Rational certify_width = Rational(1) / Rational(lead * lead);
  const Rational target_width = std::min(width, certify_width);

  // Roots in the open interval (a, b).
  auto open_count = [&](const Rational& a, const Rational& b) {
    return count_roots(seq, a, b) - (q(b) == 0 ? 1 : 0);
  };

  std::vector<std::pair<Rational, Rational>> stack = {{lo, hi}};
  std::vector<std::pair<Rational, Rational>> isolated;
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    int n = open_count(a, b);
    if (n == 0) continue;
    if (n == 1) {
      isolated.emplace_back(a, b);
      continue;
    }
    Rational mid = (a + b) / 2;
    if (q(mid) == 0) out.push_back({mid, mid, true});
    stack.emplace_back(mid, b);
    stack.emplace_back(a, mid);
  }

  for (auto [a, b] : isolated) {
    // Move ends that are themselves roots inward until the single interior
    // root is bracketed by nonzero values, or is hit exactly.
    bool exact = false;
    while (!exact && (q(a) == 0 || q(b) == 0)) {
      Rational mid = (a + b) / 2;
      if (q(mid) == 0) {
        out.push_back({mid, mid, true});
        exact = true;
      } else if (open_count(a, mid) == 1) {
        b = mid;
      } else {
        a = mid;
      }
    }
    if (exact) continue;
    const int sa = sign_of(q(a));
    while (b - a >= target_width) {
      Rational mid = (a + b) / 2;
      int sm = sign_of(q(mid));
      if (sm == 0) {
        out.push_back({mid, mid, true});
        exact = true;
        break;
      }
      if (sm == sa)
        a = mid;
      else
        b = mid;
    }
    if (exact) continue;
    Rational s = simplest_between(a, b);
    if (q(s) == 0)
      out.push_back({s, s, true});
    else
      out.push_back({a, b, false});
  }
  std::sort(out.begin(), out.end(), [](const IsolatedRoot& x, const IsolatedRoot& y) { return x.lo < y.lo; });
  return out;
}

Rational PiecewisePolynomial::operator()(const Rational& x) const {
  if (pieces.empty() || x < breakpoints.front() || x > breakpoints.back()) return 0;
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  std::size_t i = static_cast<std::size_t>(it - breakpoints.begin());
  i = i == 0 ? 0 : i - 1;
  if (i >= pieces.size()) i = pieces.size() - 1;
  return pieces[i](x);
}

Rational PiecewisePolynomial::integrate() const {
  Rational total = 0;
  for (std::size_t i = 0; i < pieces.size(); ++i) total += pieces[i].integrate(breakpoints[i], breakpoints[i + 1]);
  return total;
}

PiecewisePolynomial PiecewisePolynomial::antiderivative() const {
  PiecewisePolynomial out;
  out.breakpoints = breakpoints;
  Rational carry = 0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    Polynomial a = pieces[i].antiderivative();
    Polynomial shifted = a + Polynomial::constant(carry - a(breakpoints[i]));
    carry = shifted(breakpoints[i + 1]);
    out.pieces.push_back(std::move(shifted));
  }
  return out;
}

namespace {

mpz_class binomial(int n, int k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

mpz_class factorial(int n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

// Pieces of (1/power!) * sum_{j <= k} (-1)^j C(n, j) (x - j)^power on [k, k+1].
PiecewisePolynomial irwin_hall_piecewise(int n, int power) {
  PiecewisePolynomial out;
  for (int k = 0; k <= n; ++k) out.breakpoints.push_back(Rational(k));
  const Rational scale = Rational(1) / Rational(factorial(power));
  Polynomial running;
  for (int k = 0; k < n; ++k) {
    Polynomial term = Polynomial::monomial(1, power).compose_affine(Rational(-k), 1);
    Rational c = Rational(binomial(n, k)) * (k % 2 == 0 ? 1 : -1) * scale;
    running = running + c * term;
    out.pieces.push_back(running);
  }
  return out;
}

}  // namespace

PiecewisePolynomial irwin_hall_pdf(int n) {
  require(n >= 1, ErrorCode::kPrecondition, "Irwin-Hall density needs at least one summand");
  return irwin_hall_piecewise(n, n - 1);
}

PiecewisePolynomial irwin_hall_cdf(int n) {
  require(n >= 1, ErrorCode::kPrecondition, "Irwin-Hall distribution needs at least one summand");
  return irwin_hall_piecewise(n, n);
}

}  // namespace nlg
