#pragma once

#include <utility>
#include <vector>

#include "nlg/rational.hpp"

namespace nlg {

// Univariate polynomial with exact rational coefficients, lowest degree first.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> coeffs);
  static Polynomial constant(const Rational& c);
  static Polynomial monomial(const Rational& c, int degree);

  // -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  Rational coeff(int i) const { return i < static_cast<int>(coeffs_.size()) ? coeffs_[i] : Rational(0); }
  Rational leading() const { return is_zero() ? Rational(0) : coeffs_.back(); }

  Rational operator()(const Rational& x) const;
  double eval(double x) const;

  Polynomial derivative() const;
  // Antiderivative with zero constant term.
  Polynomial antiderivative() const;
  // p(a + b x).
  Polynomial compose_affine(const Rational& a, const Rational& b) const;
  Rational integrate(const Rational& lo, const Rational& hi) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Rational& c, const Polynomial& p);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

// Quotient and remainder of a / b (b nonzero).
std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b);
Polynomial gcd(Polynomial a, Polynomial b);
// p / gcd(p, p'), made monic.
Polynomial squarefree_part(const Polynomial& p);

std::vector<Polynomial> sturm_sequence(const Polynomial& p);
// Number of distinct real roots in (lo, hi].
int count_roots(const std::vector<Polynomial>& sturm, const Rational& lo, const Rational& hi);

// A real root known to lie in [lo, hi]; exact roots have lo == hi.
struct IsolatedRoot {
  Rational lo;
  Rational hi;
  bool exact = false;
};

// Distinct real roots of p in the open interval (lo, hi), each isolated to
// width below `width`. Rational roots are always reported exactly.
std::vector<IsolatedRoot> isolate_roots(const Polynomial& p, const Rational& lo, const Rational& hi,
                                        const Rational& width);

// Polynomial pieces on [breakpoints[i], breakpoints[i+1]].
struct PiecewisePolynomial {
  std::vector<Rational> breakpoints;
  std::vector<Polynomial> pieces;

  // Value at x; at an interior breakpoint the right-hand piece is used, and
  // zero is returned outside the domain.
  Rational operator()(const Rational& x) const;
  Rational integrate() const;
  PiecewisePolynomial antiderivative() const;  // continuous, zero at the left end
};

// Density of the sum of n independent uniform [0, 1) variables on [0, n].
PiecewisePolynomial irwin_hall_pdf(int n);
// Distribution function of the same sum on [0, n].
PiecewisePolynomial irwin_hall_cdf(int n);

}  // namespace nlg
