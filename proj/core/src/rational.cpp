#include "nlg/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>

#include "nlg/errors.hpp"

namespace nlg {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidGame: return "invalid-game";
    case ErrorCode::kIncompleteStrategy: return "incomplete-strategy";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kBudgetExceeded: return "budget-exceeded";
    case ErrorCode::kConnectivity: return "connectivity";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kDegenerateUnitary: return "degenerate-unitary";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kNonProjective: return "non-projective";
    case ErrorCode::kSingularSystem: return "singular-system";
    case ErrorCode::kCharacteristic: return "characteristic";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kParse: return "parse";
  }
  return "unknown";
}

namespace {

bool is_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

mpz_class parse_integer(std::string_view s, std::string_view whole) {
  std::string_view body = s;
  if (!body.empty() && (body[0] == '-' || body[0] == '+')) body.remove_prefix(1);
  if (!is_digits(body)) fail(ErrorCode::kParse, "not a rational: '" + std::string(whole) + "'");
  std::string text(s[0] == '+' ? s.substr(1) : s);
  return mpz_class(text, 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) fail(ErrorCode::kParse, "empty rational");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    mpz_class num = parse_integer(s.substr(0, slash), text);
    mpz_class den = parse_integer(s.substr(slash + 1), text);
    if (den == 0) fail(ErrorCode::kParse, "zero denominator in '" + std::string(text) + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }

  // Decimal with optional exponent, read exactly.
  bool negative = false;
  std::string_view rest = s;
  if (rest[0] == '-' || rest[0] == '+') {
    negative = rest[0] == '-';
    rest.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = rest.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = rest.substr(e + 1);
    mpz_class ez = parse_integer(exp_text, text);
    if (!ez.fits_slong_p() || abs(ez) > 4000) fail(ErrorCode::kParse, "exponent out of range in '" + std::string(text) + "'");
    exponent = ez.get_si();
    rest = rest.substr(0, e);
  }
  std::string digits;
  if (auto dot = rest.find('.'); dot != std::string_view::npos) {
    std::string_view ip = rest.substr(0, dot), fp = rest.substr(dot + 1);
    if ((!ip.empty() && !is_digits(ip)) || (!fp.empty() && !is_digits(fp)) || (ip.empty() && fp.empty()))
      fail(ErrorCode::kParse, "not a rational: '" + std::string(text) + "'");
    digits = std::string(ip) + std::string(fp);
    exponent -= static_cast<long>(fp.size());
  } else {
    if (!is_digits(rest)) fail(ErrorCode::kParse, "not a rational: '" + std::string(text) + "'");
    digits = std::string(rest);
  }
  mpz_class num(digits, 10);
  if (negative) num = -num;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  Rational q = exponent >= 0 ? Rational(num * scale) : Rational(num, scale);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_str();
}

mpz_class floor(const Rational& q) {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Rational frac(const Rational& q) { return q - Rational(floor(q)); }

Rational simplest_between(const Rational& lo_in, const Rational& hi_in) {
  Rational lo = lo_in, hi = hi_in;
  if (lo > hi) std::swap(lo, hi);
  if (lo <= 0 && hi >= 0) return Rational(0);
  if (hi < 0) return -simplest_between(-hi, -lo);
  // Continued-fraction descent on positive intervals.
  mpz_class fl = floor(lo);
  if (Rational(fl) == lo) return lo;
  if (Rational(fl + 1) <= hi) return Rational(fl + 1);
  Rational inner = simplest_between(1 / (hi - fl), 1 / (lo - fl));
  Rational out = Rational(fl) + 1 / inner;
  out.canonicalize();
  return out;
}

}  // namespace nlg
