#include "spectral_sdp/rational.hpp"

#include <charconv>
#include <cstdlib>
#include <limits>

#include "spectral_sdp/errors.hpp"

namespace spectral_sdp {

namespace {

std::int64_t checked_neg(std::int64_t a) {
  if (a == std::numeric_limits<std::int64_t>::min()) {
    throw CapacityError("rational arithmetic overflow (negation)");
  }
  return -a;
}

std::int64_t checked_abs(std::int64_t a) { return a < 0 ? checked_neg(a) : a; }

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec == std::errc::result_out_of_range) {
    throw CapacityError("rational component out of 64-bit range: '" + std::string(whole) + "'");
  }
  if (ec != std::errc() || ptr != last || first == last) {
    throw InvalidInput("malformed rational '" + std::string(whole) +
                       "' (expected \"num/den\" with integer parts)");
  }
  return value;
}

}  // namespace

std::int64_t checked_gcd(std::int64_t a, std::int64_t b) {
  a = checked_abs(a);
  b = checked_abs(b);
  while (b != 0) {
    const std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw CapacityError("rational arithmetic overflow (multiplication)");
  }
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw CapacityError("rational arithmetic overflow (addition)");
  }
  return out;
}

std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
  if (a == 0 || b == 0) return 0;
  const std::int64_t g = checked_gcd(a, b);
  return checked_abs(checked_mul(a / g, b));
}

Rational::Rational(std::int64_t num) : num_(num), den_(1) {}

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InvalidInput("rational with zero denominator");
  if (den < 0) {
    num = checked_neg(num);
    den = checked_neg(den);
  }
  const std::int64_t g = checked_gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

Rational Rational::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text, text));
  return Rational(parse_int(text.substr(0, slash), text), parse_int(text.substr(slash + 1), text));
}

std::int64_t Rational::floor() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

std::string Rational::to_string() const { return std::to_string(num_) + "/" + std::to_string(den_); }

Rational Rational::operator-() const {
  Rational r;
  r.num_ = checked_neg(num_);
  r.den_ = den_;
  return r;
}

Rational& Rational::operator+=(const Rational& rhs) {
  const std::int64_t g = checked_gcd(den_, rhs.den_);
  const std::int64_t lhs_scale = rhs.den_ / g;
  const std::int64_t rhs_scale = den_ / g;
  const std::int64_t num = checked_add(checked_mul(num_, lhs_scale), checked_mul(rhs.num_, rhs_scale));
  *this = Rational(num, checked_mul(den_, lhs_scale));
  return *this;
}

Rational& Rational::operator-=(const Rational& rhs) { return *this += -rhs; }

Rational& Rational::operator*=(const Rational& rhs) {
  // Cross-reduce first so that exact products stay small.
  const std::int64_t g1 = checked_gcd(num_, rhs.den_);
  const std::int64_t g2 = checked_gcd(rhs.num_, den_);
  const std::int64_t a = g1 == 0 ? 0 : num_ / g1;
  const std::int64_t d = g1 == 0 ? rhs.den_ : rhs.den_ / g1;
  const std::int64_t b = g2 == 0 ? 0 : rhs.num_ / g2;
  const std::int64_t c = g2 == 0 ? den_ : den_ / g2;
  *this = Rational(checked_mul(a, b), checked_mul(c, d));
  return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
  if (rhs.num_ == 0) throw InvalidInput("rational division by zero");
  return *this *= Rational(rhs.den_, rhs.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  // a.num * b.den vs b.num * a.den; 128-bit products never overflow here.
  const __int128 lhs = static_cast<__int128>(a.num()) * b.den();
  const __int128 rhs = static_cast<__int128>(b.num()) * a.den();
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

Rational rational_lcm(const Rational& a, const Rational& b) {
  if (a.num() <= 0 || b.num() <= 0) throw InvalidInput("rational_lcm requires positive arguments");
  return Rational(checked_lcm(a.num(), b.num()), checked_gcd(a.den(), b.den()));
}

}  // namespace spectral_sdp
