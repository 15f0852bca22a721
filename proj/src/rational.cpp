#include "liesym/rational.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace liesym {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 r = a % b;
    a = b;
    b = r;
  }
  return a;
}

bool fits64(__int128 v) {
  return v >= std::numeric_limits<std::int64_t>::min() &&
         v <= std::numeric_limits<std::int64_t>::max();
}

// Integer k-th root of a non-negative value, if exact.
std::optional<std::int64_t> exact_root(std::int64_t v, std::int64_t k) {
  if (v < 0) return std::nullopt;
  if (v == 0 || v == 1) return v;
  auto guess = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(v), 1.0 / static_cast<double>(k))));
  for (std::int64_t c = std::max<std::int64_t>(guess - 1, 0); c <= guess + 1; ++c) {
    __int128 p = 1;
    bool over = false;
    for (std::int64_t i = 0; i < k; ++i) {
      p *= c;
      if (p > v) {
        over = true;
        break;
      }
    }
    if (!over && p == v) return c;
  }
  return std::nullopt;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  *this = from_wide(n, d);
}

Rational Rational::from_wide(__int128 n, __int128 d) {
  if (d == 0) throw std::domain_error("division by zero");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  if (!fits64(n) || !fits64(d)) throw std::overflow_error("rational overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(n);
  r.den_ = static_cast<std::int64_t>(d);
  return r;
}

Rational operator+(const Rational& a, const Rational& b) {
  if (a.den_ == 1 && b.den_ == 1) {
    __int128 s = static_cast<__int128>(a.num_) + b.num_;
    if (!fits64(s)) throw std::overflow_error("rational overflow");
    return Rational(static_cast<std::int64_t>(s));
  }
  return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                             static_cast<__int128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::domain_error("division by zero");
  return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
}

Rational Rational::operator-() const {
  if (num_ == std::numeric_limits<std::int64_t>::min()) throw std::overflow_error("rational overflow");
  Rational r = *this;
  r.num_ = -num_;
  return r;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
  __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Rational Rational::pow(std::int64_t e) const {
  if (e < 0) {
    if (num_ == 0) throw std::domain_error("division by zero");
    return Rational(1) / pow(-e);
  }
  Rational result(1);
  Rational base = *this;
  while (e > 0) {
    if (e & 1) result *= base;
    e >>= 1;
    if (e > 0) base *= base;
  }
  return result;
}

std::optional<Rational> Rational::exact_pow(const Rational& e) const {
  if (e.is_integer()) {
    if (is_zero() && e.is_negative()) return std::nullopt;
    return pow(e.num());
  }
  if (num_ < 0) {
    // Odd roots of negative numbers are real.
    if (e.den() % 2 == 0) return std::nullopt;
    auto r = (-*this).exact_pow(e);
    if (!r) return std::nullopt;
    return -*r;
  }
  auto n = exact_root(num_, e.den());
  auto d = exact_root(den_, e.den());
  if (!n || !d) return std::nullopt;
  if (*n == 0 && e.is_negative()) return std::nullopt;
  return Rational(*n, *d).pow(e.num());
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
  auto fail = [&] { return std::invalid_argument("not a rational number: '" + std::string(text) + "'"); };
  if (text.empty()) throw fail();
  bool neg = false;
  std::string_view body = text;
  if (body.front() == '-' || body.front() == '+') {
    neg = body.front() == '-';
    body.remove_prefix(1);
  }
  auto slash = body.find('/');
  auto dot = body.find('.');
  auto to_int = [&](std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) throw fail();
    return v;
  };
  Rational r;
  if (slash != std::string_view::npos) {
    r = Rational(to_int(body.substr(0, slash)), to_int(body.substr(slash + 1)));
  } else if (dot != std::string_view::npos) {
    auto ip = body.substr(0, dot);
    auto fp = body.substr(dot + 1);
    if (fp.size() > 18) throw fail();
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
    Rational whole = ip.empty() ? Rational(0) : Rational(to_int(ip));
    Rational frac = fp.empty() ? Rational(0) : Rational(to_int(fp), scale);
    r = whole + frac;
  } else {
    r = Rational(to_int(body));
  }
  return neg ? -r : r;
}

Rational Rational::from_double(double v, std::int64_t max_den) {
  if (!std::isfinite(v)) throw std::domain_error("non-finite value");
  // Continued-fraction convergents.
  bool neg = v < 0;
  double x = std::fabs(v);
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(x);
    if (a > 9.0e15) break;
    auto ai = static_cast<std::int64_t>(a);
    __int128 p2 = static_cast<__int128>(ai) * p1 + p0;
    __int128 q2 = static_cast<__int128>(ai) * q1 + q0;
    if (q2 > max_den || !fits64(p2)) break;
    p0 = p1;
    q0 = q1;
    p1 = static_cast<std::int64_t>(p2);
    q1 = static_cast<std::int64_t>(q2);
    double frac = x - a;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
  }
  if (q1 == 0) return Rational(0);
  Rational r(p1, q1);
  return neg ? -r : r;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace liesym
