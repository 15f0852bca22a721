#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace liesym {

/// Exact rational number with 64-bit numerator/denominator.
///
/// Intermediate products are carried in 128 bits; a result that does not fit
/// back into 64 bits throws std::overflow_error instead of wrapping.
class Rational {
public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d);

  [[nodiscard]] std::int64_t num() const { return num_; }
  [[nodiscard]] std::int64_t den() const { return den_; }

  [[nodiscard]] bool is_zero() const { return num_ == 0; }
  [[nodiscard]] bool is_one() const { return num_ == 1 && den_ == 1; }
  [[nodiscard]] bool is_integer() const { return den_ == 1; }
  [[nodiscard]] bool is_negative() const { return num_ < 0; }
  [[nodiscard]] int sign() const { return (num_ > 0) - (num_ < 0); }

  [[nodiscard]] double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }
  [[nodiscard]] std::string str() const;

  /// Integer power; negative exponents invert (zero base throws domain_error).
  [[nodiscard]] Rational pow(std::int64_t e) const;

  /// Exact rational power if one exists (e.g. (4/9)^(1/2) = 2/3).
  [[nodiscard]] std::optional<Rational> exact_pow(const Rational& e) const;

  [[nodiscard]] Rational abs() const { return num_ < 0 ? -*this : *this; }

  /// Parses "3", "-3/4" or a plain decimal such as "0.125".
  static Rational parse(std::string_view text);

  /// Nearest rational to a double with a bounded denominator.
  static Rational from_double(double v, std::int64_t max_den = 1'000'000);

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const;

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
  static Rational from_wide(__int128 n, __int128 d);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace liesym
