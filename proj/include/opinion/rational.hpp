#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "opinion/errors.hpp"

namespace opinion {

/// Exact rational number with 64-bit numerator and denominator.
///
/// Always kept in lowest terms with a positive denominator. Intermediate
/// products are formed in 128 bits; a result that does not fit back into
/// 64 bits raises LimitError rather than wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t num, std::int64_t den) { assign(num, den); }

  static Rational from_wide(__int128 num, __int128 den) {
    if (den == 0) throw ConfigError("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    __int128 g = gcd128(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    Rational r;
    r.num_ = narrow(num);
    r.den_ = narrow(den);
    return r;
  }

  /// Parses "[-]digits[.digits]" or "num/den". Sets *digits to the number of
  /// fractional decimal digits when the input is in decimal form.
  static Rational parse(std::string_view text, int* digits = nullptr) {
    if (digits) *digits = 0;
    if (text.empty()) throw ConfigError("empty number");
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      auto n = parse_integer(text.substr(0, slash));
      auto d = parse_integer(text.substr(slash + 1));
      return Rational(n, d);
    }
    bool negative = false;
    std::size_t pos = 0;
    if (text[0] == '-' || text[0] == '+') {
      negative = text[0] == '-';
      pos = 1;
    }
    __int128 num = 0;
    __int128 den = 1;
    int frac = 0;
    bool seen_digit = false;
    bool seen_point = false;
    for (; pos < text.size(); ++pos) {
      char c = text[pos];
      if (c == '.') {
        if (seen_point) throw ConfigError("malformed decimal '" + std::string(text) + "'");
        seen_point = true;
        continue;
      }
      if (c < '0' || c > '9') throw ConfigError("malformed decimal '" + std::string(text) + "'");
      seen_digit = true;
      num = num * 10 + (c - '0');
      if (seen_point) {
        den *= 10;
        ++frac;
      }
      if (frac > 18 || num > (__int128{1} << 100)) {
        throw LimitError("decimal '" + std::string(text) + "' has too many digits");
      }
    }
    if (!seen_digit) throw ConfigError("malformed decimal '" + std::string(text) + "'");
    if (digits) *digits = frac;
    return from_wide(negative ? -num : num, den);
  }

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  long double to_long_double() const {
    return static_cast<long double>(num_) / static_cast<long double>(den_);
  }

  /// Smallest k with value·10^k integral, or -1 if none exists up to max_digits.
  int decimal_digits(int max_digits = 18) const {
    std::int64_t d = den_;
    int twos = 0, fives = 0;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }
    if (d != 1) return -1;
    int k = twos > fives ? twos : fives;
    return k <= max_digits ? k : -1;
  }

  /// "num/den" form, always with an explicit denominator.
  std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

  /// Finite decimal expansion; throws if the value has none.
  std::string decimal() const {
    int k = decimal_digits();
    if (k < 0) throw ConfigError("rational " + str() + " has no finite decimal expansion");
    __int128 scaled = static_cast<__int128>(num_);
    __int128 p10 = 1;
    for (int i = 0; i < k; ++i) p10 *= 10;
    scaled = scaled * p10 / den_;
    bool negative = scaled < 0;
    if (negative) scaled = -scaled;
    std::string digits;
    do {
      digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(scaled % 10)));
      scaled /= 10;
    } while (scaled > 0);
    while (static_cast<int>(digits.size()) <= k) digits.insert(digits.begin(), '0');
    if (k > 0) digits.insert(digits.end() - k, '.');
    return negative ? "-" + digits : digits;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_wide(wide(a.num_) * b.den_ + wide(b.num_) * a.den_, wide(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from_wide(wide(a.num_) * b.den_ - wide(b.num_) * a.den_, wide(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(wide(a.num_) * b.num_, wide(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw ConfigError("division by zero rational");
    return from_wide(wide(a.num_) * b.den_, wide(a.den_) * b.num_);
  }
  Rational operator-() const {
    Rational r = *this;
    r.num_ = -r.num_;
    return r;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return wide(a.num_) * b.den_ <=> wide(b.num_) * a.den_;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  static __int128 wide(std::int64_t v) { return static_cast<__int128>(v); }

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  static std::int64_t narrow(__int128 v) {
    if (v > INT64_MAX || v < -INT64_MAX) throw LimitError("rational arithmetic overflow");
    return static_cast<std::int64_t>(v);
  }

  static std::int64_t parse_integer(std::string_view text) {
    int digits = 0;
    Rational r = parse(text, &digits);
    if (digits != 0 || r.den_ != 1) throw ConfigError("expected integer, got '" + std::string(text) + "'");
    return r.num_;
  }

  void assign(std::int64_t num, std::int64_t den) { *this = from_wide(num, den); }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// 10^k as a 64-bit integer, k in [0, 18].
inline std::int64_t pow10(int k) {
  if (k < 0 || k > 18) throw LimitError("decimal precision out of range");
  std::int64_t p = 1;
  for (int i = 0; i < k; ++i) p *= 10;
  return p;
}

}  // namespace opinion
