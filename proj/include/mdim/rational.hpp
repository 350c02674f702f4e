#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace mdim {

/// Exact rational with 64-bit numerator/denominator, always normalized
/// (gcd 1, positive denominator). Intermediate products use 128-bit
/// arithmetic; results that do not fit throw std::overflow_error.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num);  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;

  /// Accepts "p", "p/q", and finite decimals such as "0.35" or "-1.5".
  static Rational parse(std::string_view text);

  std::int64_t floor() const;
  std::int64_t ceil() const;
  Rational abs() const { return num_ < 0 ? Rational(-num_, den_) : *this; }
  bool is_integer() const { return den_ == 1; }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const { return Rational(-num_, den_); }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  static Rational from_wide(__int128 num, __int128 den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

/// Integer extended by a distinguished minus-infinity, the value of
/// ord and D on an empty restriction.
class ExtInt {
 public:
  constexpr ExtInt() = default;
  constexpr ExtInt(std::int64_t v) : value_(v) {}  // NOLINT(google-explicit-constructor)
  static constexpr ExtInt neg_inf() {
    ExtInt e;
    e.neg_inf_ = true;
    return e;
  }

  bool is_neg_inf() const { return neg_inf_; }
  std::int64_t value() const;
  std::string to_string() const;

  friend bool operator==(const ExtInt& a, const ExtInt& b) {
    return a.neg_inf_ == b.neg_inf_ && (a.neg_inf_ || a.value_ == b.value_);
  }
  friend std::strong_ordering operator<=>(const ExtInt& a, const ExtInt& b);

 private:
  std::int64_t value_ = 0;
  bool neg_inf_ = false;
};

/// Rational extended by minus-infinity; serialized as the literal "-inf".
class ExtRational {
 public:
  ExtRational() = default;
  ExtRational(Rational v) : value_(v) {}  // NOLINT(google-explicit-constructor)
  static ExtRational neg_inf() {
    ExtRational e;
    e.neg_inf_ = true;
    return e;
  }
  /// -inf stays -inf; otherwise v / n.
  static ExtRational ratio(const ExtInt& v, std::int64_t n);

  bool is_neg_inf() const { return neg_inf_; }
  const Rational& value() const;
  std::string to_string() const;
  static ExtRational parse(std::string_view text);

  friend bool operator==(const ExtRational& a, const ExtRational& b) {
    return a.neg_inf_ == b.neg_inf_ && (a.neg_inf_ || a.value_ == b.value_);
  }
  friend std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b);

 private:
  Rational value_;
  bool neg_inf_ = false;
};

std::ostream& operator<<(std::ostream& os, const ExtInt& v);
std::ostream& operator<<(std::ostream& os, const ExtRational& v);

}  // namespace mdim
