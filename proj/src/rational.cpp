#include "mdim/rational.hpp"

#include <charconv>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mdim/errors.hpp"

namespace mdim {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw UsageError("malformed integer '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Rational::Rational(std::int64_t num) : num_(num), den_(1) {}

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  *this = from_wide(num, den);
}

Rational Rational::from_wide(__int128 num, __int128 den) {
  if (den == 0) throw std::domain_error("division by zero");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  constexpr __int128 lo = std::numeric_limits<std::int64_t>::min();
  constexpr __int128 hi = std::numeric_limits<std::int64_t>::max();
  if (num < lo || num > hi || den > hi) throw std::overflow_error("rational overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(num);
  r.den_ = static_cast<std::int64_t>(den);
  return r;
}

Rational operator+(const Rational& a, const Rational& b) {
  if (a.den_ == b.den_) return Rational::from_wide(static_cast<__int128>(a.num_) + b.num_, a.den_);
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

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  __int128 l = static_cast<__int128>(a.num_) * b.den_;
  __int128 r = static_cast<__int128>(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::int64_t Rational::floor() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

std::int64_t Rational::ceil() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ > 0) ++q;
  return q;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    bool neg = !text.empty() && text.front() == '-';
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 17) throw UsageError("too many decimal digits in '" + std::string(text) + "'");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    std::int64_t w = (whole.empty() || whole == "-") ? 0 : parse_int(whole);
    std::int64_t f = frac.empty() ? 0 : parse_int(frac);
    Rational r = Rational(w) + Rational(neg ? -f : f, scale);
    return r;
  }
  return Rational(parse_int(text));
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

std::int64_t ExtInt::value() const {
  if (neg_inf_) throw std::logic_error("value() of -inf");
  return value_;
}

std::string ExtInt::to_string() const { return neg_inf_ ? "-inf" : std::to_string(value_); }

std::strong_ordering operator<=>(const ExtInt& a, const ExtInt& b) {
  if (a.neg_inf_ || b.neg_inf_) {
    if (a.neg_inf_ && b.neg_inf_) return std::strong_ordering::equal;
    return a.neg_inf_ ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return a.value_ <=> b.value_;
}

ExtRational ExtRational::ratio(const ExtInt& v, std::int64_t n) {
  if (v.is_neg_inf()) return neg_inf();
  return ExtRational(Rational(v.value(), n));
}

const Rational& ExtRational::value() const {
  if (neg_inf_) throw std::logic_error("value() of -inf");
  return value_;
}

std::string ExtRational::to_string() const { return neg_inf_ ? "-inf" : value_.to_string(); }

ExtRational ExtRational::parse(std::string_view text) {
  if (text == "-inf") return neg_inf();
  return ExtRational(Rational::parse(text));
}

std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b) {
  if (a.neg_inf_ || b.neg_inf_) {
    if (a.neg_inf_ && b.neg_inf_) return std::strong_ordering::equal;
    return a.neg_inf_ ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return a.value_ <=> b.value_;
}

std::ostream& operator<<(std::ostream& os, const ExtInt& v) { return os << v.to_string(); }
std::ostream& operator<<(std::ostream& os, const ExtRational& v) { return os << v.to_string(); }

}  // namespace mdim
