#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace graphonlab {

using int128 = __int128;

struct rational_overflow : std::overflow_error {
  rational_overflow() : std::overflow_error("rational overflow") {}
};

namespace detail {

inline int128 iabs(int128 v) { return v < 0 ? -v : v; }

inline int128 igcd(int128 a, int128 b) {
  a = iabs(a);
  b = iabs(b);
  while (b != 0) {
    int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline int128 checked_mul(int128 a, int128 b) {
  int128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw rational_overflow{};
  return r;
}

inline int128 checked_add(int128 a, int128 b) {
  int128 r;
  if (__builtin_add_overflow(a, b, &r)) throw rational_overflow{};
  return r;
}

inline std::string i128_to_string(int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  unsigned __int128 u = neg ? -(unsigned __int128)v : (unsigned __int128)v;
  std::string s;
  while (u != 0) {
    s.push_back(char('0' + int(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  return {s.rbegin(), s.rend()};
}

inline int128 i128_from_string(const std::string& s, size_t* pos = nullptr) {
  size_t i = 0;
  bool neg = false;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
    neg = s[i] == '-';
    ++i;
  }
  if (i >= s.size() || !isdigit((unsigned char)s[i]))
    throw std::invalid_argument("not an integer: '" + s + "'");
  int128 v = 0;
  for (; i < s.size() && isdigit((unsigned char)s[i]); ++i) {
    v = checked_mul(v, 10);
    v = checked_add(v, s[i] - '0');
  }
  if (pos) *pos = i;
  return neg ? -v : v;
}

}  // namespace detail

// Exact rational with 128-bit numerator/denominator, always reduced, den > 0.
// Arithmetic throws rational_overflow instead of wrapping.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(int n) : num_(n), den_(1) {}        // NOLINT
  Rational(int128 n, int128 d) : num_(n), den_(d) { normalize(); }

  static Rational from_string(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(detail::i128_from_string(s), 1);
    return Rational(detail::i128_from_string(s.substr(0, slash)),
                    detail::i128_from_string(s.substr(slash + 1)));
  }

  // Exact value of a finite double (every double is a dyadic rational).
  static Rational from_double_exact(double x) {
    if (x == 0.0) return Rational();
    int exp = 0;
    double m = std::frexp(x, &exp);  // x = m * 2^exp, |m| in [0.5, 1)
    int128 mant = (int128)(m * 9007199254740992.0);  // m * 2^53
    exp -= 53;
    Rational r(mant, 1);
    while (exp > 0) {
      r = r * Rational(2);
      --exp;
    }
    while (exp < 0) {
      r = r / Rational(2);
      ++exp;
    }
    return r;
  }

  int128 num() const { return num_; }
  int128 den() const { return den_; }

  double to_double() const {
    // Split to keep precision for large num/den.
    if (num_ == 0) return 0.0;
    long double n = (long double)num_;
    long double d = (long double)den_;
    return (double)(n / d);
  }

  bool is_zero() const { return num_ == 0; }
  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    int128 g = detail::igcd(a.den_, b.den_);
    int128 lhs = detail::checked_mul(a.num_, b.den_ / g);
    int128 rhs = detail::checked_mul(b.num_, a.den_ / g);
    return Rational(detail::checked_add(lhs, rhs), detail::checked_mul(a.den_, b.den_ / g));
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    int128 g1 = detail::igcd(a.num_, b.den_);
    int128 g2 = detail::igcd(b.num_, a.den_);
    Rational r;
    r.num_ = detail::checked_mul(a.num_ / g1, b.num_ / g2);
    r.den_ = detail::checked_mul(a.den_ / g2, b.den_ / g1);
    return r;
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    Rational inv;
    inv.num_ = b.den_;
    inv.den_ = b.num_;
    if (inv.den_ < 0) {
      inv.num_ = -inv.num_;
      inv.den_ = -inv.den_;
    }
    return a * inv;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) { return (a - b).sign() < 0; }
  friend bool operator<=(const Rational& a, const Rational& b) { return (a - b).sign() <= 0; }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }

  std::string str() const {
    if (den_ == 1) return detail::i128_to_string(num_);
    return detail::i128_to_string(num_) + "/" + detail::i128_to_string(den_);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  void normalize() {
    if (den_ == 0) throw std::domain_error("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    int128 g = detail::igcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  int128 num_;
  int128 den_;
};

inline Rational rat(long long n, long long d) { return Rational(n, d); }

inline Rational pow2(int e) {
  Rational r(1);
  Rational two(2);
  for (int i = 0; i < (e >= 0 ? e : -e); ++i) r = (e >= 0) ? r * two : r / two;
  return r;
}

inline Rational rat_abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

inline Rational rat_min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational rat_max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace graphonlab
