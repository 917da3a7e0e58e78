#pragma once

// Exact arithmetic over the Gaussian integers Z[i] and the Gaussian rationals Q(i).
//
// BasicGaussInt is parameterized on the underlying integer. GaussInt (arbitrary
// precision) is the public currency of the library; the fixed-width
// instantiations are used inside hot loops and report overflow by throwing
// OverflowError instead of wrapping.

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <type_traits>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "hsl/error.hpp"

namespace hsl {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;
using int128 = __int128;

namespace detail {

template <class Int>
struct Arith {
  static Int add(const Int& a, const Int& b) { return a + b; }
  static Int sub(const Int& a, const Int& b) { return a - b; }
  static Int mul(const Int& a, const Int& b) { return a * b; }
};

template <class Int>
struct CheckedArith {
  static Int add(Int a, Int b) {
    Int r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("fixed-width addition overflow");
    return r;
  }
  static Int sub(Int a, Int b) {
    Int r;
    if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("fixed-width subtraction overflow");
    return r;
  }
  static Int mul(Int a, Int b) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("fixed-width multiplication overflow");
    return r;
  }
};

template <>
struct Arith<std::int64_t> : CheckedArith<std::int64_t> {};
template <>
struct Arith<int128> : CheckedArith<int128> {};

}  // namespace detail

inline std::string to_string(const BigInt& x) { return x.str(); }

inline std::string to_string(int128 x) {
  if (x == 0) return "0";
  const bool neg = x < 0;
  // Work on the negative side so that the minimum value is representable.
  std::string digits;
  int128 y = neg ? x : -x;
  while (y != 0) {
    digits.push_back(static_cast<char>('0' - static_cast<int>(y % 10)));
    y /= 10;
  }
  if (neg) digits.push_back('-');
  return {digits.rbegin(), digits.rend()};
}

inline BigInt to_big(int128 x) { return BigInt(x); }
inline BigInt to_big(std::int64_t x) { return BigInt(x); }
inline const BigInt& to_big(const BigInt& x) { return x; }

template <class Int>
Int narrow(const BigInt& x) {
  if (x < BigInt(std::numeric_limits<Int>::min()) || x > BigInt(std::numeric_limits<Int>::max())) {
    throw OverflowError("value " + x.str() + " does not fit the fixed-width fast path");
  }
  return static_cast<Int>(x);
}

/// Floor of the square root of a nonnegative 64-bit integer.
inline std::int64_t isqrt(std::int64_t n) {
  if (n <= 0) return 0;
  auto r = static_cast<std::int64_t>(__builtin_sqrt(static_cast<double>(n)));
  while (r > 0 && r > n / r) --r;
  while ((r + 1) <= n / (r + 1)) ++r;
  return r;
}

/// Element a + b*i of Z[i].
template <class Int>
struct BasicGaussInt {
  using value_type = Int;
  using ops = detail::Arith<Int>;

  Int re{0};
  Int im{0};

  BasicGaussInt() = default;
  BasicGaussInt(Int r) : re(std::move(r)) {}  // NOLINT(google-explicit-constructor)
  BasicGaussInt(Int r, Int i) : re(std::move(r)), im(std::move(i)) {}
  template <class I, class = std::enable_if_t<std::is_integral_v<I> && !std::is_same_v<I, Int>>>
  BasicGaussInt(I r, I i = 0) : re(static_cast<Int>(r)), im(static_cast<Int>(i)) {}  // NOLINT

  [[nodiscard]] bool is_zero() const { return re == 0 && im == 0; }
  [[nodiscard]] bool is_real() const { return im == 0; }

  friend bool operator==(const BasicGaussInt& a, const BasicGaussInt& b) {
    return a.re == b.re && a.im == b.im;
  }
  /// Canonical total order: lexicographic by (re, im).
  friend std::strong_ordering operator<=>(const BasicGaussInt& a, const BasicGaussInt& b) {
    if (a.re != b.re) return a.re < b.re ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.im != b.im) return a.im < b.im ? std::strong_ordering::less : std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend BasicGaussInt operator+(const BasicGaussInt& a, const BasicGaussInt& b) {
    return {ops::add(a.re, b.re), ops::add(a.im, b.im)};
  }
  friend BasicGaussInt operator-(const BasicGaussInt& a, const BasicGaussInt& b) {
    return {ops::sub(a.re, b.re), ops::sub(a.im, b.im)};
  }
  friend BasicGaussInt operator-(const BasicGaussInt& a) { return {ops::sub(Int(0), a.re), ops::sub(Int(0), a.im)}; }
  friend BasicGaussInt operator*(const BasicGaussInt& a, const BasicGaussInt& b) {
    return {ops::sub(ops::mul(a.re, b.re), ops::mul(a.im, b.im)),
            ops::add(ops::mul(a.re, b.im), ops::mul(a.im, b.re))};
  }
  BasicGaussInt& operator+=(const BasicGaussInt& b) { return *this = *this + b; }
  BasicGaussInt& operator-=(const BasicGaussInt& b) { return *this = *this - b; }
  BasicGaussInt& operator*=(const BasicGaussInt& b) { return *this = *this * b; }
};

using GaussInt = BasicGaussInt<BigInt>;
using GaussInt64 = BasicGaussInt<std::int64_t>;
using GaussInt128 = BasicGaussInt<int128>;

template <class Int>
BasicGaussInt<Int> conj(const BasicGaussInt<Int>& z) {
  return {z.re, detail::Arith<Int>::sub(Int(0), z.im)};
}

template <class Int>
Int norm(const BasicGaussInt<Int>& z) {
  using ops = detail::Arith<Int>;
  return ops::add(ops::mul(z.re, z.re), ops::mul(z.im, z.im));
}

/// z^e by binary exponentiation; 0^0 = 1.
template <class Int>
BasicGaussInt<Int> pow(BasicGaussInt<Int> z, unsigned e) {
  BasicGaussInt<Int> acc{Int(1), Int(0)};
  while (e != 0) {
    if (e & 1U) acc *= z;
    e >>= 1U;
    if (e != 0) z *= z;
  }
  return acc;
}

/// Multiplication by i^k.
template <class Int>
BasicGaussInt<Int> times_unit(const BasicGaussInt<Int>& z, unsigned k) {
  using ops = detail::Arith<Int>;
  switch (k & 3U) {
    case 0: return z;
    case 1: return {ops::sub(Int(0), z.im), z.re};
    case 2: return -z;
    default: return {z.im, ops::sub(Int(0), z.re)};
  }
}

template <class To, class From>
BasicGaussInt<To> gauss_cast(const BasicGaussInt<From>& z) {
  if constexpr (std::is_same_v<To, BigInt>) {
    return {to_big(z.re), to_big(z.im)};
  } else if constexpr (std::is_same_v<From, BigInt>) {
    return {narrow<To>(z.re), narrow<To>(z.im)};
  } else {
    return gauss_cast<To>(gauss_cast<BigInt>(z));
  }
}

template <class Int>
std::string to_string(const BasicGaussInt<Int>& z) {
  using hsl::to_string;
  using std::to_string;
  return "(" + to_string(z.re) + "," + to_string(z.im) + ")";
}

template <class Int>
std::ostream& operator<<(std::ostream& os, const BasicGaussInt<Int>& z) {
  return os << to_string(z);
}

/// Convenience wrappers with the names used throughout the docs.
inline GaussInt gi_conj(const GaussInt& z) { return conj(z); }
inline BigInt gi_norm(const GaussInt& z) { return norm(z); }

/// Element num/den of Q(i) in reduced form: den > 0 and
/// gcd(|num.re|, |num.im|, den) = 1.
class GaussRat {
 public:
  GaussRat() : den_(1) {}
  GaussRat(GaussInt num) : num_(std::move(num)), den_(1) {}  // NOLINT(google-explicit-constructor)
  template <class I, class = std::enable_if_t<std::is_integral_v<I>>>
  GaussRat(I x) : num_(x), den_(1) {}  // NOLINT(google-explicit-constructor)
  GaussRat(const BigRat& q) : num_(numerator(q)), den_(denominator(q)) {}  // NOLINT
  GaussRat(GaussInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

  [[nodiscard]] const GaussInt& num() const { return num_; }
  [[nodiscard]] const BigInt& den() const { return den_; }
  [[nodiscard]] bool is_zero() const { return num_.is_zero(); }
  [[nodiscard]] bool is_real() const { return num_.im == 0; }
  [[nodiscard]] bool is_integral() const { return den_ == 1; }

  [[nodiscard]] BigRat real() const { return BigRat(num_.re, den_); }
  [[nodiscard]] BigRat imag() const { return BigRat(num_.im, den_); }

  friend bool operator==(const GaussRat& a, const GaussRat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  friend GaussRat operator+(const GaussRat& a, const GaussRat& b) {
    return {a.num_ * GaussInt(b.den_) + b.num_ * GaussInt(a.den_), a.den_ * b.den_};
  }
  friend GaussRat operator-(const GaussRat& a, const GaussRat& b) {
    return {a.num_ * GaussInt(b.den_) - b.num_ * GaussInt(a.den_), a.den_ * b.den_};
  }
  friend GaussRat operator-(const GaussRat& a) { return {-a.num_, a.den_}; }
  friend GaussRat operator*(const GaussRat& a, const GaussRat& b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
  }
  friend GaussRat operator/(const GaussRat& a, const GaussRat& b) {
    if (b.is_zero()) throw ZeroDenominator();
    // a/b = a * conj(b.num) * b.den / |b.num|^2
    return {a.num_ * conj(b.num_) * GaussInt(b.den_), a.den_ * norm(b.num_)};
  }
  GaussRat& operator+=(const GaussRat& b) { return *this = *this + b; }
  GaussRat& operator-=(const GaussRat& b) { return *this = *this - b; }
  GaussRat& operator*=(const GaussRat& b) { return *this = *this * b; }

  friend GaussRat conj(const GaussRat& z) { return {conj(z.num_), z.den_}; }
  friend BigRat norm(const GaussRat& z) { return BigRat(norm(z.num_), z.den_ * z.den_); }

  friend std::string to_string(const GaussRat& z) {
    return z.den_ == 1 ? to_string(z.num_) : to_string(z.num_) + "/" + z.den_.str();
  }
  friend std::ostream& operator<<(std::ostream& os, const GaussRat& z) { return os << to_string(z); }

 private:
  void normalize() {
    if (den_ == 0) throw ZeroDenominator();
    if (den_ < 0) {
      den_ = -den_;
      num_ = -num_;
    }
    BigInt g = boost::multiprecision::gcd(boost::multiprecision::gcd(abs(num_.re), abs(num_.im)), den_);
    if (g > 1) {
      num_.re /= g;
      num_.im /= g;
      den_ /= g;
    }
  }

  GaussInt num_;
  BigInt den_;
};

/// Reduced representative of num/den. Throws ZeroDenominator when den == 0.
inline GaussRat gr_reduce(const GaussInt& num, const BigInt& den) { return {num, den}; }

/// Sum of big values with a 128-bit fast slot; spills into BigInt instead of overflowing.
class BigAccumulator {
 public:
  void add(int128 x) {
    int128 sum;
    if (__builtin_add_overflow(fast_, x, &sum)) {
      slow_ += to_big(fast_);
      fast_ = x;
    } else {
      fast_ = sum;
    }
  }
  void add(const BigInt& x) { slow_ += x; }
  [[nodiscard]] BigInt value() const { return slow_ + to_big(fast_); }

 private:
  int128 fast_ = 0;
  BigInt slow_ = 0;
};

/// Gaussian-integer version of BigAccumulator.
class GaussAccumulator {
 public:
  void add(const GaussInt128& z) {
    re_.add(z.re);
    im_.add(z.im);
  }
  void add(const GaussInt& z) {
    re_.add(z.re);
    im_.add(z.im);
  }
  [[nodiscard]] GaussInt value() const { return {re_.value(), im_.value()}; }

 private:
  BigAccumulator re_, im_;
};

}  // namespace hsl
