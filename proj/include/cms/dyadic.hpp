#pragma once

// Exact binary rationals m * 2^-e and closed intervals with dyadic endpoints.
// Every certified quantity in the library is built from these two types; no
// operation here rounds unless its name says so.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cms {

class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(long value);  // NOLINT(google-explicit-constructor): integers are dyadic
  /// value = mantissa * 2^(-exponent); the pair is normalized on construction.
  Dyadic(mpz_class mantissa, std::int64_t exponent);

  /// Accepts "a", "a.bcd" (exactly representable), "a/2^k" and "a/b" with b a
  /// power of two, each with an optional sign. Throws ParseError otherwise.
  static Dyadic parse(std::string_view text);
  /// 2^k for any integer k.
  static Dyadic pow2(std::int64_t k);

  const mpz_class& mantissa() const noexcept { return mantissa_; }
  std::int64_t exponent() const noexcept { return exponent_; }
  int sign() const noexcept { return sgn(mantissa_); }
  bool is_zero() const noexcept { return sign() == 0; }

  /// Multiplies by 2^k exactly.
  Dyadic scaled(std::int64_t k) const;
  Dyadic halve() const { return scaled(-1); }
  Dyadic twice() const { return scaled(1); }
  Dyadic abs() const;

  /// Nearest multiple of 2^-k, ties to the even multiple.
  Dyadic round_to(std::int64_t k) const;
  Dyadic floor_to(std::int64_t k) const;
  Dyadic ceil_to(std::int64_t k) const;
  /// floor(x * 2^k) as an integer.
  mpz_class floor_scaled(std::int64_t k) const;
  mpz_class ceil_scaled(std::int64_t k) const;
  /// Smallest integer j with |x| <= 2^j; x must be non-zero.
  std::int64_t ceil_log2_abs() const;

  mpq_class to_mpq() const;
  double to_double() const;
  /// Canonical text: "m/2^e" for non-integers, plain decimal integers otherwise.
  std::string to_string() const;
  /// Exact decimal expansion (dyadics always terminate in base ten).
  std::string to_decimal() const;

  Dyadic operator-() const;
  Dyadic& operator+=(const Dyadic& rhs);
  Dyadic& operator-=(const Dyadic& rhs);
  Dyadic& operator*=(const Dyadic& rhs);

  friend Dyadic operator+(Dyadic lhs, const Dyadic& rhs) { return lhs += rhs; }
  friend Dyadic operator-(Dyadic lhs, const Dyadic& rhs) { return lhs -= rhs; }
  friend Dyadic operator*(Dyadic lhs, const Dyadic& rhs) { return lhs *= rhs; }
  friend bool operator==(const Dyadic& a, const Dyadic& b) noexcept {
    return a.exponent_ == b.exponent_ && a.mantissa_ == b.mantissa_;
  }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

 private:
  void normalize();

  mpz_class mantissa_{0};
  std::int64_t exponent_ = 0;
};

inline const Dyadic& min(const Dyadic& a, const Dyadic& b) { return b < a ? b : a; }
inline const Dyadic& max(const Dyadic& a, const Dyadic& b) { return a < b ? b : a; }
inline Dyadic abs(const Dyadic& a) { return a.abs(); }

std::ostream& operator<<(std::ostream& os, const Dyadic& d);

/// Closed interval [lo, hi] with dyadic endpoints.
class DyadicInterval {
 public:
  DyadicInterval() = default;
  DyadicInterval(Dyadic point);  // NOLINT(google-explicit-constructor)
  DyadicInterval(Dyadic lo, Dyadic hi);

  const Dyadic& lo() const noexcept { return lo_; }
  const Dyadic& hi() const noexcept { return hi_; }
  Dyadic width() const { return hi_ - lo_; }
  Dyadic midpoint() const { return (lo_ + hi_).halve(); }
  bool is_point() const { return lo_ == hi_; }

  bool contains(const Dyadic& x) const { return lo_ <= x && x <= hi_; }
  bool contains(const DyadicInterval& other) const {
    return lo_ <= other.lo_ && other.hi_ <= hi_;
  }
  bool contains(const mpq_class& x) const;
  bool overlaps(const DyadicInterval& other) const {
    return !(hi_ < other.lo_ || other.hi_ < lo_);
  }
  /// Affirms lower < value < upper for every value in the interval.
  bool strictly_inside(const Dyadic& lower, const Dyadic& upper) const {
    return lower < lo_ && hi_ < upper;
  }

  DyadicInterval operator-() const { return {-hi_, -lo_}; }
  friend DyadicInterval operator+(const DyadicInterval& a, const DyadicInterval& b) {
    return {a.lo_ + b.lo_, a.hi_ + b.hi_};
  }
  friend DyadicInterval operator-(const DyadicInterval& a, const DyadicInterval& b) {
    return {a.lo_ - b.hi_, a.hi_ - b.lo_};
  }
  friend DyadicInterval operator*(const DyadicInterval& a, const DyadicInterval& b);
  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;

  std::string to_string() const;

 private:
  Dyadic lo_;
  Dyadic hi_;
};

DyadicInterval abs(const DyadicInterval& a);
DyadicInterval min(const DyadicInterval& a, const DyadicInterval& b);
DyadicInterval max(const DyadicInterval& a, const DyadicInterval& b);
DyadicInterval hull(const DyadicInterval& a, const DyadicInterval& b);
std::ostream& operator<<(std::ostream& os, const DyadicInterval& d);

/// Encloses { sqrt(t) : t in interval } with width at most the width of the
/// image plus 2^-k. Throws std::domain_error for negative input.
DyadicInterval sqrt_enclosure(const DyadicInterval& interval, std::int64_t k);

/// Encloses sqrt(q) for a non-negative rational with width <= 2^-k.
DyadicInterval sqrt_enclosure(const mpq_class& q, std::int64_t k);

/// Encloses a rational with width <= 2^-k (outward rounded).
DyadicInterval enclose(const mpq_class& q, std::int64_t k);

using DyadicVector = std::vector<Dyadic>;

/// max_i |p_i - q_i|. Throws std::invalid_argument on dimension mismatch.
Dyadic interval_max_metric(std::span<const Dyadic> p, std::span<const Dyadic> q);

}  // namespace cms
