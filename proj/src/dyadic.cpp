#include "cms/dyadic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cms/errors.hpp"

namespace cms {

namespace {

mpz_class shifted(const mpz_class& value, std::int64_t bits) {
  mpz_class out;
  if (bits >= 0) {
    mpz_mul_2exp(out.get_mpz_t(), value.get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
  } else {
    mpz_fdiv_q_2exp(out.get_mpz_t(), value.get_mpz_t(), static_cast<mp_bitcnt_t>(-bits));
  }
  return out;
}

bool is_power_of_two(const mpz_class& v) {
  return v > 0 && mpz_popcount(v.get_mpz_t()) == 1;
}

}  // namespace

Dyadic::Dyadic(long value) : mantissa_(value), exponent_(0) { normalize(); }

Dyadic::Dyadic(mpz_class mantissa, std::int64_t exponent)
    : mantissa_(std::move(mantissa)), exponent_(exponent) {
  normalize();
}

void Dyadic::normalize() {
  if (mantissa_ == 0) {
    exponent_ = 0;
    return;
  }
  const auto trailing = static_cast<std::int64_t>(mpz_scan1(mantissa_.get_mpz_t(), 0));
  if (trailing > 0) {
    mpz_fdiv_q_2exp(mantissa_.get_mpz_t(), mantissa_.get_mpz_t(),
                    static_cast<mp_bitcnt_t>(trailing));
    exponent_ -= trailing;
  }
}

Dyadic Dyadic::pow2(std::int64_t k) { return Dyadic(mpz_class(1), -k); }

Dyadic Dyadic::parse(std::string_view text) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto digits = [&](std::string& out) {
    const std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      out.push_back(text[pos++]);
    }
    return pos > start;
  };

  skip_ws();
  bool negative = false;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
    negative = text[pos] == '-';
    ++pos;
  }
  std::string int_part;
  std::string frac_part;
  const bool has_int = digits(int_part);
  bool has_frac = false;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    has_frac = digits(frac_part);
  }
  if (!has_int && !has_frac) throw ParseError("expected a number", pos);

  Dyadic value;
  if (pos < text.size() && text[pos] == '/') {
    if (has_frac) throw ParseError("fraction numerator must be an integer", pos);
    ++pos;
    mpz_class numerator(int_part, 10);
    if (pos + 1 < text.size() && text[pos] == '2' && text[pos + 1] == '^') {
      pos += 2;
      bool neg_exp = false;
      if (pos < text.size() && text[pos] == '-') {
        neg_exp = true;
        ++pos;
      }
      std::string exp_digits;
      if (!digits(exp_digits)) throw ParseError("expected exponent after 2^", pos);
      if (exp_digits.size() > 12) throw ParseError("exponent out of range", pos);
      std::int64_t e = std::stoll(exp_digits);
      value = Dyadic(numerator, neg_exp ? -e : e);
    } else {
      std::string den_digits;
      const std::size_t den_pos = pos;
      if (!digits(den_digits)) throw ParseError("expected denominator", pos);
      mpz_class denominator(den_digits, 10);
      if (!is_power_of_two(denominator)) {
        throw ParseError("non-dyadic literal " + std::string(text) +
                             " (denominator must be a power of two)",
                         den_pos);
      }
      const auto e = static_cast<std::int64_t>(mpz_sizeinbase(denominator.get_mpz_t(), 2) - 1);
      value = Dyadic(numerator, e);
    }
  } else {
    mpz_class numerator(int_part.empty() ? std::string("0") : int_part, 10);
    if (!frac_part.empty()) {
      mpz_class scale;
      mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac_part.size());
      numerator = numerator * scale + mpz_class(frac_part, 10);
      mpz_class five_pow;
      mpz_ui_pow_ui(five_pow.get_mpz_t(), 5, frac_part.size());
      if (!mpz_divisible_p(numerator.get_mpz_t(), five_pow.get_mpz_t())) {
        throw ParseError("non-dyadic decimal literal " + std::string(text), 0);
      }
      numerator /= five_pow;
      value = Dyadic(numerator, static_cast<std::int64_t>(frac_part.size()));
    } else {
      value = Dyadic(numerator, 0);
    }
  }
  skip_ws();
  if (pos != text.size()) throw ParseError("trailing characters in number", pos);
  return negative ? -value : value;
}

Dyadic Dyadic::scaled(std::int64_t k) const {
  Dyadic out = *this;
  if (!out.is_zero()) out.exponent_ -= k;
  return out;
}

Dyadic Dyadic::abs() const {
  Dyadic out = *this;
  out.mantissa_ = ::abs(out.mantissa_);
  return out;
}

mpz_class Dyadic::floor_scaled(std::int64_t k) const {
  return shifted(mantissa_, k - exponent_);
}

mpz_class Dyadic::ceil_scaled(std::int64_t k) const {
  const std::int64_t bits = k - exponent_;
  if (bits >= 0) return shifted(mantissa_, bits);
  mpz_class out;
  mpz_cdiv_q_2exp(out.get_mpz_t(), mantissa_.get_mpz_t(), static_cast<mp_bitcnt_t>(-bits));
  return out;
}

Dyadic Dyadic::floor_to(std::int64_t k) const { return Dyadic(floor_scaled(k), k); }

Dyadic Dyadic::ceil_to(std::int64_t k) const { return Dyadic(ceil_scaled(k), k); }

Dyadic Dyadic::round_to(std::int64_t k) const {
  if (exponent_ <= k) return *this;
  const std::int64_t s = exponent_ - k;
  mpz_class q;
  mpz_fdiv_q_2exp(q.get_mpz_t(), mantissa_.get_mpz_t(), static_cast<mp_bitcnt_t>(s));
  mpz_class r = mantissa_ - shifted(q, s);  // 0 <= r < 2^s
  mpz_class twice_r = r * 2;
  mpz_class unit = shifted(mpz_class(1), s);
  const int c = cmp(twice_r, unit);
  if (c > 0 || (c == 0 && mpz_odd_p(q.get_mpz_t()))) q += 1;
  return Dyadic(q, k);
}

std::int64_t Dyadic::ceil_log2_abs() const {
  if (is_zero()) throw std::domain_error("ceil_log2_abs of zero");
  mpz_class a = ::abs(mantissa_);
  const auto bits = static_cast<std::int64_t>(mpz_sizeinbase(a.get_mpz_t(), 2));
  // 2^(bits-1) <= a < 2^bits; exact power when a == 1 (mantissa is odd).
  const std::int64_t ceil_bits = (a == 1) ? 0 : bits;
  return ceil_bits - exponent_;
}

mpq_class Dyadic::to_mpq() const {
  mpq_class q(mantissa_);
  if (exponent_ >= 0) {
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(exponent_));
  } else {
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-exponent_));
  }
  return q;
}

double Dyadic::to_double() const {
  long exp2 = 0;
  const double m = mpz_get_d_2exp(&exp2, mantissa_.get_mpz_t());
  return std::ldexp(m, static_cast<int>(exp2 - exponent_));
}

std::string Dyadic::to_string() const {
  if (exponent_ <= 0) return shifted(mantissa_, -exponent_).get_str();
  return mantissa_.get_str() + "/2^" + std::to_string(exponent_);
}

std::string Dyadic::to_decimal() const {
  if (exponent_ <= 0) return shifted(mantissa_, -exponent_).get_str();
  // m / 2^e = m * 5^e / 10^e
  mpz_class five_pow;
  mpz_ui_pow_ui(five_pow.get_mpz_t(), 5, static_cast<unsigned long>(exponent_));
  mpz_class scaled_value = ::abs(mantissa_) * five_pow;
  std::string digits = scaled_value.get_str();
  const auto e = static_cast<std::size_t>(exponent_);
  if (digits.size() <= e) digits.insert(0, e - digits.size() + 1, '0');
  std::string out = digits.substr(0, digits.size() - e) + "." + digits.substr(digits.size() - e);
  return (sign() < 0 ? "-" : "") + out;
}

Dyadic Dyadic::operator-() const {
  Dyadic out = *this;
  out.mantissa_ = -out.mantissa_;
  return out;
}

Dyadic& Dyadic::operator+=(const Dyadic& rhs) {
  if (rhs.is_zero()) return *this;
  if (is_zero()) return *this = rhs;
  const std::int64_t e = std::max(exponent_, rhs.exponent_);
  mantissa_ = shifted(mantissa_, e - exponent_) + shifted(rhs.mantissa_, e - rhs.exponent_);
  exponent_ = e;
  normalize();
  return *this;
}

Dyadic& Dyadic::operator-=(const Dyadic& rhs) { return *this += -rhs; }

Dyadic& Dyadic::operator*=(const Dyadic& rhs) {
  mantissa_ *= rhs.mantissa_;
  exponent_ += rhs.exponent_;
  normalize();
  return *this;
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  const int sa = a.sign();
  const int sb = b.sign();
  if (sa != sb) return sa <=> sb;
  if (sa == 0) return std::strong_ordering::equal;
  const std::int64_t e = std::max(a.exponent_, b.exponent_);
  const int c = cmp(shifted(a.mantissa_, e - a.exponent_), shifted(b.mantissa_, e - b.exponent_));
  return c <=> 0;
}

std::ostream& operator<<(std::ostream& os, const Dyadic& d) { return os << d.to_string(); }

DyadicInterval::DyadicInterval(Dyadic point) : lo_(point), hi_(std::move(point)) {}

DyadicInterval::DyadicInterval(Dyadic lo, Dyadic hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (hi_ < lo_) throw std::invalid_argument("DyadicInterval: lo > hi");
}

bool DyadicInterval::contains(const mpq_class& x) const {
  return lo_.to_mpq() <= x && x <= hi_.to_mpq();
}

DyadicInterval operator*(const DyadicInterval& a, const DyadicInterval& b) {
  if (a.is_point() && b.is_point()) return DyadicInterval(a.lo_ * b.lo_);
  const Dyadic p[4] = {a.lo_ * b.lo_, a.lo_ * b.hi_, a.hi_ * b.lo_, a.hi_ * b.hi_};
  const auto [lo, hi] = std::minmax_element(std::begin(p), std::end(p));
  return {*lo, *hi};
}

std::string DyadicInterval::to_string() const {
  return "[" + lo_.to_string() + ", " + hi_.to_string() + "]";
}

DyadicInterval abs(const DyadicInterval& a) {
  if (a.lo().sign() >= 0) return a;
  if (a.hi().sign() <= 0) return -a;
  return {Dyadic(), max(-a.lo(), a.hi())};
}

DyadicInterval min(const DyadicInterval& a, const DyadicInterval& b) {
  return {min(a.lo(), b.lo()), min(a.hi(), b.hi())};
}

DyadicInterval max(const DyadicInterval& a, const DyadicInterval& b) {
  return {max(a.lo(), b.lo()), max(a.hi(), b.hi())};
}

DyadicInterval hull(const DyadicInterval& a, const DyadicInterval& b) {
  return {min(a.lo(), b.lo()), max(a.hi(), b.hi())};
}

std::ostream& operator<<(std::ostream& os, const DyadicInterval& d) { return os << d.to_string(); }

namespace {

// floor(sqrt(q)) * 2^-p and ceil(sqrt(q)) * 2^-p bracket sqrt(q) with width 2^-p.
Dyadic sqrt_floor(const mpq_class& q, std::int64_t p) {
  mpq_class scaled_q = q;
  mpq_mul_2exp(scaled_q.get_mpq_t(), scaled_q.get_mpq_t(), static_cast<mp_bitcnt_t>(2 * p));
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), scaled_q.get_num_mpz_t(), scaled_q.get_den_mpz_t());
  mpz_class r;
  mpz_sqrt(r.get_mpz_t(), f.get_mpz_t());
  return Dyadic(r, p);
}

Dyadic sqrt_ceil(const mpq_class& q, std::int64_t p) {
  mpq_class scaled_q = q;
  mpq_mul_2exp(scaled_q.get_mpq_t(), scaled_q.get_mpq_t(), static_cast<mp_bitcnt_t>(2 * p));
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), scaled_q.get_num_mpz_t(), scaled_q.get_den_mpz_t());
  mpz_class r;
  mpz_class rem;
  mpz_sqrtrem(r.get_mpz_t(), rem.get_mpz_t(), c.get_mpz_t());
  if (rem != 0) r += 1;
  return Dyadic(r, p);
}

}  // namespace

DyadicInterval sqrt_enclosure(const DyadicInterval& interval, std::int64_t k) {
  if (interval.lo().sign() < 0) throw std::domain_error("sqrt_enclosure: negative input");
  const std::int64_t p = std::max<std::int64_t>(k + 1, 0);
  return {sqrt_floor(interval.lo().to_mpq(), p), sqrt_ceil(interval.hi().to_mpq(), p)};
}

DyadicInterval sqrt_enclosure(const mpq_class& q, std::int64_t k) {
  if (q < 0) throw std::domain_error("sqrt_enclosure: negative input");
  const std::int64_t p = std::max<std::int64_t>(k, 0);
  return {sqrt_floor(q, p), sqrt_ceil(q, p)};
}

DyadicInterval enclose(const mpq_class& q, std::int64_t k) {
  mpq_class scaled_q = q;
  if (k >= 0) {
    mpq_mul_2exp(scaled_q.get_mpq_t(), scaled_q.get_mpq_t(), static_cast<mp_bitcnt_t>(k));
  } else {
    mpq_div_2exp(scaled_q.get_mpq_t(), scaled_q.get_mpq_t(), static_cast<mp_bitcnt_t>(-k));
  }
  mpz_class f;
  mpz_class c;
  mpz_fdiv_q(f.get_mpz_t(), scaled_q.get_num_mpz_t(), scaled_q.get_den_mpz_t());
  mpz_cdiv_q(c.get_mpz_t(), scaled_q.get_num_mpz_t(), scaled_q.get_den_mpz_t());
  return {Dyadic(f, k), Dyadic(c, k)};
}

Dyadic interval_max_metric(std::span<const Dyadic> p, std::span<const Dyadic> q) {
  if (p.size() != q.size()) throw std::invalid_argument("interval_max_metric: dimension mismatch");
  Dyadic out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    Dyadic d = (p[i] - q[i]).abs();
    if (out < d) out = std::move(d);
  }
  return out;
}

}  // namespace cms
