#pragma once

// Residues mod n and 2x2 matrices over Z/n.
//
// Entries are stored as least nonnegative representatives. Moduli up to 2^16
// are supported, so every product of two entries fits in 32 bits and every
// intermediate sum fits comfortably in 64 bits.

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <numeric>

#include "modcurve/error.hpp"

namespace modcurve {

using Modulus = std::uint32_t;
using MatrixCode = std::uint64_t;

inline constexpr Modulus kMaxModulus = 1u << 16;

inline Modulus checked_modulus(std::int64_t n) {
  if (n < 1 || n > static_cast<std::int64_t>(kMaxModulus)) {
    throw Error("modulus out of range [1, 65536]: " + std::to_string(n));
  }
  return static_cast<Modulus>(n);
}

inline std::uint32_t reduce_integer(std::int64_t x, Modulus n) {
  std::int64_t r = x % static_cast<std::int64_t>(n);
  if (r < 0) r += n;
  return static_cast<std::uint32_t>(r);
}

// Inverse of a mod n, or 0 when a is not a unit (and n > 1).
inline std::uint32_t unit_inverse(std::uint32_t a, Modulus n) {
  if (n == 1) return 0;
  std::int64_t old_r = a, r = n, old_s = 1, s = 0;
  while (r != 0) {
    std::int64_t q = old_r / r;
    std::int64_t t = old_r - q * r;
    old_r = r;
    r = t;
    t = old_s - q * s;
    old_s = s;
    s = t;
  }
  if (old_r != 1) return 0;
  return reduce_integer(old_s, n);
}

inline bool is_unit(std::uint32_t a, Modulus n) {
  return std::gcd(a % n, n) == 1 || n == 1;
}

class Residue {
 public:
  Residue(std::int64_t value, Modulus modulus)
      : value_(reduce_integer(value, checked_modulus(modulus))), modulus_(modulus) {}

  std::uint32_t value() const noexcept { return value_; }
  Modulus modulus() const noexcept { return modulus_; }
  bool is_unit() const noexcept { return modcurve::is_unit(value_, modulus_); }

  Residue operator+(const Residue& o) const {
    check(o);
    return Residue(static_cast<std::int64_t>(value_) + o.value_, modulus_);
  }
  Residue operator-(const Residue& o) const {
    check(o);
    return Residue(static_cast<std::int64_t>(value_) - o.value_, modulus_);
  }
  Residue operator*(const Residue& o) const {
    check(o);
    return Residue(static_cast<std::int64_t>(value_) * o.value_, modulus_);
  }
  Residue inverse() const {
    if (!is_unit()) throw NotInvertible(std::to_string(value_) + " is not a unit mod " + std::to_string(modulus_));
    return Residue(unit_inverse(value_, modulus_), modulus_);
  }

  friend bool operator==(const Residue&, const Residue&) = default;

 private:
  void check(const Residue& o) const {
    if (o.modulus_ != modulus_) throw ModulusMismatch(modulus_, o.modulus_);
  }

  std::uint32_t value_;
  Modulus modulus_;
};

// A 2x2 matrix (a b; c d) over Z/n.
class ZMatrix {
 public:
  ZMatrix() = default;

  ZMatrix(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, Modulus n)
      : e_{reduce_integer(a, checked_modulus(n)), reduce_integer(b, n), reduce_integer(c, n),
           reduce_integer(d, n)},
        n_(n) {}

  static ZMatrix identity(Modulus n) { return {1, 0, 0, 1, n}; }
  static ZMatrix scalar(std::int64_t s, Modulus n) { return {s, 0, 0, s, n}; }
  static ZMatrix minus_identity(Modulus n) { return {-1, 0, 0, -1, n}; }

  // Entries must already lie in [0, n).
  static ZMatrix from_reduced(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d,
                              Modulus n) noexcept {
    ZMatrix m;
    m.e_ = {a, b, c, d};
    m.n_ = n;
    return m;
  }

  // Inverse of encode(): entries are the base-n digits of the code.
  static ZMatrix decode(MatrixCode code, Modulus n) {
    ZMatrix m;
    m.n_ = n;
    for (int i = 3; i >= 0; --i) {
      m.e_[i] = static_cast<std::uint32_t>(code % n);
      code /= n;
    }
    return m;
  }

  std::uint32_t a() const noexcept { return e_[0]; }
  std::uint32_t b() const noexcept { return e_[1]; }
  std::uint32_t c() const noexcept { return e_[2]; }
  std::uint32_t d() const noexcept { return e_[3]; }
  std::uint32_t entry(int i) const noexcept { return e_[i]; }
  Modulus modulus() const noexcept { return n_; }

  // ((a*n + b)*n + c)*n + d; strictly monotone in (a, b, c, d).
  MatrixCode encode() const noexcept {
    MatrixCode n = n_;
    return ((MatrixCode{e_[0]} * n + e_[1]) * n + e_[2]) * n + e_[3];
  }

  std::uint32_t det_value() const noexcept {
    std::uint64_t ad = std::uint64_t{e_[0]} * e_[3] % n_;
    std::uint64_t bc = std::uint64_t{e_[1]} * e_[2] % n_;
    return static_cast<std::uint32_t>((ad + n_ - bc) % n_);
  }

  bool is_invertible() const noexcept { return is_unit(det_value(), n_); }

  friend bool operator==(const ZMatrix&, const ZMatrix&) = default;
  friend std::strong_ordering operator<=>(const ZMatrix& x, const ZMatrix& y) {
    if (auto c = x.n_ <=> y.n_; c != 0) return c;
    return x.e_ <=> y.e_;
  }

 private:
  std::array<std::uint32_t, 4> e_{0, 0, 0, 0};
  Modulus n_ = 1;
};

// Product without the modulus check; callers guarantee equal moduli.
inline ZMatrix mul_unchecked(const ZMatrix& x, const ZMatrix& y) {
  const std::uint64_t n = x.modulus();
  auto dot = [n](std::uint64_t p, std::uint64_t q, std::uint64_t r, std::uint64_t s) {
    return static_cast<std::uint32_t>((p * q + r * s) % n);
  };
  return ZMatrix::from_reduced(dot(x.a(), y.a(), x.b(), y.c()), dot(x.a(), y.b(), x.b(), y.d()),
                               dot(x.c(), y.a(), x.d(), y.c()), dot(x.c(), y.b(), x.d(), y.d()),
                               x.modulus());
}

inline ZMatrix mat_mul(const ZMatrix& x, const ZMatrix& y) {
  if (x.modulus() != y.modulus()) throw ModulusMismatch(x.modulus(), y.modulus());
  return mul_unchecked(x, y);
}

inline ZMatrix operator*(const ZMatrix& x, const ZMatrix& y) { return mat_mul(x, y); }

inline Residue mat_det(const ZMatrix& x) { return Residue(x.det_value(), x.modulus()); }

inline ZMatrix mat_inv(const ZMatrix& x) {
  const Modulus n = x.modulus();
  const std::uint32_t det = x.det_value();
  if (!is_unit(det, n)) {
    throw NotInvertible("determinant " + std::to_string(det) + " is not a unit mod " + std::to_string(n));
  }
  const std::int64_t t = unit_inverse(det, n);
  return ZMatrix(t * x.d(), -t * x.b(), -t * x.c(), t * x.a(), n);
}

inline ZMatrix mat_reduce(const ZMatrix& x, Modulus m) {
  if (m == 0 || x.modulus() % m != 0) throw NotDivisor(m, x.modulus());
  return ZMatrix(x.a(), x.b(), x.c(), x.d(), m);
}

inline MatrixCode mat_encode(const ZMatrix& x) { return x.encode(); }

// g x g^-1
inline ZMatrix conjugate(const ZMatrix& g, const ZMatrix& x) { return g * x * mat_inv(g); }

// |GL2(Z/n)| from the prime factorisation of n.
inline std::uint64_t gl2_order(Modulus n) {
  std::uint64_t order = 1;
  Modulus rest = n;
  auto take = [&](std::uint64_t p) {
    std::uint64_t pk = 1;
    while (rest % p == 0) {
      rest /= static_cast<Modulus>(p);
      pk *= p;
    }
    const std::uint64_t r = pk / p;
    order *= r * r * r * r * (p * p - 1) * (p * p - p);
  };
  for (Modulus p = 2; p * p <= rest; ++p) {
    if (rest % p == 0) take(p);
  }
  if (rest > 1) take(rest);
  return order;
}

}  // namespace modcurve

template <>
struct std::hash<modcurve::ZMatrix> {
  std::size_t operator()(const modcurve::ZMatrix& m) const noexcept {
    return std::hash<std::uint64_t>{}(m.encode() * 0x9E3779B97F4A7C15ull ^ m.modulus());
  }
};
