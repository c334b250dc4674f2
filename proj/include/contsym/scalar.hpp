#pragma once

// Scalar types shared by the symbolic and numeric layers.
//
// Exact mode works over the Gaussian rationals Q(i): every constant in the
// catalog (including the imaginary unit in the wave-function currents) is
// representable, and every jet point drawn from small rationals keeps the
// arithmetic exact. Float mode is plain std::complex<double>.

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace contsym {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an exact evaluation cannot stay inside Q(i), e.g. a
/// fractional power of a rational that is not a perfect power.
class NotExact : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public Error {
 public:
  using Error::Error;
};

/// Gaussian rational re + i*im.
struct Exact {
  mpq_class re{0};
  mpq_class im{0};

  Exact() = default;
  Exact(long v) : re(v) {}  // NOLINT(google-explicit-constructor)
  Exact(mpq_class r) : re(std::move(r)) { re.canonicalize(); }  // NOLINT
  Exact(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {
    re.canonicalize();
    im.canonicalize();
  }

  static Exact i() { return {mpq_class(0), mpq_class(1)}; }

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }
  bool is_one() const { return re == 1 && sgn(im) == 0; }
  bool is_integer() const { return is_real() && re.get_den() == 1; }

  Exact conj() const { return {re, -im}; }

  friend Exact operator+(const Exact& a, const Exact& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend Exact operator-(const Exact& a, const Exact& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend Exact operator-(const Exact& a) { return {-a.re, -a.im}; }
  friend Exact operator*(const Exact& a, const Exact& b) {
    if (a.is_real() && b.is_real()) return Exact(mpq_class(a.re * b.re));
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Exact operator/(const Exact& a, const Exact& b) {
    if (b.is_zero()) throw DivisionByZero("exact division by zero");
    if (b.is_real()) return {a.re / b.re, a.im / b.re};
    mpq_class d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  Exact& operator+=(const Exact& o) { return *this = *this + o; }
  Exact& operator-=(const Exact& o) { return *this = *this - o; }
  Exact& operator*=(const Exact& o) { return *this = *this * o; }

  friend bool operator==(const Exact& a, const Exact& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const Exact& a, const Exact& b) { return !(a == b); }

  std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }
  double abs() const { return std::abs(to_complex()); }

  /// Canonical text: "3/7", "-2", "1/2*I", "(1+2*I)".
  std::string str() const;
};

using Float = std::complex<double>;

/// Integer power; negative exponents invert (zero base throws).
Exact pow_int(const Exact& base, long k);
Float pow_int(const Float& base, long k);

/// base^(p/q). Exact mode requires a real base whose q-th root is rational.
Exact pow_rational(const Exact& base, const mpq_class& q);
Float pow_rational(const Float& base, const mpq_class& q);

/// Exact conversion of a double (dyadic rational) to mpq.
mpq_class to_mpq(double v);
Exact to_exact(const Float& z);

/// Parses "3", "-3/7", "0.05" (decimal literals are converted exactly).
mpq_class parse_rational(const std::string& text);
std::string rational_str(const mpq_class& q);

/// Trait used by the templated evaluator to lift catalog constants.
template <class S>
S from_exact(const Exact& c);
template <>
inline Exact from_exact<Exact>(const Exact& c) {
  return c;
}
template <>
inline Float from_exact<Float>(const Exact& c) {
  return c.to_complex();
}

inline double magnitude(const Exact& s) { return s.abs(); }
inline double magnitude(const Float& s) { return std::abs(s); }
inline bool is_zero(const Exact& s) { return s.is_zero(); }
inline bool is_zero(const Float& s) { return s == Float(0.0); }

/// Deterministic generator with platform-independent helpers: std::
/// distributions are implementation-defined, so byte-reproducible output
/// needs its own mapping from raw 64-bit draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next();
  /// Uniform integer in [lo, hi].
  long uniform_int(long lo, long hi);
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);
  /// Random rational p/q with q in [1, max_den], p in [lo*q, hi*q].
  mpq_class rational(long max_den, long lo = -1, long hi = 1);

  /// Stream derivation: independent generator for sub-task `k`.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t k);

 private:
  std::uint64_t state_[4];
};

}  // namespace contsym
