#include "contsym/scalar.hpp"

#include <cmath>
#include <sstream>

namespace contsym {

std::string rational_str(const mpq_class& q) { return q.get_str(); }

std::string Exact::str() const {
  if (is_real()) return rational_str(re);
  if (sgn(re) == 0) {
    if (im == 1) return "I";
    if (im == -1) return "-I";
    return rational_str(im) + "*I";
  }
  std::ostringstream os;
  os << "(" << rational_str(re);
  if (sgn(im) > 0) os << "+";
  if (im == 1) {
    os << "I";
  } else if (im == -1) {
    os << "-I";
  } else {
    os << rational_str(im) << "*I";
  }
  os << ")";
  return os.str();
}

Exact pow_int(const Exact& base, long k) {
  if (k == 0) return Exact(1);
  if (k < 0) {
    if (base.is_zero()) throw DivisionByZero("zero base raised to a negative power");
    return Exact(1) / pow_int(base, -k);
  }
  if (base.is_real()) {
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), base.re.get_num_mpz_t(), static_cast<unsigned long>(k));
    mpz_pow_ui(den.get_mpz_t(), base.re.get_den_mpz_t(), static_cast<unsigned long>(k));
    return Exact(mpq_class(num, den));
  }
  Exact result(1);
  Exact b = base;
  unsigned long e = static_cast<unsigned long>(k);
  while (e) {
    if (e & 1UL) result *= b;
    e >>= 1;
    if (e) b *= b;
  }
  return result;
}

Float pow_int(const Float& base, long k) {
  if (k < 0 && base == Float(0.0)) throw DivisionByZero("zero base raised to a negative power");
  if (base.imag() == 0.0) return {std::pow(base.real(), static_cast<double>(k)), 0.0};
  Float result(1.0);
  Float b = k < 0 ? Float(1.0) / base : base;
  unsigned long e = static_cast<unsigned long>(k < 0 ? -k : k);
  while (e) {
    if (e & 1UL) result *= b;
    e >>= 1;
    if (e) b *= b;
  }
  return result;
}

namespace {

// Exact q-th root of a nonnegative integer, or false.
bool exact_root(const mpz_class& v, unsigned long q, mpz_class& out) {
  return mpz_root(out.get_mpz_t(), v.get_mpz_t(), q) != 0;
}

}  // namespace

Exact pow_rational(const Exact& base, const mpq_class& q) {
  if (q.get_den() == 1) return pow_int(base, q.get_num().get_si());
  if (!base.is_real()) throw NotExact("fractional power of a non-real value");
  const unsigned long den = q.get_den().get_ui();
  const int s = sgn(base.re);
  if (s == 0) {
    if (sgn(q) < 0) throw DivisionByZero("zero base raised to a negative power");
    return Exact(0);
  }
  if (s < 0 && den % 2 == 0) throw NotExact("even root of a negative value");
  mpz_class num = abs(base.re.get_num());
  mpz_class dd = base.re.get_den();
  mpz_class rn, rd;
  if (!exact_root(num, den, rn) || !exact_root(dd, den, rd))
    throw NotExact("rational base is not a perfect power");
  mpq_class root(rn, rd);
  root.canonicalize();
  if (s < 0) root = -root;
  return pow_int(Exact(root), q.get_num().get_si());
}

Float pow_rational(const Float& base, const mpq_class& q) {
  if (q.get_den() == 1) return pow_int(base, q.get_num().get_si());
  const double e = q.get_d();
  if (base.imag() == 0.0) {
    const double b = base.real();
    if (b >= 0.0) return {std::pow(b, e), 0.0};
    const unsigned long den = q.get_den().get_ui();
    if (den % 2 == 1) {
      const double mag = std::pow(-b, e);
      const bool odd_num = mpz_odd_p(q.get_num_mpz_t()) != 0;
      return {odd_num ? -mag : mag, 0.0};
    }
  }
  return std::pow(base, e);
}

mpq_class to_mpq(double v) {
  if (!std::isfinite(v)) throw Error("cannot convert non-finite value to a rational");
  mpq_class q(v);  // exact: doubles are dyadic rationals
  q.canonicalize();
  return q;
}

Exact to_exact(const Float& z) { return {to_mpq(z.real()), to_mpq(z.imag())}; }

mpq_class parse_rational(const std::string& text) {
  std::string t = text;
  if (t.empty()) throw Error("empty rational literal");
  const auto dot = t.find('.');
  const auto exp = t.find_first_of("eE");
  if (dot == std::string::npos && exp == std::string::npos) {
    mpq_class q;
    if (q.set_str(t, 10) != 0) throw Error("bad rational literal '" + text + "'");
    if (q.get_den() == 0) throw Error("zero denominator in '" + text + "'");
    q.canonicalize();
    return q;
  }
  // Decimal literal: mantissa digits over a power of ten, scaled by exponent.
  std::string mant = exp == std::string::npos ? t : t.substr(0, exp);
  long e10 = 0;
  if (exp != std::string::npos) {
    try {
      e10 = std::stol(t.substr(exp + 1));
    } catch (const std::exception&) {
      throw Error("bad exponent in '" + text + "'");
    }
  }
  const auto d = mant.find('.');
  if (d != std::string::npos) {
    e10 -= static_cast<long>(mant.size() - d - 1);
    mant.erase(d, 1);
  }
  mpz_class num;
  if (mant.empty() || mant == "-" || mant == "+" || num.set_str(mant[0] == '+' ? mant.substr(1) : mant, 10) != 0)
    throw Error("bad decimal literal '" + text + "'");
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(e10 < 0 ? -e10 : e10));
  mpq_class q = e10 < 0 ? mpq_class(num, ten_pow) : mpq_class(num * ten_pow);
  q.canonicalize();
  return q;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t s = seed;
  for (auto& w : state_) w = splitmix64(s);
}

// xoshiro256**
std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

long Rng::uniform_int(long lo, long hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<long>(next() % span);
}

double Rng::uniform(double lo, double hi) {
  const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

mpq_class Rng::rational(long max_den, long lo, long hi) {
  const long q = uniform_int(1, max_den);
  const long p = uniform_int(lo * q, hi * q);
  mpq_class r(p, q);
  r.canonicalize();
  return r;
}

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t x = seed ^ (0x632be59bd9b4e019ULL * (k + 1));
  splitmix64(x);
  return splitmix64(x);
}

}  // namespace contsym
