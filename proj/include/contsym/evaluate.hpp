#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "contsym/expr.hpp"

namespace contsym::sym {

class MissingBinding : public Error {
 public:
  using Error::Error;
};

class UnboundCoordinate : public Error {
 public:
  using Error::Error;
};

/// Multivariate polynomial with rational coefficients. Used to instantiate
/// the opaque functions (M, N, phi, ...) with exact analytic derivatives.
class Polynomial {
 public:
  using Exponents = std::vector<int>;

  Polynomial() = default;
  explicit Polynomial(int arity) : arity_(arity) {}

  /// Univariate from coefficient list c0 + c1 s + c2 s^2 + ...
  static Polynomial univariate(const std::vector<mpq_class>& coeffs);
  /// All monomials of total degree <= degree with coefficients from rng.
  static Polynomial random(int arity, int degree, Rng& rng, long max_den = 9);

  int arity() const { return arity_; }
  void add_term(Exponents e, const mpq_class& c);
  const std::map<Exponents, mpq_class>& terms() const { return terms_; }

  /// Partial derivative of the given orders per variable.
  Polynomial derivative(const std::vector<int>& orders) const;

  template <class S>
  S evaluate(const std::vector<S>& args) const;

  std::string str(const std::vector<std::string>& names) const;

 private:
  int arity_ = 0;
  std::map<Exponents, mpq_class> terms_;
};

/// Concrete evaluators for opaque function symbols.
class FunctionBinding {
 public:
  void bind(const std::string& name, Polynomial p) { polys_[name] = std::move(p); }
  bool has(const std::string& name) const { return polys_.count(name) != 0; }
  const Polynomial& at(const std::string& name) const;
  const std::map<std::string, Polynomial>& all() const { return polys_; }

 private:
  std::map<std::string, Polynomial> polys_;
};

/// Assignment of a scalar to jet coordinates.
template <class S>
class JetPoint {
 public:
  void set(const Coord& c, S v) { values_[c.key()] = std::move(v); }
  bool has(const Coord& c) const { return values_.count(c.key()) != 0; }
  const S& at(const Coord& c) const {
    auto it = values_.find(c.key());
    if (it == values_.end()) throw UnboundCoordinate("jet point has no value for a coordinate");
    return it->second;
  }
  const std::unordered_map<std::string, S>& values() const { return values_; }

 private:
  std::unordered_map<std::string, S> values_;
};

using ExactPoint = JetPoint<Exact>;
using FloatPoint = JetPoint<Float>;

/// Evaluates e at p. Exact mode is exact in Q(i); float mode is IEEE.
template <class S>
S evaluate(const Expr& e, const JetPoint<S>& p, const FunctionBinding& fb);

/// Evaluates several expressions sharing one memo table.
template <class S>
std::vector<S> evaluate_all(const std::vector<Expr>& es, const JetPoint<S>& p, const FunctionBinding& fb);

/// Roundoff scale for a float evaluation: sums of absolute values of the
/// evaluated terms, propagated through products.
double magnitude_scale(const Expr& e, const FloatPoint& p, const FunctionBinding& fb);

FloatPoint to_float(const ExactPoint& p);
ExactPoint to_exact(const FloatPoint& p);

}  // namespace contsym::sym
