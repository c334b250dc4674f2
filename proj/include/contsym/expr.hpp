#pragma once

// Immutable expression trees over a jet space.
//
// Coordinates are referenced by index into a JetSpace: independent i, or a
// jet coordinate (dependent a, multi-index J) where J is a sorted list of
// independent indices (so u_{01} and u_{10} are the same node). Opaque
// function nodes F(args) carry a formal derivative order per argument slot.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "contsym/scalar.hpp"

namespace contsym::sym {

class UnknownCoordinate : public Error {
 public:
  using Error::Error;
};

class OrderOverflow : public Error {
 public:
  using Error::Error;
};

using MultiIndex = std::vector<int>;  // sorted ascending

MultiIndex add_index(MultiIndex j, int i);
/// Multiset difference J - L; nullopt unless L is contained in J.
std::optional<MultiIndex> subtract_index(const MultiIndex& j, const MultiIndex& l);

/// Identifies one coordinate of the jet space.
struct Coord {
  enum class Kind { Independent, Jet };
  Kind kind = Kind::Independent;
  int index = 0;     // independent index, or dependent index for Jet
  MultiIndex multi;  // derivative multi-index (Jet only)

  static Coord independent(int i) { return {Kind::Independent, i, {}}; }
  static Coord jet(int dep, MultiIndex j = {}) { return {Kind::Jet, dep, std::move(j)}; }
  bool is_jet() const { return kind == Kind::Jet; }
  int order() const { return static_cast<int>(multi.size()); }
  /// Compact byte key, usable as a hash-map key.
  std::string key() const;
  friend bool operator==(const Coord& a, const Coord& b) {
    return a.kind == b.kind && a.index == b.index && a.multi == b.multi;
  }
  friend bool operator<(const Coord& a, const Coord& b);
};

class JetSpace {
 public:
  JetSpace() = default;
  /// independents[0] is time; n = independents.size() - 1.
  JetSpace(std::vector<std::string> independents, std::vector<std::string> dependents, int order);

  /// t, x (n = 1) or t, x1..xn, with the given dependents.
  static JetSpace standard(int n, std::vector<std::string> dependents, int order = 2);

  int n() const { return static_cast<int>(independents_.size()) - 1; }
  int order() const { return order_; }
  const std::vector<std::string>& independents() const { return independents_; }
  const std::vector<std::string>& dependents() const { return dependents_; }
  int num_independents() const { return static_cast<int>(independents_.size()); }
  int num_dependents() const { return static_cast<int>(dependents_.size()); }

  int independent_index(const std::string& name) const;  // -1 if absent
  int dependent_index(const std::string& name) const;    // -1 if absent
  int require_independent(const std::string& name) const;
  int require_dependent(const std::string& name) const;

  /// "R_xx", "Theta_tx1", "rho".
  std::string coord_name(const Coord& c) const;
  /// Inverse of coord_name (shorthand form only); nullopt if not a coordinate.
  std::optional<Coord> parse_coord_name(const std::string& name) const;

  /// All jet coordinates of dependent `dep` with 1 <= |J| <= max_order.
  std::vector<MultiIndex> multi_indices(int max_order) const;

  JetSpace with_order(int order) const;

  friend bool operator==(const JetSpace& a, const JetSpace& b) {
    return a.independents_ == b.independents_ && a.dependents_ == b.dependents_;
  }
  friend bool operator!=(const JetSpace& a, const JetSpace& b) { return !(a == b); }

 private:
  std::vector<std::string> independents_;
  std::vector<std::string> dependents_;
  int order_ = 2;
};

enum class Kind : unsigned char { Const, Indep, Jet, Func, Pow, Prod, Sum };


class Expr;

class Node {
 public:
  Kind kind;
  std::size_t hash = 0;
  int index = 0;                // Indep: independent; Jet: dependent
  std::vector<int> ints;        // Jet: multi-index; Func: derivative orders per slot
  std::optional<Exact> value;   // Const: value; Pow: exponent (real rational)
  std::string name;             // Func
  std::vector<Expr> children;   // Func args; Pow: {base}; Sum/Prod terms

  explicit Node(Kind k) : kind(k) {}
};

/// Shared immutable handle. Null handles are never produced by the builders.
class Expr {
 public:
  Expr();  // the constant 0
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  Expr(long v);                  // NOLINT(google-explicit-constructor)
  Expr(const Exact& v);          // NOLINT(google-explicit-constructor)
  Expr(const mpq_class& v);      // NOLINT(google-explicit-constructor)

  const Node& operator*() const { return *node_; }
  const Node* operator->() const { return node_.get(); }
  const Node* get() const { return node_.get(); }

  Kind kind() const { return node_->kind; }
  bool is_const() const { return node_->kind == Kind::Const; }
  bool is_zero() const { return is_const() && node_->value->is_zero(); }
  bool is_one() const { return is_const() && node_->value->is_one(); }
  const Exact& constant() const { return *node_->value; }

 private:
  std::shared_ptr<const Node> node_;
};

bool structurally_equal(const Expr& a, const Expr& b);
/// Total canonical order used for sorting sums and products.
int compare(const Expr& a, const Expr& b);

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e->hash; }
};
struct ExprEq {
  bool operator()(const Expr& a, const Expr& b) const { return structurally_equal(a, b); }
};

// ---- builders (light normalization: flattening, constant folding, 0/1) ----
Expr constant(const Exact& v);
Expr imaginary_unit();
Expr indep(int i);
Expr jet(int dep, MultiIndex multi = {});
Expr coord(const Coord& c);
Expr func(std::string name, std::vector<Expr> args, std::vector<int> derivs = {});
Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);
Expr power(const Expr& base, const mpq_class& exponent);
Expr power(const Expr& base, long exponent);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);

/// Convenience: named coordinate lookup in a space ("R_xx", "t").
Expr var(const JetSpace& space, const std::string& name);

// ---- inspection ----
Coord coord_of(const Node& n);  // requires Indep or Jet
/// Highest derivative order of any jet coordinate in e (0 if none).
int max_order(const Expr& e);
/// Distinct coordinates appearing in e, sorted.
std::vector<Coord> coordinates(const Expr& e);
/// Opaque function names with their arity.
std::vector<std::pair<std::string, int>> functions(const Expr& e);
/// True when e is built from constants only (no coordinates or functions).
bool is_constant_expr(const Expr& e);
std::size_t node_count(const Expr& e);

// ---- printing ----
/// Infix form, parseable back by parse_expr.
std::string to_string(const Expr& e, const JetSpace& space);
/// Stable prefix (S-expression) form for golden tests.
std::string to_prefix(const Expr& e, const JetSpace& space);

}  // namespace contsym::sym
