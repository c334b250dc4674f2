#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "contsym/expr.hpp"

namespace contsym::sym {

/// Memo table for repeated total derivatives of shared subexpressions.
/// Keyed on node identity, so it must not outlive the expressions it saw.
class DerivativeCache {
 public:
  std::unordered_map<const Node*, Expr>& table(int i);
  void retain(const Expr& e) { keep_alive_.push_back(e); }

 private:
  std::unordered_map<int, std::unordered_map<const Node*, Expr>> tables_;
  std::vector<Expr> keep_alive_;
};

/// D_i e. Jet coordinates gain index i; opaque functions follow the chain
/// rule with formal-derivative bumps. If `allow_extend` is false, producing
/// a coordinate beyond space.order() throws OrderOverflow.
Expr total_derivative(const Expr& e, int i, const JetSpace& space, bool allow_extend = true,
                      DerivativeCache* cache = nullptr);

/// D_J e for a multi-index (applied left to right).
Expr total_derivative(const Expr& e, const MultiIndex& j, const JetSpace& space,
                      DerivativeCache* cache = nullptr);

/// de/dc treating every jet coordinate as an independent symbol.
Expr partial_derivative(const Expr& e, const Coord& c);

/// Derivative with respect to argument slot `slot` of every application of
/// the opaque function `name` at the top level: F(a) -> F'(a).
Expr formal_derivative(const Expr& f, int slot);

/// Simultaneous substitution; inserted subtrees are not revisited.
Expr substitute(const Expr& e, const std::unordered_map<std::string, Expr>& by_coord_key);
Expr substitute(const Expr& e, const std::vector<std::pair<Coord, Expr>>& bindings);

/// Canonical ordering, constant folding, like-term collection over identical
/// monomials, power merging, 0/1 identities. Not a normal form for
/// nonlinear expressions: zero tests go through exact evaluation.
Expr simplify_basic(const Expr& e);

}  // namespace contsym::sym
