#pragma once

// Test-only generators: random expressions and total random jet points.

#include "contsym/evaluate.hpp"
#include "contsym/expr.hpp"

namespace contsym::testing {

inline sym::Expr random_leaf(const sym::JetSpace& space, Rng& rng, int max_jet_order) {
  const long pick = rng.uniform_int(0, 9);
  if (pick < 2) return sym::Expr(rng.rational(5, -3, 3));
  if (pick < 4) return sym::indep(static_cast<int>(rng.uniform_int(0, space.num_independents() - 1)));
  sym::MultiIndex j;
  const long order = rng.uniform_int(0, max_jet_order);
  for (long k = 0; k < order; ++k)
    j = sym::add_index(std::move(j), static_cast<int>(rng.uniform_int(0, space.num_independents() - 1)));
  return sym::jet(static_cast<int>(rng.uniform_int(0, space.num_dependents() - 1)), std::move(j));
}

/// Random expression of bounded depth. Opaque functions "F" (arity 1) and
/// "G" (arity 2) appear when `with_functions` is set. Negative powers are
/// only applied to 5 + s^2 (never zero on real points), and only when
/// `allow_division`.
inline sym::Expr random_expr(const sym::JetSpace& space, Rng& rng, int depth, bool with_functions = true,
                             bool allow_division = false, int max_jet_order = 2) {
  if (depth <= 0) return random_leaf(space, rng, max_jet_order);
  const long pick = rng.uniform_int(0, with_functions ? 6 : 4);
  auto sub = [&] { return random_expr(space, rng, depth - 1, with_functions, allow_division, max_jet_order); };
  switch (pick) {
    case 0:
    case 1: {
      std::vector<sym::Expr> ts;
      const long k = rng.uniform_int(2, 3);
      for (long i = 0; i < k; ++i) ts.push_back(sub());
      return sym::sum(std::move(ts));
    }
    case 2:
    case 3: {
      std::vector<sym::Expr> fs;
      const long k = rng.uniform_int(2, 3);
      for (long i = 0; i < k; ++i) fs.push_back(sub());
      return sym::product(std::move(fs));
    }
    case 4: {
      long e = rng.uniform_int(2, 3);
      if (allow_division && rng.uniform_int(0, 1) == 1) e = -e;
      return sym::power(sym::Expr(5L) + sym::power(sub(), 2), e);
    }
    case 5:
      return sym::func("F", {sub()});
    default:
      return sym::func("G", {sub(), sub()});
  }
}

/// Random exact point assigning every coordinate up to `order`; values are
/// rationals with denominators <= 16 in [-1, 1], dependents in [1/4, 2].
inline sym::ExactPoint random_exact_point(const sym::JetSpace& space, int order, Rng& rng) {
  sym::ExactPoint p;
  for (int i = 0; i < space.num_independents(); ++i) p.set(sym::Coord::independent(i), Exact(rng.rational(16)));
  const auto multis = space.multi_indices(order);
  for (int d = 0; d < space.num_dependents(); ++d) {
    mpq_class v = rng.rational(16, 1, 2);
    if (v < mpq_class(1, 4)) v += 1;
    p.set(sym::Coord::jet(d), Exact(v));
    for (const auto& j : multis) p.set(sym::Coord::jet(d, j), Exact(rng.rational(16)));
  }
  return p;
}

inline sym::FunctionBinding random_binding(Rng& rng) {
  sym::FunctionBinding fb;
  fb.bind("F", sym::Polynomial::random(1, 3, rng));
  fb.bind("G", sym::Polynomial::random(2, 3, rng));
  return fb;
}

}  // namespace contsym::testing
