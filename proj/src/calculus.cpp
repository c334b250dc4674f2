#include "contsym/calculus.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace contsym::sym {

std::unordered_map<const Node*, Expr>& DerivativeCache::table(int i) { return tables_[i]; }

namespace {

Expr d_total(const Expr& e, int i, const JetSpace& space, bool allow_extend,
             std::unordered_map<const Node*, Expr>& memo) {
  if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
  const Node& n = *e;
  Expr out;
  switch (n.kind) {
    case Kind::Const:
      out = Expr(0L);
      break;
    case Kind::Indep:
      out = Expr(n.index == i ? 1L : 0L);
      break;
    case Kind::Jet: {
      if (!allow_extend && static_cast<int>(n.ints.size()) + 1 > space.order())
        throw OrderOverflow("total derivative exceeds jet order " + std::to_string(space.order()));
      out = jet(n.index, add_index(n.ints, i));
      break;
    }
    case Kind::Func: {
      std::vector<Expr> terms;
      for (std::size_t s = 0; s < n.children.size(); ++s) {
        Expr da = d_total(n.children[s], i, space, allow_extend, memo);
        if (da.is_zero()) continue;
        std::vector<int> d = n.ints;
        ++d[s];
        terms.push_back(product({func(n.name, n.children, std::move(d)), da}));
      }
      out = sum(std::move(terms));
      break;
    }
    case Kind::Pow: {
      const Expr& b = n.children[0];
      Expr db = d_total(b, i, space, allow_extend, memo);
      if (db.is_zero()) {
        out = Expr(0L);
      } else {
        const mpq_class q = n.value->re;
        out = product({Expr(q), power(b, mpq_class(q - 1)), db});
      }
      break;
    }
    case Kind::Prod: {
      std::vector<Expr> terms;
      for (std::size_t k = 0; k < n.children.size(); ++k) {
        Expr dk = d_total(n.children[k], i, space, allow_extend, memo);
        if (dk.is_zero()) continue;
        std::vector<Expr> f;
        f.reserve(n.children.size());
        for (std::size_t l = 0; l < n.children.size(); ++l) f.push_back(l == k ? dk : n.children[l]);
        terms.push_back(product(std::move(f)));
      }
      out = sum(std::move(terms));
      break;
    }
    case Kind::Sum: {
      std::vector<Expr> terms;
      terms.reserve(n.children.size());
      for (const auto& c : n.children) terms.push_back(d_total(c, i, space, allow_extend, memo));
      out = sum(std::move(terms));
      break;
    }
  }
  memo.emplace(e.get(), out);
  return out;
}

bool matches(const Node& n, const Coord& c) {
  if (c.kind == Coord::Kind::Independent) return n.kind == Kind::Indep && n.index == c.index;
  return n.kind == Kind::Jet && n.index == c.index && n.ints == c.multi;
}

Expr d_partial(const Expr& e, const Coord& c, std::unordered_map<const Node*, Expr>& memo) {
  if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
  const Node& n = *e;
  Expr out;
  switch (n.kind) {
    case Kind::Const:
      out = Expr(0L);
      break;
    case Kind::Indep:
    case Kind::Jet:
      out = Expr(matches(n, c) ? 1L : 0L);
      break;
    case Kind::Func: {
      std::vector<Expr> terms;
      for (std::size_t s = 0; s < n.children.size(); ++s) {
        Expr da = d_partial(n.children[s], c, memo);
        if (da.is_zero()) continue;
        std::vector<int> d = n.ints;
        ++d[s];
        terms.push_back(product({func(n.name, n.children, std::move(d)), da}));
      }
      out = sum(std::move(terms));
      break;
    }
    case Kind::Pow: {
      const Expr& b = n.children[0];
      Expr db = d_partial(b, c, memo);
      const mpq_class q = n.value->re;
      out = db.is_zero() ? Expr(0L) : product({Expr(q), power(b, mpq_class(q - 1)), db});
      break;
    }
    case Kind::Prod: {
      std::vector<Expr> terms;
      for (std::size_t k = 0; k < n.children.size(); ++k) {
        Expr dk = d_partial(n.children[k], c, memo);
        if (dk.is_zero()) continue;
        std::vector<Expr> f;
        for (std::size_t l = 0; l < n.children.size(); ++l) f.push_back(l == k ? dk : n.children[l]);
        terms.push_back(product(std::move(f)));
      }
      out = sum(std::move(terms));
      break;
    }
    case Kind::Sum: {
      std::vector<Expr> terms;
      for (const auto& ch : n.children) terms.push_back(d_partial(ch, c, memo));
      out = sum(std::move(terms));
      break;
    }
  }
  memo.emplace(e.get(), out);
  return out;
}

Expr rebuild(const Node& n, std::vector<Expr> kids) {
  switch (n.kind) {
    case Kind::Func:
      return func(n.name, std::move(kids), n.ints);
    case Kind::Pow:
      return power(kids[0], n.value->re);
    case Kind::Prod:
      return product(std::move(kids));
    case Kind::Sum:
      return sum(std::move(kids));
    default:
      throw Error("rebuild on leaf node");
  }
}

Expr subst(const Expr& e, const std::unordered_map<std::string, Expr>& by,
           std::unordered_map<const Node*, Expr>& memo) {
  if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
  const Node& n = *e;
  Expr out = e;
  if (n.kind == Kind::Indep || n.kind == Kind::Jet) {
    if (auto it = by.find(coord_of(n).key()); it != by.end()) out = it->second;
  } else if (!n.children.empty()) {
    std::vector<Expr> kids;
    kids.reserve(n.children.size());
    bool changed = false;
    for (const auto& c : n.children) {
      kids.push_back(subst(c, by, memo));
      changed = changed || kids.back().get() != c.get();
    }
    if (changed) out = rebuild(n, std::move(kids));
  }
  memo.emplace(e.get(), out);
  return out;
}

// ---- simplify_basic ----

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

class Simplifier {
 public:
  Expr run(const Expr& e) {
    if (auto it = memo_.find(e.get()); it != memo_.end()) return it->second;
    Expr out = step(e);
    memo_.emplace(e.get(), out);
    keep_.push_back(e);
    return out;
  }

 private:
  // coefficient * monomial split of a simplified term
  static std::pair<Exact, Expr> split_coef(const Expr& t) {
    if (t.is_const()) return {t.constant(), Expr(1L)};
    if (t.kind() == Kind::Prod && t->children.front().is_const()) {
      std::vector<Expr> rest(t->children.begin() + 1, t->children.end());
      return {t->children.front().constant(), product(std::move(rest))};
    }
    return {Exact(1), t};
  }

  Expr simplify_sum(std::vector<Expr> terms) {
    // flatten nested sums, and distribute numeric factors over a sum: c*(a+b)
    std::vector<std::pair<Exact, Expr>> flat;
    for (auto& t : terms) {
      if (t.kind() == Kind::Sum) {
        for (const auto& k : t->children) flat.push_back(split_coef(k));
        continue;
      }
      auto [c, mono] = split_coef(t);
      if (mono.kind() == Kind::Sum) {
        for (const auto& k : mono->children) {
          auto [c2, m2] = split_coef(k);
          flat.emplace_back(c * c2, m2);
        }
      } else {
        flat.emplace_back(c, mono);
      }
    }
    // collect like terms
    std::vector<std::pair<Expr, Exact>> groups;
    std::unordered_map<Expr, std::size_t, ExprHash, ExprEq> where;
    Exact constant_part(0);
    for (const auto& [c, mono] : flat) {
      if (mono.is_one()) {
        constant_part += c;
        continue;
      }
      auto it = where.find(mono);
      if (it == where.end()) {
        where.emplace(mono, groups.size());
        groups.emplace_back(mono, c);
      } else {
        groups[it->second].second += c;
      }
    }
    std::vector<Expr> out;
    for (auto& [mono, c] : groups) {
      if (c.is_zero()) continue;
      out.push_back(c.is_one() ? mono : product({constant(c), mono}));
    }
    std::sort(out.begin(), out.end(), ExprLess{});
    if (!constant_part.is_zero()) out.insert(out.begin(), constant(constant_part));
    return sum(std::move(out));
  }

  Expr simplify_product(std::vector<Expr> factors) {
    std::vector<Expr> flat;
    for (auto& f : factors) {
      if (f.kind() == Kind::Prod)
        flat.insert(flat.end(), f->children.begin(), f->children.end());
      else
        flat.push_back(f);
    }
    Exact c(1);
    std::vector<std::pair<Expr, mpq_class>> bases;
    std::unordered_map<Expr, std::size_t, ExprHash, ExprEq> where;
    for (const auto& f : flat) {
      if (f.is_const()) {
        c *= f.constant();
        continue;
      }
      Expr b = f;
      mpq_class q(1);
      if (f.kind() == Kind::Pow) {
        b = f->children[0];
        q = f->value->re;
      }
      auto it = where.find(b);
      if (it == where.end()) {
        where.emplace(b, bases.size());
        bases.emplace_back(b, q);
      } else {
        bases[it->second].second += q;
      }
    }
    if (c.is_zero()) return Expr(0L);
    std::vector<Expr> out;
    for (auto& [b, q] : bases) {
      q.canonicalize();
      if (sgn(q) == 0) continue;
      Expr p = power(b, q);
      if (p.is_const()) {
        c *= p.constant();
      } else {
        out.push_back(p);
      }
    }
    std::sort(out.begin(), out.end(), ExprLess{});
    if (!c.is_one()) out.insert(out.begin(), constant(c));
    return product(std::move(out));
  }

  Expr step(const Expr& e) {
    const Node& n = *e;
    switch (n.kind) {
      case Kind::Const:
      case Kind::Indep:
      case Kind::Jet:
        return e;
      case Kind::Func: {
        std::vector<Expr> kids;
        for (const auto& c : n.children) kids.push_back(run(c));
        return func(n.name, std::move(kids), n.ints);
      }
      case Kind::Pow: {
        Expr b = run(n.children[0]);
        const mpq_class q = n.value->re;
        // (a*b)^k = a^k * b^k for integer k
        if (b.kind() == Kind::Prod && q.get_den() == 1) {
          std::vector<Expr> fs;
          for (const auto& f : b->children) fs.push_back(power(f, q));
          return simplify_product(std::move(fs));
        }
        return power(b, q);
      }
      case Kind::Prod: {
        std::vector<Expr> kids;
        for (const auto& c : n.children) kids.push_back(run(c));
        return simplify_product(std::move(kids));
      }
      case Kind::Sum: {
        std::vector<Expr> kids;
        for (const auto& c : n.children) kids.push_back(run(c));
        return simplify_sum(std::move(kids));
      }
    }
    return e;
  }

  std::unordered_map<const Node*, Expr> memo_;
  std::vector<Expr> keep_;
};

}  // namespace

Expr total_derivative(const Expr& e, int i, const JetSpace& space, bool allow_extend,
                      DerivativeCache* cache) {
  if (i < 0 || i >= space.num_independents()) throw UnknownCoordinate("independent index out of range");
  if (cache) {
    cache->retain(e);
    return d_total(e, i, space, allow_extend, cache->table(i));
  }
  std::unordered_map<const Node*, Expr> memo;
  return d_total(e, i, space, allow_extend, memo);
}

Expr total_derivative(const Expr& e, const MultiIndex& j, const JetSpace& space,
                      DerivativeCache* cache) {
  Expr out = e;
  for (int i : j) out = total_derivative(out, i, space, true, cache);
  return out;
}

Expr partial_derivative(const Expr& e, const Coord& c) {
  std::unordered_map<const Node*, Expr> memo;
  return d_partial(e, c, memo);
}

Expr formal_derivative(const Expr& f, int slot) {
  if (f.kind() != Kind::Func) throw Error("formal derivative requires an opaque function node");
  if (slot < 0 || slot >= static_cast<int>(f->children.size())) throw Error("argument slot out of range");
  std::vector<int> d = f->ints;
  ++d[static_cast<std::size_t>(slot)];
  return func(f->name, f->children, std::move(d));
}

Expr substitute(const Expr& e, const std::unordered_map<std::string, Expr>& by_coord_key) {
  std::unordered_map<const Node*, Expr> memo;
  return subst(e, by_coord_key, memo);
}

Expr substitute(const Expr& e, const std::vector<std::pair<Coord, Expr>>& bindings) {
  std::unordered_map<std::string, Expr> by;
  for (const auto& [c, v] : bindings) by[c.key()] = v;
  return substitute(e, by);
}

Expr simplify_basic(const Expr& e) {
  Simplifier s;
  return s.run(e);
}

}  // namespace contsym::sym
