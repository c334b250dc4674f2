#include "contsym/expr.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_set>

namespace contsym::sym {

// ---------------------------------------------------------------------------
// Multi-indices and coordinates

MultiIndex add_index(MultiIndex j, int i) {
  j.insert(std::upper_bound(j.begin(), j.end(), i), i);
  return j;
}

std::optional<MultiIndex> subtract_index(const MultiIndex& j, const MultiIndex& l) {
  MultiIndex rest;
  std::size_t a = 0;
  std::size_t b = 0;
  while (a < j.size()) {
    if (b < l.size() && j[a] == l[b]) {
      ++a;
      ++b;
    } else if (b < l.size() && l[b] < j[a]) {
      return std::nullopt;
    } else {
      rest.push_back(j[a++]);
    }
  }
  if (b != l.size()) return std::nullopt;
  return rest;
}

std::string Coord::key() const {
  std::string k;
  k.reserve(2 + multi.size());
  k.push_back(kind == Kind::Jet ? 'j' : 'i');
  k.push_back(static_cast<char>(index));
  for (int m : multi) k.push_back(static_cast<char>(m));
  return k;
}

bool operator<(const Coord& a, const Coord& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.index != b.index) return a.index < b.index;
  if (a.multi.size() != b.multi.size()) return a.multi.size() < b.multi.size();
  return a.multi < b.multi;
}

JetSpace::JetSpace(std::vector<std::string> independents, std::vector<std::string> dependents,
                   int order)
    : independents_(std::move(independents)), dependents_(std::move(dependents)), order_(order) {
  if (order_ < 0) throw Error("jet order must be nonnegative");
  if (independents_.size() < 2) throw Error("jet space needs time and at least one spatial coordinate");
  std::vector<std::string> all = independents_;
  all.insert(all.end(), dependents_.begin(), dependents_.end());
  std::vector<std::string> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error("jet space coordinate names must be unique");
  for (const auto& name : all) {
    if (name.empty() || name.find('_') != std::string::npos || name == "I" || name == "D")
      throw Error("invalid coordinate name '" + name + "'");
  }
}

JetSpace JetSpace::standard(int n, std::vector<std::string> dependents, int order) {
  if (n < 1) throw Error("spatial dimension must be at least 1");
  std::vector<std::string> ind{"t"};
  if (n == 1) {
    ind.emplace_back("x");
  } else {
    for (int a = 1; a <= n; ++a) ind.push_back("x" + std::to_string(a));
  }
  return {std::move(ind), std::move(dependents), order};
}

int JetSpace::independent_index(const std::string& name) const {
  for (std::size_t i = 0; i < independents_.size(); ++i)
    if (independents_[i] == name) return static_cast<int>(i);
  return -1;
}

int JetSpace::dependent_index(const std::string& name) const {
  for (std::size_t i = 0; i < dependents_.size(); ++i)
    if (dependents_[i] == name) return static_cast<int>(i);
  return -1;
}

int JetSpace::require_independent(const std::string& name) const {
  const int i = independent_index(name);
  if (i < 0) throw UnknownCoordinate("unknown independent coordinate '" + name + "'");
  return i;
}

int JetSpace::require_dependent(const std::string& name) const {
  const int i = dependent_index(name);
  if (i < 0) throw UnknownCoordinate("unknown dependent coordinate '" + name + "'");
  return i;
}

std::string JetSpace::coord_name(const Coord& c) const {
  if (c.kind == Coord::Kind::Independent) return independents_.at(static_cast<std::size_t>(c.index));
  std::string s = dependents_.at(static_cast<std::size_t>(c.index));
  if (!c.multi.empty()) {
    s += '_';
    for (int m : c.multi) s += independents_.at(static_cast<std::size_t>(m));
  }
  return s;
}

std::optional<Coord> JetSpace::parse_coord_name(const std::string& name) const {
  if (const int i = independent_index(name); i >= 0) return Coord::independent(i);
  const auto us = name.find('_');
  const std::string head = name.substr(0, us);
  const int dep = dependent_index(head);
  if (dep < 0) return std::nullopt;
  if (us == std::string::npos) return Coord::jet(dep);
  const std::string tail = name.substr(us + 1);
  if (tail.empty()) return std::nullopt;
  MultiIndex multi;
  std::size_t pos = 0;
  while (pos < tail.size()) {
    int best = -1;
    std::size_t best_len = 0;
    for (std::size_t i = 0; i < independents_.size(); ++i) {
      const auto& nm = independents_[i];
      if (nm.size() > best_len && tail.compare(pos, nm.size(), nm) == 0) {
        best = static_cast<int>(i);
        best_len = nm.size();
      }
    }
    if (best < 0) return std::nullopt;
    multi = add_index(std::move(multi), best);
    pos += best_len;
  }
  return Coord::jet(dep, std::move(multi));
}

std::vector<MultiIndex> JetSpace::multi_indices(int max_order) const {
  std::vector<MultiIndex> out;
  std::vector<MultiIndex> layer{{}};
  for (int k = 1; k <= max_order; ++k) {
    std::vector<MultiIndex> next;
    for (const auto& j : layer) {
      const int start = j.empty() ? 0 : j.back();
      for (int i = start; i < num_independents(); ++i) {
        MultiIndex m = j;
        m.push_back(i);
        next.push_back(std::move(m));
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

JetSpace JetSpace::with_order(int order) const {
  JetSpace s = *this;
  s.order_ = order;
  return s;
}

// ---------------------------------------------------------------------------
// Hashing, equality, ordering

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_exact(const Exact& v) {
  std::size_t h = std::hash<std::string>{}(v.re.get_str());
  if (!v.is_real()) h = mix(h, std::hash<std::string>{}(v.im.get_str()));
  return h;
}

Expr finish(Node n) {
  std::size_t h = static_cast<std::size_t>(n.kind) * 0x100000001b3ULL;
  h = mix(h, static_cast<std::size_t>(n.index));
  for (int v : n.ints) h = mix(h, static_cast<std::size_t>(v) + 17);
  if (n.value) h = mix(h, hash_exact(*n.value));
  if (!n.name.empty()) h = mix(h, std::hash<std::string>{}(n.name));
  for (const auto& c : n.children) h = mix(h, c->hash);
  n.hash = h;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

int kind_rank(Kind k) { return static_cast<int>(k); }

int cmp_q(const mpq_class& a, const mpq_class& b) { return cmp(a, b) < 0 ? -1 : (cmp(a, b) > 0 ? 1 : 0); }

}  // namespace

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return true;
  const Node& x = *a;
  const Node& y = *b;
  if (x.hash != y.hash || x.kind != y.kind || x.index != y.index || x.ints != y.ints ||
      x.name != y.name || x.children.size() != y.children.size())
    return false;
  if (x.value.has_value() != y.value.has_value()) return false;
  if (x.value && *x.value != *y.value) return false;
  for (std::size_t i = 0; i < x.children.size(); ++i)
    if (!structurally_equal(x.children[i], y.children[i])) return false;
  return true;
}

int compare(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return 0;
  const Node& x = *a;
  const Node& y = *b;
  if (x.kind != y.kind) return kind_rank(x.kind) < kind_rank(y.kind) ? -1 : 1;
  switch (x.kind) {
    case Kind::Const: {
      if (int c = cmp_q(x.value->re, y.value->re)) return c;
      return cmp_q(x.value->im, y.value->im);
    }
    case Kind::Indep:
      return x.index == y.index ? 0 : (x.index < y.index ? -1 : 1);
    case Kind::Jet: {
      if (x.index != y.index) return x.index < y.index ? -1 : 1;
      if (x.ints.size() != y.ints.size()) return x.ints.size() < y.ints.size() ? -1 : 1;
      if (x.ints != y.ints) return x.ints < y.ints ? -1 : 1;
      return 0;
    }
    case Kind::Func: {
      if (x.name != y.name) return x.name < y.name ? -1 : 1;
      if (x.ints != y.ints) return x.ints < y.ints ? -1 : 1;
      break;
    }
    case Kind::Pow: {
      if (int c = compare(x.children[0], y.children[0])) return c;
      return cmp_q(x.value->re, y.value->re);
    }
    default:
      break;
  }
  const std::size_t n = std::min(x.children.size(), y.children.size());
  for (std::size_t i = 0; i < n; ++i)
    if (int c = compare(x.children[i], y.children[i])) return c;
  if (x.children.size() != y.children.size()) return x.children.size() < y.children.size() ? -1 : 1;
  return 0;
}

// ---------------------------------------------------------------------------
// Builders

Expr constant(const Exact& v) {
  Node n(Kind::Const);
  n.value = v;
  return finish(std::move(n));
}

Expr::Expr() : Expr(sym::constant(Exact(0))) {}
Expr::Expr(long v) : Expr(sym::constant(Exact(v))) {}
Expr::Expr(const Exact& v) : Expr(sym::constant(v)) {}
Expr::Expr(const mpq_class& v) : Expr(sym::constant(Exact(v))) {}

Expr imaginary_unit() { return constant(Exact::i()); }

Expr indep(int i) {
  Node n(Kind::Indep);
  n.index = i;
  return finish(std::move(n));
}

Expr jet(int dep, MultiIndex multi) {
  std::sort(multi.begin(), multi.end());
  Node n(Kind::Jet);
  n.index = dep;
  n.ints = std::move(multi);
  return finish(std::move(n));
}

Expr coord(const Coord& c) {
  return c.kind == Coord::Kind::Independent ? indep(c.index) : jet(c.index, c.multi);
}

Expr func(std::string name, std::vector<Expr> args, std::vector<int> derivs) {
  if (derivs.empty()) derivs.assign(args.size(), 0);
  if (derivs.size() != args.size()) throw Error("derivative index arity mismatch for '" + name + "'");
  Node n(Kind::Func);
  n.name = std::move(name);
  n.ints = std::move(derivs);
  n.children = std::move(args);
  return finish(std::move(n));
}

Expr sum(std::vector<Expr> terms) {
  Exact c(0);
  std::vector<Expr> kept;
  kept.reserve(terms.size());
  for (auto& t : terms) {
    if (t.is_const()) {
      c += t.constant();
    } else if (t.kind() == Kind::Sum) {
      for (const auto& s : t->children) {
        if (s.is_const())
          c += s.constant();
        else
          kept.push_back(s);
      }
    } else {
      kept.push_back(std::move(t));
    }
  }
  if (!c.is_zero()) kept.insert(kept.begin(), constant(c));
  if (kept.empty()) return constant(Exact(0));
  if (kept.size() == 1) return kept.front();
  Node n(Kind::Sum);
  n.children = std::move(kept);
  return finish(std::move(n));
}

Expr product(std::vector<Expr> factors) {
  Exact c(1);
  std::vector<Expr> kept;
  kept.reserve(factors.size());
  auto absorb = [&](const Expr& f) {
    if (f.is_const())
      c *= f.constant();
    else
      kept.push_back(f);
  };
  for (auto& f : factors) {
    if (f.kind() == Kind::Prod) {
      for (const auto& s : f->children) absorb(s);
    } else {
      absorb(f);
    }
    if (c.is_zero()) return constant(Exact(0));
  }
  if (kept.empty()) return constant(c);
  if (!c.is_one()) kept.insert(kept.begin(), constant(c));
  if (kept.size() == 1) return kept.front();
  Node n(Kind::Prod);
  n.children = std::move(kept);
  return finish(std::move(n));
}

Expr power(const Expr& base, const mpq_class& exponent) {
  mpq_class q = exponent;
  q.canonicalize();
  if (sgn(q) == 0) return constant(Exact(1));
  if (q == 1) return base;
  if (base.is_const()) {
    const Exact& b = base.constant();
    if (!(b.is_zero() && sgn(q) < 0)) {
      try {
        return constant(pow_rational(b, q));
      } catch (const NotExact&) {
        // keep symbolic
      }
    }
  }
  if (base.kind() == Kind::Pow && q.get_den() == 1) {
    return power(base->children[0], mpq_class(base->value->re * q));
  }
  Node n(Kind::Pow);
  n.value = Exact(q);
  n.children = {base};
  return finish(std::move(n));
}

Expr power(const Expr& base, long exponent) { return power(base, mpq_class(exponent)); }

Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return sum({a, product({constant(Exact(-1)), b})}); }
Expr operator-(const Expr& a) { return product({constant(Exact(-1)), a}); }
Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_const()) return product({a, constant(Exact(1) / b.constant())});
  return product({a, power(b, -1)});
}

Expr var(const JetSpace& space, const std::string& name) {
  auto c = space.parse_coord_name(name);
  if (!c) throw UnknownCoordinate("unknown coordinate '" + name + "'");
  return coord(*c);
}

// ---------------------------------------------------------------------------
// Inspection

Coord coord_of(const Node& n) {
  if (n.kind == Kind::Indep) return Coord::independent(n.index);
  if (n.kind == Kind::Jet) return Coord::jet(n.index, n.ints);
  throw Error("node is not a coordinate");
}

namespace {

template <class F>
void visit_unique(const Expr& e, F&& f) {
  std::unordered_set<const Node*> seen;
  std::vector<const Expr*> stack{&e};
  while (!stack.empty()) {
    const Expr* cur = stack.back();
    stack.pop_back();
    if (!seen.insert(cur->get()).second) continue;
    f(**cur);
    for (const auto& c : (*cur)->children) stack.push_back(&c);
  }
}

}  // namespace

int max_order(const Expr& e) {
  int m = 0;
  visit_unique(e, [&](const Node& n) {
    if (n.kind == Kind::Jet) m = std::max(m, static_cast<int>(n.ints.size()));
  });
  return m;
}

std::vector<Coord> coordinates(const Expr& e) {
  std::vector<Coord> out;
  std::unordered_set<std::string> keys;
  visit_unique(e, [&](const Node& n) {
    if (n.kind == Kind::Indep || n.kind == Kind::Jet) {
      Coord c = coord_of(n);
      if (keys.insert(c.key()).second) out.push_back(std::move(c));
    }
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<std::string, int>> functions(const Expr& e) {
  std::vector<std::pair<std::string, int>> out;
  visit_unique(e, [&](const Node& n) {
    if (n.kind != Kind::Func) return;
    std::pair<std::string, int> f{n.name, static_cast<int>(n.children.size())};
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(std::move(f));
  });
  std::sort(out.begin(), out.end());
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].first == out[i - 1].first)
      throw Error("opaque function '" + out[i].first + "' used with inconsistent arity");
  return out;
}

bool is_constant_expr(const Expr& e) {
  bool c = true;
  visit_unique(e, [&](const Node& n) {
    if (n.kind == Kind::Indep || n.kind == Kind::Jet || n.kind == Kind::Func) c = false;
  });
  return c;
}

std::size_t node_count(const Expr& e) {
  std::size_t k = 0;
  visit_unique(e, [&](const Node&) { ++k; });
  return k;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

enum Prec { kSum = 1, kProd = 2, kUnary = 3, kPow = 4, kAtom = 5 };

std::string exponent_str(const mpq_class& q) {
  if (q.get_den() == 1 && sgn(q) > 0) return q.get_str();
  return "(" + q.get_str() + ")";
}

class Printer {
 public:
  explicit Printer(const JetSpace& s) : space_(s) {}

  std::string print(const Expr& e, int outer) {
    int prec = kAtom;
    std::string s = body(e, prec);
    if (prec < outer) return "(" + s + ")";
    return s;
  }

 private:
  // Splits a product into (coefficient, numerator factors, denominator factors).
  struct ProdParts {
    Exact coef{1};
    std::vector<Expr> num;
    std::vector<std::pair<Expr, mpq_class>> den;
  };

  static ProdParts split(const Expr& e) {
    ProdParts p;
    std::vector<Expr> fs = e.kind() == Kind::Prod ? e->children : std::vector<Expr>{e};
    for (const auto& f : fs) {
      if (f.is_const()) {
        p.coef *= f.constant();
      } else if (f.kind() == Kind::Pow && sgn(f->value->re) < 0) {
        p.den.emplace_back(f->children[0], mpq_class(-f->value->re));
      } else {
        p.num.push_back(f);
      }
    }
    return p;
  }

  std::string prod_body(const ProdParts& p, int& prec) {
    std::string s;
    const bool neg = p.coef.is_real() && sgn(p.coef.re) < 0;
    const Exact mag = neg ? -p.coef : p.coef;
    std::vector<std::string> parts;
    if (!mag.is_one() || p.num.empty()) {
      const std::string c = mag.str();
      parts.push_back(c);
    }
    for (const auto& f : p.num) parts.push_back(print(f, kPow));
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) s += "*";
      s += parts[i];
    }
    for (const auto& [b, q] : p.den) {
      s += "/";
      if (q == 1)
        s += print(b, kPow + 1);
      else
        s += print(b, kPow + 1) + "^" + exponent_str(q);
    }
    if (neg) {
      prec = kUnary;
      return "-" + s;
    }
    prec = (parts.size() == 1 && p.den.empty()) ? kAtom : kProd;
    if (parts.size() == 1 && p.den.empty() && !p.num.empty()) prec = kPow;
    return s;
  }

  std::string body(const Expr& e, int& prec) {
    const Node& n = *e;
    switch (n.kind) {
      case Kind::Const: {
        const Exact& v = *n.value;
        std::string s = v.str();
        if (v.is_real()) {
          prec = sgn(v.re) < 0 ? kUnary : (v.is_integer() ? kAtom : kProd);
        } else {
          prec = s.front() == '(' ? kAtom : kProd;
          if (s.front() == '-') prec = kUnary;
        }
        return s;
      }
      case Kind::Indep:
      case Kind::Jet:
        prec = kAtom;
        return space_.coord_name(coord_of(n));
      case Kind::Func: {
        std::string s = n.name;
        if (std::any_of(n.ints.begin(), n.ints.end(), [](int d) { return d != 0; })) {
          s += "[";
          for (std::size_t i = 0; i < n.ints.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(n.ints[i]);
          }
          s += "]";
        }
        s += "(";
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          if (i) s += "; ";
          s += print(n.children[i], kSum);
        }
        s += ")";
        prec = kAtom;
        return s;
      }
      case Kind::Pow: {
        const mpq_class& q = n.value->re;
        if (sgn(q) < 0) return prod_body(split(e), prec);
        prec = kPow;
        return print(n.children[0], kPow + 1) + "^" + exponent_str(q);
      }
      case Kind::Prod:
        return prod_body(split(e), prec);
      case Kind::Sum: {
        std::string s;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          int p = kAtom;
          std::string t = body(n.children[i], p);
          const bool neg = !t.empty() && t.front() == '-' && p == kUnary;
          if (i == 0) {
            s += t;
          } else if (neg) {
            s += " - " + t.substr(1);
          } else {
            s += " + " + (p < kProd ? "(" + t + ")" : t);
          }
        }
        prec = kSum;
        return s;
      }
    }
    return {};
  }

  const JetSpace& space_;
};

class PrefixPrinter {
 public:
  explicit PrefixPrinter(const JetSpace& s) : space_(s) {}
  std::string print(const Expr& e) {
    const Node& n = *e;
    switch (n.kind) {
      case Kind::Const:
        if (n.value->is_real()) return n.value->re.get_str();
        return "(c " + n.value->re.get_str() + " " + n.value->im.get_str() + ")";
      case Kind::Indep:
      case Kind::Jet:
        return space_.coord_name(coord_of(n));
      case Kind::Func: {
        std::string s = "(F " + n.name + " [";
        for (std::size_t i = 0; i < n.ints.size(); ++i) s += (i ? " " : "") + std::to_string(n.ints[i]);
        s += "]";
        for (const auto& c : n.children) s += " " + print(c);
        return s + ")";
      }
      case Kind::Pow:
        return "(^ " + print(n.children[0]) + " " + n.value->re.get_str() + ")";
      case Kind::Prod:
      case Kind::Sum: {
        std::string s = n.kind == Kind::Sum ? "(+" : "(*";
        for (const auto& c : n.children) s += " " + print(c);
        return s + ")";
      }
    }
    return {};
  }

 private:
  const JetSpace& space_;
};

}  // namespace

std::string to_string(const Expr& e, const JetSpace& space) { return Printer(space).print(e, 0); }

std::string to_prefix(const Expr& e, const JetSpace& space) { return PrefixPrinter(space).print(e); }

}  // namespace contsym::sym
