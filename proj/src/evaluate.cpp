#include "contsym/evaluate.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace contsym::sym {

Polynomial Polynomial::univariate(const std::vector<mpq_class>& coeffs) {
  Polynomial p(1);
  for (std::size_t k = 0; k < coeffs.size(); ++k) p.add_term({static_cast<int>(k)}, coeffs[k]);
  return p;
}

Polynomial Polynomial::random(int arity, int degree, Rng& rng, long max_den) {
  Polynomial p(arity);
  // enumerate exponent vectors of total degree <= degree
  std::vector<Exponents> all{Exponents(static_cast<std::size_t>(arity), 0)};
  for (int v = 0; v < arity; ++v) {
    std::vector<Exponents> next;
    for (const auto& e : all) {
      int used = 0;
      for (int x : e) used += x;
      for (int k = 0; used + k <= degree; ++k) {
        Exponents f = e;
        f[static_cast<std::size_t>(v)] = k;
        next.push_back(std::move(f));
      }
    }
    all = std::move(next);
  }
  for (auto& e : all) p.add_term(std::move(e), rng.rational(max_den, -2, 2));
  return p;
}

void Polynomial::add_term(Exponents e, const mpq_class& c) {
  if (static_cast<int>(e.size()) != arity_) throw Error("polynomial exponent arity mismatch");
  if (sgn(c) == 0) return;
  auto& slot = terms_[e];
  slot += c;
  if (sgn(slot) == 0) terms_.erase(e);
}

Polynomial Polynomial::derivative(const std::vector<int>& orders) const {
  if (static_cast<int>(orders.size()) != arity_) throw Error("derivative arity mismatch");
  Polynomial out(arity_);
  for (const auto& [e, c] : terms_) {
    Exponents f = e;
    mpq_class k = c;
    bool dead = false;
    for (std::size_t v = 0; v < f.size() && !dead; ++v) {
      for (int r = 0; r < orders[v]; ++r) {
        if (f[v] == 0) {
          dead = true;
          break;
        }
        k *= f[v];
        --f[v];
      }
    }
    if (!dead) out.add_term(std::move(f), k);
  }
  return out;
}

template <class S>
S Polynomial::evaluate(const std::vector<S>& args) const {
  if (static_cast<int>(args.size()) != arity_) throw Error("polynomial argument count mismatch");
  S total = from_exact<S>(Exact(0));
  for (const auto& [e, c] : terms_) {
    S term = from_exact<S>(Exact(c));
    for (std::size_t v = 0; v < e.size(); ++v)
      if (e[v]) term = term * pow_int(args[v], e[v]);
    total = total + term;
  }
  return total;
}

template Exact Polynomial::evaluate<Exact>(const std::vector<Exact>&) const;
template Float Polynomial::evaluate<Float>(const std::vector<Float>&) const;

std::string Polynomial::str(const std::vector<std::string>& names) const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c.get_str();
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e[v] == 0) continue;
      os << "*" << (v < names.size() ? names[v] : "s" + std::to_string(v));
      if (e[v] > 1) os << "^" << e[v];
    }
  }
  if (first) os << "0";
  return os.str();
}

const Polynomial& FunctionBinding::at(const std::string& name) const {
  auto it = polys_.find(name);
  if (it == polys_.end()) throw MissingBinding("no binding for opaque function '" + name + "'");
  return it->second;
}

namespace {

template <class S>
class Evaluator {
 public:
  Evaluator(const JetPoint<S>& p, const FunctionBinding& fb) : p_(p), fb_(fb) {}

  S run(const Expr& e) {
    if (auto it = memo_.find(e.get()); it != memo_.end()) return it->second;
    S v = step(e);
    memo_.emplace(e.get(), v);
    return v;
  }

 private:
  S step(const Expr& e) {
    const Node& n = *e;
    switch (n.kind) {
      case Kind::Const:
        return from_exact<S>(*n.value);
      case Kind::Indep:
      case Kind::Jet:
        return p_.at(coord_of(n));
      case Kind::Func: {
        std::vector<S> args;
        args.reserve(n.children.size());
        for (const auto& c : n.children) args.push_back(run(c));
        return derived(n.name, n.ints).evaluate(args);
      }
      case Kind::Pow:
        return pow_rational(run(n.children[0]), n.value->re);
      case Kind::Prod: {
        S acc = run(n.children[0]);
        for (std::size_t k = 1; k < n.children.size(); ++k) {
          if (is_zero(acc)) return acc;
          acc = acc * run(n.children[k]);
        }
        return acc;
      }
      case Kind::Sum: {
        S acc = run(n.children[0]);
        for (std::size_t k = 1; k < n.children.size(); ++k) acc = acc + run(n.children[k]);
        return acc;
      }
    }
    throw Error("unreachable");
  }

  const Polynomial& derived(const std::string& name, const std::vector<int>& orders) {
    std::string key = name + '#';
    for (int o : orders) key += std::to_string(o) + ',';
    auto it = derived_.find(key);
    if (it != derived_.end()) return it->second;
    return derived_.emplace(key, fb_.at(name).derivative(orders)).first->second;
  }

  const JetPoint<S>& p_;
  const FunctionBinding& fb_;
  std::unordered_map<const Node*, S> memo_;
  std::unordered_map<std::string, Polynomial> derived_;
};

}  // namespace

template <class S>
S evaluate(const Expr& e, const JetPoint<S>& p, const FunctionBinding& fb) {
  Evaluator<S> ev(p, fb);
  return ev.run(e);
}

template <class S>
std::vector<S> evaluate_all(const std::vector<Expr>& es, const JetPoint<S>& p, const FunctionBinding& fb) {
  Evaluator<S> ev(p, fb);
  std::vector<S> out;
  out.reserve(es.size());
  for (const auto& e : es) out.push_back(ev.run(e));
  return out;
}

template Exact evaluate<Exact>(const Expr&, const ExactPoint&, const FunctionBinding&);
template Float evaluate<Float>(const Expr&, const FloatPoint&, const FunctionBinding&);
template std::vector<Exact> evaluate_all<Exact>(const std::vector<Expr>&, const ExactPoint&, const FunctionBinding&);
template std::vector<Float> evaluate_all<Float>(const std::vector<Expr>&, const FloatPoint&, const FunctionBinding&);

double magnitude_scale(const Expr& e, const FloatPoint& p, const FunctionBinding& fb) {
  Evaluator<Float> values(p, fb);
  std::unordered_map<const Node*, double> memo;
  std::function<double(const Expr&)> mag = [&](const Expr& x) -> double {
    if (auto it = memo.find(x.get()); it != memo.end()) return it->second;
    const Node& n = *x;
    double m = 0.0;
    switch (n.kind) {
      case Kind::Sum:
        for (const auto& c : n.children) m += mag(c);
        break;
      case Kind::Prod:
        m = 1.0;
        for (const auto& c : n.children) m *= mag(c);
        break;
      case Kind::Pow:
        m = sgn(n.value->re) > 0 ? std::pow(mag(n.children[0]), n.value->re.get_d())
                                 : std::abs(values.run(x));
        break;
      default:
        m = std::abs(values.run(x));
        break;
    }
    memo.emplace(x.get(), m);
    return m;
  };
  return mag(e);
}

FloatPoint to_float(const ExactPoint& p) {
  FloatPoint out;
  for (const auto& [k, v] : p.values()) {
    Coord c;
    c.kind = k[0] == 'j' ? Coord::Kind::Jet : Coord::Kind::Independent;
    c.index = static_cast<unsigned char>(k[1]);
    for (std::size_t i = 2; i < k.size(); ++i) c.multi.push_back(static_cast<unsigned char>(k[i]));
    out.set(c, v.to_complex());
  }
  return out;
}

ExactPoint to_exact(const FloatPoint& p) {
  ExactPoint out;
  for (const auto& [k, v] : p.values()) {
    Coord c;
    c.kind = k[0] == 'j' ? Coord::Kind::Jet : Coord::Kind::Independent;
    c.index = static_cast<unsigned char>(k[1]);
    for (std::size_t i = 2; i < k.size(); ++i) c.multi.push_back(static_cast<unsigned char>(k[i]));
    out.set(c, contsym::to_exact(v));
  }
  return out;
}

}  // namespace contsym::sym
