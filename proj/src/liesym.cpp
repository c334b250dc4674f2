#include "contsym/liesym.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace contsym::lie {

using sym::ExactPoint;
using sym::FloatPoint;
using sym::MultiIndex;

namespace {

void require_point_coefficient(const Expr& e, const char* what) {
  for (const Coord& c : sym::coordinates(e))
    if (c.kind == Coord::Kind::Jet && c.order() > 0)
      throw Error(std::string(what) + " coefficient depends on a derivative coordinate");
}

void require_same_space(const JetSpace& a, const JetSpace& b) {
  if (a != b) throw SpaceMismatch("vector fields live on different jet spaces");
}

}  // namespace

VectorField::VectorField(JetSpace sp, std::vector<Expr> x, std::vector<Expr> e)
    : space(std::move(sp)), xi(std::move(x)), eta(std::move(e)) {
  if (static_cast<int>(xi.size()) != space.num_independents() ||
      static_cast<int>(eta.size()) != space.num_dependents())
    throw Error("vector field has the wrong number of components");
  for (const Expr& c : xi) require_point_coefficient(c, "xi");
  for (const Expr& c : eta) require_point_coefficient(c, "eta");
}

VectorField VectorField::zero(const JetSpace& space) {
  return VectorField(space, std::vector<Expr>(space.num_independents()), std::vector<Expr>(space.num_dependents()));
}

Expr VectorField::act(const Expr& f) const {
  std::vector<Expr> terms;
  for (int i = 0; i < space.num_independents(); ++i)
    if (!xi[i].is_zero()) terms.push_back(xi[i] * sym::partial_derivative(f, Coord::independent(i)));
  for (int a = 0; a < space.num_dependents(); ++a)
    if (!eta[a].is_zero()) terms.push_back(eta[a] * sym::partial_derivative(f, Coord::jet(a)));
  return sym::simplify_basic(sym::sum(std::move(terms)));
}

std::vector<Expr> VectorField::components() const {
  std::vector<Expr> out = xi;
  out.insert(out.end(), eta.begin(), eta.end());
  return out;
}

bool VectorField::is_zero() const {
  std::vector<Expr> rest;
  for (const Expr& c : components()) {
    const Expr s = sym::simplify_basic(c);
    if (!s.is_zero()) rest.push_back(s);
  }
  if (rest.empty()) return true;
  // Not syntactically zero: decide by exact evaluation at random points.
  std::map<std::string, int> fnames;
  for (const Expr& c : rest)
    for (const auto& f : sym::functions(c)) fnames.emplace(f);
  Rng rng(0x5eed);
  for (int k = 0, bad = 0; k < 12; ++k) {
    const FunctionBinding fb = complete_binding({}, {fnames.begin(), fnames.end()}, 3, rng);
    sym::ExactPoint p;
    for (int i = 0; i < space.num_independents(); ++i) p.set(Coord::independent(i), Exact(rng.rational(16, -2, 2)));
    for (int d = 0; d < space.num_dependents(); ++d) p.set(Coord::jet(d), Exact(rng.rational(16, -2, 2)));
    try {
      for (const Expr& c : rest)
        if (!sym::evaluate(c, p, fb).is_zero()) return false;
    } catch (const DivisionByZero&) {
      if (++bad > 100) throw;
      --k;
    }
  }
  return true;
}

std::string VectorField::str() const {
  std::ostringstream os;
  bool first = true;
  auto emit = [&](const Expr& c, const std::string& name) {
    const Expr s = sym::simplify_basic(c);
    if (s.is_zero()) return;
    if (!first) os << " + ";
    first = false;
    os << "(" << sym::to_string(s, space) << ")*d_" << name;
  };
  for (int i = 0; i < space.num_independents(); ++i) emit(xi[i], space.independents()[i]);
  for (int a = 0; a < space.num_dependents(); ++a) emit(eta[a], space.dependents()[a]);
  return first ? "0" : os.str();
}

namespace {

VectorField combine(const VectorField& a, const VectorField& b, const std::function<Expr(const Expr&, const Expr&)>& op) {
  require_same_space(a.space, b.space);
  std::vector<Expr> xi, eta;
  for (std::size_t i = 0; i < a.xi.size(); ++i) xi.push_back(sym::simplify_basic(op(a.xi[i], b.xi[i])));
  for (std::size_t i = 0; i < a.eta.size(); ++i) eta.push_back(sym::simplify_basic(op(a.eta[i], b.eta[i])));
  return VectorField(a.space, std::move(xi), std::move(eta));
}

}  // namespace

VectorField operator+(const VectorField& a, const VectorField& b) {
  return combine(a, b, [](const Expr& x, const Expr& y) { return x + y; });
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  return combine(a, b, [](const Expr& x, const Expr& y) { return x - y; });
}

VectorField operator*(const Expr& c, const VectorField& v) {
  return combine(v, v, [&](const Expr& x, const Expr&) { return c * x; });
}

// ---------------------------------------------------------------- prolongation

const Expr& ProlongedVectorField::coefficient(const Coord& c) const {
  if (c.kind == Coord::Kind::Independent) return base.xi.at(c.index);
  if (c.order() == 0) return base.eta.at(c.index);
  auto it = eta_j.find(c.key());
  if (it == eta_j.end()) throw Error("prolongation order " + std::to_string(order) + " is too low for a coordinate");
  return it->second;
}

namespace {

// One recursion step: from eta^J to eta^{J,i}.
Expr prolong_step(const VectorField& v, const Expr& eta_parent, int dep, const MultiIndex& parent, int i,
                  sym::DerivativeCache* cache) {
  std::vector<Expr> terms{sym::total_derivative(eta_parent, i, v.space, true, cache)};
  for (int m = 0; m < v.space.num_independents(); ++m) {
    if (v.xi[m].is_zero()) continue;
    const Expr dxi = sym::total_derivative(v.xi[m], i, v.space, true, cache);
    if (dxi.is_zero()) continue;
    terms.push_back(-(dxi * sym::jet(dep, sym::add_index(parent, m))));
  }
  return sym::simplify_basic(sym::sum(std::move(terms)));
}

}  // namespace

ProlongedVectorField prolong(const VectorField& v, int order) {
  if (order < 0) throw Error("prolongation order must be non-negative");
  ProlongedVectorField pv;
  pv.base = v;
  pv.order = order;
  sym::DerivativeCache cache;
  for (int dep = 0; dep < v.space.num_dependents(); ++dep) {
    for (const MultiIndex& j : v.space.multi_indices(order)) {
      // multi_indices is ordered by length, so the parent is already known.
      MultiIndex parent = j;
      const int i = parent.back();
      parent.pop_back();
      const Expr& eta_parent = parent.empty() ? v.eta[dep] : pv.eta_j.at(Coord::jet(dep, parent).key());
      Expr c = prolong_step(v, eta_parent, dep, parent, i, &cache);
      cache.retain(c);
      pv.eta_j.emplace(Coord::jet(dep, j).key(), std::move(c));
    }
  }
  return pv;
}

Expr prolong_along(const VectorField& v, int dep, const std::vector<int>& path) {
  Expr eta = v.eta.at(dep);
  MultiIndex parent;
  for (int i : path) {
    eta = prolong_step(v, eta, dep, parent, i, nullptr);
    parent = sym::add_index(std::move(parent), i);
  }
  return eta;
}

Expr apply(const ProlongedVectorField& pv, const Expr& e) {
  std::vector<Expr> terms;
  for (const Coord& c : sym::coordinates(e)) {
    if (c.kind == Coord::Kind::Jet && c.order() > pv.order)
      throw Error("prolongation order " + std::to_string(pv.order) + " is below the expression order " +
                  std::to_string(c.order()));
    const Expr& coef = pv.coefficient(c);
    if (coef.is_zero()) continue;
    terms.push_back(coef * sym::partial_derivative(e, c));
  }
  return sym::simplify_basic(sym::sum(std::move(terms)));
}

// ---------------------------------------------------------------- systems

std::vector<std::pair<std::string, int>> PdeSystem::functions() const {
  std::map<std::string, int> seen;
  for (const Expr& e : equations)
    for (const auto& [name, arity] : sym::functions(e)) seen.emplace(name, arity);
  return {seen.begin(), seen.end()};
}

Expr solve_linear(const Expr& equation, const Coord& c) {
  const Expr coef = sym::simplify_basic(sym::partial_derivative(equation, c));
  if (coef.is_zero()) throw Error("equation does not contain the coordinate to solve for");
  const Expr rest = sym::substitute(equation, {{c, Expr(0L)}});
  return sym::simplify_basic(-(rest / coef));
}

namespace {

class Reducer {
 public:
  Reducer(const PdeSystem& s, int max_order) : system_(s), max_order_(max_order) {}

  Expr reduce(const Expr& e, int depth) {
    std::vector<std::pair<Coord, Expr>> bindings;
    for (const Coord& c : sym::coordinates(e)) {
      if (c.kind != Coord::Kind::Jet) continue;
      if (auto r = principal(c, depth)) bindings.emplace_back(c, *r);
    }
    if (bindings.empty()) return e;
    return sym::substitute(e, bindings);
  }

 private:
  std::optional<Expr> principal(const Coord& c, int depth) {
    const std::string key = c.key();
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    for (const auto& [lead, rhs] : system_.solved_for) {
      if (lead.index != c.index) continue;
      auto rest = sym::subtract_index(c.multi, lead.multi);
      if (!rest) continue;
      if (depth > 64) throw Unresolvable("on-shell reduction does not terminate");
      Expr r = rest->empty() ? rhs : sym::total_derivative(rhs, *rest, system_.space, &cache_);
      cache_.retain(r);
      r = reduce(r, depth + 1);
      if (sym::max_order(r) > max_order_)
        throw Unresolvable("reducing " + system_.space.coord_name(c) + " needs coordinates beyond order " +
                           std::to_string(max_order_));
      memo_.emplace(key, r);
      return r;
    }
    return std::nullopt;
  }

  const PdeSystem& system_;
  int max_order_;
  std::unordered_map<std::string, Expr> memo_;
  sym::DerivativeCache cache_;
};

}  // namespace

Expr on_shell_reduce(const PdeSystem& system, const Expr& e, int max_order) {
  Reducer r(system, max_order);
  return r.reduce(e, 0);
}

// ---------------------------------------------------------------- sampling

namespace {

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

template <class S>
bool guards_hold(const PdeSystem& system, const sym::JetPoint<S>& p, const FunctionBinding& fb) {
  for (const auto& [g, bound] : system.hints.guards) {
    try {
      if (magnitude(sym::evaluate(g, p, fb)) < bound) return false;
    } catch (const DivisionByZero&) {
      return false;
    }
  }
  return true;
}

int guard_order(const PdeSystem& system) {
  int k = 0;
  for (const auto& g : system.hints.guards) k = std::max(k, sym::max_order(g.first));
  return k;
}

// Generic rational in [-1, 1]: denominator up to 64, never zero.
mpq_class generic_rational(Rng& rng) {
  const long q = rng.uniform_int(1, 64);
  long p = rng.uniform_int(1, q);
  if (rng.uniform_int(0, 1) == 1) p = -p;
  mpq_class r(p, q);
  r.canonicalize();
  return r;
}

}  // namespace

ExactPoint sample_exact_point(const PdeSystem& system, int order, Rng& rng, const FunctionBinding& fb) {
  const JetSpace& space = system.space;
  order = std::max(order, guard_order(system));
  const auto multis = space.multi_indices(order);
  for (int attempt = 0; attempt <= 100; ++attempt) {
    ExactPoint p;
    for (int i = 0; i < space.num_independents(); ++i) p.set(Coord::independent(i), Exact(generic_rational(rng)));
    for (int d = 0; d < space.num_dependents(); ++d) {
      mpq_class v;
      if (contains(system.hints.positive, d)) {
        if (system.hints.root_degree > 1) {
          const mpq_class w = 1 + rng.rational(16) * mpq_class(3, 10);
          v = pow_int(Exact(w), system.hints.root_degree).re;
        } else {
          v = rng.rational(16, 0, 2);
          if (v < mpq_class(1, 4)) v += 1;
        }
      } else {
        v = generic_rational(rng);
      }
      p.set(Coord::jet(d), Exact(v));
      for (const auto& j : multis) p.set(Coord::jet(d, j), Exact(generic_rational(rng)));
    }
    if (guards_hold(system, p, fb)) return p;
  }
  throw SamplingFailure("no admissible sample point after 100 rejections for " + system.name);
}

FloatPoint sample_float_point(const PdeSystem& system, int order, Rng& rng, const FunctionBinding& fb) {
  const JetSpace& space = system.space;
  order = std::max(order, guard_order(system));
  const auto multis = space.multi_indices(order);
  auto dyadic = [&](double lo, double hi) {
    return static_cast<double>(rng.uniform_int(static_cast<long>(lo * 1024), static_cast<long>(hi * 1024))) / 1024.0;
  };
  std::vector<int> conj_of(space.num_dependents(), -1);
  std::vector<bool> complex_dep(space.num_dependents(), false);
  for (const auto& [u, uc] : system.hints.conjugates) {
    conj_of[uc] = u;
    complex_dep[u] = true;
  }
  for (int attempt = 0; attempt <= 100; ++attempt) {
    FloatPoint p;
    for (int i = 0; i < space.num_independents(); ++i) p.set(Coord::independent(i), Float(dyadic(-1, 1)));
    auto draw = [&](int d) {
      return complex_dep[d] ? Float(dyadic(-1, 1), dyadic(-1, 1)) : Float(dyadic(-1, 1));
    };
    for (int d = 0; d < space.num_dependents(); ++d) {
      if (conj_of[d] >= 0) continue;
      Float v;
      if (contains(system.hints.positive, d)) {
        if (system.hints.root_degree > 1) {
          v = std::pow(dyadic(0.7, 1.3), system.hints.root_degree);
        } else {
          v = dyadic(0.25, 2);
        }
      } else {
        v = draw(d);
      }
      p.set(Coord::jet(d), v);
      for (const auto& j : multis) p.set(Coord::jet(d, j), draw(d));
    }
    for (int d = 0; d < space.num_dependents(); ++d) {
      if (conj_of[d] < 0) continue;
      p.set(Coord::jet(d), std::conj(p.at(Coord::jet(conj_of[d]))));
      for (const auto& j : multis) p.set(Coord::jet(d, j), std::conj(p.at(Coord::jet(conj_of[d], j))));
    }
    if (guards_hold(system, p, fb)) return p;
  }
  throw SamplingFailure("no admissible sample point after 100 rejections for " + system.name);
}

FunctionBinding complete_binding(const FunctionBinding& fixed, const std::vector<std::pair<std::string, int>>& names,
                                 int degree, Rng& rng) {
  FunctionBinding fb = fixed;
  for (const auto& [name, arity] : names)
    if (!fb.has(name)) fb.bind(name, sym::Polynomial::random(arity, degree, rng));
  return fb;
}

// ---------------------------------------------------------------- invariance

std::string mode_name(Mode m) { return m == Mode::Exact ? "rational-exact" : "float"; }

std::vector<Expr> invariance_conditions(const PdeSystem& system, const VectorField& v) {
  require_same_space(system.space, v.space);
  int order = 0;
  for (const Expr& e : system.equations) order = std::max(order, sym::max_order(e));
  const ProlongedVectorField pv = prolong(v, order);
  std::vector<Expr> out;
  for (const Expr& e : system.equations) out.push_back(on_shell_reduce(system, apply(pv, e)));
  return out;
}

InvarianceReport on_shell_residual(const PdeSystem& system, const VectorField& v, const std::string& generator_name,
                                   const ResidualOptions& opts, const FunctionBinding& fb) {
  if (opts.trials < 1) throw Error("trials must be at least 1");
  const std::vector<Expr> conds = invariance_conditions(system, v);
  int order = 0;
  std::map<std::string, int> fnames;
  for (const auto& f : system.functions()) fnames.emplace(f);
  for (const Expr& c : conds) {
    order = std::max(order, sym::max_order(c));
    for (const auto& f : sym::functions(c)) fnames.emplace(f);
  }
  const std::vector<std::pair<std::string, int>> names(fnames.begin(), fnames.end());

  InvarianceReport rep;
  rep.system = system.name;
  rep.generator = generator_name;
  rep.mode = opts.mode;
  rep.seed = opts.seed;
  rep.trials = opts.trials;
  rep.equations.resize(conds.size());

  for (int k = 0; k < opts.trials; ++k) {
    Rng rng(Rng::derive(opts.seed, static_cast<std::uint64_t>(k)));
    const FunctionBinding fbk = complete_binding(fb, names, opts.function_degree, rng);
    double point_max = 0;
    bool point_nonzero = false;
    if (opts.mode == Mode::Exact) {
      const ExactPoint p = sample_exact_point(system, order, rng, fbk);
      const FloatPoint pf = sym::to_float(p);
      for (std::size_t a = 0; a < conds.size(); ++a) {
        const Exact r = sym::evaluate(conds[a], p, fbk);
        const double abs = r.abs();
        const double rel = r.is_zero() ? 0.0 : abs / std::max(sym::magnitude_scale(conds[a], pf, fbk), 1e-300);
        rep.equations[a].max_abs = std::max(rep.equations[a].max_abs, abs);
        rep.equations[a].max_rel = std::max(rep.equations[a].max_rel, rel);
        point_max = std::max(point_max, abs);
        point_nonzero = point_nonzero || !r.is_zero();
      }
    } else {
      const FloatPoint p = sample_float_point(system, order, rng, fbk);
      for (std::size_t a = 0; a < conds.size(); ++a) {
        const Float r = sym::evaluate(conds[a], p, fbk);
        const double abs = std::abs(r);
        const double rel = abs / std::max(sym::magnitude_scale(conds[a], p, fbk), 1e-300);
        bool zero;
        if (rel < 1e-12) {
          zero = true;
        } else if (rel > 1e-6) {
          zero = false;
        } else {
          ++rep.arbitrated_points;
          try {
            zero = sym::evaluate(conds[a], sym::to_exact(p), fbk).is_zero();
          } catch (const NotExact&) {
            zero = rel < 1e-9;
          }
        }
        rep.equations[a].max_abs = std::max(rep.equations[a].max_abs, abs);
        rep.equations[a].max_rel = std::max(rep.equations[a].max_rel, rel);
        point_max = std::max(point_max, abs);
        point_nonzero = point_nonzero || !zero;
      }
    }
    rep.point_residuals.push_back(point_max);
    if (point_nonzero) ++rep.nonzero_points;
  }
  for (const auto& e : rep.equations) {
    rep.max_abs_residual = std::max(rep.max_abs_residual, e.max_abs);
    rep.max_rel_residual = std::max(rep.max_rel_residual, e.max_rel);
  }
  rep.zero_at_all_points = rep.nonzero_points == 0;
  return rep;
}

void to_json(nlohmann::json& j, const InvarianceReport& r) {
  nlohmann::json eqs = nlohmann::json::array();
  for (const auto& e : r.equations) eqs.push_back({{"max_abs", e.max_abs}, {"max_rel", e.max_rel}});
  j = nlohmann::json{{"schema", "contsym.invariance/1"},
                     {"system", r.system},
                     {"generator", r.generator},
                     {"mode", mode_name(r.mode)},
                     {"seed", r.seed},
                     {"trials", r.trials},
                     {"max_abs_residual", r.max_abs_residual},
                     {"max_rel_residual", r.max_rel_residual},
                     {"equations", eqs},
                     {"point_residuals", r.point_residuals},
                     {"nonzero_points", r.nonzero_points},
                     {"arbitrated_points", r.arbitrated_points},
                     {"zero_at_all_points", r.zero_at_all_points}};
}

// ---------------------------------------------------------------- brackets

VectorField lie_bracket(const VectorField& v, const VectorField& w) {
  require_same_space(v.space, w.space);
  std::vector<Expr> xi, eta;
  for (std::size_t i = 0; i < v.xi.size(); ++i) xi.push_back(sym::simplify_basic(v.act(w.xi[i]) - w.act(v.xi[i])));
  for (std::size_t a = 0; a < v.eta.size(); ++a)
    eta.push_back(sym::simplify_basic(v.act(w.eta[a]) - w.act(v.eta[a])));
  return VectorField(v.space, std::move(xi), std::move(eta));
}

std::string closure_status_name(ClosureStatus s) {
  switch (s) {
    case ClosureStatus::Closed:
      return "closed";
    case ClosureStatus::NotClosed:
      return "not-closed";
    default:
      return "rank-deficient";
  }
}

LinearSolve solve_exact(std::vector<std::vector<Exact>> a, std::vector<Exact> b) {
  LinearSolve out;
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c].is_zero()) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    std::swap(b[piv], b[r]);
    const Exact inv = Exact(1) / a[r][c];
    for (std::size_t k = c; k < cols; ++k) a[r][k] = a[r][k] * inv;
    b[r] = b[r] * inv;
    for (std::size_t q = 0; q < rows; ++q) {
      if (q == r || a[q][c].is_zero()) continue;
      const Exact f = a[q][c];
      for (std::size_t k = c; k < cols; ++k) a[q][k] = a[q][k] - f * a[r][k];
      b[q] = b[q] - f * b[r];
    }
    pivot_col.push_back(c);
    ++r;
  }
  out.rank = static_cast<int>(r);
  for (std::size_t q = r; q < rows; ++q)
    if (!b[q].is_zero()) out.consistent = false;
  if (out.consistent && r == cols) {
    out.x.assign(cols, Exact(0));
    for (std::size_t q = 0; q < r; ++q) out.x[pivot_col[q]] = b[q];
  }
  return out;
}

namespace {

ExactPoint closure_point(const JetSpace& space, Rng& rng) {
  ExactPoint p;
  for (int i = 0; i < space.num_independents(); ++i) p.set(Coord::independent(i), Exact(rng.rational(16, -2, 2)));
  for (int d = 0; d < space.num_dependents(); ++d) p.set(Coord::jet(d), Exact(rng.rational(16, -2, 2)));
  return p;
}

std::vector<Exact> eval_components(const VectorField& v, const ExactPoint& p, const FunctionBinding& fb) {
  return sym::evaluate_all(v.components(), p, fb);
}

}  // namespace

ClosureTable closure_table(const std::vector<NamedField>& gens, std::uint64_t seed, const FunctionBinding& fb) {
  if (gens.size() < 2) throw Error("closure_table needs at least two generators");
  const JetSpace& space = gens[0].field.space;
  for (const auto& g : gens) require_same_space(space, g.field.space);
  const std::size_t k = gens.size();

  ClosureTable t;
  for (const auto& g : gens) t.names.push_back(g.name);
  t.coefficients.assign(k, std::vector<std::vector<Exact>>(k));

  Rng rng(seed);
  std::vector<ExactPoint> points;
  for (std::size_t q = 0; q < k + 3; ++q) points.push_back(closure_point(space, rng));
  std::vector<ExactPoint> checks;
  for (int q = 0; q < 3; ++q) checks.push_back(closure_point(space, rng));

  // Matrix rows: one per (point, component); columns: generators.
  std::vector<std::vector<Exact>> a;
  for (const auto& p : points) {
    std::vector<std::vector<Exact>> cols;
    for (const auto& g : gens) cols.push_back(eval_components(g.field, p, fb));
    for (std::size_t c = 0; c < cols[0].size(); ++c) {
      std::vector<Exact> row;
      for (std::size_t g = 0; g < k; ++g) row.push_back(cols[g][c]);
      a.push_back(std::move(row));
    }
  }
  t.rank = solve_exact(a, std::vector<Exact>(a.size(), Exact(0))).rank;
  if (t.rank < static_cast<int>(k)) {
    t.status = ClosureStatus::RankDeficient;
    return t;
  }

  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const VectorField br = lie_bracket(gens[i].field, gens[j].field);
      std::vector<Exact> rhs;
      for (const auto& p : points) {
        auto v = eval_components(br, p, fb);
        rhs.insert(rhs.end(), v.begin(), v.end());
      }
      LinearSolve sol = solve_exact(a, rhs);
      bool in_span = sol.consistent;
      if (in_span) {
        // The coefficients came from finitely many points; confirm elsewhere.
        VectorField combo = VectorField::zero(space);
        for (std::size_t g = 0; g < k; ++g)
          if (!sol.x[g].is_zero()) combo = combo + Expr(sol.x[g]) * gens[g].field;
        const VectorField diff = br - combo;
        for (const auto& p : checks)
          for (const Exact& c : eval_components(diff, p, fb))
            if (!c.is_zero()) in_span = false;
      }
      if (!in_span) {
        if (!t.witness) t.witness = std::make_pair(static_cast<int>(i), static_cast<int>(j));
        t.status = ClosureStatus::NotClosed;
        continue;
      }
      for (const Exact& c : sol.x) t.all_rational = t.all_rational && c.is_real();
      std::vector<Exact> neg;
      for (const Exact& c : sol.x) neg.push_back(-c);
      t.coefficients[i][j] = sol.x;
      t.coefficients[j][i] = std::move(neg);
    }
    t.coefficients[i][i].assign(k, Exact(0));
  }
  return t;
}

}  // namespace contsym::lie
