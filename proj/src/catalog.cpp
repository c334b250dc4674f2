#include "contsym/catalog.hpp"

#include <algorithm>
#include <map>

namespace contsym::catalog {

using lie::Coord;
using lie::solve_linear;
using sym::indep;
using sym::jet;
using sym::power;

// ---------------------------------------------------------------- helpers

Fn Fn::opaque(const std::string& name) {
  return {name, [name](const std::vector<Expr>& args) { return sym::func(name, args); }};
}

Fn Fn::zero() {
  return {"0", [](const std::vector<Expr>&) { return Expr(0L); }};
}

Fn Fn::constant(const mpq_class& c) {
  return {rational_str(c), [c](const std::vector<Expr>&) { return Expr(c); }};
}

Fn Fn::linear(const mpq_class& c) {
  return {rational_str(c) + "*s", [c](const std::vector<Expr>& a) { return Expr(c) * a.at(0); }};
}

Fn Fn::fixed(std::string label, std::function<Expr(const std::vector<Expr>&)> f) {
  return {std::move(label), std::move(f)};
}

const VectorField& GeneratorFamily::get(const std::string& member) const {
  for (const auto& m : members)
    if (m.name == member) return m.field;
  throw Error("family " + name + " has no member " + member);
}

bool GeneratorFamily::has(const std::string& member) const {
  return std::any_of(members.begin(), members.end(), [&](const NamedField& m) { return m.name == member; });
}

std::string spatial_name(int n, int a) { return n == 1 ? "x" : "x" + std::to_string(a); }

Expr laplacian(const Expr& e, const JetSpace& space) {
  std::vector<Expr> terms;
  for (int a = 1; a <= space.n(); ++a)
    terms.push_back(sym::total_derivative(sym::total_derivative(e, a, space), a, space));
  return sym::simplify_basic(sym::sum(std::move(terms)));
}

Expr grad_squared(const Expr& e, const JetSpace& space) {
  std::vector<Expr> terms;
  for (int a = 1; a <= space.n(); ++a) terms.push_back(power(sym::total_derivative(e, a, space), 2));
  return sym::simplify_basic(sym::sum(std::move(terms)));
}

namespace {

sym::ExactPoint order0_point(const JetSpace& space, Rng& rng) {
  sym::ExactPoint p;
  for (int i = 0; i < space.num_independents(); ++i) p.set(Coord::independent(i), Exact(rng.rational(16, -2, 2)));
  for (int d = 0; d < space.num_dependents(); ++d) p.set(Coord::jet(d), Exact(rng.rational(16, -2, 2)));
  return p;
}

// Exact zero test for point expressions (no derivative coordinates).
bool vanishes(const Expr& e, const JetSpace& space, std::uint64_t seed, int points = 12) {
  Rng rng(seed);
  for (int k = 0; k < points; ++k) {
    try {
      if (!sym::evaluate(e, order0_point(space, rng), {}).is_zero()) return false;
    } catch (const DivisionByZero&) {
      --k;
    }
  }
  return true;
}

bool depends_only_on_independents(const Expr& e) {
  for (const Coord& c : sym::coordinates(e))
    if (c.kind != Coord::Kind::Independent) return false;
  return true;
}

std::string sub(int a) { return std::to_string(a); }

// Field builder with unset components defaulting to zero.
struct Builder {
  explicit Builder(const JetSpace& s) : v(VectorField::zero(s)) {}
  Builder& xi(int i, const Expr& e) {
    v.xi.at(i) = sym::simplify_basic(v.xi.at(i) + e);
    return *this;
  }
  Builder& eta(int a, const Expr& e) {
    v.eta.at(a) = sym::simplify_basic(v.eta.at(a) + e);
    return *this;
  }
  VectorField done() const { return VectorField(v.space, v.xi, v.eta); }
  VectorField v;
};

void add_translations(std::vector<NamedField>& out, const JetSpace& s) {
  const int n = s.n();
  out.push_back({"P_t", Builder(s).xi(0, 1L).done()});
  for (int a = 1; a <= n; ++a) out.push_back({"P_" + spatial_name(n, a), Builder(s).xi(a, 1L).done()});
}

// Rotations of x only; `current` adds the j^a d_{j^b} part on the continuity space.
void add_rotations(std::vector<NamedField>& out, const JetSpace& s, bool current) {
  const int n = s.n();
  for (int a = 1; a <= n; ++a) {
    for (int b = a + 1; b <= n; ++b) {
      Builder f(s);
      f.xi(b, indep(a)).xi(a, -indep(b));
      if (current) f.eta(b, jet(a)).eta(a, -jet(b));
      out.push_back({"J_" + sub(a) + sub(b), f.done()});
    }
  }
}

}  // namespace

// ---------------------------------------------------------------- continuity equation

JetSpace continuity_space(int n) {
  std::vector<std::string> deps{"rho"};
  for (int k = 1; k <= n; ++k) deps.push_back("j" + std::to_string(k));
  return JetSpace::standard(n, deps, 2);
}

PdeSystem continuity_equation(int n) {
  PdeSystem s;
  s.name = "continuity";
  s.space = continuity_space(n);
  std::vector<Expr> terms{jet(0, {0})};
  std::vector<Expr> rhs;
  for (int k = 1; k <= n; ++k) {
    terms.push_back(jet(k, {k}));
    rhs.push_back(-jet(k, {k}));
  }
  s.equations.push_back(sym::sum(std::move(terms)));
  s.solved_for.emplace_back(Coord::jet(0, {0}), sym::sum(std::move(rhs)));
  s.parameters["n"] = std::to_string(n);
  return s;
}

VectorField continuity_symmetry_field(int n, const std::vector<Expr>& xi, const mpq_class& c, const std::vector<Expr>& b) {
  const JetSpace space = continuity_space(n);
  if (static_cast<int>(xi.size()) != n + 1 || static_cast<int>(b.size()) != n + 1)
    throw Error("continuity_symmetry_field needs n+1 components of xi and b");
  for (const auto& e : xi)
    if (!depends_only_on_independents(e)) throw Error("xi must depend on x only");
  for (const auto& e : b)
    if (!depends_only_on_independents(e)) throw Error("b must depend on x only");

  std::vector<Expr> div_terms, eq_terms;
  for (int i = 0; i <= n; ++i) {
    div_terms.push_back(sym::partial_derivative(xi[i], Coord::independent(i)));
    eq_terms.push_back(sym::partial_derivative(b[i], Coord::independent(i)));
  }
  if (!vanishes(sym::sum(eq_terms), space, 97)) throw Error("b does not solve the continuity equation");
  const Expr trace = sym::sum(div_terms) + Expr(c);

  std::vector<Expr> eta;
  for (int mu = 0; mu <= n; ++mu) {
    std::vector<Expr> terms{b[mu]};
    for (int nu = 0; nu <= n; ++nu) {
      Expr a = sym::partial_derivative(xi[mu], Coord::independent(nu));
      if (mu == nu) a = a - trace;
      terms.push_back(a * jet(nu));
    }
    eta.push_back(sym::simplify_basic(sym::sum(std::move(terms))));
  }
  std::vector<Expr> xs;
  for (const auto& e : xi) xs.push_back(sym::simplify_basic(e));
  return VectorField(space, std::move(xs), std::move(eta));
}

ContinuitySymmetryMatch match_continuity_symmetry(const VectorField& v, std::uint64_t seed) {
  ContinuitySymmetryMatch m;
  const int n = v.space.n();
  if (v.space != continuity_space(n)) {
    m.reason = "field is not on the continuity jet space";
    return m;
  }
  for (const auto& e : v.xi) {
    if (!depends_only_on_independents(e)) {
      m.reason = "xi depends on rho or j";
      return m;
    }
  }
  std::vector<std::pair<Coord, Expr>> at_zero;
  for (int nu = 0; nu <= n; ++nu) at_zero.emplace_back(Coord::jet(nu), Expr(0L));
  std::vector<std::vector<Expr>> a(n + 1);
  for (int mu = 0; mu <= n; ++mu) {
    for (int nu = 0; nu <= n; ++nu) {
      Expr amn = sym::simplify_basic(sym::partial_derivative(v.eta[mu], Coord::jet(nu)));
      if (!depends_only_on_independents(amn)) {
        m.reason = "eta is not affine in (rho, j)";
        return m;
      }
      a[mu].push_back(amn);
    }
    m.b.push_back(sym::simplify_basic(sym::substitute(v.eta[mu], at_zero)));
  }
  std::vector<Expr> div_terms;
  for (int i = 0; i <= n; ++i) div_terms.push_back(sym::partial_derivative(v.xi[i], Coord::independent(i)));
  const Expr c_expr = sym::partial_derivative(v.xi[0], Coord::independent(0)) - sym::sum(div_terms) - a[0][0];

  Rng rng(seed);
  std::optional<Exact> c;
  for (int k = 0; k < 8; ++k) {
    const Exact val = sym::evaluate(c_expr, order0_point(v.space, rng), {});
    if (c && !(val == *c)) {
      m.reason = "C is not constant";
      return m;
    }
    c = val;
  }
  if (!c->is_real()) {
    m.reason = "C is not real";
    return m;
  }
  m.c = c->re;
  m.xi = v.xi;
  VectorField rebuilt;
  try {
    rebuilt = continuity_symmetry_field(n, m.xi, m.c, m.b);
  } catch (const Error& e) {
    m.reason = e.what();
    return m;
  }
  const auto lhs = v.components();
  const auto rhs = rebuilt.components();
  for (std::size_t k = 0; k < lhs.size(); ++k) {
    if (!vanishes(lhs[k] - rhs[k], v.space, seed + 1 + k)) {
      m.reason = "coefficient mismatch in component " + std::to_string(k);
      return m;
    }
  }
  m.ok = true;
  return m;
}

GeneratorFamily galilei_algebra(int n) {
  GeneratorFamily f;
  f.name = "galilei";
  f.space = continuity_space(n);
  f.parameters["n"] = std::to_string(n);
  const JetSpace& s = f.space;
  const Expr t = indep(0);
  const Expr rho = jet(0);
  add_translations(f.members, s);
  add_rotations(f.members, s, true);
  for (int a = 1; a <= n; ++a) f.members.push_back({"G_" + sub(a), Builder(s).xi(a, t).eta(a, rho).done()});
  Builder d1(s), a_op(s);
  d1.xi(0, 2L * t).eta(0, Expr(-n) * rho);
  a_op.xi(0, t * t).eta(0, Expr(-n) * t * rho);
  for (int a = 1; a <= n; ++a) {
    d1.xi(a, indep(a)).eta(a, Expr(-(n + 1)) * jet(a));
    a_op.xi(a, t * indep(a)).eta(a, indep(a) * rho - Expr(n + 1) * t * jet(a));
  }
  f.members.push_back({"D1", d1.done()});
  f.members.push_back({"A", a_op.done()});
  return f;
}

GeneratorFamily conformal_algebra(int n) {
  GeneratorFamily f;
  f.name = "conformal";
  f.space = continuity_space(n);
  f.parameters["n"] = std::to_string(n);
  const JetSpace& s = f.space;
  const Expr t = indep(0);
  const Expr rho = jet(0);
  add_translations(f.members, s);
  add_rotations(f.members, s, true);
  for (int a = 1; a <= n; ++a)
    f.members.push_back({"J_0" + sub(a), Builder(s).xi(0, indep(a)).xi(a, t).eta(0, jet(a)).eta(a, rho).done()});
  Builder d2(s);
  for (int mu = 0; mu <= n; ++mu) d2.xi(mu, indep(mu)).eta(mu, Expr(-n) * jet(mu));
  f.members.push_back({"D2", d2.done()});

  auto g = [](int mu) { return mu == 0 ? 1L : -1L; };
  std::vector<Expr> xx_terms, xj_terms;  // x_nu x^nu and x^nu j^nu
  for (int nu = 0; nu <= n; ++nu) {
    xx_terms.push_back(Expr(g(nu)) * indep(nu) * indep(nu));
    xj_terms.push_back(Expr(g(nu)) * indep(nu) * jet(nu));
  }
  const Expr xx = sym::sum(xx_terms);
  const Expr xj = sym::sum(xj_terms);
  for (int mu = 0; mu <= n; ++mu) {
    Builder k(s);
    for (int i = 0; i <= n; ++i) k.xi(i, 2L * indep(mu) * indep(i));
    k.xi(mu, -(Expr(g(mu)) * xx));
    for (int kappa = 0; kappa <= n; ++kappa) {
      k.eta(kappa, Expr(-2 * n) * indep(mu) * jet(kappa) + 2L * indep(kappa) * jet(mu));
      if (kappa == mu) k.eta(kappa, Expr(-2 * g(mu)) * xj);
    }
    f.members.push_back({"K_" + sub(mu), k.done()});
  }
  return f;
}

Expr random_x_polynomial(const JetSpace& space, int degree, Rng& rng) {
  // All monomials in the independents of total degree <= degree.
  std::vector<std::vector<int>> monos{{}};
  for (int d = 1; d <= degree; ++d) {
    std::vector<std::vector<int>> next;
    for (const auto& m : monos) {
      if (static_cast<int>(m.size()) != d - 1) continue;
      const int start = m.empty() ? 0 : m.back();
      for (int i = start; i < space.num_independents(); ++i) {
        auto mm = m;
        mm.push_back(i);
        next.push_back(std::move(mm));
      }
    }
    monos.insert(monos.end(), next.begin(), next.end());
  }
  std::vector<Expr> terms;
  for (const auto& m : monos) {
    std::vector<Expr> fs{Expr(rng.rational(5, -2, 2))};
    for (int i : m) fs.push_back(indep(i));
    terms.push_back(sym::product(std::move(fs)));
  }
  return sym::simplify_basic(sym::sum(std::move(terms)));
}

// ---------------------------------------------------------------- density and current

JetSpace wave_space(int n) { return JetSpace::standard(n, {"u", "uc"}, 2); }

namespace {

Expr uu() { return jet(0) * jet(1); }

}  // namespace

DensityCurrent density_current_general(int n, const Fn& f, const Fn& g, const Fn& phi) {
  DensityCurrent dc;
  dc.space = wave_space(n);
  const Expr s = uu();
  dc.rho = f(s);
  const Expr half_i = Expr(Exact(mpq_class(0), mpq_class(-1, 2)));
  const Expr phis = phi(s);
  for (int k = 1; k <= n; ++k) {
    Expr jk = half_i * g(s) * (jet(0, {k}) * jet(1) - jet(0) * jet(1, {k})) +
              sym::total_derivative(phis, k, dc.space);
    dc.j.push_back(sym::simplify_basic(jk));
  }
  return dc;
}

DensityCurrent density_current_galilei(int n, const Fn& phi) {
  return density_current_general(n, Fn::fixed("s", [](const std::vector<Expr>& a) { return a.at(0); }),
                                 Fn::constant(1), phi);
}

DensityCurrent density_current_classical(int n) { return density_current_galilei(n, Fn::zero()); }

PdeSystem continuity_of(const DensityCurrent& dc, const std::string& name) {
  PdeSystem s;
  s.name = name;
  s.space = dc.space;
  std::vector<Expr> terms{sym::total_derivative(dc.rho, 0, dc.space)};
  for (std::size_t k = 0; k < dc.j.size(); ++k)
    terms.push_back(sym::total_derivative(dc.j[k], static_cast<int>(k) + 1, dc.space));
  const Expr eq = sym::simplify_basic(sym::sum(std::move(terms)));
  const Coord ut = Coord::jet(0, {0});
  s.equations.push_back(eq);
  s.solved_for.emplace_back(ut, solve_linear(eq, ut));
  s.hints.conjugates.emplace_back(0, 1);
  s.hints.guards.emplace_back(uu(), 0.1);
  s.hints.guards.emplace_back(sym::simplify_basic(sym::partial_derivative(eq, ut)), 0.01);
  s.parameters["n"] = std::to_string(dc.space.n());
  return s;
}

Expr fokker_planck_residual_expr(const mpq_class& lambda, int n) {
  const DensityCurrent dc = density_current_classical(n);
  std::vector<Expr> terms{sym::total_derivative(dc.rho, 0, dc.space)};
  for (int k = 1; k <= n; ++k) terms.push_back(sym::total_derivative(dc.j[k - 1], k, dc.space));
  terms.push_back(Expr(lambda) * laplacian(dc.rho, dc.space));
  return sym::simplify_basic(sym::sum(std::move(terms)));
}

PdeSystem fokker_planck_system(const mpq_class& lambda, int n) {
  const DensityCurrent dc = density_current_classical(n);
  PdeSystem s = continuity_of(dc, "fokker-planck");
  const Expr eq = fokker_planck_residual_expr(lambda, n);
  const Coord ut = Coord::jet(0, {0});
  s.equations = {eq};
  s.solved_for = {{ut, solve_linear(eq, ut)}};
  s.parameters["lambda"] = rational_str(lambda);
  return s;
}

GeneratorFamily wave_galilei(int n) {
  GeneratorFamily f;
  f.name = "wave-galilei";
  f.space = wave_space(n);
  f.parameters["n"] = std::to_string(n);
  const JetSpace& s = f.space;
  const Expr i = sym::imaginary_unit();
  add_translations(f.members, s);
  add_rotations(f.members, s, false);
  for (int a = 1; a <= n; ++a)
    f.members.push_back(
        {"G_" + sub(a), Builder(s).xi(a, indep(0)).eta(0, i * indep(a) * jet(0)).eta(1, -(i * indep(a) * jet(1))).done()});
  f.members.push_back({"Q", Builder(s).eta(0, i * jet(0)).eta(1, -(i * jet(1))).done()});
  return f;
}

// ---------------------------------------------------------------- phase and amplitude

JetSpace phase_space(int n) { return JetSpace::standard(n, {"R", "Theta"}, 2); }

namespace {

struct FreeParts {
  Expr e1;  // R_t + R_k Theta_k + R Lap(Theta) / 2
  Expr e2;  // Theta_t + Theta_k^2 / 2 - Lap(R) / (2R)
  Expr lap_r;
  Expr grad_r2;
};

FreeParts free_parts(const JetSpace& s) {
  const int n = s.n();
  const Expr r = jet(0);
  std::vector<Expr> t1{jet(0, {0})}, t2{jet(1, {0})};
  for (int k = 1; k <= n; ++k) {
    t1.push_back(jet(0, {k}) * jet(1, {k}));
    t2.push_back(Expr(mpq_class(1, 2)) * power(jet(1, {k}), 2));
  }
  FreeParts p;
  p.lap_r = laplacian(r, s);
  p.grad_r2 = grad_squared(r, s);
  t1.push_back(Expr(mpq_class(1, 2)) * r * laplacian(jet(1), s));
  t2.push_back(-(Expr(mpq_class(1, 2)) * p.lap_r / r));
  p.e1 = sym::sum(std::move(t1));
  p.e2 = sym::sum(std::move(t2));
  return p;
}

PdeSystem phase_system(std::string name, const JetSpace& s, const Expr& e1, const Expr& e2) {
  PdeSystem sys;
  sys.name = std::move(name);
  sys.space = s;
  sys.equations = {sym::simplify_basic(e1), sym::simplify_basic(e2)};
  sys.solved_for.emplace_back(Coord::jet(0, {0}), solve_linear(sys.equations[0], Coord::jet(0, {0})));
  sys.solved_for.emplace_back(Coord::jet(1, {0}), solve_linear(sys.equations[1], Coord::jet(1, {0})));
  sys.hints.positive = {0};
  sys.hints.guards.emplace_back(jet(0), 0.1);
  sys.parameters["n"] = std::to_string(s.n());
  return sys;
}

}  // namespace

PdeSystem phase_amplitude_system(PhiMode phi, FMode f, int n, const mpq_class& lambda) {
  const JetSpace s = phase_space(n);
  const FreeParts p = free_parts(s);
  const Expr r = jet(0);
  const Expr r2 = r * r;
  Expr phi_e;
  switch (phi) {
    case PhiMode::Zero:
      break;
    case PhiMode::Opaque:
      phi_e = sym::func("phi", {r2});
      break;
    case PhiMode::Lambda:
      phi_e = Expr(lambda) * r2;
      break;
  }
  Expr e1 = p.e1;
  if (!phi_e.is_zero()) e1 = e1 + laplacian(phi_e, s) / (2L * r);
  Expr e2 = p.e2;
  bool needs_grad_guard = false;
  switch (f) {
    case FMode::Zero:
      break;
    case FMode::SigmaN: {
      const Expr sigma = r * p.lap_r / p.grad_r2;
      e2 = e2 + p.lap_r / r * sym::func("N", {sigma});
      needs_grad_guard = true;
      break;
    }
    case FMode::Opaque:
      e2 = e2 + sym::func("F", {r2, grad_squared(r2, s), laplacian(r2, s)});
      break;
  }
  PdeSystem sys = phase_system("phase-amplitude", s, e1, e2);
  if (needs_grad_guard) sys.hints.guards.emplace_back(p.grad_r2, 0.01);
  if (phi == PhiMode::Lambda) sys.parameters["lambda"] = rational_str(lambda);
  return sys;
}

PdeSystem ag2_invariant_system(const Fn& m, const Fn& nn, int n) {
  const JetSpace s = phase_space(n);
  const FreeParts p = free_parts(s);
  const Expr r = jet(0);
  mpq_class q(4, n);
  q.canonicalize();
  const Expr a = p.grad_r2 / power(r, mpq_class(2 + q));
  const Expr b = p.lap_r / power(r, mpq_class(1 + q));
  const Expr e1 = p.e1 - power(r, mpq_class(1 + q)) * m(a, b);
  const Expr e2 = p.e2 + power(r, q) * nn(a, b);
  PdeSystem sys = phase_system("ag2", s, e1, e2);
  sys.hints.root_degree = static_cast<int>(mpz_class(q.get_den()).get_si());
  sys.parameters["M"] = m.label;
  sys.parameters["N"] = nn.label;
  return sys;
}

PdeSystem schrodinger_full_algebra_system(const Fn& m, const Fn& nn, int n) {
  const JetSpace s = phase_space(n);
  const FreeParts p = free_parts(s);
  const Expr r = jet(0);
  const Expr sigma = r * p.lap_r / p.grad_r2;
  const Expr e1 = p.e1 - p.lap_r * m(sigma);
  const Expr e2 = p.e2 + p.lap_r / r * nn(sigma);
  PdeSystem sys = phase_system("phase-mn-sigma", s, e1, e2);
  sys.hints.guards.emplace_back(p.grad_r2, 0.01);
  sys.hints.guards.emplace_back(p.lap_r, 0.01);
  sys.parameters["M"] = m.label;
  sys.parameters["N"] = nn.label;
  return sys;
}

Fn case2_m(const mpq_class& lambda) {
  return Fn::fixed("-" + rational_str(lambda) + "*(1+1/s)", [lambda](const std::vector<Expr>& a) {
    return Expr(-lambda) - Expr(lambda) * power(a.at(0), -1);
  });
}

GeneratorFamily amplitude_generators(int n) {
  GeneratorFamily f;
  f.name = "amplitude";
  f.space = phase_space(n);
  f.parameters["n"] = std::to_string(n);
  const JetSpace& s = f.space;
  const Expr t = indep(0);
  const Expr r = jet(0);
  mpq_class half_n(n, 2);
  half_n.canonicalize();
  add_translations(f.members, s);
  add_rotations(f.members, s, false);
  for (int a = 1; a <= n; ++a) f.members.push_back({"G_" + sub(a), Builder(s).xi(a, t).eta(1, indep(a)).done()});
  f.members.push_back({"Q", Builder(s).eta(1, 1L).done()});
  Builder d(s), dt(s), a_op(s);
  d.xi(0, 2L * t);
  dt.xi(0, 2L * t).eta(0, Expr(-half_n) * r);
  a_op.xi(0, t * t).eta(0, Expr(-half_n) * t * r);
  for (int a = 1; a <= n; ++a) {
    d.xi(a, indep(a));
    dt.xi(a, indep(a));
    a_op.xi(a, t * indep(a)).eta(1, Expr(mpq_class(1, 2)) * indep(a) * indep(a));
  }
  f.members.push_back({"D", d.done()});
  f.members.push_back({"I", Builder(s).eta(0, r).done()});
  f.members.push_back({"A", a_op.done()});
  f.members.push_back({"Dt", dt.done()});
  return f;
}

namespace {

GeneratorFamily pick(const GeneratorFamily& all, std::string name, const std::vector<std::string>& keep_prefixes,
                     const std::vector<std::string>& keep_exact) {
  GeneratorFamily f;
  f.name = std::move(name);
  f.space = all.space;
  f.parameters = all.parameters;
  for (const auto& m : all.members) {
    bool keep = std::find(keep_exact.begin(), keep_exact.end(), m.name) != keep_exact.end();
    for (const auto& pre : keep_prefixes) keep = keep || m.name.rfind(pre, 0) == 0;
    if (keep) f.members.push_back(m);
  }
  return f;
}

}  // namespace

GeneratorFamily phase_free_algebra(int n) {
  return pick(amplitude_generators(n), "phase-free", {"P_", "J_", "G_"}, {"Q", "D"});
}

GeneratorFamily schrodinger_full_algebra(int n) {
  return pick(amplitude_generators(n), "schrodinger-full", {"P_", "J_", "G_"}, {"Q", "D", "I", "A"});
}

GeneratorFamily ag2_algebra(int n) { return pick(amplitude_generators(n), "ag2", {"P_", "J_", "G_"}, {"Q", "Dt", "A"}); }

VectorField printed_galilei_generator(int n, int a) {
  const JetSpace s = phase_space(n);
  return Builder(s).xi(a, indep(0)).eta(1, sym::imaginary_unit() * indep(a)).done();
}

// ---------------------------------------------------------------- registry

std::vector<std::string> system_keys() {
  return {"continuity",   "fokker-planck", "free-phase",     "free-phase-lambda", "phase-lambda-n-sigma",
          "ag2",          "phase-mn-sigma",          "density-galilei", "density-g-uu",     "density-f-square"};
}

std::vector<std::string> algebra_keys() {
  return {"galilei", "conformal", "phase-free", "schrodinger-full", "ag2", "wave-galilei",
          "bad-gfield", "time-rho", "x-rho", "printed-g"};
}

std::string resolve_system_key(const std::string& key) {
  static const std::map<std::string, std::string> aliases{{"eq14", "phase-mn-sigma"}};
  const auto it = aliases.find(key);
  return it == aliases.end() ? key : it->second;
}

bool is_system_key(const std::string& key) {
  const auto keys = system_keys();
  return std::find(keys.begin(), keys.end(), resolve_system_key(key)) != keys.end();
}

PdeSystem system_by_key(const std::string& alias, int n, const mpq_class& lambda) {
  const std::string key = resolve_system_key(alias);
  PdeSystem s;
  const Fn s_identity = Fn::fixed("s", [](const std::vector<Expr>& a) { return a.at(0); });
  if (key == "continuity") {
    s = continuity_equation(n);
  } else if (key == "fokker-planck") {
    s = fokker_planck_system(lambda, n);
  } else if (key == "free-phase") {
    s = phase_amplitude_system(PhiMode::Opaque, FMode::Zero, n);
  } else if (key == "free-phase-lambda") {
    s = phase_amplitude_system(PhiMode::Lambda, FMode::Zero, n, lambda);
  } else if (key == "phase-lambda-n-sigma") {
    s = phase_amplitude_system(PhiMode::Lambda, FMode::SigmaN, n, lambda);
  } else if (key == "ag2") {
    s = ag2_invariant_system(Fn::opaque("M"), Fn::opaque("N"), n);
  } else if (key == "phase-mn-sigma") {
    s = schrodinger_full_algebra_system(Fn::opaque("M"), Fn::opaque("N"), n);
  } else if (key == "density-galilei") {
    s = continuity_of(density_current_galilei(n, Fn::opaque("phi")), key);
  } else if (key == "density-g-uu") {
    s = continuity_of(density_current_general(n, s_identity, s_identity, Fn::opaque("phi")), key);
  } else if (key == "density-f-square") {
    s = continuity_of(density_current_general(n, Fn::fixed("s^2", [](const std::vector<Expr>& a) {
                                                return power(a.at(0), 2);
                                              }),
                                              Fn::constant(1), Fn::opaque("phi")),
                      key);
  } else {
    throw Error("unknown system key '" + key + "'");
  }
  s.name = key;
  return s;
}

GeneratorFamily algebra_by_key(const std::string& key, int n) {
  if (key == "galilei") return galilei_algebra(n);
  if (key == "conformal") return conformal_algebra(n);
  if (key == "phase-free") return phase_free_algebra(n);
  if (key == "schrodinger-full") return schrodinger_full_algebra(n);
  if (key == "ag2") return ag2_algebra(n);
  if (key == "wave-galilei") return wave_galilei(n);
  GeneratorFamily f;
  f.name = key;
  f.parameters["n"] = std::to_string(n);
  if (key == "bad-gfield" || key == "time-rho" || key == "x-rho") {
    f.space = continuity_space(n);
    Builder b(f.space);
    if (key == "bad-gfield") b.xi(1, indep(0));
    if (key == "time-rho") b.eta(0, indep(0));
    if (key == "x-rho") b.eta(0, indep(1));
    f.members.push_back({key, b.done()});
    return f;
  }
  if (key == "printed-g") {
    f.space = phase_space(n);
    for (int a = 1; a <= n; ++a) f.members.push_back({"G_" + sub(a), printed_galilei_generator(n, a)});
    return f;
  }
  throw Error("unknown algebra key '" + key + "'");
}

GeneratorFamily default_algebra_for(const std::string& alias, int n) {
  const std::string system_key = resolve_system_key(alias);
  if (system_key == "continuity") return galilei_algebra(n);
  if (system_key == "fokker-planck" || system_key.rfind("density-", 0) == 0) return wave_galilei(n);
  if (system_key == "free-phase") return phase_free_algebra(n);
  if (system_key == "ag2") return ag2_algebra(n);
  if (system_key == "free-phase-lambda" || system_key == "phase-lambda-n-sigma" || system_key == "phase-mn-sigma")
    return schrodinger_full_algebra(n);
  throw Error("unknown system key '" + system_key + "'");
}

}  // namespace contsym::catalog
