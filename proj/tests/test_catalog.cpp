#include <doctest.h>

#include <algorithm>

#include "contsym/catalog.hpp"
#include "contsym/parse.hpp"
#include "support/random_expr.hpp"

using namespace contsym;
using namespace contsym::sym;
using namespace contsym::lie;
namespace cat = contsym::catalog;

namespace {

bool fields_equal(const VectorField& a, const VectorField& b) { return (a - b).is_zero(); }

// Exact agreement at points drawn for `sys` (guards respected).
bool agree_on(const PdeSystem& sys, const Expr& a, const Expr& b, std::uint64_t seed, const FunctionBinding& fixed = {}) {
  Rng rng(seed);
  std::vector<std::pair<std::string, int>> names;
  for (const Expr& e : {a, b})
    for (const auto& f : functions(e)) names.push_back(f);
  for (int k = 0; k < 10; ++k) {
    const FunctionBinding fb = complete_binding(fixed, names, 3, rng);
    const ExactPoint p = sample_exact_point(sys, std::max(max_order(a), max_order(b)), rng, fb);
    if (!(evaluate(a, p, fb) == evaluate(b, p, fb))) return false;
  }
  return true;
}

ResidualOptions exact_opts(std::uint64_t seed, int trials = 10) {
  ResidualOptions o;
  o.trials = trials;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("continuity_equation") {
  const PdeSystem c1 = cat::continuity_equation(1);
  CHECK(to_string(c1.equations[0], c1.space) == "rho_t + j1_x");
  const PdeSystem c3 = cat::continuity_equation(3);
  CHECK(c3.space.num_dependents() == 4);
  CHECK(c3.equations.size() == 1);
  CHECK(simplify_basic(substitute(c3.equations[0], c3.solved_for)).is_zero());
}

TEST_CASE("continuity_symmetry_field: translations, A, and a random instance") {
  const VectorField pt = cat::continuity_symmetry_field(1, {Expr(1L), Expr(0L)}, 0, {Expr(0L), Expr(0L)});
  CHECK(fields_equal(pt, cat::galilei_algebra(1).get("P_t")));

  for (int n : {1, 2, 3}) {
    const cat::ContinuitySymmetryMatch m = cat::match_continuity_symmetry(cat::galilei_algebra(n).get("A"));
    REQUIRE(m.ok);
    CHECK(m.c == 0);
    std::vector<Expr> xi{indep(0) * indep(0)};
    for (int a = 1; a <= n; ++a) xi.push_back(indep(0) * indep(a));
    const VectorField a_field = cat::continuity_symmetry_field(n, xi, 0, std::vector<Expr>(n + 1, Expr(0L)));
    CHECK(fields_equal(a_field, cat::galilei_algebra(n).get("A")));
  }

  Rng rng(41);
  const JetSpace s = cat::continuity_space(2);
  std::vector<Expr> xi;
  for (int i = 0; i < 3; ++i) xi.push_back(cat::random_x_polynomial(s, 2, rng));
  const VectorField x = cat::continuity_symmetry_field(2, xi, mpq_class(3, 7), {Expr(1L), Expr(0L), Expr(0L)});
  CHECK(on_shell_residual(cat::continuity_equation(2), x, "X", exact_opts(3, 25)).zero_at_all_points);
  const cat::ContinuitySymmetryMatch back = cat::match_continuity_symmetry(x);
  REQUIRE(back.ok);
  CHECK(back.c == mpq_class(3, 7));

  // b must solve the continuity equation.
  CHECK_THROWS_AS(cat::continuity_symmetry_field(1, {Expr(0L), Expr(0L)}, 0, {indep(0), Expr(0L)}), Error);
}

TEST_CASE("galilei and conformal families") {
  const auto g2 = cat::galilei_algebra(2);
  const VectorField& g1 = g2.get("G_1");
  CHECK(structurally_equal(g1.xi[1], indep(0)));
  CHECK(g1.xi[0].is_zero());
  CHECK(g1.xi[2].is_zero());
  CHECK(structurally_equal(g1.eta[1], jet(0)));

  const VectorField& d1 = g2.get("D1");
  CHECK(simplify_basic(d1.eta[0] + 2L * jet(0)).is_zero());
  CHECK(simplify_basic(d1.eta[1] + 3L * jet(1)).is_zero());
  CHECK(simplify_basic(d1.xi[0] - 2L * indep(0)).is_zero());

  const auto c1 = cat::conformal_algebra(1);
  const VectorField expected =
      VectorField(c1.space, {indep(1), indep(0)}, {jet(1), jet(0)});  // x d_t + t d_x + j d_rho + rho d_j
  CHECK(fields_equal(c1.get("J_01"), expected));
  // K_0: xi^0 = t^2 + x^2 (from 2 t^2 - (t^2 - x^2)), xi^1 = 2 t x.
  const VectorField& k0 = c1.get("K_0");
  CHECK(simplify_basic(k0.xi[0] - indep(0) * indep(0) - indep(1) * indep(1)).is_zero());
  CHECK(simplify_basic(k0.xi[1] - 2L * indep(0) * indep(1)).is_zero());

  for (int n : {1, 2, 3}) {
    for (const auto& fam : {cat::galilei_algebra(n), cat::conformal_algebra(n)}) {
      for (const auto& m : fam.members) {
        INFO(fam.name << " n=" << n << " " << m.name);
        const cat::ContinuitySymmetryMatch match = cat::match_continuity_symmetry(m.field);
        CHECK_MESSAGE(match.ok, match.reason);
      }
      CHECK(closure_table(fam.members, 7).status == ClosureStatus::Closed);
    }
  }
  CHECK_FALSE(cat::match_continuity_symmetry(cat::algebra_by_key("bad-gfield", 1).get("bad-gfield")).ok);
  CHECK(cat::match_continuity_symmetry(cat::algebra_by_key("x-rho", 1).get("x-rho")).ok);
  CHECK_FALSE(cat::match_continuity_symmetry(cat::algebra_by_key("time-rho", 1).get("time-rho")).ok);
}

TEST_CASE("non-symmetries of the continuity equation") {
  const PdeSystem c1 = cat::continuity_equation(1);
  // t d_x alone leaves the residual -rho_x, which vanishes only where rho_x does.
  const auto bad = on_shell_residual(c1, cat::algebra_by_key("bad-gfield", 1).get("bad-gfield"), "bad-gfield",
                                     exact_opts(8, 25));
  CHECK(bad.nonzero_points >= 20);
  CHECK(bad.max_abs_residual >= 0.1);
  // t d_rho leaves the constant residual 1.
  const auto tr = on_shell_residual(c1, cat::algebra_by_key("time-rho", 1).get("time-rho"), "time-rho",
                                    exact_opts(8, 25));
  CHECK(tr.nonzero_points == 25);
  CHECK(*std::min_element(tr.point_residuals.begin(), tr.point_residuals.end()) == 1.0);
}

TEST_CASE("density and current") {
  const cat::DensityCurrent cl = cat::density_current_classical(1);
  // plane wave u = exp(i k x) at |u| = 1: u_x = i k u, uc_x = -i k uc
  const mpq_class k(5, 3);
  ExactPoint p;
  p.set(Coord::jet(0), Exact(1));
  p.set(Coord::jet(1), Exact(1));
  p.set(Coord::jet(0, {1}), Exact(mpq_class(0), k));
  p.set(Coord::jet(1, {1}), Exact(mpq_class(0), -k));
  CHECK(evaluate(cl.rho, p, {}) == Exact(1));
  CHECK(evaluate(cl.j[0], p, {}) == Exact(k));

  const mpq_class lambda(2, 9);
  const cat::DensityCurrent gal = cat::density_current_galilei(1, cat::Fn::linear(lambda));
  const JetSpace& s = gal.space;
  const Expr expected = parse_expr("-1/2*I*(u_x*uc - u*uc_x) + 2/9*(u_x*uc + u*uc_x)", s);
  Rng rng(42);
  for (int t = 0; t < 10; ++t) {
    const ExactPoint q = testing::random_exact_point(s, 1, rng);
    CHECK(evaluate(gal.j[0], q, {}) == evaluate(expected, q, {}));
  }
}

TEST_CASE("Fokker-Planck construction") {
  const Expr fp0 = cat::fokker_planck_residual_expr(0, 1);
  const PdeSystem classical = cat::continuity_of(cat::density_current_classical(1), "classical");
  CHECK(agree_on(classical, fp0, classical.equations[0], 1));

  const Expr fp1 = cat::fokker_planck_residual_expr(1, 1);
  const Expr lap = cat::laplacian(jet(0) * jet(1), classical.space);
  CHECK(agree_on(classical, fp1 - fp0, lap, 2));

  for (int n : {1, 2}) {
    const mpq_class lambda(-3, 5);
    const PdeSystem via_phi = cat::continuity_of(cat::density_current_galilei(n, cat::Fn::linear(lambda)), "phi");
    const PdeSystem fp = cat::fokker_planck_system(lambda, n);
    CHECK(agree_on(fp, fp.equations[0], via_phi.equations[0], 3));
  }
}

TEST_CASE("phase-amplitude systems") {
  const PdeSystem free = cat::phase_amplitude_system(cat::PhiMode::Zero, cat::FMode::Zero, 1);
  const Expr e1 = parse_expr("R_t + R_x*Theta_x + 1/2*R*Theta_xx", free.space);
  const Expr e2 = parse_expr("Theta_t + 1/2*Theta_x^2 - R_xx/(2*R)", free.space);
  CHECK(agree_on(free, free.equations[0], e1, 4));
  CHECK(agree_on(free, free.equations[1], e2, 5));

  const PdeSystem phi = cat::phase_amplitude_system(cat::PhiMode::Opaque, cat::FMode::Zero, 1);
  const Expr dphi = cat::laplacian(func("phi", {jet(0) * jet(0)}), free.space) / (2L * jet(0));
  CHECK(agree_on(phi, phi.equations[0] - free.equations[0], dphi, 6));

  FunctionBinding zero_n;
  zero_n.bind("N", Polynomial::univariate({0}));
  const PdeSystem cor = cat::phase_amplitude_system(cat::PhiMode::Zero, cat::FMode::SigmaN, 1);
  CHECK(agree_on(cor, cor.equations[1], free.equations[1], 7, zero_n));
}

TEST_CASE("AG2-invariant and full-algebra systems") {
  const PdeSystem free = cat::phase_amplitude_system(cat::PhiMode::Zero, cat::FMode::Zero, 2);
  const PdeSystem ag0 = cat::ag2_invariant_system(cat::Fn::zero(), cat::Fn::zero(), 2);
  const PdeSystem e0 = cat::schrodinger_full_algebra_system(cat::Fn::zero(), cat::Fn::zero(), 2);
  for (int a = 0; a < 2; ++a) {
    CHECK(agree_on(free, ag0.equations[a], free.equations[a], 8));
    CHECK(agree_on(e0, e0.equations[a], free.equations[a], 9));
  }

  // n = 4: integer exponents only.
  const PdeSystem ag4 = cat::ag2_invariant_system(cat::Fn::opaque("M"), cat::Fn::opaque("N"), 4);
  CHECK(ag4.hints.root_degree == 1);
  CHECK(cat::ag2_invariant_system(cat::Fn::opaque("M"), cat::Fn::opaque("N"), 3).hints.root_degree == 3);

  // n = 4: M(a; b) = b Mh(b/a) turns the AG2-invariant form into the full-algebra form.
  auto wrap = [](const char* name) {
    return cat::Fn::fixed(name, [name](const std::vector<Expr>& x) {
      return x.at(1) * func(name, {x.at(1) / x.at(0)});
    });
  };
  const PdeSystem ag_w = cat::ag2_invariant_system(wrap("M"), wrap("N"), 4);
  const PdeSystem e14 = cat::schrodinger_full_algebra_system(cat::Fn::opaque("M"), cat::Fn::opaque("N"), 4);
  FunctionBinding fb;
  Rng rng(43);
  fb.bind("M", Polynomial::random(1, 3, rng));
  fb.bind("N", Polynomial::random(1, 3, rng));
  for (int a = 0; a < 2; ++a) CHECK(agree_on(e14, ag_w.equations[a], e14.equations[a], 10, fb));

  // N = 1/2: the phase equation is Hamilton-Jacobi.
  const PdeSystem hj = cat::schrodinger_full_algebra_system(cat::Fn::zero(), cat::Fn::constant(mpq_class(1, 2)), 1);
  CHECK(agree_on(hj, hj.equations[1], parse_expr("Theta_t + 1/2*Theta_x^2", hj.space), 11));

  // Case-2 M: Lap(R) M = -lambda (Lap(R) + (grad R)^2 / R).
  const mpq_class lambda(1, 20);
  const PdeSystem c2 = cat::schrodinger_full_algebra_system(cat::case2_m(lambda), cat::Fn::zero(), 1);
  const PdeSystem free1 = cat::phase_amplitude_system(cat::PhiMode::Zero, cat::FMode::Zero, 1);
  const Expr expected = parse_expr("1/20*(R_xx + R_x^2/R)", c2.space);
  CHECK(agree_on(c2, c2.equations[0] - free1.equations[0], expected, 12));
}

TEST_CASE("amplitude generators") {
  const auto a2 = cat::amplitude_generators(2);
  const JetSpace& s = a2.space;
  const VectorField expected(s, {indep(0) * indep(0), indep(0) * indep(1), indep(0) * indep(2)},
                             {-(indep(0) * jet(0)), Expr(mpq_class(1, 2)) * (indep(1) * indep(1) + indep(2) * indep(2))});
  CHECK(fields_equal(a2.get("A"), expected));
  CHECK(fields_equal(a2.get("Q"), VectorField(s, {0L, 0L, 0L}, {0L, 1L})));
  CHECK(fields_equal(a2.get("Dt"), a2.get("D") - Expr(1L) * a2.get("I")));
  for (int n : {1, 2, 3}) {
    const auto fam = cat::amplitude_generators(n);
    CHECK(fields_equal(lie_bracket(fam.get("P_t"), fam.get("A")), fam.get("Dt")));
    for (const auto& f : {cat::phase_free_algebra(n), cat::schrodinger_full_algebra(n), cat::ag2_algebra(n)})
      CHECK(closure_table(f.members, 5).status == ClosureStatus::Closed);
  }
  CHECK(cat::schrodinger_full_algebra(2).members.size() == 10);  // P_t, P_x1, P_x2, J_12, G_1, G_2, Q, D, I, A
}

TEST_CASE("printed imaginary Galilei coefficient is not a symmetry") {
  for (int n : {1, 2}) {
    const PdeSystem free = cat::system_by_key("free-phase", n);
    const auto real_g = on_shell_residual(free, cat::phase_free_algebra(n).get("G_1"), "G_1", exact_opts(13));
    CHECK(real_g.zero_at_all_points);
    const auto printed = on_shell_residual(free, cat::printed_galilei_generator(n, 1), "G_1(i)", exact_opts(13));
    CHECK(printed.nonzero_points == printed.trials);
  }
}

TEST_CASE("wave-form Galilei generator accepts the Galilei current only") {
  const auto fam = cat::wave_galilei(1);
  CHECK(closure_table(fam.members, 3).status == ClosureStatus::Closed);
  const auto good = on_shell_residual(cat::system_by_key("density-galilei", 1), fam.get("G_1"), "G_1", exact_opts(14));
  CHECK(good.zero_at_all_points);
  for (const char* key : {"density-g-uu", "density-f-square"}) {
    const auto bad = on_shell_residual(cat::system_by_key(key, 1), fam.get("G_1"), "G_1", exact_opts(14));
    INFO(key);
    CHECK(bad.nonzero_points >= 9);
  }
}

TEST_CASE("registry") {
  for (const auto& key : cat::system_keys()) {
    CHECK(cat::system_by_key(key, 1).name == key);
    CHECK_NOTHROW(cat::default_algebra_for(key, 1));
  }
  for (const auto& key : cat::algebra_keys()) CHECK_FALSE(cat::algebra_by_key(key, 2).members.empty());
  CHECK_THROWS_AS(cat::system_by_key("nope", 1), Error);
  CHECK_THROWS_AS(cat::algebra_by_key("nope", 1), Error);
}
