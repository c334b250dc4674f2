#include <doctest.h>

#include <algorithm>

#include <nlohmann/json.hpp>

#include "contsym/catalog.hpp"
#include "contsym/liesym.hpp"
#include "contsym/parse.hpp"
#include "support/random_expr.hpp"

using namespace contsym;
using namespace contsym::sym;
using namespace contsym::lie;
namespace cat = contsym::catalog;

namespace {

bool same(const Expr& a, const Expr& b) { return simplify_basic(a - b).is_zero(); }

// Exact equality of two expressions at random jet points.
bool agree(const Expr& a, const Expr& b, const JetSpace& space, Rng& rng, int points = 25,
           const FunctionBinding* fb = nullptr) {
  const int order = std::max(max_order(a), max_order(b));
  for (int k = 0; k < points; ++k) {
    const ExactPoint p = testing::random_exact_point(space, order, rng);
    const FunctionBinding b2 = fb ? *fb : testing::random_binding(rng);
    if (!(evaluate(a, p, b2) == evaluate(b, p, b2))) return false;
  }
  return true;
}

// Random point field: polynomial coefficients in x and the dependents.
VectorField random_point_field(const JetSpace& space, Rng& rng) {
  std::vector<Expr> xi, eta;
  for (int i = 0; i < space.num_independents(); ++i) xi.push_back(testing::random_expr(space, rng, 2, false, false, 0));
  for (int a = 0; a < space.num_dependents(); ++a) eta.push_back(testing::random_expr(space, rng, 2, false, false, 0));
  return VectorField(space, xi, eta);
}

// Closed-form prolongation: eta^J = D_J(eta - xi^m u_m) + xi^m u_{J,m}.
Expr closed_form_coefficient(const VectorField& v, int dep, const MultiIndex& j) {
  const JetSpace& s = v.space;
  std::vector<Expr> q{v.eta[dep]};
  for (int m = 0; m < s.num_independents(); ++m) q.push_back(-(v.xi[m] * jet(dep, {m})));
  std::vector<Expr> out{total_derivative(sum(q), j, s)};
  for (int m = 0; m < s.num_independents(); ++m) out.push_back(v.xi[m] * jet(dep, add_index(j, m)));
  return sum(out);
}

const JetSpace kPhase1 = cat::phase_space(1);

}  // namespace

TEST_CASE("prolong: phase-form Galilei generator") {
  const VectorField g = cat::amplitude_generators(1).get("G_1");
  const ProlongedVectorField pv = prolong(g, 2);
  CHECK(same(pv.coefficient(Coord::jet(1, {1})), Expr(1L)));
  CHECK(same(pv.coefficient(Coord::jet(1, {0})), -jet(1, {1})));
  CHECK(same(pv.coefficient(Coord::jet(0, {0})), -jet(0, {1})));
  CHECK(same(pv.coefficient(Coord::jet(1, {1, 1})), Expr(0L)));
}

TEST_CASE("prolong: translations and scaling") {
  const auto fam = cat::amplitude_generators(1);
  const ProlongedVectorField pt = prolong(fam.get("P_t"), 3);
  for (const auto& [key, c] : pt.eta_j) CHECK(c.is_zero());
  const ProlongedVectorField pi = prolong(fam.get("I"), 2);
  CHECK(same(pi.coefficient(Coord::jet(0, {1})), jet(0, {1})));
  CHECK(same(pi.coefficient(Coord::jet(0, {1, 1})), jet(0, {1, 1})));
  CHECK(same(pi.coefficient(Coord::jet(1, {1})), Expr(0L)));
  CHECK_THROWS_AS(prolong(fam.get("I"), -1), Error);
}

TEST_CASE("prolong: xi = 0 gives D_J eta") {
  Rng rng(21);
  const JetSpace s = JetSpace::standard(2, {"R", "Theta"});
  for (int trial = 0; trial < 10; ++trial) {
    VectorField v = random_point_field(s, rng);
    for (auto& x : v.xi) x = Expr(0L);
    const ProlongedVectorField pv = prolong(v, 2);
    for (int d = 0; d < 2; ++d)
      for (const auto& j : s.multi_indices(2))
        CHECK(agree(pv.coefficient(Coord::jet(d, j)), total_derivative(v.eta[d], j, s), s, rng, 3));
  }
}

TEST_CASE("oracle: recursive prolongation matches the closed form") {
  Rng rng(22);
  const JetSpace s = JetSpace::standard(2, {"R", "Theta"});
  for (int trial = 0; trial < 6; ++trial) {
    const VectorField v = random_point_field(s, rng);
    const ProlongedVectorField pv = prolong(v, 3);
    for (int d = 0; d < 2; ++d) {
      for (const auto& j : s.multi_indices(3)) {
        INFO("J order " << j.size());
        CHECK(agree(pv.coefficient(Coord::jet(d, j)), closed_form_coefficient(v, d, j), s, rng, 2));
      }
    }
  }
}

TEST_CASE("property: prolongation is path independent up to order 3") {
  Rng rng(23);
  const JetSpace s = JetSpace::standard(2, {"R", "Theta"});
  const VectorField v = random_point_field(s, rng);
  for (const auto& j : s.multi_indices(3)) {
    std::vector<int> path(j.begin(), j.end());
    const Expr first = prolong_along(v, 0, path);
    while (std::next_permutation(path.begin(), path.end()))
      CHECK(agree(first, prolong_along(v, 0, path), s, rng, 25));
  }
}

TEST_CASE("apply: examples and derivation property") {
  const auto cont = cat::continuity_equation(1);
  const auto gal = cat::galilei_algebra(1);
  CHECK(apply(prolong(gal.get("P_t"), 1), cont.equations[0]).is_zero());
  CHECK(apply(prolong(gal.get("A"), 1), Expr(mpq_class(3, 7))).is_zero());

  // G_1 maps rho_t + j1_x to a multiple of itself (here: zero identically).
  const Expr g_eq = apply(prolong(gal.get("G_1"), 1), cont.equations[0]);
  CHECK(same(on_shell_reduce(cont, g_eq), Expr(0L)));

  Rng rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    const VectorField v = random_point_field(kPhase1, rng);
    const ProlongedVectorField pv = prolong(v, 2);
    const Expr a = testing::random_expr(kPhase1, rng, 3, true, true);
    const Expr b = testing::random_expr(kPhase1, rng, 3, true, true);
    CHECK(agree(apply(pv, a * b), a * apply(pv, b) + b * apply(pv, a), kPhase1, rng, 2));
  }
  CHECK_THROWS_AS(apply(prolong(gal.get("P_t"), 0), cont.equations[0]), Error);
}

TEST_CASE("on_shell_reduce examples") {
  const auto cont = cat::continuity_equation(1);
  CHECK(same(on_shell_reduce(cont, jet(0, {0})), -jet(1, {1})));
  const Expr spatial = parse_expr("rho_x*j1_xx + t", cont.space);
  CHECK(structurally_equal(on_shell_reduce(cont, spatial), spatial));

  // R_tx for the free phase system is D_x of the solved R_t.
  const auto free = cat::phase_amplitude_system(cat::PhiMode::Zero, cat::FMode::Zero, 1);
  const Expr rhs = free.solved_for[0].second;
  const Expr reduced = on_shell_reduce(free, jet(0, {0, 1}));
  Rng rng(25);
  CHECK(agree(reduced, total_derivative(rhs, 1, free.space), free.space, rng, 10));
  for (const Coord& c : coordinates(reduced))
    if (c.kind == Coord::Kind::Jet) CHECK(std::count(c.multi.begin(), c.multi.end(), 0) == 0);

  // R_tt reduces through Theta_t as well and stays time-derivative free.
  const Expr rtt = on_shell_reduce(free, jet(0, {0, 0}), 4);
  for (const Coord& c : coordinates(rtt))
    if (c.kind == Coord::Kind::Jet) CHECK(std::count(c.multi.begin(), c.multi.end(), 0) == 0);
  CHECK(max_order(rtt) == 4);
  CHECK_THROWS_AS(on_shell_reduce(free, jet(0, {0, 0})), Unresolvable);
}

TEST_CASE("solved forms substitute back to zero") {
  Rng rng(26);
  for (const auto& key : cat::system_keys()) {
    const PdeSystem s = cat::system_by_key(key, 1);
    for (const Expr& eq : s.equations) {
      const Expr back = substitute(eq, s.solved_for);
      for (int k = 0; k < 5; ++k) {
        FunctionBinding fb = complete_binding({}, s.functions(), 3, rng);
        const ExactPoint p = sample_exact_point(s, 2, rng, fb);
        INFO(key);
        CHECK(evaluate(back, p, fb).is_zero());
      }
    }
    for (const auto& [lead, rhs] : s.solved_for) CHECK(partial_derivative(rhs, lead).is_zero());
  }
}

TEST_CASE("on_shell_residual: Galilei generator on the continuity equation") {
  const auto cont = cat::continuity_equation(2);
  ResidualOptions o;
  o.seed = 5;
  const auto rep = on_shell_residual(cont, cat::galilei_algebra(2).get("G_1"), "G_1", o);
  CHECK(rep.zero_at_all_points);
  CHECK(rep.max_abs_residual == 0.0);
  CHECK(rep.trials == 25);

  // The bogus field t d_rho is not a symmetry: its residual is the constant 1.
  const auto bad = on_shell_residual(cat::continuity_equation(1), cat::algebra_by_key("time-rho", 1).get("time-rho"),
                                     "time-rho", o);
  CHECK(bad.nonzero_points == 25);
  CHECK(*std::min_element(bad.point_residuals.begin(), bad.point_residuals.end()) >= 0.1);

  // x d_rho solves the continuity equation (b = (x, 0)), so it is a symmetry.
  const auto xr = on_shell_residual(cat::continuity_equation(1), cat::algebra_by_key("x-rho", 1).get("x-rho"), "x-rho", o);
  CHECK(xr.zero_at_all_points);

  nlohmann::json j = rep;
  CHECK(j["schema"] == "contsym.invariance/1");
  CHECK(j["mode"] == "rational-exact");
  CHECK(j["equations"].size() == 1);
}

TEST_CASE("on_shell_residual: float mode agrees with exact mode") {
  const auto sys = cat::system_by_key("phase-mn-sigma", 1);
  const auto fam = cat::schrodinger_full_algebra(1);
  ResidualOptions o;
  o.trials = 10;
  o.seed = 9;
  o.mode = Mode::Float;
  const auto good = on_shell_residual(sys, fam.get("A"), "A", o);
  CHECK(good.zero_at_all_points);
  CHECK(good.max_rel_residual < 1e-9);
  const auto bad = on_shell_residual(sys, cat::printed_galilei_generator(1, 1), "G_1(i)", o);
  CHECK(bad.nonzero_points == 10);
  CHECK_THROWS_AS(on_shell_residual(sys, fam.get("A"), "A", ResidualOptions{0, 1, Mode::Exact, 3}), Error);
}

TEST_CASE("lie_bracket examples") {
  for (int n : {1, 2, 3}) {
    const auto fam = cat::amplitude_generators(n);
    const VectorField br = lie_bracket(fam.get("P_t"), fam.get("A"));
    CHECK(lie_bracket(br, br).is_zero());
    CHECK((br - fam.get("Dt")).is_zero());
    for (int a = 1; a <= n; ++a) {
      for (int b = 1; b <= n; ++b) {
        const VectorField pg = lie_bracket(fam.get("P_" + cat::spatial_name(n, a)), fam.get("G_" + std::to_string(b)));
        if (a == b) {
          CHECK((pg - fam.get("Q")).is_zero());
        } else {
          CHECK(pg.is_zero());
        }
      }
    }
  }
  // n = 1 by hand: [P_t, A] = 2t d_t + x d_x - R/2 d_R.
  const VectorField br = lie_bracket(cat::amplitude_generators(1).get("P_t"), cat::amplitude_generators(1).get("A"));
  CHECK(same(br.xi[0], 2L * indep(0)));
  CHECK(same(br.xi[1], indep(1)));
  CHECK(same(br.eta[0], Expr(mpq_class(-1, 2)) * jet(0)));
  CHECK(br.eta[1].is_zero());
  CHECK_THROWS_AS(lie_bracket(br, cat::galilei_algebra(1).get("P_t")), SpaceMismatch);
}

TEST_CASE("property: antisymmetry and Jacobi identity") {
  const auto fam = cat::schrodinger_full_algebra(2);
  const auto& m = fam.members;
  for (std::size_t a = 0; a < m.size(); ++a) {
    for (std::size_t b = 0; b < m.size(); ++b) {
      CHECK((lie_bracket(m[a].field, m[b].field) + lie_bracket(m[b].field, m[a].field)).is_zero());
      for (std::size_t c = b + 1; c < m.size(); ++c) {
        const VectorField& u = m[a].field;
        const VectorField& v = m[b].field;
        const VectorField& w = m[c].field;
        const VectorField jac =
            lie_bracket(u, lie_bracket(v, w)) + lie_bracket(v, lie_bracket(w, u)) + lie_bracket(w, lie_bracket(u, v));
        CHECK(jac.is_zero());
      }
    }
  }
  Rng rng(27);
  for (int trial = 0; trial < 5; ++trial) {
    const VectorField u = random_point_field(kPhase1, rng), v = random_point_field(kPhase1, rng),
                      w = random_point_field(kPhase1, rng);
    const VectorField jac =
        lie_bracket(u, lie_bracket(v, w)) + lie_bracket(v, lie_bracket(w, u)) + lie_bracket(w, lie_bracket(u, v));
    for (const Expr& c : jac.components()) CHECK(agree(c, Expr(0L), kPhase1, rng, 3));
  }
}

TEST_CASE("closure_table examples") {
  const auto full = cat::schrodinger_full_algebra(1);
  const ClosureTable t = closure_table(full.members, 3);
  REQUIRE(t.status == ClosureStatus::Closed);
  CHECK(t.all_rational);
  CHECK(t.rank == static_cast<int>(full.members.size()));
  const ClosureTable t2 = closure_table(full.members, 99);
  CHECK(t2.coefficients == t.coefficients);

  const auto pg = cat::amplitude_generators(1);
  const ClosureTable open = closure_table({{"P_t", pg.get("P_t")}, {"G_1", pg.get("G_1")}}, 3);
  CHECK(open.status == ClosureStatus::NotClosed);
  REQUIRE(open.witness.has_value());
  CHECK(open.witness->first == 0);
  CHECK(open.witness->second == 1);

  const ClosureTable trans = closure_table({{"P_t", pg.get("P_t")}, {"P_x", pg.get("P_x")}}, 3);
  REQUIRE(trans.status == ClosureStatus::Closed);
  for (const auto& row : trans.coefficients)
    for (const auto& cell : row)
      for (const Exact& c : cell) CHECK(c.is_zero());

  const ClosureTable dup = closure_table({{"P_t", pg.get("P_t")}, {"P_t2", pg.get("P_t")}}, 3);
  CHECK(dup.status == ClosureStatus::RankDeficient);
}

TEST_CASE("property: brackets of symmetries are symmetries") {
  const auto sys = cat::system_by_key("phase-mn-sigma", 1);
  const auto fam = cat::schrodinger_full_algebra(1);
  ResidualOptions o;
  o.trials = 4;
  o.seed = 31;
  const auto& m = fam.members;
  for (std::size_t a = 0; a < m.size(); ++a) {
    for (std::size_t b = a + 1; b < m.size(); ++b) {
      const VectorField br = lie_bracket(m[a].field, m[b].field);
      if (br.is_zero()) continue;
      INFO(m[a].name << " " << m[b].name);
      CHECK(on_shell_residual(sys, br, "bracket", o).zero_at_all_points);
    }
  }
}

TEST_CASE("solve_exact over Q(i)") {
  const Exact i(mpq_class(0), mpq_class(1));
  LinearSolve s = solve_exact({{Exact(1), i}, {Exact(2), Exact(0)}, {Exact(0), Exact(1)}},
                              {Exact(1) + i, Exact(2), Exact(1)});
  REQUIRE(s.x.size() == 2);
  CHECK(s.rank == 2);
  CHECK(s.x[0] == Exact(1));
  CHECK(s.x[1] == Exact(1));
  LinearSolve bad = solve_exact({{Exact(1)}, {Exact(1)}}, {Exact(1), Exact(2)});
  CHECK_FALSE(bad.consistent);
}
