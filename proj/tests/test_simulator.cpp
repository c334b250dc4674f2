#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "contsym/simulator.hpp"

using namespace contsym::sim;

namespace {

double variance(const Grid& g, const Field& u) {
  auto x = g.x();
  double m0 = 0, m1 = 0, m2 = 0;
  for (int i = 0; i < g.m; ++i) {
    double r = std::norm(u[i]);
    m0 += r;
    m1 += r * x[i];
    m2 += r * x[i] * x[i];
  }
  double mean = m1 / m0;
  return m2 / m0 - mean * mean;
}

std::string first_line(const std::string& path) {
  std::ifstream in(path);
  std::string s;
  std::getline(in, s);
  return s;
}

const NonlinearSpec kGeneral = NonlinearSpec::general(Laurent{{0.3}, 0.2}, Laurent{{0.4}, -0.1});

}  // namespace

TEST_CASE("grid and packet basics") {
  Grid g{20, 1024};
  CHECK(g.dx() == doctest::Approx(40.0 / 1024));
  CHECK_THROWS_AS((Grid{20, 1000}.validate()), contsym::Error);
  CHECK_THROWS_AS((Grid{-1, 64}.validate()), contsym::Error);

  auto s = gaussian_packet(g, 0, 0, 1);
  CHECK(std::abs(mass(s) - 1) < 1e-12);
  for (int i = 0; i < g.m; ++i) {
    CHECK(s.u[i].imag() == 0);
    CHECK(s.u[i].real() > 0);
    CHECK(s.u[i].real() == doctest::Approx(s.u[(g.m - i) % g.m].real()).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gaussian_packet(g, 0, 0, 5), contsym::Error);
  CHECK_THROWS_AS(gaussian_packet(g, 0, 0, -1), contsym::Error);
}

TEST_CASE("classical current of a moving packet") {
  Grid g{20, 1024};
  auto s = gaussian_packet(g, 0, 2, 1);
  auto f = density_current_fields(s, CurrentMode::Classical);
  for (int i = 0; i < g.m; ++i) CHECK(std::abs(f.j[i] - 2 * f.rho[i]) < 1e-10);

  auto s3 = gaussian_packet(g, 1, 3, 1.5);
  auto f3 = density_current_fields(s3, CurrentMode::Classical);
  double sj = 0, sr = 0;
  for (int i = 0; i < g.m; ++i) {
    sj += f3.j[i];
    sr += f3.rho[i];
  }
  CHECK(std::abs(sj / sr - 3) < 1e-6);

  auto real = gaussian_packet(g, 0, 0, 1);
  for (double j : density_current_fields(real, CurrentMode::Classical).j) CHECK(std::abs(j) < 1e-14);

  auto fg = density_current_fields(s, CurrentMode::Galilei, 0.1);
  auto rx = spectral_derivative(g, f.rho, 1);
  for (int i = 0; i < g.m; ++i) CHECK(std::abs(fg.j[i] - f.j[i] - 0.1 * rx[i]) < 1e-14);
}

TEST_CASE("spectral derivative of a Gaussian") {
  Grid g{20, 512};
  auto x = g.x();
  std::vector<double> f(g.m), fx(g.m), fxx(g.m);
  for (int i = 0; i < g.m; ++i) {
    f[i] = std::exp(-x[i] * x[i]);
    fx[i] = -2 * x[i] * f[i];
    fxx[i] = (4 * x[i] * x[i] - 2) * f[i];
  }
  auto d1 = spectral_derivative(g, f, 1);
  auto d2 = spectral_derivative(g, f, 2);
  for (int i = 0; i < g.m; ++i) {
    CHECK(std::abs(d1[i] - fx[i]) < 1e-10);
    CHECK(std::abs(d2[i] - fxx[i]) < 1e-10);
  }
}

TEST_CASE("free evolution against the analytic Gaussian") {
  Grid g{20, 1024};
  auto s = gaussian_packet(g, -1, 1.5, 1);
  auto tr = evolve(s, NonlinearSpec::free(), {1e-3, 1, 100});
  REQUIRE(!tr.blew_up);
  CHECK(tr.t.size() == 11);
  CHECK(tr.t.back() == doctest::Approx(1));
  CHECK(relative_l2(tr.u.back(), analytic_free_gaussian(g, -1, 1.5, 1, 1)) < 1e-10);
  for (double m : tr.mass) CHECK(std::abs(m - tr.mass[0]) < 1e-12);
  CHECK(time_reversal_error(s, NonlinearSpec::free(), {1e-3, 1, 100}) < 1e-10);

  // Zero M and N takes the free path.
  auto z = evolve(s, NonlinearSpec::general({}, {}), {1e-3, 1, 100});
  CHECK(relative_l2(z.u.back(), tr.u.back()) < 1e-15);
}

TEST_CASE("nonlinear evolution is second order in dt") {
  Grid g{8, 64};
  auto s = gaussian_packet(g, 0, 1, 1.2);
  double dt0 = 0.5 * g.dx() * g.dx();
  std::vector<Field> sol;
  for (double f : {1.0, 0.5, 0.25, 0.125}) sol.push_back(evolve(s, kGeneral, {dt0 * f, 0.4, 1 << 20}).u.back());
  double e1 = relative_l2(sol[0], sol[1]);
  double e2 = relative_l2(sol[1], sol[2]);
  double e3 = relative_l2(sol[2], sol[3]);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);
  CHECK(e2 / e3 > 3.5);
  CHECK(e2 / e3 < 4.5);
}

TEST_CASE("stability bound and blow-up flag") {
  Grid g{8, 64};
  auto s = gaussian_packet(g, 0, 0, 1);
  double dx = g.dx();
  CHECK_THROWS_AS(evolve(s, kGeneral, {dx * dx, 0.1, 10}), contsym::Error);
  CHECK_NOTHROW(evolve(s, kGeneral, {dx * dx, 0.1, 10, 1.0}));
  CHECK_NOTHROW(evolve(s, NonlinearSpec::free(), {dx * dx, 0.1, 10}));

  // Strong anti-diffusion with a permissive bound overflows.
  auto bad = NonlinearSpec::general(Laurent{{-50}, 0}, {});
  auto tr = evolve(s, bad, {0.5 * dx * dx, 5, 10, 0.5});
  CHECK(tr.blew_up);
  CHECK(!tr.message.empty());
  CHECK(tr.t.size() < 5 / (0.5 * dx * dx) / 10 + 1);
}

TEST_CASE("Galilei boost") {
  Grid g{30, 512};
  auto s = gaussian_packet(g, 0, 0.5, 1);
  s.t = 0.7;
  auto id = galilei_boost(s, 0);
  CHECK(relative_l2(id.u, s.u) < 1e-15);

  auto vw = galilei_boost(galilei_boost(s, 0.8), -0.3);
  auto single = galilei_boost(s, 0.5);
  CHECK(relative_l2(vw.u, single.u) < 1e-10);

  // Constant field: pure phase factor.
  State c{g, Field(g.m, cplx(0.3, 0.1)), 0.7};
  auto bc = galilei_boost(c, 1.0, false);
  auto x = g.x();
  for (int i = 0; i < g.m; ++i) {
    cplx expect = c.u[i] * std::exp(cplx(0, x[i] - 0.5 * 0.7));
    CHECK(std::abs(bc.u[i] - expect) < 1e-12);
  }

  s.t = 0;
  auto b0 = galilei_boost(s, 2);
  for (int i = 0; i < g.m; ++i) CHECK(std::abs(b0.u[i] - s.u[i] * std::exp(cplx(0, 2 * x[i]))) < 1e-14);

  s.t = 26;
  CHECK_THROWS_AS(galilei_boost(s, 1.0), BoundaryContamination);
}

TEST_CASE("boost covariance") {
  Grid g{30, 2048};
  auto s = gaussian_packet(g, 0, 0, 1);
  CHECK(boost_covariance_error(s, NonlinearSpec::free(), 0, {1e-3, 1, 100}) < 1e-14);
  CHECK(boost_covariance_error(s, NonlinearSpec::free(), 1, {1e-3, 1, 100}) < 1e-6);
  Grid gc{30, 512};
  double dx = gc.dx();
  CHECK(boost_covariance_error(gaussian_packet(gc, 0, 0, 1), kGeneral, 1, {0.5 * dx * dx, 1, 100}) < 1e-4);
}

TEST_CASE("continuity monitors") {
  Grid g{8, 128};
  double dt = 0.125 * g.dx() * g.dx();
  auto s = gaussian_packet(g, 0, 1, 1.2);

  SUBCASE("free evolution converges at order two in dt_out") {
    std::vector<double> r;
    for (int spp : {16, 8, 4})
      r.push_back(continuity_residual(evolve(s, NonlinearSpec::free(), {dt, 0.5, spp}), ResidualMode::Classical).back());
    CHECK(r[0] / r[1] == doctest::Approx(4).epsilon(0.1));
    CHECK(r[1] / r[2] == doctest::Approx(4).epsilon(0.1));
  }
  SUBCASE("M term needs the corrected residual") {
    std::vector<double> cl, c3;
    for (int spp : {16, 8, 4}) {
      auto tr = evolve(s, kGeneral, {dt, 0.5, spp});
      cl.push_back(continuity_residual(tr, ResidualMode::Classical).back());
      c3.push_back(continuity_residual(tr, ResidualMode::Case3).back());
    }
    CHECK(cl[2] > 0.1);
    CHECK(c3[0] / c3[1] == doctest::Approx(4).epsilon(0.1));
    CHECK(c3[1] / c3[2] == doctest::Approx(4).epsilon(0.1));
  }
  SUBCASE("Fokker-Planck residual") {
    auto tr = evolve(s, NonlinearSpec::case2(0.05), {dt, 0.5, 8});
    auto fp = fokker_planck_residual(tr, 0.05);
    CHECK(fp.back() < 1e-3);
    CHECK_THROWS_AS(fokker_planck_residual(tr, 0.1), contsym::Error);
    auto free = evolve(s, NonlinearSpec::free(), {dt, 0.5, 8});
    CHECK_THROWS_AS(fokker_planck_residual(free, 0.05), contsym::Error);
    auto a = continuity_residual(free, ResidualMode::Galilei, 0);
    auto b = continuity_residual(free, ResidualMode::Classical);
    CHECK(a == b);
  }
  SUBCASE("diffusion sign flips the variance drift") {
    double v0 = variance(g, s.u);
    auto plus = evolve(s, NonlinearSpec::case2(0.05), {dt, 0.2, 8});
    auto minus = evolve(s, NonlinearSpec::case2(-0.05), {dt, 0.2, 8});
    auto freev = evolve(s, NonlinearSpec::free(), {dt, 0.2, 8});
    double vf = variance(g, freev.u.back());
    double dp = variance(g, plus.u.back()) - vf;
    double dm = variance(g, minus.u.back()) - vf;
    CHECK(v0 > 0);
    // rho_t = -lambda rho_xx shifts d Var/dt by -2 lambda.
    CHECK(dp == doctest::Approx(-0.02).epsilon(0.02));
    CHECK(dm == doctest::Approx(0.02).epsilon(0.02));
  }
  SUBCASE("too few snapshots") {
    auto tr = evolve(s, NonlinearSpec::free(), {dt, 0.01, 1000});
    CHECK_THROWS_AS(continuity_residual(tr, ResidualMode::Classical), contsym::Error);
  }
}

TEST_CASE("Hamilton-Jacobi phase equation") {
  Grid g{8, 64};
  double dt0 = 0.5 * g.dx() * g.dx();
  auto s = gaussian_packet(g, 0, 1, 1.2, 0.3);
  std::vector<double> r;
  for (double dto : {0.04, 0.02, 0.01}) {
    int spp = static_cast<int>(std::ceil(dto / dt0));
    r.push_back(phase_residual(evolve(s, NonlinearSpec::hamilton_jacobi(), {dto / spp, 0.24, spp})).back());
  }
  CHECK(r[2] < 1e-4);
  CHECK(r[0] / r[1] > 3.5);
  CHECK(r[1] / r[2] > 3.5);
  // The free equation keeps the quantum potential.
  auto fr = phase_residual(evolve(s, NonlinearSpec::free(), {0.01, 0.24, 1}));
  CHECK(fr.back() > 0.1);
}

TEST_CASE("N-only nonlinearity conserves mass") {
  Grid g{8, 128};
  auto spec = NonlinearSpec::general({}, Laurent{{0.4}, -0.1});
  auto tr = evolve(gaussian_packet(g, 0, 1, 1.2), spec, {0.5 * g.dx() * g.dx(), 1, 50});
  CHECK(std::abs(tr.mass.back() - tr.mass.front()) < 1e-8);
  CHECK(spec.reversible());
  CHECK(!kGeneral.reversible());
  CHECK_THROWS_AS(time_reversal_error(gaussian_packet(g, 0, 0, 1), kGeneral, {1e-3, 0.1, 10}), contsym::Error);
}

TEST_CASE("Laurent coefficients") {
  Laurent p{{1, 2, 0.5}, -1};
  CHECK(p(2) == doctest::Approx(1 + 4 + 2 - 0.5));
  CHECK(p.str() == "1 + 2*s + 0.5*s^2 - 1/s");
  CHECK(Laurent{}.is_zero());
  CHECK(Laurent{}.str() == "0");
  auto c2 = NonlinearSpec::case2(0.05);
  CHECK(c2.m(1.0) == doctest::Approx(-0.1));
  CHECK(c2.name() == "case2");
  CHECK(NonlinearSpec::hamilton_jacobi().n(7) == 0.5);
}

TEST_CASE("CSV export") {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "contsym_sim_test";
  fs::create_directories(dir);
  Grid g{8, 32};
  auto tr = evolve(gaussian_packet(g, 0, 1, 1), NonlinearSpec::free(), {0.01, 0.05, 1});
  auto p1 = (dir / "traj.csv").string(), p2 = (dir / "mon.csv").string();
  write_trajectory_csv(tr, p1);
  write_monitor_csv(tr, p2, 0);
  CHECK(first_line(p1) == "t,x,re_u,im_u,rho,j");
  CHECK(first_line(p2) == "t,mass,cont_res,fp_res");
  std::ifstream in(p1);
  int lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == 1 + 6 * 32);
  std::ifstream mon(p2);
  std::string l;
  std::getline(mon, l);
  std::getline(mon, l);
  CHECK(l.substr(l.size() - 2) == ",,");
  std::getline(mon, l);
  CHECK(l.substr(l.size() - 2) != ",,");
  CHECK(!fs::exists(p1 + ".tmp"));
  fs::remove_all(dir);
}
