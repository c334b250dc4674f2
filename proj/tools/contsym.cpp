// contsym command-line harness: verify, brackets, simulate, boost-test, report.
// Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 numeric blow-up.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <nlohmann/json.hpp>

#include "contsym/catalog.hpp"
#include "contsym/criteria.hpp"
#include "contsym/simulator.hpp"

namespace cat = contsym::catalog;
namespace lie = contsym::lie;
namespace sim = contsym::sim;
using nlohmann::json;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2, kBlowUp = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string joined(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

void emit(const json& j, const std::string& out) {
  std::string text = j.dump(2) + "\n";
  if (out.empty()) std::cout << text;
  else sim::write_file_atomic(out, text);
}

std::vector<double> parse_list(const std::string& s, const char* flag) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": not a number: '" + item + "'");
    }
  }
  return out;
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
  std::string system, algebra, generator, mode = "exact", out, lambda = "1/20";
  int n = 1, trials = 25;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  double floor = 1e-6;
  bool expect_fail = false;
};

int cmd_verify(const VerifyArgs& a) {
  if (!a.seed) throw UsageError("verify: --seed is required");
  if (!cat::is_system_key(a.system))
    throw UsageError("unknown system '" + a.system + "' (known: " + joined(cat::system_keys()) + ")");
  if (!a.algebra.empty() && !contains(cat::algebra_keys(), a.algebra))
    throw UsageError("unknown algebra '" + a.algebra + "' (known: " + joined(cat::algebra_keys()) + ")");
  if (a.mode != "exact" && a.mode != "float") throw UsageError("--mode must be exact or float");
  if (a.n < 1 || a.n > 4) throw UsageError("--n must be in 1..4");
  if (a.trials < 1) throw UsageError("--trials must be positive");

  mpq_class lambda;
  try {
    lambda = contsym::parse_rational(a.lambda);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--lambda: ") + e.what());
  }
  const lie::PdeSystem sys = cat::system_by_key(a.system, a.n, lambda);

  cat::GeneratorFamily fam;
  std::vector<lie::NamedField> selected;
  if (!a.algebra.empty()) {
    fam = cat::algebra_by_key(a.algebra, a.n);
  } else if (!a.generator.empty() && contains(cat::algebra_keys(), a.generator)) {
    fam = cat::algebra_by_key(a.generator, a.n);
  } else {
    fam = cat::default_algebra_for(a.system, a.n);
  }
  if (!(fam.space == sys.space))
    throw UsageError("algebra '" + fam.name + "' acts on a different space than system '" + a.system + "'");
  if (a.generator.empty() || a.generator == fam.name) {
    selected = fam.members;
  } else {
    if (!fam.has(a.generator)) {
      std::vector<std::string> names;
      for (const auto& m : fam.members) names.push_back(m.name);
      throw UsageError("generator '" + a.generator + "' not in " + fam.name + " (members: " + joined(names) + ")");
    }
    selected.push_back({a.generator, fam.get(a.generator)});
  }

  lie::ResidualOptions opts;
  opts.trials = a.trials;
  opts.seed = *a.seed;
  opts.mode = a.mode == "exact" ? lie::Mode::Exact : lie::Mode::Float;
  const double tol = a.tol.value_or(a.mode == "exact" ? 0.0 : 1e-9);

  json reports = json::array();
  bool all_ok = true;
  for (const auto& g : selected) {
    auto r = lie::on_shell_residual(sys, g.field, g.name, opts);
    bool ok = a.expect_fail ? (r.nonzero_points > 0 && r.max_abs_residual > a.floor)
                            : (r.zero_at_all_points || r.max_rel_residual <= tol);
    all_ok = all_ok && ok;
    json j = r;
    j["passed"] = ok;
    reports.push_back(j);
    if (!a.out.empty())
      std::printf("%-12s %-5s max_abs %.3g  nonzero %d/%d\n", g.name.c_str(), ok ? "ok" : "FAIL", r.max_abs_residual,
                  r.nonzero_points, r.trials);
  }
  json out{{"schema", "contsym.verify/1"},
           {"system", cat::resolve_system_key(a.system)},
           {"algebra", fam.name},
           {"n", a.n},
           {"mode", lie::mode_name(opts.mode)},
           {"seed", *a.seed},
           {"trials", a.trials},
           {"tol", tol},
           {"expect_fail", a.expect_fail},
           {"reports", reports},
           {"passed", all_ok}};
  if (a.expect_fail) out["floor"] = a.floor;
  emit(out, a.out);
  return all_ok ? kPass : kFail;
}

// ---------------------------------------------------------------- brackets

struct BracketArgs {
  std::string algebra, generators, out;
  int n = 1;
  std::optional<std::uint64_t> seed;
};

int cmd_brackets(const BracketArgs& a) {
  if (!a.seed) throw UsageError("brackets: --seed is required");
  if (!contains(cat::algebra_keys(), a.algebra))
    throw UsageError("unknown algebra '" + a.algebra + "' (known: " + joined(cat::algebra_keys()) + ")");
  if (a.n < 1 || a.n > 4) throw UsageError("--n must be in 1..4");
  auto fam = cat::algebra_by_key(a.algebra, a.n);
  std::vector<lie::NamedField> gens;
  if (a.generators.empty()) {
    gens = fam.members;
  } else {
    std::stringstream ss(a.generators);
    for (std::string name; std::getline(ss, name, ',');) {
      if (!fam.has(name)) throw UsageError("generator '" + name + "' not in " + fam.name);
      gens.push_back({name, fam.get(name)});
    }
  }
  if (gens.size() < 2) throw UsageError("brackets need at least two generators");

  auto t = lie::closure_table(gens, *a.seed);
  std::ostringstream os;
  os << "left,right,status";
  for (const auto& n : t.names) os << ',' << n;
  os << '\n';
  for (size_t i = 0; i < gens.size(); ++i)
    for (size_t j = 0; j < gens.size(); ++j) {
      os << t.names[i] << ',' << t.names[j] << ',';
      const auto& c = t.coefficients[i][j];
      if (t.status == lie::ClosureStatus::RankDeficient) {
        os << "rank-deficient";
        for (size_t k = 0; k < gens.size(); ++k) os << ',';
      } else if (c.empty()) {
        os << "not-closed";
        for (size_t k = 0; k < gens.size(); ++k) os << ',';
      } else {
        os << "ok";
        for (const auto& v : c) os << ',' << v.str();
      }
      os << '\n';
    }
  if (a.out.empty()) std::cout << os.str();
  else sim::write_file_atomic(a.out, os.str());
  std::fprintf(stderr, "closure: %s (rank %d, %s coefficients)\n", lie::closure_status_name(t.status).c_str(),
               t.rank, t.all_rational ? "rational" : "complex");
  return t.status == lie::ClosureStatus::Closed ? kPass : kFail;
}

// -------------------------------------------------------- simulate / boost

struct SolverArgs {
  std::string preset = "free", m_poly, n_poly, out;
  double m_inv = 0, n_inv = 0, lambda = 0.05;
  int m = 1024, spp = 100;
  double L = 20, dt = 1e-3, t_final = 1, c_stab = 0.5;
  double x0 = 0, k0 = 0, w = 1, chirp = 0, v = 1;
  std::optional<double> tol;
};

sim::NonlinearSpec make_spec(const SolverArgs& a) {
  bool has_mn = !a.m_poly.empty() || !a.n_poly.empty() || a.m_inv != 0 || a.n_inv != 0;
  if (a.preset != "general" && has_mn) throw UsageError("--M/--N only apply to --preset general");
  if (a.preset == "free") return sim::NonlinearSpec::free();
  if (a.preset == "case2") return sim::NonlinearSpec::case2(a.lambda);
  if (a.preset == "hamilton-jacobi") return sim::NonlinearSpec::hamilton_jacobi();
  if (a.preset == "general") {
    sim::Laurent m{parse_list(a.m_poly, "--M"), a.m_inv};
    sim::Laurent n{parse_list(a.n_poly, "--N"), a.n_inv};
    return sim::NonlinearSpec::general(m, n);
  }
  throw UsageError("--preset must be free, general, case2 or hamilton-jacobi");
}

sim::State make_state(const SolverArgs& a) {
  sim::Grid g{a.L, a.m};
  try {
    g.validate();
  } catch (const contsym::Error& e) {
    throw UsageError(e.what());
  }
  try {
    return sim::gaussian_packet(g, a.x0, a.k0, a.w, a.chirp);
  } catch (const contsym::Error& e) {
    throw UsageError(e.what());
  }
}

sim::EvolveOptions make_opts(const SolverArgs& a) {
  if (!(a.dt > 0) || !(a.t_final > 0) || a.spp < 1) throw UsageError("need --dt > 0, --t-final > 0, --steps-per-snapshot >= 1");
  return {a.dt, a.t_final, a.spp, a.c_stab};
}

json spec_json(const sim::NonlinearSpec& s) {
  return json{{"preset", s.name()}, {"M", s.m.str()}, {"N", s.n.str()}, {"lambda", s.lambda}};
}

double max_of(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, x);
  return m;
}

int cmd_simulate(const SolverArgs& a) {
  if (a.out.empty()) throw UsageError("simulate: --out <directory> is required");
  auto spec = make_spec(a);
  auto s0 = make_state(a);
  auto opts = make_opts(a);
  sim::Trajectory tr;
  try {
    tr = sim::evolve(s0, spec, opts);
  } catch (const sim::BlowUp&) {
    throw;
  } catch (const contsym::Error& e) {
    throw UsageError(e.what());
  }
  namespace fs = std::filesystem;
  fs::create_directories(a.out);
  const double lam = spec.preset == sim::Preset::Case2 ? spec.lambda : 0.0;
  sim::write_trajectory_csv(tr, (fs::path(a.out) / "trajectory.csv").string());
  if (!tr.blew_up) sim::write_monitor_csv(tr, (fs::path(a.out) / "monitors.csv").string(), lam);

  json j{{"schema", "contsym.simulate/1"},
         {"spec", spec_json(spec)},
         {"grid", {{"L", a.L}, {"m", a.m}}},
         {"packet", {{"x0", a.x0}, {"k0", a.k0}, {"w", a.w}, {"chirp", a.chirp}}},
         {"dt", tr.dt},
         {"dt_out", tr.dt_out},
         {"t_final", a.t_final},
         {"snapshots", tr.t.size()},
         {"blew_up", tr.blew_up},
         {"message", tr.message},
         {"mass_initial", tr.mass.front()},
         {"mass_final", tr.mass.back()}};
  if (!tr.blew_up && tr.t.size() >= 3) {
    auto mode = spec.preset == sim::Preset::General ? sim::ResidualMode::Case3 : sim::ResidualMode::Classical;
    j["continuity_residual_max"] = max_of(sim::continuity_residual(tr, mode));
    j["continuity_residual_mode"] = mode == sim::ResidualMode::Case3 ? "case3" : "classical";
    if (spec.preset == sim::Preset::Case2) j["fokker_planck_residual_max"] = max_of(sim::fokker_planck_residual(tr, lam));
    if (spec.preset == sim::Preset::HamiltonJacobi) j["phase_residual_max"] = max_of(sim::phase_residual(tr));
  }
  if (!tr.blew_up && spec.preset == sim::Preset::Free && a.chirp == 0)
    j["analytic_l2_error"] =
        sim::relative_l2(tr.u.back(), sim::analytic_free_gaussian(s0.grid, a.x0, a.k0, a.w, tr.t.back()));
  sim::write_file_atomic((fs::path(a.out) / "summary.json").string(), j.dump(2) + "\n");
  if (tr.blew_up) {
    std::fprintf(stderr, "blow-up: %s\n", tr.message.c_str());
    return kBlowUp;
  }
  std::printf("%zu snapshots written to %s\n", tr.t.size(), a.out.c_str());
  return kPass;
}

int cmd_boost(const SolverArgs& a) {
  auto spec = make_spec(a);
  auto s0 = make_state(a);
  auto opts = make_opts(a);
  double err;
  try {
    err = sim::boost_covariance_error(s0, spec, a.v, opts);
  } catch (const sim::BlowUp& e) {
    std::fprintf(stderr, "blow-up: %s\n", e.what());
    return kBlowUp;
  } catch (const sim::BoundaryContamination& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kFail;
  } catch (const contsym::Error& e) {
    throw UsageError(e.what());
  }
  const double tol = a.tol.value_or(spec.preset == sim::Preset::Free ? 1e-6 : 1e-4);
  json j{{"schema", "contsym.boost/1"},
         {"spec", spec_json(spec)},
         {"grid", {{"L", a.L}, {"m", a.m}}},
         {"v", a.v},
         {"t_final", a.t_final},
         {"dt", opts.dt},
         {"error", err},
         {"tol", tol},
         {"passed", err < tol}};
  emit(j, a.out);
  return err < tol ? kPass : kFail;
}

// ------------------------------------------------------------------ report

int cmd_report(std::optional<std::uint64_t> seed, const std::string& out, const std::vector<int>& only) {
  if (!seed) throw UsageError("report: --seed is required");
  contsym::criteria::Options o;
  o.seed = *seed;
  std::vector<int> ids = only.empty() ? contsym::criteria::ids() : only;
  json rows = json::array();
  bool all = true;
  std::printf("%-3s %-62s %s\n", "id", "property", "status");
  for (int id : ids) {
    auto r = contsym::criteria::run(id, o);
    all = all && r.passed;
    rows.push_back(r);
    std::printf("%-3d %-62s %s\n", r.id, r.title.c_str(), r.passed ? "pass" : "FAIL");
  }
  json j{{"schema", "contsym.report/1"}, {"seed", *seed}, {"criteria", rows}, {"passed", all}};
  if (!out.empty()) sim::write_file_atomic(out, j.dump(2) + "\n");
  return all ? kPass : kFail;
}

void add_solver_flags(CLI::App* c, SolverArgs& a) {
  c->add_option("--preset", a.preset, "free | general | case2 | hamilton-jacobi")->capture_default_str();
  c->add_option("--M", a.m_poly, "M coefficients in powers of sigma, e.g. 0,1,0.5");
  c->add_option("--N", a.n_poly, "N coefficients in powers of sigma");
  c->add_option("--M-inv", a.m_inv, "coefficient of 1/sigma in M");
  c->add_option("--N-inv", a.n_inv, "coefficient of 1/sigma in N");
  c->add_option("--lambda", a.lambda, "case2 diffusion constant")->capture_default_str();
  c->add_option("--m", a.m, "grid points (power of two)")->capture_default_str();
  c->add_option("--L", a.L, "half-width of the periodic domain")->capture_default_str();
  c->add_option("--dt", a.dt, "time step")->capture_default_str();
  c->add_option("--t-final", a.t_final, "final time")->capture_default_str();
  c->add_option("--steps-per-snapshot", a.spp, "steps between snapshots")->capture_default_str();
  c->add_option("--c-stab", a.c_stab, "stability constant: dt <= c_stab dx^2")->capture_default_str();
  c->add_option("--x0", a.x0, "packet centre")->capture_default_str();
  c->add_option("--k0", a.k0, "packet wavenumber")->capture_default_str();
  c->add_option("--w", a.w, "packet width")->capture_default_str();
  c->add_option("--chirp", a.chirp, "quadratic phase coefficient")->capture_default_str();
  c->add_option("--seed", "accepted for uniformity; the solver is deterministic");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contsym: symmetry verification and simulation for continuity-type equations"};
  app.require_subcommand(1);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "check invariance of a system under generators");
  verify->add_option("--system", va.system, "system key")->required();
  verify->add_option("--algebra", va.algebra, "algebra key");
  verify->add_option("--generator", va.generator, "single generator (member name or one-member algebra key)");
  verify->add_option("--n", va.n, "number of spatial dimensions")->capture_default_str();
  verify->add_option("--trials", va.trials, "sample points")->capture_default_str();
  verify->add_option("--seed", va.seed, "random seed (required)");
  verify->add_option("--mode", va.mode, "exact | float")->capture_default_str();
  verify->add_option("--tol", va.tol, "relative tolerance (default 0 exact, 1e-9 float)");
  verify->add_option("--lambda", va.lambda, "lambda for lambda-dependent systems")->capture_default_str();
  verify->add_flag("--expect-fail", va.expect_fail, "pass only if the residual exceeds --floor");
  verify->add_option("--floor", va.floor, "minimum residual for --expect-fail")->capture_default_str();
  verify->add_option("--out", va.out, "JSON output path (stdout if omitted)");

  BracketArgs ba;
  auto* brackets = app.add_subcommand("brackets", "structure-constant table of an algebra");
  brackets->add_option("--algebra", ba.algebra, "algebra key")->required();
  brackets->add_option("--n", ba.n, "number of spatial dimensions")->capture_default_str();
  brackets->add_option("--generators", ba.generators, "comma-separated subset");
  brackets->add_option("--seed", ba.seed, "random seed (required)");
  brackets->add_option("--out", ba.out, "CSV output path (stdout if omitted)");

  SolverArgs sa;
  auto* simulate = app.add_subcommand("simulate", "evolve a Gaussian packet and write CSV monitors");
  add_solver_flags(simulate, sa);
  simulate->add_option("--out", sa.out, "output directory")->required();

  SolverArgs ta;
  ta.m = 2048;
  ta.L = 30;
  auto* boost = app.add_subcommand("boost-test", "Galilei covariance error of the solver");
  add_solver_flags(boost, ta);
  boost->add_option("--v", ta.v, "boost velocity")->capture_default_str();
  boost->add_option("--tol", ta.tol, "pass threshold (default 1e-6 free, 1e-4 otherwise)");
  boost->add_option("--out", ta.out, "JSON output path (stdout if omitted)");

  std::optional<std::uint64_t> rseed;
  std::string rout;
  std::vector<int> ronly;
  auto* report = app.add_subcommand("report", "run all acceptance criteria and print the traceability table");
  report->add_option("--seed", rseed, "random seed (required)");
  report->add_option("--out", rout, "JSON output path");
  report->add_option("--only", ronly, "criterion ids")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*verify) return cmd_verify(va);
    if (*brackets) return cmd_brackets(ba);
    if (*simulate) return cmd_simulate(sa);
    if (*boost) return cmd_boost(ta);
    if (*report) return cmd_report(rseed, rout, ronly);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const sim::BlowUp& e) {
    std::fprintf(stderr, "blow-up: %s\n", e.what());
    return kBlowUp;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFail;
  }
  return kUsage;
}
