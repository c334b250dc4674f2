#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "contsym/calculus.hpp"
#include "contsym/catalog.hpp"
#include "contsym/criteria.hpp"
#include "contsym/liesym.hpp"
#include "contsym/parse.hpp"
#include "contsym/simulator.hpp"

namespace py = pybind11;
namespace cat = contsym::catalog;
namespace lie = contsym::lie;
namespace sim = contsym::sim;
namespace sym = contsym::sym;
using json = nlohmann::json;

namespace {

sym::JetSpace make_space(const std::vector<std::string>& indep, const std::vector<std::string>& deps, int order) {
  return sym::JetSpace(indep, deps, order);
}

std::string canonical(const std::string& text, const std::vector<std::string>& indep,
                      const std::vector<std::string>& deps, int order) {
  auto space = make_space(indep, deps, order);
  return sym::to_string(sym::simplify_basic(sym::parse_expr(text, space)), space);
}

std::string total_derivative(const std::string& text, const std::string& var, const std::vector<std::string>& indep,
                             const std::vector<std::string>& deps, int order) {
  auto space = make_space(indep, deps, order);
  const int i = space.independent_index(var);
  if (i < 0) throw py::value_error("unknown independent variable '" + var + "'");
  auto e = sym::parse_expr(text, space);
  return sym::to_string(sym::simplify_basic(sym::total_derivative(e, i, space)), space);
}

std::vector<std::string> members(const std::string& algebra, int n) {
  std::vector<std::string> out;
  for (const auto& m : cat::algebra_by_key(algebra, n).members) out.push_back(m.name);
  return out;
}

std::string verify(const std::string& system, std::uint64_t seed, const std::string& algebra,
                   const std::string& generator, int n, int trials, const std::string& mode,
                   const std::string& lambda) {
  if (mode != "exact" && mode != "float") throw py::value_error("mode must be 'exact' or 'float'");
  const auto sys = cat::system_by_key(system, n, contsym::parse_rational(lambda));
  const auto& keys = cat::algebra_keys();
  const bool gen_is_algebra = std::find(keys.begin(), keys.end(), generator) != keys.end();
  const auto fam = !algebra.empty()  ? cat::algebra_by_key(algebra, n)
                   : gen_is_algebra ? cat::algebra_by_key(generator, n)
                                    : cat::default_algebra_for(system, n);
  if (!(fam.space == sys.space)) throw py::value_error("algebra and system act on different spaces");
  std::vector<lie::NamedField> selected;
  if (generator.empty() || generator == fam.name) {
    selected = fam.members;
  } else {
    if (!fam.has(generator)) throw py::value_error("generator '" + generator + "' not in " + fam.name);
    selected.push_back({generator, fam.get(generator)});
  }
  lie::ResidualOptions opts;
  opts.trials = trials;
  opts.seed = seed;
  opts.mode = mode == "exact" ? lie::Mode::Exact : lie::Mode::Float;
  json reports = json::array();
  {
    py::gil_scoped_release nogil;
    for (const auto& g : selected) reports.push_back(lie::on_shell_residual(sys, g.field, g.name, opts));
  }
  return json{{"system", system}, {"algebra", fam.name}, {"n", n}, {"seed", seed}, {"reports", reports}}.dump();
}

py::dict brackets(const std::string& algebra, int n, std::uint64_t seed, const std::vector<std::string>& generators) {
  const auto fam = cat::algebra_by_key(algebra, n);
  std::vector<lie::NamedField> gens;
  if (generators.empty()) gens = fam.members;
  for (const auto& g : generators) {
    if (!fam.has(g)) throw py::value_error("generator '" + g + "' not in " + fam.name);
    gens.push_back({g, fam.get(g)});
  }
  if (gens.size() < 2) throw py::value_error("need at least two generators");
  const auto t = lie::closure_table(gens, seed);
  py::list rows;
  for (const auto& row : t.coefficients) {
    py::list r;
    for (const auto& c : row) {
      if (c.empty()) {
        r.append(py::none());
        continue;
      }
      std::vector<std::string> s;
      for (const auto& v : c) s.push_back(v.str());
      r.append(py::cast(s));
    }
    rows.append(r);
  }
  py::dict d;
  d["status"] = lie::closure_status_name(t.status);
  d["names"] = t.names;
  d["rank"] = t.rank;
  d["coefficients"] = rows;
  return d;
}

sim::NonlinearSpec make_spec(const std::string& preset, const std::vector<double>& m, double m_inv,
                             const std::vector<double>& n, double n_inv, double lambda) {
  if (preset == "free") return sim::NonlinearSpec::free();
  if (preset == "case2") return sim::NonlinearSpec::case2(lambda);
  if (preset == "hamilton-jacobi") return sim::NonlinearSpec::hamilton_jacobi();
  if (preset == "general") return sim::NonlinearSpec::general({m, m_inv}, {n, n_inv});
  throw py::value_error("preset must be free, general, case2 or hamilton-jacobi");
}

sim::State make_state(py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> u, double L) {
  if (u.ndim() != 1) throw py::value_error("u must be one-dimensional");
  sim::Grid g{L, static_cast<int>(u.shape(0))};
  g.validate();
  sim::State s{g, sim::Field(u.data(), u.data() + u.shape(0))};
  return s;
}

py::array_t<std::complex<double>> to_array(const sim::Field& f) {
  // explicit strides: default stride computation is wrong in some pybind11 2.x + numpy 2 pairings
  py::array_t<std::complex<double>> a({static_cast<py::ssize_t>(f.size())},
                                      {static_cast<py::ssize_t>(sizeof(std::complex<double>))});
  std::copy(f.begin(), f.end(), a.mutable_data());
  return a;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "contsym native core";

  py::register_exception<contsym::Error>(mod, "ContsymError", PyExc_ValueError);

  mod.def("system_keys", &cat::system_keys);
  mod.def("algebra_keys", &cat::algebra_keys);
  mod.def("algebra_members", &members, py::arg("algebra"), py::arg("n") = 1);

  // printed form after light simplification; round-trips through the parser
  mod.def("canonical", &canonical, py::arg("text"), py::arg("independents"), py::arg("dependents"),
          py::arg("order") = 2);
  mod.def("total_derivative", &total_derivative, py::arg("text"), py::arg("var"), py::arg("independents"),
          py::arg("dependents"), py::arg("order") = 2);

  mod.def("verify_json", &verify, py::arg("system"), py::arg("seed"), py::arg("algebra") = "",
          py::arg("generator") = "", py::arg("n") = 1, py::arg("trials") = 25, py::arg("mode") = "exact",
          py::arg("lambda_") = "1/20");
  mod.def("brackets", &brackets, py::arg("algebra"), py::arg("n") = 1, py::arg("seed") = 1,
          py::arg("generators") = std::vector<std::string>{});

  mod.def(
      "gaussian_packet",
      [](double L, int m, double x0, double k0, double w, double chirp) {
        sim::Grid g{L, m};
        g.validate();
        return to_array(sim::gaussian_packet(g, x0, k0, w, chirp).u);
      },
      py::arg("L") = 20.0, py::arg("m") = 1024, py::arg("x0") = 0.0, py::arg("k0") = 0.0, py::arg("w") = 1.0,
      py::arg("chirp") = 0.0);

  mod.def(
      "grid_x",
      [](double L, int m) {
        sim::Grid g{L, m};
        g.validate();
        return g.x();
      },
      py::arg("L"), py::arg("m"));

  mod.def(
      "evolve",
      [](py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> u0, double L,
         const std::string& preset, const std::vector<double>& M, double M_inv, const std::vector<double>& N,
         double N_inv, double lambda, double dt, double t_final, int steps_per_snapshot, double c_stab) {
        const auto s = make_state(u0, L);
        const auto spec = make_spec(preset, M, M_inv, N, N_inv, lambda);
        sim::Trajectory tr;
        {
          py::gil_scoped_release nogil;
          tr = sim::evolve(s, spec, {dt, t_final, steps_per_snapshot, c_stab});
        }
        const auto rows = static_cast<py::ssize_t>(tr.u.size());
        const auto cols = static_cast<py::ssize_t>(s.u.size());
        const auto item = static_cast<py::ssize_t>(sizeof(std::complex<double>));
        py::array_t<std::complex<double>> u({rows, cols}, {cols * item, item});
        auto* p = u.mutable_data();
        for (const auto& f : tr.u) p = std::copy(f.begin(), f.end(), p);
        py::dict d;
        d["t"] = tr.t;
        d["u"] = u;
        d["mass"] = tr.mass;
        d["dt"] = tr.dt;
        d["blew_up"] = tr.blew_up;
        d["message"] = tr.message;
        if (tr.u.size() >= 3) {
          const auto mode = spec.preset == sim::Preset::General ? sim::ResidualMode::Case3 : sim::ResidualMode::Classical;
          d["continuity_residual"] = sim::continuity_residual(tr, mode, lambda);
        }
        return d;
      },
      py::arg("u0"), py::arg("L"), py::arg("preset") = "free", py::arg("M") = std::vector<double>{},
      py::arg("M_inv") = 0.0, py::arg("N") = std::vector<double>{}, py::arg("N_inv") = 0.0,
      py::arg("lambda_") = 0.05, py::arg("dt") = 1e-3, py::arg("t_final") = 1.0,
      py::arg("steps_per_snapshot") = 100, py::arg("c_stab") = 0.5);

  mod.def(
      "galilei_boost",
      [](py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> u, double L, double t,
         double v) {
        auto s = make_state(u, L);
        s.t = t;
        return to_array(sim::galilei_boost(s, v).u);
      },
      py::arg("u"), py::arg("L"), py::arg("t"), py::arg("v"));

  mod.def(
      "boost_covariance_error",
      [](py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> u0, double L, double v,
         const std::string& preset, const std::vector<double>& M, double M_inv, const std::vector<double>& N,
         double N_inv, double dt, double t_final) {
        const auto s = make_state(u0, L);
        const auto spec = make_spec(preset, M, M_inv, N, N_inv, 0.05);
        py::gil_scoped_release nogil;
        return sim::boost_covariance_error(s, spec, v, {dt, t_final, 1 << 30, 0.5});
      },
      py::arg("u0"), py::arg("L"), py::arg("v"), py::arg("preset") = "free", py::arg("M") = std::vector<double>{},
      py::arg("M_inv") = 0.0, py::arg("N") = std::vector<double>{}, py::arg("N_inv") = 0.0, py::arg("dt") = 1e-3,
      py::arg("t_final") = 1.0);

  mod.def(
      "mass",
      [](py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> u, double L) {
        const auto s = make_state(u, L);
        return sim::mass(s);
      },
      py::arg("u"), py::arg("L"));

  mod.def("criterion_ids", &contsym::criteria::ids);
  mod.def(
      "run_criterion_json",
      [](int id, std::uint64_t seed) {
        contsym::criteria::Result r;
        {
          py::gil_scoped_release nogil;
          r = contsym::criteria::run(id, {seed});
        }
        json j = r;
        return j.dump();
      },
      py::arg("id"), py::arg("seed") = 1);
}
