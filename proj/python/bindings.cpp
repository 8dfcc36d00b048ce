// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "cevnorm/commands.hpp"
#include "cevnorm/config.hpp"
#include "cevnorm/data.hpp"
#include "cevnorm/error.hpp"
#include "cevnorm/limits.hpp"
#include "cevnorm/models.hpp"
#include "cevnorm/norming.hpp"
#include "cevnorm/simulate.hpp"
#include "cevnorm/stats.hpp"

namespace py = pybind11;
using namespace cevnorm;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw py::value_error("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

py::dict sample_dict(const ExceedanceSample& s) {
  py::dict d;
  d["x0"] = to_array(s.x0);
  d["x1"] = to_array(s.x1);
  d["x2"] = to_array(s.x2);
  d["t"] = s.t;
  d["seed"] = s.seed;
  d["model_id"] = s.model_id;
  return d;
}

ExceedanceSample sample_from_dict(const py::dict& d) {
  ExceedanceSample s;
  s.x0 = to_vector(d["x0"].cast<Array>());
  s.x1 = to_vector(d["x1"].cast<Array>());
  s.x2 = to_vector(d["x2"].cast<Array>());
  s.t = d["t"].cast<double>();
  s.seed = d["seed"].cast<std::uint64_t>();
  s.model_id = d["model_id"].cast<std::string>();
  return s;
}

NormingMode parse_mode(const std::string& mode) {
  if (mode == "random") return NormingMode::kRandom;
  if (mode == "deterministic") return NormingMode::kDeterministic;
  throw DomainError("norming mode must be 'random' or 'deterministic'");
}

py::object json_to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json python_to_json(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_cevnorm, m) {
  m.doc() = "Conditional extreme value norming: simulation, limit laws and tests.";
  m.attr("__version__") = std::string(library_version());

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<DomainError> domain(m, "DomainError", error.ptr());
  static py::exception<PreconditionError> precondition(m, "PreconditionError", error.ptr());
  static py::exception<ConfigError> config(m, "ConfigError", error.ptr());
  static py::exception<IoError> io(m, "IoError", error.ptr());
  static py::exception<DataError> data(m, "DataError", error.ptr());
  static py::exception<CapacityError> capacity(m, "CapacityError", error.ptr());
  static py::exception<ConvergenceError> convergence(m, "ConvergenceError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError& e) {
      py::set_error(domain, e.what());
    } catch (const PreconditionError& e) {
      py::set_error(precondition, e.what());
    } catch (const ConfigError& e) {
      py::set_error(config, e.what());
    } catch (const IoError& e) {
      py::set_error(io, e.what());
    } catch (const DataError& e) {
      py::set_error(data, e.what());
    } catch (const CapacityError& e) {
      py::set_error(capacity, e.what());
    } catch (const ConvergenceError& e) {
      py::set_error(convergence, e.what());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<ErvParams>(m, "ErvParams")
      .def(py::init([](double a, double rho, double kappa) {
             ErvParams p{a, rho, kappa};
             p.validate();
             return p;
           }),
           py::arg("a") = 1.0, py::arg("rho") = 0.0, py::arg("kappa") = 0.0)
      .def_readonly("a", &ErvParams::a)
      .def_readonly("rho", &ErvParams::rho)
      .def_readonly("kappa", &ErvParams::kappa)
      .def("__repr__", [](const ErvParams& p) {
        return "ErvParams(a=" + std::to_string(p.a) + ", rho=" + std::to_string(p.rho) +
               ", kappa=" + std::to_string(p.kappa) + ")";
      });

  py::class_<NoiseLaw>(m, "NoiseLaw")
      .def(py::init([](const std::string& family, double location, double scale) {
             NoiseLaw law{parse_noise_family(family), location, scale};
             law.validate();
             return law;
           }),
           py::arg("family") = "gaussian", py::arg("location") = 0.0, py::arg("scale") = 1.0)
      .def_property_readonly("family", [](const NoiseLaw& l) { return std::string(to_string(l.family)); })
      .def_readonly("location", &NoiseLaw::location)
      .def_readonly("scale", &NoiseLaw::scale);

  py::class_<CiModel>(m, "Model")
      .def(py::init([](ErvParams erv1, ErvParams erv2, NoiseLaw noise1, NoiseLaw noise2, double perturbation,
                       bool coupled_noise) {
             CiModel model = make_model(erv1, erv2, noise1, noise2, perturbation);
             model.coupled_noise = coupled_noise;
             return model;
           }),
           py::arg("erv1") = ErvParams{1.0, 0.5, 1.0}, py::arg("erv2") = ErvParams{1.0, 0.5, 1.0},
           py::arg("noise1") = NoiseLaw{}, py::arg("noise2") = NoiseLaw{}, py::arg("perturbation") = 0.0,
           py::arg("coupled_noise") = false)
      .def_property_readonly("erv1", [](const CiModel& mdl) { return mdl.erv[0]; })
      .def_property_readonly("erv2", [](const CiModel& mdl) { return mdl.erv[1]; })
      .def_property_readonly("noise1", [](const CiModel& mdl) { return mdl.noise[0]; })
      .def_property_readonly("noise2", [](const CiModel& mdl) { return mdl.noise[1]; })
      .def_readonly("perturbation", &CiModel::perturbation)
      .def_readonly("coupled_noise", &CiModel::coupled_noise)
      .def_property_readonly("model_id", [](const CiModel& mdl) { return model_id(mdl); })
      .def("to_dict", [](const CiModel& mdl) { return json_to_python(model_to_json(mdl)); })
      .def_static("from_dict", [](const py::object& d) { return model_from_json(python_to_json(d)); });

  m.def("alpha", py::overload_cast<const ErvParams&, double>(&alpha), py::arg("params"), py::arg("t"));
  m.def("beta", py::overload_cast<const ErvParams&, double>(&beta), py::arg("params"), py::arg("t"));
  m.def("psi", &psi, py::arg("v"), py::arg("rho"), py::arg("kappa_eff"));
  m.def("limit_shift", &limit_shift, py::arg("x"), py::arg("v"), py::arg("params"));

  m.def(
      "kernel_cdf",
      [](const CiModel& model, int coordinate, double x0, double y) {
        return kernel_cdf(model, static_cast<Coordinate>(coordinate - 1), x0, y);
      },
      py::arg("model"), py::arg("coordinate"), py::arg("x0"), py::arg("y"));
  m.def(
      "theoretical_Gv",
      [](const CiModel& model, int coordinate, double v, double x) {
        return theoretical_Gv(model, static_cast<Coordinate>(coordinate - 1), v, x);
      },
      py::arg("model"), py::arg("coordinate"), py::arg("v"), py::arg("x"));

  m.def(
      "draw_exceedances",
      [](const CiModel& model, double t, std::size_t n, std::uint64_t seed, unsigned threads) {
        SimulationOptions opts;
        opts.threads = threads;
        ExceedanceSample s;
        {
          py::gil_scoped_release release;
          s = draw_exceedances(model, t, n, seed, opts);
        }
        return sample_dict(s);
      },
      py::arg("model"), py::arg("t"), py::arg("n"), py::arg("seed"), py::arg("threads") = 1);
  m.def(
      "apply_norming",
      [](const CiModel& model, const py::dict& sample, const std::string& mode) {
        const auto normed = apply_norming(sample_from_dict(sample), model, parse_mode(mode));
        return py::make_tuple(to_array(normed.w1), to_array(normed.w2));
      },
      py::arg("model"), py::arg("sample"), py::arg("mode") = "random");

  m.def(
      "limit_H",
      [](const CiModel& model, double x1, double x2, double abs_tol) {
        return limit_H(model, x1, x2, QuadOptions{abs_tol});
      },
      py::arg("model"), py::arg("x1"), py::arg("x2"), py::arg("abs_tol") = 1e-9);
  m.def(
      "marginal_H",
      [](const CiModel& model, int coordinate, double x, double abs_tol) {
        return marginal_H(model, static_cast<Coordinate>(coordinate - 1), x, QuadOptions{abs_tol});
      },
      py::arg("model"), py::arg("coordinate"), py::arg("x"), py::arg("abs_tol") = 1e-9);
  m.def(
      "factorization_gap",
      [](const CiModel& model, std::vector<double> levels, unsigned threads) {
        const auto g = factorization_gap(model, GridSpec{std::move(levels)}, {}, threads);
        const auto& cell = g.cells.at(g.argmax);
        py::dict d;
        d["gap"] = g.gap;
        d["argmax"] = py::make_tuple(cell.x1, cell.x2);
        d["x1"] = to_array(g.x1);
        d["x2"] = to_array(g.x2);
        return d;
      },
      py::arg("model"), py::arg("levels") = GridSpec::default_levels(), py::arg("threads") = 1);

  m.def(
      "factorization_stat",
      [](const Array& w1, const Array& w2, std::vector<double> levels) {
        return factorization_stat(to_vector(w1), to_vector(w2), levels);
      },
      py::arg("w1"), py::arg("w2"), py::arg("levels") = GridSpec::default_levels());
  m.def(
      "permutation_independence_test",
      [](const Array& w1, const Array& w2, std::size_t b, std::uint64_t seed, std::vector<double> levels,
         unsigned threads) {
        const auto r = permutation_independence_test(to_vector(w1), to_vector(w2), levels, b, seed, threads);
        py::dict d;
        d["statistic"] = r.statistic;
        d["p_value"] = r.p_value;
        d["n"] = r.n;
        d["b"] = r.b;
        d["seed"] = r.seed;
        return d;
      },
      py::arg("w1"), py::arg("w2"), py::arg("b") = 999, py::arg("seed") = 1,
      py::arg("levels") = GridSpec::default_levels(), py::arg("threads") = 1);
  m.def(
      "chi_hat",
      [](const Array& u0, const Array& u1, const Array& u2, double p) {
        return chi_hat(to_vector(u0), to_vector(u1), to_vector(u2), p);
      },
      py::arg("u0"), py::arg("u1"), py::arg("u2"), py::arg("p"));

  m.def(
      "fit_norming",
      [](const Array& y, const Array& x0, const std::string& family, unsigned threads) {
        FitOptions opts;
        opts.threads = threads;
        const auto f = fit_norming(to_vector(y), to_vector(x0), parse_noise_family(family), opts);
        py::dict d;
        d["erv"] = f.erv;
        d["location"] = f.noise.location;
        d["exceedances"] = f.exceedances;
        d["converged"] = f.converged;
        d["objective"] = f.objective;
        d["evaluations"] = f.evaluations;
        return d;
      },
      py::arg("y"), py::arg("x0"), py::arg("family") = "gaussian", py::arg("threads") = 1);

  m.def(
      "run_command",
      [](const std::string& name, const py::object& config) {
        const auto cfg = resolve_config(python_to_json(config), {});
        CommandResult result;
        {
          py::gil_scoped_release release;
          result = run_command(name, cfg);
        }
        py::dict d;
        d["report"] = json_to_python(result.report.to_json());
        d["exit_code"] = result.exit_code();
        d["report_path"] = result.report_path.string();
        return d;
      },
      py::arg("name"), py::arg("config"),
      "Runs a CLI command from a config dict (same schema as the JSON file).");
}
