#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bbjsr/errors.h"
#include "bbjsr/harness.h"
#include "bbjsr/report.h"
#include "bbjsr/scenario.h"
#include "bbjsr/specfun.h"
#include "bbjsr/sysmodel.h"
#include "bbjsr/whitebox.h"

namespace py = pybind11;

namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

bbjsr::SampleSet sample_from_arrays(const RowMatrix& x0, const RowMatrix& xl,
                                    std::size_t l) {
  if (x0.rows() != xl.rows() || x0.cols() != xl.cols()) {
    throw bbjsr::DimensionError("x0 and xl must have the same shape");
  }
  bbjsr::SampleSet s;
  s.n = static_cast<std::size_t>(x0.cols());
  s.l = l;
  for (Eigen::Index i = 0; i < x0.rows(); ++i) {
    bbjsr::Trace t;
    t.x0 = x0.row(i).transpose();
    t.states.assign(l, Eigen::VectorXd::Zero(x0.cols()));
    t.states.back() = xl.row(i).transpose();
    s.traces.push_back(std::move(t));
  }
  return s;
}

py::object to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

bbjsr::SwitchedSystem make_system(const std::vector<Eigen::MatrixXd>& modes,
                                  std::optional<std::vector<double>> probs) {
  if (probs) return bbjsr::SwitchedSystem(modes, *probs);
  return bbjsr::SwitchedSystem(modes);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Data-driven bounds on the joint spectral radius";

  py::register_exception<bbjsr::ValidationError>(m, "ValidationError",
                                                 PyExc_ValueError);

  m.def("reg_inc_beta",
        [](double x, double a, double b) {
          return bbjsr::reg_inc_beta(x, {a, b});
        },
        py::arg("x"), py::arg("a"), py::arg("b"));
  m.def("inv_reg_inc_beta",
        [](double y, double a, double b) {
          return bbjsr::inv_reg_inc_beta(y, {a, b});
        },
        py::arg("y"), py::arg("a"), py::arg("b"));
  m.def("scenario_confidence", &bbjsr::scenario_confidence, py::arg("eps"),
        py::arg("N"), py::arg("d"));
  m.def("epsilon_of_beta", &bbjsr::epsilon_of_beta, py::arg("beta"),
        py::arg("N"), py::arg("d"));
  m.def("delta_shrink", &bbjsr::delta_shrink, py::arg("half_measure"),
        py::arg("n"));
  m.def("cap_measure",
        py::overload_cast<std::size_t, double>(&bbjsr::cap_measure),
        py::arg("n"), py::arg("delta_cap"));
  m.def("kappa",
        [](const Eigen::MatrixXd& p) { return bbjsr::kappa(bbjsr::SymMatrix(p)); },
        py::arg("P"));

  m.def("simulate",
        [](const std::vector<Eigen::MatrixXd>& modes, std::size_t n_traces,
           std::size_t l, std::uint64_t seed,
           std::optional<std::vector<double>> probs) {
          const bbjsr::SwitchedSystem sys = make_system(modes, probs);
          bbjsr::Rng rng(seed);
          const bbjsr::SampleSet s =
              bbjsr::generate_sample(sys, n_traces, l, rng);
          RowMatrix x0(s.size(), sys.n());
          RowMatrix xl(s.size(), sys.n());
          for (std::size_t i = 0; i < s.size(); ++i) {
            x0.row(i) = s.traces[i].x0.transpose();
            xl.row(i) = s.traces[i].last().transpose();
          }
          return py::make_tuple(x0, xl);
        },
        py::arg("modes"), py::arg("N"), py::arg("l") = 1,
        py::arg("seed") = 1, py::arg("probs") = py::none(),
        "Sample N black-box traces; returns (x0, x_l) as N x n arrays.");

  m.def("analyze",
        [](const RowMatrix& x0, const RowMatrix& xl, std::size_t l,
           std::optional<std::size_t> m_claimed,
           std::optional<double> min_mode_prob, double beta, double eta,
           double alpha) {
          bbjsr::BoundsConfig cfg;
          cfg.beta = beta;
          cfg.eta = eta;
          cfg.alpha = alpha;
          cfg.m_claimed = m_claimed;
          cfg.min_mode_prob = min_mode_prob;
          return to_py(bbjsr::to_json(
              bbjsr::analyze(sample_from_arrays(x0, xl, l), cfg)));
        },
        py::arg("x0"), py::arg("xl"), py::arg("l") = 1,
        py::arg("m") = py::none(), py::arg("min_mode_prob") = py::none(),
        py::arg("beta") = 0.95, py::arg("eta") = 0.0, py::arg("alpha") = 1e-3,
        "Bounds from initial states x0 and states x_l after l steps.");

  m.def("jsr_bruteforce",
        [](const std::vector<Eigen::MatrixXd>& modes, std::size_t depth) {
          return to_py(bbjsr::to_json(
              bbjsr::jsr_bruteforce(bbjsr::SwitchedSystem(modes), depth)));
        },
        py::arg("modes"), py::arg("depth") = 8);
  m.def("jsr_cqf_upper",
        [](const std::vector<Eigen::MatrixXd>& modes, std::size_t l,
           double alpha) {
          return bbjsr::jsr_cqf_upper(bbjsr::SwitchedSystem(modes), l, alpha);
        },
        py::arg("modes"), py::arg("l") = 1, py::arg("alpha") = 1e-3);
  m.def("true_rho",
        [](const std::vector<Eigen::MatrixXd>& modes, std::size_t depth,
           std::size_t l) {
          return to_py(bbjsr::to_json(bbjsr::true_rho_for_validation(
              bbjsr::SwitchedSystem(modes), depth, l)));
        },
        py::arg("modes"), py::arg("depth") = 8, py::arg("l") = 1);
  m.def("netctl_modes",
        [](std::size_t users, const std::string& realization) {
          const bbjsr::SwitchedSystem s = bbjsr::netctl_system(
              users, bbjsr::parse_netctl_realization(realization));
          return py::make_tuple(s.modes(), s.mode_probs());
        },
        py::arg("users") = 3, py::arg("realization") = "companion");
}
