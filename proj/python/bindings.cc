// Copyright 2026 The aicontrol Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Python bindings: free-energy math, the controller, plants, episodes and the
// harness commands.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>

#include "aic/baselines.h"
#include "aic/config.h"
#include "aic/controller.h"
#include "aic/episode.h"
#include "aic/errors.h"
#include "aic/fd_oracle.h"
#include "aic/gm_core.h"
#include "aic/harness.h"
#include "aic/plants.h"

namespace py = pybind11;

namespace aic {
namespace {

// Scalar, 1-D (diagonal) or 2-D (dense) input.
PrecisionMatrix ToPrecision(const py::object& value, int n) {
  if (py::isinstance<py::float_>(value) || py::isinstance<py::int_>(value)) {
    return PrecisionMatrix::Scalar(n, value.cast<double>());
  }
  const py::array arr = py::array::ensure(value);
  if (!arr) throw ContractViolation("precision must be a number or an array");
  if (arr.ndim() == 1) return PrecisionMatrix::Diagonal(value.cast<Vector>());
  if (arr.ndim() == 2) return PrecisionMatrix::Dense(value.cast<Matrix>());
  throw ContractViolation("precision arrays must be 1-D or 2-D");
}

PrecisionSet MakePrecisions(int n, const py::object& pi_o, const py::object& pi_op,
                            const py::object& pi_mu, const py::object& pi_mup) {
  return {ToPrecision(pi_o, n), ToPrecision(pi_op, n), ToPrecision(pi_mu, n),
          ToPrecision(pi_mup, n)};
}

BeliefIntegrator ParseIntegrator(const std::string& s) {
  if (s == "explicit") return BeliefIntegrator::kExplicit;
  if (s == "implicit") return BeliefIntegrator::kImplicit;
  throw ContractViolation("integrator must be 'explicit' or 'implicit'");
}

py::dict MetricsDict(const MetricsSummary& m) {
  py::dict d;
  d["mae"] = m.mae;
  d["mae_q"] = m.mae_q;
  d["overshoot"] = m.overshoot;
  d["settling_time_2pct"] = m.settling_time_2pct;
  d["settled"] = m.settled;
  d["zero_crossings"] = m.zero_crossings;
  d["zero_crossings_per_joint"] = m.zero_crossings_per_joint;
  d["target_bias"] = m.target_bias;
  d["tracking_error"] = m.tracking_error;
  d["target_pull"] = m.target_pull;
  return d;
}

// Rows stacked into a (ticks, n) matrix.
Matrix Stack(const std::vector<Vector>& rows, int n) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t k = 0; k < rows.size(); ++k) m.row(k) = rows[k].transpose();
  return m;
}

py::dict LogDict(const TrajectoryLog& log) {
  py::dict d;
  d["t"] = Eigen::Map<const Vector>(log.t.data(), log.t.size()).eval();
  d["q"] = Stack(log.q, log.n);
  d["q_dot"] = Stack(log.q_dot, log.n);
  d["o"] = Stack(log.o, log.n);
  d["o_p"] = Stack(log.o_p, log.n);
  d["mu"] = Stack(log.mu, log.n);
  d["mu_p"] = Stack(log.mu_p, log.n);
  d["mu_pp"] = Stack(log.mu_pp, log.n);
  d["a"] = Stack(log.a, log.n);
  d["mu_d"] = Stack(log.mu_d, log.n);
  d["free_energy"] =
      Eigen::Map<const Vector>(log.free_energy.data(), log.free_energy.size()).eval();
  d["beta"] = Stack(log.beta, log.n);
  d["pi_o"] = Stack(log.pi_o, log.n);
  d["pi_op"] = Stack(log.pi_op, log.n);
  if (log.divergence) {
    d["divergence"] = py::dict(py::arg("tick") = log.divergence->tick,
                               py::arg("t") = log.divergence->t,
                               py::arg("message") = log.divergence->message);
  } else {
    d["divergence"] = py::none();
  }
  return d;
}

// Stateful wrapper over ControllerTick.
class Controller {
 public:
  Controller(const Vector& mu, const Vector& mu_p, const Vector& mu_pp,
             const PrecisionSet& precisions, const Vector& beta, const GainSet& gains,
             const LearningSwitches& switches, std::optional<double> action_limit,
             const std::string& integrator, bool control)
      : gains_(gains), switches_(switches), control_(control) {
    options_.action_limit = action_limit;
    options_.integrator = ParseIntegrator(integrator);
    AicSettings s;
    s.gains = gains;
    s.options = options_;
    s.switches = switches;
    s.precisions = precisions;
    s.beta = TemporalScale{beta};
    state_ = InitialState(s, GeneralizedBelief{mu, mu_p, mu_pp});
  }

  Vector Tick(const Vector& o, const Vector& o_p, const Vector& mu_d, double dt) {
    TickResult r = ControllerTick(state_, {o, o_p}, {mu_d}, dt, switches_, gains_,
                                  options_, control_, ticks_);
    ++ticks_;
    free_energy_ = r.free_energy;
    state_ = std::move(r.state);
    return r.action;
  }

  const ControllerState& state() const { return state_; }
  double free_energy() const { return free_energy_; }

 private:
  GainSet gains_;
  LearningSwitches switches_;
  ControllerOptions options_;
  bool control_;
  ControllerState state_;
  std::int64_t ticks_ = 0;
  double free_energy_ = 0.0;
};

int RunOrSweep(bool sweep, const std::string& path, const std::string& out_dir,
               int workers, std::optional<std::uint64_t> seed, bool plots,
               bool trajectories) {
  HarnessOptions o;
  o.out_dir = out_dir;
  o.workers = workers;
  o.seed_override = seed;
  o.emit_plots = plots;
  o.write_trajectories = trajectories;
  std::ostringstream out, err;
  const int code = sweep ? SweepCommand(path, o, out, err) : RunCommand(path, o, out, err);
  if (!err.str().empty()) py::print(err.str(), py::arg("end") = "",
                                    py::arg("file") = py::module_::import("sys").attr("stderr"));
  return code;
}

}  // namespace
}  // namespace aic

PYBIND11_MODULE(_core, m) {
  using namespace aic;
  m.doc() = "Active inference controller core";
  m.attr("__version__") = kToolVersion;

  static py::exception<ContractViolation> contract(m, "ContractViolation",
                                                   PyExc_ValueError);
  static py::exception<DomainError> domain(m, "DomainError", PyExc_ArithmeticError);
  static py::exception<DivergenceError> divergence(m, "DivergenceError",
                                                   PyExc_RuntimeError);
  static py::exception<ConfigError> config(m, "ConfigError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ContractViolation& e) {
      py::set_error(contract, e.what());
    } catch (const DomainError& e) {
      py::set_error(domain, e.what());
    } catch (const DivergenceError& e) {
      py::set_error(divergence, e.what());
    } catch (const ConfigError& e) {
      py::set_error(config, e.what());
    } catch (const ConfigNotFound& e) {
      PyErr_SetString(PyExc_FileNotFoundError, e.what());
    } catch (const OracleFailure& e) {
      PyErr_SetString(PyExc_ArithmeticError, e.what());
    }
  });

  py::class_<GeneralizedBelief>(m, "Belief")
      .def(py::init<Vector, Vector, Vector>(), py::arg("mu"), py::arg("mu_p"),
           py::arg("mu_pp"))
      .def_readwrite("mu", &GeneralizedBelief::mu)
      .def_readwrite("mu_p", &GeneralizedBelief::mu_p)
      .def_readwrite("mu_pp", &GeneralizedBelief::mu_pp);

  py::class_<GeneralizedObservation>(m, "Observation")
      .def(py::init<Vector, Vector>(), py::arg("o"), py::arg("o_p"))
      .def_readwrite("o", &GeneralizedObservation::o)
      .def_readwrite("o_p", &GeneralizedObservation::o_p);

  py::class_<PrecisionSet>(m, "Precisions")
      .def(py::init(&MakePrecisions), py::arg("n"), py::arg("pi_o"), py::arg("pi_op"),
           py::arg("pi_mu"), py::arg("pi_mup"))
      .def_property_readonly("pi_o", [](const PrecisionSet& p) { return p.pi_o.dense(); })
      .def_property_readonly("pi_op", [](const PrecisionSet& p) { return p.pi_op.dense(); })
      .def_property_readonly("pi_mu", [](const PrecisionSet& p) { return p.pi_mu.dense(); })
      .def_property_readonly("pi_mup",
                             [](const PrecisionSet& p) { return p.pi_mup.dense(); });

  py::class_<ErrorSet>(m, "Errors")
      .def(py::init<Vector, Vector, Vector, Vector>(), py::arg("eps_o"),
           py::arg("eps_op"), py::arg("eps_mu"), py::arg("eps_mup"))
      .def_readwrite("eps_o", &ErrorSet::eps_o)
      .def_readwrite("eps_op", &ErrorSet::eps_op)
      .def_readwrite("eps_mu", &ErrorSet::eps_mu)
      .def_readwrite("eps_mup", &ErrorSet::eps_mup);

  m.def(
      "compute_errors",
      [](const GeneralizedBelief& b, const GeneralizedObservation& o, const Vector& mu_d,
         const Vector& beta) { return ComputeErrors(b, o, {mu_d}, TemporalScale{beta}); },
      py::arg("belief"), py::arg("obs"), py::arg("mu_d"), py::arg("beta"));
  m.def("free_energy", &FreeEnergy, py::arg("errors"), py::arg("precisions"));
  m.def(
      "grad_belief",
      [](const ErrorSet& e, const PrecisionSet& p, const Vector& beta) {
        const BeliefGradient g = GradBelief(e, p, TemporalScale{beta});
        return py::make_tuple(g.d_mu, g.d_mu_p, g.d_mu_pp);
      },
      py::arg("errors"), py::arg("precisions"), py::arg("beta"));
  m.def(
      "grad_precision",
      [](const ErrorSet& e, const PrecisionSet& p) {
        const PrecisionGradient g = GradPrecision(e, p);
        return py::make_tuple(g.pi_o, g.pi_op, g.pi_mu, g.pi_mup);
      },
      py::arg("errors"), py::arg("precisions"));
  m.def(
      "grad_beta",
      [](const ErrorSet& e, const PrecisionSet& p, const GeneralizedBelief& b,
         const Vector& mu_d) { return GradBeta(e, p, b, {mu_d}); },
      py::arg("errors"), py::arg("precisions"), py::arg("belief"), py::arg("mu_d"));
  m.def("central_difference", &CentralDifference, py::arg("f"), py::arg("point"),
        py::arg("step") = kDefaultFdStep);
  m.def(
      "gradcheck",
      [](int configurations, std::vector<int> dims, std::uint64_t seed) {
        GradcheckOptions o;
        o.configurations_per_dimension = configurations;
        o.dimensions = std::move(dims);
        o.seed = seed;
        py::dict d;
        for (const auto& r : RunGradcheck(o)) d[py::str(r.family)] = r.worst_error;
        return d;
      },
      py::arg("configurations_per_dimension") = 100,
      py::arg("dimensions") = std::vector<int>{1, 2, 7}, py::arg("seed") = 20201);

  py::class_<GainSet>(m, "Gains")
      .def(py::init([](double mu, double a, double sigma, double tau) {
             return GainSet{mu, a, sigma, tau};
           }),
           py::arg("kappa_mu") = GainSet{}.kappa_mu, py::arg("kappa_a") = GainSet{}.kappa_a,
           py::arg("kappa_sigma") = GainSet{}.kappa_sigma,
           py::arg("kappa_tau") = GainSet{}.kappa_tau)
      .def_readwrite("kappa_mu", &GainSet::kappa_mu)
      .def_readwrite("kappa_a", &GainSet::kappa_a)
      .def_readwrite("kappa_sigma", &GainSet::kappa_sigma)
      .def_readwrite("kappa_tau", &GainSet::kappa_tau);

  py::class_<LearningSwitches>(m, "Learning")
      .def(py::init([](bool pi_o, bool pi_op, bool beta) {
             return LearningSwitches{pi_o, pi_op, beta};
           }),
           py::arg("pi_o") = false, py::arg("pi_op") = false, py::arg("beta") = false)
      .def_readwrite("pi_o", &LearningSwitches::learn_pi_o)
      .def_readwrite("pi_op", &LearningSwitches::learn_pi_op)
      .def_readwrite("beta", &LearningSwitches::learn_beta);

  py::class_<Controller>(m, "Controller")
      .def(py::init<Vector, Vector, Vector, PrecisionSet, Vector, GainSet,
                    LearningSwitches, std::optional<double>, std::string, bool>(),
           py::arg("mu"), py::arg("mu_p"), py::arg("mu_pp"), py::arg("precisions"),
           py::arg("beta"), py::arg("gains") = GainSet{},
           py::arg("learning") = LearningSwitches{}, py::arg("action_limit") = py::none(),
           py::arg("integrator") = "explicit", py::arg("control") = true)
      .def("tick", &Controller::Tick, py::arg("o"), py::arg("o_p"), py::arg("mu_d"),
           py::arg("dt"))
      .def_property_readonly("mu", [](const Controller& c) { return c.state().belief.mu; })
      .def_property_readonly("mu_p",
                             [](const Controller& c) { return c.state().belief.mu_p; })
      .def_property_readonly("mu_pp",
                             [](const Controller& c) { return c.state().belief.mu_pp; })
      .def_property_readonly("action", [](const Controller& c) { return c.state().action; })
      .def_property_readonly("beta", [](const Controller& c) { return c.state().beta.beta; })
      .def_property_readonly("precisions",
                             [](const Controller& c) { return c.state().precisions; })
      .def_property_readonly("free_energy", &Controller::free_energy);

  m.def(
      "msd_step",
      [](const Vector& q, const Vector& q_dot, const Vector& a, double dt, double k1,
         double k2, double mass) {
        const PlantState s = MsdStep({q, q_dot, 0.0}, a, MsdParams{k1, k2, mass}, dt);
        return py::make_tuple(s.q, s.q_dot);
      },
      py::arg("q"), py::arg("q_dot"), py::arg("a"), py::arg("dt"), py::arg("k1") = 1.0,
      py::arg("k2") = 0.1, py::arg("mass") = 1.0);
  m.def(
      "two_link_energy",
      [](const Vector& q, const Vector& q_dot) {
        return TwoLinkEnergy({q, q_dot, 0.0}, TwoLinkParams{});
      },
      py::arg("q"), py::arg("q_dot"));
  m.def(
      "matched_pi_gains",
      [](double kappa_a, const Vector& pi_o, const Vector& pi_op) {
        const PidGains g = MatchedPiGains(kappa_a, PrecisionMatrix::Diagonal(pi_o),
                                          PrecisionMatrix::Diagonal(pi_op));
        return py::make_tuple(g.p, g.i);
      },
      py::arg("kappa_a"), py::arg("pi_o"), py::arg("pi_op"));

  py::class_<RunConfig>(m, "Config")
      .def_readonly("name", &RunConfig::name)
      .def_readonly("seed", &RunConfig::seed)
      .def_property_readonly("hash", [](const RunConfig& c) { return HashHex(ConfigHash(c)); })
      .def("canonical", &SerializeConfig)
      .def("episode_count",
           [](const RunConfig& c) { return PlanEpisodes(c).size(); });
  m.def("parse_config", &ParseConfig, py::arg("text"));
  m.def("load_config", &LoadConfig, py::arg("path"));
  m.def(
      "run_episode",
      [](const RunConfig& c, std::size_t index) {
        const std::vector<PlannedEpisode> plan = PlanEpisodes(c);
        if (index >= plan.size()) throw py::index_error("episode index out of range");
        TrajectoryLog log;
        {
          py::gil_scoped_release release;
          log = RunEpisode(plan[index].config);
        }
        py::dict d = LogDict(log);
        d["metrics"] = log.rows() ? MetricsDict(ComputeMetrics(log)) : py::dict();
        d["axis_value"] = plan[index].axis_value ? py::cast(*plan[index].axis_value)
                                                 : py::none();
        d["learning"] = plan[index].learning;
        return d;
      },
      py::arg("config"), py::arg("index") = 0);
  m.def(
      "run",
      [](const std::string& path, const std::string& out, int workers,
         std::optional<std::uint64_t> seed, bool plots) {
        return RunOrSweep(false, path, out, workers, seed, plots, false);
      },
      py::arg("config_path"), py::arg("out_dir") = "", py::arg("workers") = 1,
      py::arg("seed_override") = py::none(), py::arg("emit_plots") = false);
  m.def(
      "sweep",
      [](const std::string& path, const std::string& out, int workers,
         std::optional<std::uint64_t> seed, bool plots, bool trajectories) {
        return RunOrSweep(true, path, out, workers, seed, plots, trajectories);
      },
      py::arg("sweep_path"), py::arg("out_dir") = "", py::arg("workers") = 1,
      py::arg("seed_override") = py::none(), py::arg("emit_plots") = false,
      py::arg("write_trajectories") = false);
}
