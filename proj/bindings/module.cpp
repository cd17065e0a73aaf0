// Python bindings for the core operations: models, exact oracles, samplers,
// tuning, diagnostics and the perturbation-bound machinery.

#include <optional>
#include <variant>

#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "grfmcmc/bounds.hpp"
#include "grfmcmc/diagnostics.hpp"
#include "grfmcmc/gibbs.hpp"
#include "grfmcmc/io.hpp"
#include "grfmcmc/model.hpp"
#include "grfmcmc/oracle.hpp"
#include "grfmcmc/samplers.hpp"
#include "grfmcmc/tuning.hpp"

namespace py = pybind11;
using namespace grfmcmc;

// GrfState's first alternative (SpinLattice) has no default constructor, so
// the stock variant caster cannot hold it; stage the value in an optional.
namespace pybind11::detail {

template <>
struct type_caster<GrfState> {
 public:
  static constexpr auto name = const_name("Union[SpinLattice, UndirectedGraph]");

  bool load(handle src, bool convert) {
    make_caster<SpinLattice> lat;
    if (lat.load(src, convert)) {
      value.emplace(cast_op<SpinLattice&>(lat));
      return true;
    }
    make_caster<UndirectedGraph> graph;
    if (graph.load(src, convert)) {
      value.emplace(cast_op<UndirectedGraph&>(graph));
      return true;
    }
    return false;
  }

  static handle cast(const GrfState& src, return_value_policy policy, handle parent) {
    return std::visit(
        [&](const auto& alt) -> handle {
          return make_caster<std::decay_t<decltype(alt)>>::cast(alt, policy, parent);
        },
        src);
  }

  static handle cast(GrfState&& src, return_value_policy policy, handle parent) {
    return std::visit(
        [&](auto&& alt) -> handle {
          return make_caster<std::decay_t<decltype(alt)>>::cast(std::move(alt), policy, parent);
        },
        std::move(src));
  }

  operator GrfState*() { return &*value; }
  operator GrfState&() { return *value; }
  operator GrfState&&() && { return std::move(*value); }
  template <typename T>
  using cast_op_type = movable_cast_op_type<T>;

 private:
  std::optional<GrfState> value;
};

}  // namespace pybind11::detail

namespace {

std::vector<ErgmStat> stats_from_names(const std::vector<std::string>& names) {
  std::vector<ErgmStat> stats;
  stats.reserve(names.size());
  for (const auto& n : names) stats.push_back(ergm_stat_from_name(n));
  return stats;
}

MatrixXd trace_thetas(const Trace& tr) {
  MatrixXd m(static_cast<Eigen::Index>(tr.states.size()), tr.dim());
  for (std::size_t i = 0; i < tr.states.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = tr.states[i];
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gibbs random field samplers, exact oracles and perturbation bounds";
#ifdef GRFMCMC_VERSION
  m.attr("__version__") = GRFMCMC_VERSION;
#else
  m.attr("__version__") = "dev";
#endif

  py::register_exception<OracleRefusalError>(m, "OracleRefusal");
  py::register_exception<ContractError>(m, "ContractViolation", PyExc_ValueError);

  // -- states -----------------------------------------------------------
  py::class_<SpinLattice>(m, "SpinLattice")
      .def(py::init([](int h, int w, int fill) {
             return SpinLattice(h, w, static_cast<std::int8_t>(fill));
           }),
           py::arg("height"), py::arg("width"), py::arg("fill") = -1)
      .def_property_readonly("height", &SpinLattice::height)
      .def_property_readonly("width", &SpinLattice::width)
      .def("spin", py::overload_cast<int, int>(&SpinLattice::spin, py::const_), py::arg("row"),
           py::arg("col"))
      .def("set", &SpinLattice::set, py::arg("row"), py::arg("col"), py::arg("value"))
      .def("flip", &SpinLattice::flip, py::arg("index"))
      .def(py::self == py::self)
      .def("__repr__", [](const SpinLattice& l) {
        return "SpinLattice(" + std::to_string(l.height()) + "x" + std::to_string(l.width()) + ")";
      });

  py::class_<UndirectedGraph>(m, "UndirectedGraph")
      .def(py::init<int>(), py::arg("n_nodes"))
      .def_property_readonly("n_nodes", &UndirectedGraph::n_nodes)
      .def_property_readonly("n_dyads", &UndirectedGraph::n_dyads)
      .def("edge", &UndirectedGraph::edge, py::arg("i"), py::arg("j"))
      .def("set_edge", &UndirectedGraph::set_edge, py::arg("i"), py::arg("j"), py::arg("present"))
      .def("degree", &UndirectedGraph::degree, py::arg("i"))
      .def(py::self == py::self)
      .def("__repr__", [](const UndirectedGraph& g) {
        return "UndirectedGraph(" + std::to_string(g.n_nodes()) + " nodes)";
      });

  // -- model ------------------------------------------------------------
  py::class_<GaussianPrior>(m, "GaussianPrior")
      .def_static("iso", &GaussianPrior::iso, py::arg("dim"), py::arg("mean") = 0.0,
                  py::arg("variance") = 100.0)
      .def_readwrite("mean", &GaussianPrior::mean)
      .def_readwrite("variance", &GaussianPrior::variance)
      .def("log_density", &GaussianPrior::log_density)
      .def("grad_log_density", &GaussianPrior::grad_log_density);

  py::class_<GrfModel>(m, "GrfModel")
      .def_static(
          "ising",
          [](int h, int w, const GaussianPrior* prior) {
            return prior ? GrfModel::ising(h, w, *prior) : GrfModel::ising(h, w);
          },
          py::arg("height"), py::arg("width"), py::arg("prior") = nullptr)
      .def_static(
          "ergm",
          [](int n, const std::vector<std::string>& stats, const GaussianPrior* prior) {
            auto ss = stats_from_names(stats);
            return prior ? GrfModel::ergm(n, ss, *prior) : GrfModel::ergm(n, ss);
          },
          py::arg("n_nodes"), py::arg("stats"), py::arg("prior") = nullptr)
      .def_property_readonly("kind",
                             [](const GrfModel& mo) {
                               return mo.kind() == GrfModel::Kind::Ising ? "ising" : "ergm";
                             })
      .def_property_readonly("dim", &GrfModel::dim)
      .def_property_readonly("n_sites", &GrfModel::n_sites)
      .def_property_readonly("prior", &GrfModel::prior)
      .def_property_readonly("stat_bound", &GrfModel::stat_bound)
      .def("suffstats", &GrfModel::suffstats, py::arg("y"))
      .def("unnorm_logdensity", &GrfModel::unnorm_logdensity, py::arg("theta"), py::arg("y"))
      .def("reference_state", &GrfModel::reference_state);

  // -- exact oracles ------------------------------------------------------
  m.def("ising_transfer_log_z", &ising_transfer_log_z, py::arg("height"), py::arg("width"),
        py::arg("theta"));
  m.def("brute_force_log_z", &brute_force_log_z, py::arg("model"), py::arg("theta"));
  m.def("exact_moments", &exact_moments, py::arg("model"), py::arg("theta"));

  py::class_<PosteriorGrid>(m, "PosteriorGrid")
      .def_readonly("grid", &PosteriorGrid::grid)
      .def_readonly("log_post", &PosteriorGrid::log_post)
      .def_readonly("density", &PosteriorGrid::density)
      .def_readonly("cdf", &PosteriorGrid::cdf)
      .def_readonly("log_normalizer", &PosteriorGrid::log_normalizer)
      .def("quantile", &PosteriorGrid::quantile, py::arg("u"))
      .def("cdf_at", &PosteriorGrid::cdf_at, py::arg("theta"));

  py::class_<GridSummaries>(m, "GridSummaries")
      .def_readonly("mean", &GridSummaries::mean)
      .def_readonly("sd", &GridSummaries::sd)
      .def_readonly("argmax", &GridSummaries::argmax);

  m.def(
      "exact_posterior_grid",
      [](const GrfModel& model, const GrfState& y, double lo, double hi, int points) {
        return exact_posterior_grid(model, y, lo, hi, points);
      },
      py::arg("model"), py::arg("y"), py::arg("theta_min"), py::arg("theta_max"),
      py::arg("grid_points"));
  m.def("grid_summaries", &grid_summaries, py::arg("grid"));

  // -- sampling -----------------------------------------------------------
  py::class_<Budget>(m, "Budget")
      .def(py::init<>())
      .def_readwrite("iterations", &Budget::iterations)
      .def_readwrite("seconds", &Budget::seconds);

  py::class_<SamplerConfig>(m, "SamplerConfig")
      .def(py::init<>())
      .def_readwrite("n_aux", &SamplerConfig::n_aux)
      .def_readwrite("aux_burnin", &SamplerConfig::aux_burnin)
      .def_readwrite("aux_thin", &SamplerConfig::aux_thin)
      .def_readwrite("rw_scale", &SamplerConfig::rw_scale)
      .def_readwrite("step_matrix", &SamplerConfig::step_matrix)
      .def_readwrite("theta0", &SamplerConfig::theta0)
      .def_readwrite("seed", &SamplerConfig::seed)
      .def_readwrite("budget", &SamplerConfig::budget);

  py::class_<Trace>(m, "Trace")
      .def_readonly("algorithm", &Trace::algorithm)
      .def_readonly("seed", &Trace::seed)
      .def_readonly("accepted", &Trace::accepted)
      .def_property_readonly("thetas", &trace_thetas)
      .def_property_readonly("n_steps", &Trace::n_steps)
      .def_property_readonly("dim", &Trace::dim)
      .def("acceptance_rate", &Trace::acceptance_rate);

  m.def("algorithms", [] {
    return std::vector<std::string>{"exact-mh",      "exchange",      "noisy-exchange",
                                    "noisy-langevin", "mala-exchange", "noisy-mala-exchange"};
  });
  m.def(
      "run_chain",
      [](const std::string& algorithm, const GrfModel& model, const GrfState& y,
         const SamplerConfig& cfg) {
        return run_chain(algorithm_from_name(algorithm), model, y, cfg);
      },
      py::arg("algorithm"), py::arg("model"), py::arg("y"), py::arg("config"));
  m.def(
      "draw_auxiliary_stats",
      [](const GrfModel& model, const VectorXd& theta, int count, int burnin, int thin,
         std::uint64_t seed) {
        RngStream rng(seed);
        return draw_auxiliary_stats(model, theta, count, burnin, thin, rng);
      },
      py::arg("model"), py::arg("theta"), py::arg("count"), py::arg("burnin"), py::arg("thin"),
      py::arg("seed"));

  // -- tuning ---------------------------------------------------------------
  py::class_<RmSchedule>(m, "RmSchedule")
      .def(py::init<>())
      .def_readwrite("a", &RmSchedule::a)
      .def_readwrite("b", &RmSchedule::b)
      .def_readwrite("tol", &RmSchedule::tol)
      .def_readwrite("max_iter", &RmSchedule::max_iter);

  py::class_<RmResult>(m, "RmResult")
      .def_readonly("theta", &RmResult::theta)
      .def_readonly("converged", &RmResult::converged)
      .def_readonly("iterations", &RmResult::iterations);

  py::class_<TuneReport>(m, "TuneReport")
      .def_readonly("theta_star", &TuneReport::theta_star)
      .def_readonly("rm_converged", &TuneReport::rm_converged)
      .def_readonly("rm_iterations", &TuneReport::rm_iterations)
      .def_readonly("hessian", &TuneReport::hessian)
      .def_readonly("scale", &TuneReport::scale)
      .def_readonly("step_matrix", &TuneReport::step_matrix)
      .def_readonly("acceptance", &TuneReport::acceptance)
      .def_readonly("pilot_runs", &TuneReport::pilot_runs);

  m.def(
      "robbins_monro_map",
      [](const GrfModel& model, const GrfState& y, const RmSchedule& sched,
         const SamplerConfig& cfg, std::uint64_t seed) {
        RngStream rng(seed);
        return robbins_monro_map(model, y, sched, cfg, rng);
      },
      py::arg("model"), py::arg("y"), py::arg("schedule"), py::arg("config"), py::arg("seed"));
  m.def(
      "estimate_log_posterior_hessian",
      [](const GrfModel& model, const GrfState& y, const VectorXd& theta_star, int n_draws,
         const SamplerConfig& cfg, std::uint64_t seed) {
        RngStream rng(seed);
        return estimate_log_posterior_hessian(model, y, theta_star, n_draws, cfg, rng);
      },
      py::arg("model"), py::arg("y"), py::arg("theta_star"), py::arg("n_draws"), py::arg("config"),
      py::arg("seed"));
  m.def("tune_step_matrix", &tune_step_matrix, py::arg("hessian"), py::arg("scale"));
  m.def(
      "tune_pipeline",
      [](const GrfModel& model, const GrfState& y, const std::string& pilot_alg,
         const RmSchedule& sched, const SamplerConfig& cfg, int hessian_draws,
         double target_acceptance, double target_band, long pilot_iters, int max_rounds,
         std::uint64_t seed) {
        RngStream rng(seed);
        return tune_pipeline(model, y, algorithm_from_name(pilot_alg), sched, cfg, hessian_draws,
                             target_acceptance, target_band, pilot_iters, max_rounds, rng);
      },
      py::arg("model"), py::arg("y"), py::arg("pilot_algorithm"), py::arg("schedule"),
      py::arg("config"), py::arg("hessian_draws") = 4000, py::arg("target_acceptance") = 0.25,
      py::arg("target_band") = 0.10, py::arg("pilot_iters") = 2000, py::arg("max_rounds") = 5,
      py::arg("seed") = 1);

  // -- diagnostics ------------------------------------------------------
  py::class_<TraceSummary>(m, "TraceSummary")
      .def_readonly("n_total", &TraceSummary::n_total)
      .def_readonly("n_used", &TraceSummary::n_used)
      .def_readonly("mean", &TraceSummary::mean)
      .def_readonly("sd", &TraceSummary::sd)
      .def_readonly("acf", &TraceSummary::acf)
      .def_readonly("ess", &TraceSummary::ess)
      .def_readonly("acceptance_rate", &TraceSummary::acceptance_rate)
      .def_readonly("bias", &TraceSummary::bias)
      .def_readonly("degenerate", &TraceSummary::degenerate);

  m.def(
      "trace_summaries",
      [](const Trace& tr, double burnin_fraction, int max_lag, const PosteriorGrid* reference) {
        return trace_summaries(tr, burnin_fraction, max_lag, reference);
      },
      py::arg("trace"), py::arg("burnin_fraction") = 0.2, py::arg("max_lag") = 50,
      py::arg("reference") = nullptr);

  py::class_<GofResult>(m, "GofResult")
      .def_readonly("statistic", &GofResult::statistic)
      .def_readonly("p_value", &GofResult::p_value)
      .def_readonly("dof", &GofResult::dof);

  m.def(
      "chi_squared_gof",
      [](const std::vector<double>& samples, const PosteriorGrid& grid, int n_bins) {
        return chi_squared_gof(samples, grid, n_bins);
      },
      py::arg("samples"), py::arg("grid"), py::arg("n_bins"));

  // -- perturbation bounds --------------------------------------------------
  py::class_<ErgodicityCert>(m, "ErgodicityCert")
      .def_readonly("c", &ErgodicityCert::c)
      .def_readonly("rho", &ErgodicityCert::rho)
      .def_property_readonly("method",
                             [](const ErgodicityCert& c) { return cert_method_name(c.method); })
      .def("lambda_", &ErgodicityCert::lambda)
      .def("prefactor", &ErgodicityCert::prefactor);

  py::class_<BoundReport>(m, "BoundReport")
      .def_readonly("kappa", &BoundReport::kappa)
      .def_readonly("lambda_", &BoundReport::lambda)
      .def_readonly("bound", &BoundReport::bound)
      .def_readonly("per_n_tv", &BoundReport::per_n_tv)
      .def_readonly("worst_slack", &BoundReport::worst_slack)
      .def_readonly("violated", &BoundReport::violated);

  py::class_<Theorem3Constants>(m, "Theorem3Constants")
      .def_readonly("c", &Theorem3Constants::c)
      .def_readonly("rho", &Theorem3Constants::rho)
      .def_readonly("lambda_", &Theorem3Constants::lambda)
      .def_readonly("prefactor", &Theorem3Constants::prefactor)
      .def_readonly("delta_bound", &Theorem3Constants::delta_bound)
      .def_readonly("total_bound", &Theorem3Constants::total_bound);

  py::class_<LangevinDeltaBound>(m, "LangevinDeltaBound")
      .def_readonly("threshold", &LangevinDeltaBound::threshold)
      .def_readonly("delta", &LangevinDeltaBound::delta)
      .def_readonly("asymptotic", &LangevinDeltaBound::asymptotic)
      .def_readonly("kernel_bound", &LangevinDeltaBound::kernel_bound)
      .def_readonly("kernel_bound_loose", &LangevinDeltaBound::kernel_bound_loose);

  m.def(
      "ergodicity_cert",
      [](const MatrixXd& p) { return ergodicity_cert(StochasticMatrix(p)); }, py::arg("p"));
  m.def(
      "verify_perturbation",
      [](const MatrixXd& p, const MatrixXd& p_hat, int n_max) {
        return verify_perturbation(StochasticMatrix(p), StochasticMatrix(p_hat), n_max);
      },
      py::arg("p"), py::arg("p_hat"), py::arg("n_max"));
  m.def(
      "tv_kernel_distance",
      [](const MatrixXd& p, const MatrixXd& q) {
        return tv_kernel_distance(StochasticMatrix(p), StochasticMatrix(q));
      },
      py::arg("p"), py::arg("q"));
  m.def("theorem3_constants", &theorem3_constants, py::arg("c_pi"), py::arg("c_h"),
        py::arg("k_bound"), py::arg("n_aux"));
  m.def("langevin_delta_bound", &langevin_delta_bound, py::arg("k_dim"), py::arg("s_bound"),
        py::arg("sigma_norm"), py::arg("n_aux"));

  // -- io --------------------------------------------------------------------
  m.def("load_lattice", &load_lattice, py::arg("path"));
  m.def("save_lattice", &save_lattice, py::arg("lattice"), py::arg("path"));
  m.def("load_graph", &load_graph, py::arg("path"));
  m.def("save_graph", &save_graph, py::arg("graph"), py::arg("path"));
  m.def("write_trace_csv", &write_trace_csv, py::arg("trace"), py::arg("path"));
  m.def("write_posterior_csv", &write_posterior_csv, py::arg("grid"), py::arg("path"));
}
