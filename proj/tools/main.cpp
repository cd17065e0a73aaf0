// Command-line front end: model fitting, exact posteriors, proposal tuning,
// the two studies, and the perturbation-bound checker.
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "grfmcmc/bounds.hpp"
#include "grfmcmc/diagnostics.hpp"
#include "grfmcmc/errors.hpp"
#include "grfmcmc/io.hpp"
#include "grfmcmc/samplers.hpp"
#include "grfmcmc/studies.hpp"
#include "grfmcmc/tuning.hpp"

namespace fs = std::filesystem;
using namespace grfmcmc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;
constexpr int kExitOracleRefusal = 3;
constexpr int kExitBoundViolation = 4;

struct GlobalOpts {
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir = ".";
  std::string config_path;

  json config_or_empty() const {
    return config_path.empty() ? json::object() : load_json(config_path);
  }

  std::string in_out_dir(const std::string& name) const {
    fs::create_directories(out_dir);
    return (fs::path(out_dir) / name).string();
  }
};

std::vector<ErgmStat> parse_stat_names(const std::vector<std::string>& names) {
  std::vector<ErgmStat> stats;
  stats.reserve(names.size());
  for (const auto& n : names) stats.push_back(ergm_stat_from_name(n));
  return stats;
}

GrfModel build_model(const std::string& kind, const GrfState& data,
                     const std::vector<std::string>& stat_names, double prior_mean,
                     double prior_sd) {
  if (prior_sd <= 0.0) throw ContractError("--prior-sd must be positive");
  auto stats = parse_stat_names(stat_names);
  if (kind == "ising") {
    const auto* lat = std::get_if<SpinLattice>(&data);
    if (!lat) throw ContractError("--model ising needs a lattice data file");
    return GrfModel::ising(lat->height(), lat->width(),
                           GaussianPrior::iso(1, prior_mean, prior_sd * prior_sd));
  }
  if (kind == "ergm") {
    const auto* g = std::get_if<UndirectedGraph>(&data);
    if (!g) throw ContractError("--model ergm needs a graph data file");
    return GrfModel::ergm(g->n_nodes(), stats,
                          GaussianPrior::iso(static_cast<int>(stats.size()), prior_mean,
                                             prior_sd * prior_sd));
  }
  throw ContractError("unknown model kind '" + kind + "'");
}

GrfState load_data(const std::string& kind, const std::string& path) {
  if (kind == "ising") return load_lattice(path);
  if (kind == "ergm") return load_graph(path);
  throw ContractError("unknown model kind '" + kind + "'");
}

json tune_report_to_json(const TuneReport& rep) {
  auto vec = [](const VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  auto mat = [](const MatrixXd& m) {
    std::vector<std::vector<double>> rows;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      std::vector<double> row;
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  json j;
  j["theta_star"] = vec(rep.theta_star);
  j["rm_converged"] = rep.rm_converged;
  j["rm_iterations"] = rep.rm_iterations;
  j["hessian"] = mat(rep.hessian);
  j["scale"] = rep.scale;
  j["step_matrix"] = mat(rep.step_matrix);
  j["acceptance"] = rep.acceptance;
  j["pilot_runs"] = rep.pilot_runs;
  return j;
}

MatrixXd matrix_from_json(const json& rows_json, const std::string& where) {
  auto rows = rows_json.get<std::vector<std::vector<double>>>();
  if (rows.empty()) throw ParseError(where + ": empty matrix");
  MatrixXd m(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) throw ParseError(where + ": ragged matrix");
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return m;
}

struct RunOpts {
  std::string algorithm;
  std::string model = "ising";
  std::string data_path;
  std::vector<std::string> stat_names = {"edges", "two-stars"};
  double prior_mean = 0.0;
  double prior_sd = 10.0;
  std::string out_path;
  long iterations = -1;
  double seconds = -1.0;
};

int cmd_run(const GlobalOpts& g, const RunOpts& o) {
  GrfState data = load_data(o.model, o.data_path);
  GrfModel model = build_model(o.model, data, o.stat_names, o.prior_mean, o.prior_sd);
  Algorithm alg = algorithm_from_name(o.algorithm);

  SamplerConfig cfg;
  json jcfg = g.config_or_empty();
  if (!jcfg.empty()) cfg = sampler_config_from_json(jcfg);
  if (g.seed_set) cfg.seed = g.seed;
  if (o.iterations >= 0) {
    cfg.budget.iterations = o.iterations;
    cfg.budget.seconds = 0.0;
  }
  if (o.seconds >= 0.0) cfg.budget.seconds = o.seconds;

  Trace trace = run_chain(alg, model, data, cfg);
  std::string out = o.out_path.empty() ? g.in_out_dir("trace.csv") : o.out_path;
  write_trace_csv(trace, out);

  auto sums = trace_summaries(trace);
  std::cout << "algorithm=" << trace.algorithm << " steps=" << trace.n_steps()
            << " acceptance=" << fmt_g(sums.acceptance_rate, 6) << " mean=(";
  for (int p = 0; p < trace.dim(); ++p)
    std::cout << (p ? "," : "") << fmt_g(sums.mean[p], 6);
  std::cout << ") out=" << out << "\n";
  return kExitOk;
}

struct PosteriorOpts {
  std::string lattice_path;
  double theta_min = -0.4;
  double theta_max = 0.8;
  int grid_points = 241;
  double prior_mean = 0.0;
  double prior_sd = 10.0;
  std::string out_path;
};

int cmd_exact_posterior(const GlobalOpts& g, const PosteriorOpts& o) {
  SpinLattice y = load_lattice(o.lattice_path);
  GrfModel model = GrfModel::ising(y.height(), y.width(),
                                   GaussianPrior::iso(1, o.prior_mean, o.prior_sd * o.prior_sd));
  PosteriorGrid grid =
      exact_posterior_grid(model, GrfState(y), o.theta_min, o.theta_max, o.grid_points);
  if (o.out_path.empty()) {
    std::cout << "theta,density\n";
    for (Eigen::Index i = 0; i < grid.grid.size(); ++i)
      std::cout << fmt_g(grid.grid[i], 17) << ',' << fmt_g(grid.density[i], 17) << '\n';
  } else {
    fs::path p(o.out_path);
    std::string out = p.is_absolute() ? o.out_path : g.in_out_dir(o.out_path);
    write_posterior_csv(grid, out);
    auto s = grid_summaries(grid);
    std::cout << "grid_points=" << o.grid_points << " mean=" << fmt_g(s.mean, 6)
              << " sd=" << fmt_g(s.sd, 6) << " argmax=" << fmt_g(s.argmax, 6) << " out=" << out
              << "\n";
  }
  return kExitOk;
}

struct TuneOpts {
  std::string model = "ising";
  std::string data_path;
  std::vector<std::string> stat_names = {"edges", "two-stars"};
  double prior_mean = 0.0;
  double prior_sd = 10.0;
  std::string out_path = "tuned.json";
  std::string pilot_alg = "mala-exchange";
  int hessian_draws = 4000;
  double target_acceptance = 0.25;
  double target_band = 0.10;
  long pilot_iters = 2000;
  int max_rounds = 5;
};

int cmd_tune(const GlobalOpts& g, const TuneOpts& o) {
  GrfState data = load_data(o.model, o.data_path);
  GrfModel model = build_model(o.model, data, o.stat_names, o.prior_mean, o.prior_sd);

  SamplerConfig cfg;
  json jcfg = g.config_or_empty();
  if (!jcfg.empty()) cfg = sampler_config_from_json(jcfg);
  if (g.seed_set) cfg.seed = g.seed;

  RngStream rng(cfg.seed);
  RmSchedule schedule;
  TuneReport rep = tune_pipeline(model, data, algorithm_from_name(o.pilot_alg), schedule, cfg,
                                 o.hessian_draws, o.target_acceptance, o.target_band,
                                 o.pilot_iters, o.max_rounds, rng);

  fs::path p(o.out_path);
  std::string out = p.is_absolute() ? o.out_path : g.in_out_dir(o.out_path);
  write_json(tune_report_to_json(rep), out);
  std::cout << "theta_star=(";
  for (Eigen::Index i = 0; i < rep.theta_star.size(); ++i)
    std::cout << (i ? "," : "") << fmt_g(rep.theta_star[i], 6);
  std::cout << ") scale=" << fmt_g(rep.scale, 6) << " acceptance=" << fmt_g(rep.acceptance, 6)
            << " rm_converged=" << (rep.rm_converged ? "yes" : "no") << " out=" << out << "\n";
  return kExitOk;
}

int cmd_ising_study(const GlobalOpts& g) {
  StudyConfig cfg;
  json jcfg = g.config_or_empty();
  if (!jcfg.empty()) cfg = study_config_from_json(jcfg);
  if (g.seed_set) cfg.seed = g.seed;

  StudyReport rep = ising_bias_study(cfg);
  write_study_outputs(rep, cfg, g.out_dir);
  for (const auto& a : rep.aggregates)
    std::cout << a.algorithm << ": mean|bias|=" << fmt_g(a.mean_abs_bias, 6) << " se="
              << fmt_g(a.se_abs_bias, 6) << " mean_ess=" << fmt_g(a.mean_ess, 6) << " (n=" << a.n
              << ")\n";
  std::cout << "outputs in " << g.out_dir << "\n";
  return kExitOk;
}

struct ErgmRunOpts {
  std::string data_path;
  std::string tuned_path;
};

int cmd_ergm_run(const GlobalOpts& g, const ErgmRunOpts& o) {
  UndirectedGraph graph = load_graph(o.data_path);

  ErgmStudyConfig cfg;
  json jcfg = g.config_or_empty();
  if (!jcfg.empty()) cfg = ergm_study_config_from_json(jcfg);
  if (g.seed_set) cfg.seed = g.seed;

  if (!o.tuned_path.empty()) {
    json tuned = load_json(o.tuned_path);
    try {
      cfg.sampler.step_matrix = matrix_from_json(tuned.at("step_matrix"), o.tuned_path);
      auto v = tuned.at("theta_star").get<std::vector<double>>();
      cfg.sampler.theta0 = Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    } catch (const json::exception& e) {
      throw ParseError(o.tuned_path + ": " + e.what());
    }
    cfg.tune_inline = false;
  }

  ErgmStudyReport rep = ergm_study(graph, cfg);
  write_ergm_outputs(rep, cfg, g.out_dir);
  for (const auto& row : rep.rows) {
    std::cout << row.algorithm << ": mean=(";
    for (Eigen::Index i = 0; i < row.mean.size(); ++i)
      std::cout << (i ? "," : "") << fmt_g(row.mean[i], 6);
    std::cout << ") sd=(";
    for (Eigen::Index i = 0; i < row.sd.size(); ++i)
      std::cout << (i ? "," : "") << fmt_g(row.sd[i], 6);
    std::cout << ") acceptance=" << fmt_g(row.acceptance, 6) << "\n";
  }
  std::cout << "outputs in " << g.out_dir << "\n";
  return kExitOk;
}

struct VerifyOpts {
  int states = 8;
  int pairs = 200;
  double kappa_max = 0.05;
  int n_max = 200;
  std::string out_path;
};

int cmd_verify_bounds(const GlobalOpts& g, const VerifyOpts& o) {
  if (o.states < 2) throw ContractError("--states must be at least 2");
  if (o.pairs < 1) throw ContractError("--pairs must be at least 1");
  if (o.kappa_max <= 0.0) throw ContractError("--kappa-max must be positive");
  if (o.n_max < 1) throw ContractError("--n-max must be at least 1");

  RngStream master(g.seed_set ? g.seed : 1);
  int violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < o.pairs; ++i) {
    RngStream rng = master.substream(static_cast<std::uint64_t>(i));
    StochasticMatrix p = random_stochastic_matrix(o.states, rng);
    StochasticMatrix p_hat = perturb_stochastic_matrix(p, o.kappa_max, rng);
    BoundReport rep = verify_perturbation(p, p_hat, o.n_max);
    if (rep.violated) ++violations;
    worst_slack = std::min(worst_slack, rep.worst_slack);
  }

  json report;
  report["pairs_tested"] = o.pairs;
  report["violations"] = violations;
  report["worst_slack"] = worst_slack;
  report["states"] = o.states;
  report["kappa_max"] = o.kappa_max;
  report["n_max"] = o.n_max;
  report["seed"] = g.seed_set ? g.seed : 1;
  std::cout << report.dump(2) << "\n";
  if (!o.out_path.empty()) {
    fs::path p(o.out_path);
    write_json(report, p.is_absolute() ? o.out_path : g.in_out_dir(o.out_path));
  }
  return violations > 0 ? kExitBoundViolation : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gibbs random field samplers, oracles and perturbation-bound checks"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "Master RNG seed (overrides config seeds)")
      ->each([&](const std::string&) { g.seed_set = true; });
  app.add_option("--out-dir", g.out_dir, "Directory for emitted files")->capture_default_str();
  app.add_option("--config", g.config_path, "JSON configuration file (schema per subcommand)")
      ->check(CLI::ExistingFile);

  RunOpts run_o;
  CLI::App* c_run = app.add_subcommand("run", "Run one MCMC chain and write its trace CSV");
  c_run->fallthrough();
  c_run->add_option("--algorithm", run_o.algorithm,
                    "exact-mh|exchange|noisy-exchange|noisy-langevin|mala-exchange|noisy-mala-exchange")
      ->required();
  c_run->add_option("--model", run_o.model, "ising|ergm")->capture_default_str();
  c_run->add_option("--data", run_o.data_path, "Observed lattice or edge-list file")
      ->required()
      ->check(CLI::ExistingFile);
  c_run->add_option("--stats", run_o.stat_names,
                    "ERGM statistics (edges,two-stars,three-stars,triangles)")
      ->delimiter(',')
      ->capture_default_str();
  c_run->add_option("--prior-mean", run_o.prior_mean, "Gaussian prior mean")->capture_default_str();
  c_run->add_option("--prior-sd", run_o.prior_sd, "Gaussian prior standard deviation")
      ->capture_default_str();
  c_run->add_option("--out", run_o.out_path, "Trace CSV path (default <out-dir>/trace.csv)");
  c_run->add_option("--iterations", run_o.iterations, "Override the iteration budget");
  c_run->add_option("--seconds", run_o.seconds, "Override with a wall-clock budget");

  PosteriorOpts post_o;
  CLI::App* c_post =
      app.add_subcommand("exact-posterior", "Exact single-parameter posterior on a grid");
  c_post->fallthrough();
  c_post->add_option("--lattice", post_o.lattice_path, "Observed lattice file")
      ->required()
      ->check(CLI::ExistingFile);
  c_post->add_option("--theta-min", post_o.theta_min, "Grid lower end")->capture_default_str();
  c_post->add_option("--theta-max", post_o.theta_max, "Grid upper end")->capture_default_str();
  c_post->add_option("--grid-points", post_o.grid_points, "Number of grid points")
      ->capture_default_str();
  c_post->add_option("--prior-mean", post_o.prior_mean, "Gaussian prior mean")
      ->capture_default_str();
  c_post->add_option("--prior-sd", post_o.prior_sd, "Gaussian prior standard deviation")
      ->capture_default_str();
  c_post->add_option("--out", post_o.out_path, "CSV path (default: print to stdout)");

  TuneOpts tune_o;
  CLI::App* c_tune = app.add_subcommand("tune", "MAP search and proposal-matrix tuning");
  c_tune->fallthrough();
  c_tune->add_option("--model", tune_o.model, "ising|ergm")->capture_default_str();
  c_tune->add_option("--data", tune_o.data_path, "Observed lattice or edge-list file")
      ->required()
      ->check(CLI::ExistingFile);
  c_tune->add_option("--stats", tune_o.stat_names,
                     "ERGM statistics (edges,two-stars,three-stars,triangles)")
      ->delimiter(',')
      ->capture_default_str();
  c_tune->add_option("--prior-mean", tune_o.prior_mean, "Gaussian prior mean")
      ->capture_default_str();
  c_tune->add_option("--prior-sd", tune_o.prior_sd, "Gaussian prior standard deviation")
      ->capture_default_str();
  c_tune->add_option("--out", tune_o.out_path, "Report JSON path")->capture_default_str();
  c_tune->add_option("--pilot-alg", tune_o.pilot_alg, "Algorithm used for pilot runs")
      ->capture_default_str();
  c_tune->add_option("--hessian-draws", tune_o.hessian_draws, "Auxiliary draws for the curvature")
      ->capture_default_str();
  c_tune->add_option("--target-acceptance", tune_o.target_acceptance, "Pilot acceptance target")
      ->capture_default_str();
  c_tune->add_option("--band", tune_o.target_band, "Acceptable band around the target")
      ->capture_default_str();
  c_tune->add_option("--pilot-iters", tune_o.pilot_iters, "Iterations per pilot run")
      ->capture_default_str();
  c_tune->add_option("--max-rounds", tune_o.max_rounds, "Maximum pilot rounds")
      ->capture_default_str();

  CLI::App* c_study =
      app.add_subcommand("ising-study", "Synthetic-lattice bias study across algorithms");
  c_study->fallthrough();

  ErgmRunOpts ergm_o;
  CLI::App* c_ergm = app.add_subcommand("ergm-run", "Multi-algorithm study on an observed graph");
  c_ergm->fallthrough();
  c_ergm->add_option("--data", ergm_o.data_path, "Edge-list file")
      ->required()
      ->check(CLI::ExistingFile);
  c_ergm->add_option("--tuned", ergm_o.tuned_path, "Tuning report JSON from the tune subcommand")
      ->check(CLI::ExistingFile);

  VerifyOpts ver_o;
  CLI::App* c_ver =
      app.add_subcommand("verify-bounds", "Check the perturbation bound on random kernel pairs");
  c_ver->fallthrough();
  c_ver->add_option("--states", ver_o.states, "Kernel state count")->capture_default_str();
  c_ver->add_option("--pairs", ver_o.pairs, "Number of kernel pairs")->capture_default_str();
  c_ver->add_option("--kappa-max", ver_o.kappa_max, "Maximum kernel perturbation")
      ->capture_default_str();
  c_ver->add_option("--n-max", ver_o.n_max, "Largest power checked")->capture_default_str();
  c_ver->add_option("--out", ver_o.out_path, "Also write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (c_run->parsed()) return cmd_run(g, run_o);
    if (c_post->parsed()) return cmd_exact_posterior(g, post_o);
    if (c_tune->parsed()) return cmd_tune(g, tune_o);
    if (c_study->parsed()) return cmd_ising_study(g);
    if (c_ergm->parsed()) return cmd_ergm_run(g, ergm_o);
    if (c_ver->parsed()) return cmd_verify_bounds(g, ver_o);
    std::cerr << app.help();
    return kExitValidation;
  } catch (const OracleRefusalError& e) {
    std::cerr << "oracle refusal: " << e.what() << "\n";
    return kExitOracleRefusal;
  } catch (const ContractError& e) {  // includes ParseError
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const OutOfRegimeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const CertificateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return kExitRuntime;
  }
}
