#include "grfmcmc/studies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "grfmcmc/errors.hpp"
#include "grfmcmc/io.hpp"
#include "grfmcmc/samplers.hpp"
#include "grfmcmc/svg.hpp"

namespace grfmcmc {

namespace {

namespace fs = std::filesystem;

std::ofstream open_report_file(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write file: " + p.string());
  return out;
}

double run_seconds(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

VectorXd GridSpec::linspace() const {
  if (!(max > min) || points < 2) throw ContractError("GridSpec: empty grid");
  return VectorXd::LinSpaced(points, min, max);
}

void StudyConfig::validate() const {
  if (n_datasets < 1) throw ContractError("StudyConfig: need at least one dataset");
  if (height < 1 || width < 1) throw ContractError("StudyConfig: bad lattice size");
  if (data_sweeps < 1) throw ContractError("StudyConfig: data_sweeps must be positive");
  if (algorithms.empty()) throw ContractError("StudyConfig: no algorithms selected");
  if (n_aux_noisy < 1) throw ContractError("StudyConfig: n_aux_noisy must be at least 1");
  if (!(prior_variance > 0.0)) throw ContractError("StudyConfig: prior variance must be positive");
  if (!(burnin_fraction >= 0.0 && burnin_fraction < 1.0))
    throw ContractError("StudyConfig: burn-in fraction must lie in [0, 1)");
  (void)grid.linspace();
}

StudyReport ising_bias_study(const StudyConfig& cfg) {
  cfg.validate();
  GrfModel model =
      GrfModel::ising(cfg.height, cfg.width, GaussianPrior::iso(1, 0.0, cfg.prior_variance));
  RngStream master(cfg.seed);
  VectorXd true_theta(1);
  true_theta[0] = cfg.true_theta;

  StudyReport report;
  for (int d = 0; d < cfg.n_datasets; ++d) {
    RngStream data_rng = master.substream(static_cast<std::uint64_t>(d));
    GrfState y =
        draw_auxiliary(model, true_theta, 1, cfg.data_sweeps, 0, data_rng).front();
    PosteriorGrid grid = exact_posterior_grid(model, y, cfg.grid.linspace());
    GridSummaries oracle = grid_summaries(grid);

    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
      Algorithm alg = cfg.algorithms[a];
      SamplerConfig run_cfg = cfg.sampler;
      run_cfg.n_aux = (alg == Algorithm::Exchange || alg == Algorithm::ExactMh)
                          ? 1
                          : cfg.n_aux_noisy;
      run_cfg.seed = master.substream(0x1000 + static_cast<std::uint64_t>(d) *
                                                   cfg.algorithms.size() +
                                      a)
                         .next_u64();
      Trace trace;
      double secs = run_seconds([&] { trace = run_chain(alg, model, y, run_cfg); });
      TraceSummary ts = trace_summaries(trace, cfg.burnin_fraction, 50, &grid);

      StudyRow row;
      row.dataset = d;
      row.algorithm = algorithm_name(alg);
      row.post_mean = ts.mean[0];
      row.post_sd = ts.sd[0];
      row.ess = ts.ess[0];
      row.acceptance = ts.acceptance_rate;
      row.oracle_mean = oracle.mean;
      row.oracle_sd = oracle.sd;
      row.bias = ts.bias.size() != 0 ? ts.bias[0] : ts.mean[0] - oracle.mean;
      row.elapsed_s = secs;
      report.rows.push_back(std::move(row));
    }
  }

  for (Algorithm alg : cfg.algorithms) {
    std::string name = algorithm_name(alg);
    std::vector<double> abs_bias;
    double ess_sum = 0.0;
    for (const StudyRow& r : report.rows)
      if (r.algorithm == name) {
        abs_bias.push_back(std::abs(r.bias));
        ess_sum += r.ess;
      }
    StudyAggregate agg;
    agg.algorithm = name;
    agg.n = static_cast<int>(abs_bias.size());
    auto [m, sd] = mean_sd(abs_bias);
    agg.mean_abs_bias = m;
    agg.se_abs_bias = agg.n > 1 ? sd / std::sqrt(static_cast<double>(agg.n)) : 0.0;
    agg.mean_ess = ess_sum / std::max(1, agg.n);
    report.aggregates.push_back(std::move(agg));
  }
  return report;
}

void write_study_outputs(const StudyReport& report, const StudyConfig& cfg,
                         const std::string& out_dir) {
  fs::create_directories(out_dir);
  fs::path dir(out_dir);

  if (report.rows.empty()) {  // nothing ran: keep the record, skip the tables
    json manifest;
    manifest["kind"] = "ising-bias-study";
    manifest["seed"] = cfg.seed;
    manifest["outputs"] = json::array();
    write_json(manifest, (dir / "manifest.json").string());
    return;
  }

  {
    auto out = open_report_file(dir / "results.csv");
    out << "dataset,algorithm,post_mean,post_sd,ess,acceptance,oracle_mean,oracle_sd,bias,"
           "elapsed_s\n";
    for (const StudyRow& r : report.rows)
      out << r.dataset << ',' << r.algorithm << ',' << fmt_g(r.post_mean) << ','
          << fmt_g(r.post_sd) << ',' << fmt_g(r.ess) << ',' << fmt_g(r.acceptance) << ','
          << fmt_g(r.oracle_mean) << ',' << fmt_g(r.oracle_sd) << ',' << fmt_g(r.bias) << ','
          << fmt_g(r.elapsed_s) << '\n';
  }
  {
    auto out = open_report_file(dir / "aggregates.csv");
    out << "algorithm,n,mean_abs_bias,se_abs_bias,mean_ess\n";
    for (const StudyAggregate& a : report.aggregates)
      out << a.algorithm << ',' << a.n << ',' << fmt_g(a.mean_abs_bias) << ','
          << fmt_g(a.se_abs_bias) << ',' << fmt_g(a.mean_ess) << '\n';
  }

  std::vector<std::string> labels;
  std::vector<std::vector<double>> groups;
  for (const StudyAggregate& a : report.aggregates) {
    labels.push_back(a.algorithm);
    std::vector<double> biases;
    for (const StudyRow& r : report.rows)
      if (r.algorithm == a.algorithm) biases.push_back(r.bias);
    groups.push_back(std::move(biases));
  }
  svg_boxplot((dir / "bias_boxplot.svg").string(), "posterior mean bias by algorithm", labels,
              groups, "bias");

  json manifest;
  manifest["kind"] = "ising-bias-study";
  manifest["seed"] = cfg.seed;
  manifest["n_datasets"] = cfg.n_datasets;
  manifest["lattice"] = {cfg.height, cfg.width};
  manifest["true_theta"] = cfg.true_theta;
  manifest["data_sweeps"] = cfg.data_sweeps;
  manifest["n_aux_noisy"] = cfg.n_aux_noisy;
  manifest["burnin_fraction"] = cfg.burnin_fraction;
  manifest["prior_variance"] = cfg.prior_variance;
  manifest["grid"] = {{"min", cfg.grid.min}, {"max", cfg.grid.max}, {"points", cfg.grid.points}};
  {
    json algs = json::array();
    for (Algorithm a : cfg.algorithms) algs.push_back(algorithm_name(a));
    manifest["algorithms"] = algs;
  }
  manifest["sampler"] = sampler_config_to_json(cfg.sampler);
  manifest["outputs"] = {"results.csv", "aggregates.csv", "bias_boxplot.svg"};
  write_json(manifest, (dir / "manifest.json").string());
}

ErgmStudyReport ergm_study(const UndirectedGraph& g, const ErgmStudyConfig& cfg) {
  if (cfg.algorithms.empty()) throw ContractError("ergm_study: no algorithms selected");
  GrfModel model = GrfModel::ergm(
      g.n_nodes(), cfg.stats,
      GaussianPrior::iso(static_cast<int>(cfg.stats.size()), 0.0, cfg.prior_variance));
  GrfState y = g;
  RngStream master(cfg.seed);

  bool needs_gradients = false;
  for (Algorithm a : cfg.algorithms) needs_gradients |= algorithm_uses_gradients(a);

  ErgmStudyReport report;
  for (ErgmStat s : cfg.stats) report.stat_names.push_back(ergm_stat_name(s));

  SamplerConfig base = cfg.sampler;
  if (needs_gradients) {
    if (cfg.tune_inline) {
      RngStream tune_rng = master.substream(0x7001);
      report.tuning = tune_pipeline(model, y, Algorithm::MalaExchange, cfg.rm, base,
                                    cfg.hessian_draws, 0.25, 0.10, 2000, 5, tune_rng);
      report.tuned = true;
      base.step_matrix = report.tuning.step_matrix;
      base.theta0 = report.tuning.theta_star;
    } else if (base.step_matrix.size() == 0) {
      throw ContractError(
          "ergm_study: gradient-based algorithms need a step matrix; run the tune "
          "subcommand and pass its output, or enable inline tuning");
    }
  }

  for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
    Algorithm alg = cfg.algorithms[a];
    SamplerConfig run_cfg = base;
    run_cfg.n_aux = (alg == Algorithm::Exchange || alg == Algorithm::ExactMh)
                        ? 1
                        : cfg.n_aux_noisy;
    run_cfg.seed = master.substream(0x2000 + a).next_u64();
    Trace trace;
    double secs = run_seconds([&] { trace = run_chain(alg, model, y, run_cfg); });
    TraceSummary ts = trace_summaries(trace, cfg.burnin_fraction, 50, nullptr);

    ErgmStudyRow row;
    row.algorithm = algorithm_name(alg);
    row.mean = ts.mean;
    row.sd = ts.sd;
    row.ess = ts.ess;
    row.acceptance = ts.acceptance_rate;
    row.elapsed_s = secs;
    report.rows.push_back(std::move(row));
    report.traces.push_back(std::move(trace));
  }
  return report;
}

void write_ergm_outputs(const ErgmStudyReport& report, const ErgmStudyConfig& cfg,
                        const std::string& out_dir) {
  fs::create_directories(out_dir);
  fs::path dir(out_dir);
  const int dim = static_cast<int>(report.stat_names.size());

  if (report.rows.empty()) {  // nothing ran: keep the record, skip the tables
    json manifest;
    manifest["kind"] = "ergm-study";
    manifest["seed"] = cfg.seed;
    manifest["outputs"] = json::array();
    write_json(manifest, (dir / "manifest.json").string());
    return;
  }

  {
    auto out = open_report_file(dir / "posterior_means.csv");
    out << "algorithm";
    for (const std::string& s : report.stat_names) out << ',' << s << "_mean," << s << "_sd";
    out << ",acceptance,min_ess,elapsed_s\n";
    for (const ErgmStudyRow& r : report.rows) {
      out << r.algorithm;
      for (int p = 0; p < dim; ++p) out << ',' << fmt_g(r.mean[p]) << ',' << fmt_g(r.sd[p]);
      out << ',' << fmt_g(r.acceptance) << ',' << fmt_g(r.ess.minCoeff()) << ','
          << fmt_g(r.elapsed_s) << '\n';
    }
  }

  constexpr int kMaxLag = 50;
  {
    auto out = open_report_file(dir / "acf.csv");
    out << "algorithm,param,lag,acf\n";
    for (std::size_t t = 0; t < report.traces.size(); ++t) {
      TraceSummary ts = trace_summaries(report.traces[t], cfg.burnin_fraction, kMaxLag, nullptr);
      for (int p = 0; p < dim; ++p)
        for (Eigen::Index l = 0; l < ts.acf.rows(); ++l)
          out << report.rows[t].algorithm << ',' << report.stat_names[static_cast<std::size_t>(p)]
              << ',' << l << ',' << fmt_g(ts.acf(l, p)) << '\n';
    }
  }

  constexpr int kDensityBins = 40;
  {
    auto out = open_report_file(dir / "density.csv");
    out << "algorithm,param,bin_center,density\n";
    for (std::size_t t = 0; t < report.traces.size(); ++t) {
      for (int p = 0; p < dim; ++p) {
        std::vector<double> xs = trace_component(report.traces[t], p, cfg.burnin_fraction);
        auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
        double lo = *lo_it, hi = *hi_it;
        if (!(hi > lo)) hi = lo + 1.0;
        double width = (hi - lo) / kDensityBins;
        std::vector<double> counts(kDensityBins, 0.0);
        for (double x : xs) {
          int b = std::min(kDensityBins - 1, static_cast<int>((x - lo) / width));
          counts[static_cast<std::size_t>(b)] += 1.0;
        }
        for (int b = 0; b < kDensityBins; ++b)
          out << report.rows[t].algorithm << ',' << report.stat_names[static_cast<std::size_t>(p)]
              << ',' << fmt_g(lo + (b + 0.5) * width) << ','
              << fmt_g(counts[static_cast<std::size_t>(b)] /
                       (static_cast<double>(xs.size()) * width))
              << '\n';
      }
    }
  }

  // One ACF chart per parameter across algorithms.
  for (int p = 0; p < dim; ++p) {
    std::vector<double> lags;
    for (int l = 0; l <= kMaxLag; ++l) lags.push_back(l);
    std::vector<std::vector<double>> series;
    std::vector<std::string> labels;
    for (std::size_t t = 0; t < report.traces.size(); ++t) {
      TraceSummary ts = trace_summaries(report.traces[t], cfg.burnin_fraction, kMaxLag, nullptr);
      std::vector<double> s;
      for (int l = 0; l <= kMaxLag; ++l)
        s.push_back(l < ts.acf.rows() ? ts.acf(l, p) : 0.0);
      series.push_back(std::move(s));
      labels.push_back(report.rows[t].algorithm);
    }
    svg_line_chart((dir / ("acf_" + report.stat_names[static_cast<std::size_t>(p)] + ".svg")).string(),
                   "autocorrelation: " + report.stat_names[static_cast<std::size_t>(p)], lags,
                   series, labels, "lag", "acf");
  }

  json manifest;
  manifest["kind"] = "ergm-study";
  manifest["seed"] = cfg.seed;
  manifest["stats"] = report.stat_names;
  {
    json algs = json::array();
    for (Algorithm a : cfg.algorithms) algs.push_back(algorithm_name(a));
    manifest["algorithms"] = algs;
  }
  manifest["n_aux_noisy"] = cfg.n_aux_noisy;
  manifest["burnin_fraction"] = cfg.burnin_fraction;
  manifest["prior_variance"] = cfg.prior_variance;
  manifest["tuned_inline"] = report.tuned;
  if (report.tuned) {
    json t;
    t["theta_star"] = std::vector<double>(report.tuning.theta_star.data(),
                                          report.tuning.theta_star.data() +
                                              report.tuning.theta_star.size());
    t["scale"] = report.tuning.scale;
    t["acceptance"] = report.tuning.acceptance;
    t["rm_converged"] = report.tuning.rm_converged;
    t["rm_iterations"] = report.tuning.rm_iterations;
    manifest["tuning"] = t;
  }
  manifest["sampler"] = sampler_config_to_json(cfg.sampler);
  manifest["outputs"] = {"posterior_means.csv", "acf.csv", "density.csv"};
  write_json(manifest, (dir / "manifest.json").string());
}

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw ParseError(where + ": unknown key '" + key + "'");
  }
}

std::vector<Algorithm> algorithms_from_json(const json& j, const std::string& where) {
  std::vector<Algorithm> out;
  if (!j.is_array()) throw ParseError(where + ": algorithms must be an array of names");
  for (const auto& name : j) out.push_back(algorithm_from_name(name.get<std::string>()));
  if (out.empty()) throw ParseError(where + ": algorithms must be non-empty");
  return out;
}

}  // namespace

StudyConfig study_config_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("study config: expected a JSON object");
  reject_unknown_keys(j,
                      {"n_datasets", "height", "width", "true_theta", "data_sweeps", "algorithms",
                       "n_aux_noisy", "sampler", "grid", "prior_variance", "burnin_fraction",
                       "seed"},
                      "study config");
  StudyConfig cfg;
  try {
    cfg.n_datasets = j.value("n_datasets", cfg.n_datasets);
    cfg.height = j.value("height", cfg.height);
    cfg.width = j.value("width", cfg.width);
    cfg.true_theta = j.value("true_theta", cfg.true_theta);
    cfg.data_sweeps = j.value("data_sweeps", cfg.data_sweeps);
    cfg.n_aux_noisy = j.value("n_aux_noisy", cfg.n_aux_noisy);
    cfg.prior_variance = j.value("prior_variance", cfg.prior_variance);
    cfg.burnin_fraction = j.value("burnin_fraction", cfg.burnin_fraction);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("algorithms")) cfg.algorithms = algorithms_from_json(j.at("algorithms"), "study config");
    if (j.contains("sampler")) cfg.sampler = sampler_config_from_json(j.at("sampler"));
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      reject_unknown_keys(g, {"min", "max", "points"}, "study config grid");
      cfg.grid.min = g.value("min", cfg.grid.min);
      cfg.grid.max = g.value("max", cfg.grid.max);
      cfg.grid.points = g.value("points", cfg.grid.points);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("study config: ") + e.what());
  }
  return cfg;
}

ErgmStudyConfig ergm_study_config_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("ergm study config: expected a JSON object");
  reject_unknown_keys(j,
                      {"stats", "algorithms", "sampler", "n_aux_noisy", "tune_inline", "rm",
                       "hessian_draws", "prior_variance", "burnin_fraction", "seed"},
                      "ergm study config");
  ErgmStudyConfig cfg;
  try {
    if (j.contains("stats")) {
      cfg.stats.clear();
      for (const auto& name : j.at("stats"))
        cfg.stats.push_back(ergm_stat_from_name(name.get<std::string>()));
    }
    if (j.contains("algorithms"))
      cfg.algorithms = algorithms_from_json(j.at("algorithms"), "ergm study config");
    if (j.contains("sampler")) cfg.sampler = sampler_config_from_json(j.at("sampler"));
    cfg.n_aux_noisy = j.value("n_aux_noisy", cfg.n_aux_noisy);
    cfg.tune_inline = j.value("tune_inline", cfg.tune_inline);
    if (j.contains("rm")) {
      const json& r = j.at("rm");
      reject_unknown_keys(r, {"a", "b", "tol", "max_iter"}, "ergm study config rm");
      cfg.rm.a = r.value("a", cfg.rm.a);
      cfg.rm.b = r.value("b", cfg.rm.b);
      cfg.rm.tol = r.value("tol", cfg.rm.tol);
      cfg.rm.max_iter = r.value("max_iter", cfg.rm.max_iter);
    }
    cfg.hessian_draws = j.value("hessian_draws", cfg.hessian_draws);
    cfg.prior_variance = j.value("prior_variance", cfg.prior_variance);
    cfg.burnin_fraction = j.value("burnin_fraction", cfg.burnin_fraction);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const json::exception& e) {
    throw ParseError(std::string("ergm study config: ") + e.what());
  }
  return cfg;
}

}  // namespace grfmcmc
