#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "grfmcmc/diagnostics.hpp"
#include "grfmcmc/tuning.hpp"

namespace grfmcmc {

struct GridSpec {
  double min = -0.4;
  double max = 0.8;
  int points = 241;

  VectorXd linspace() const;
};

// Synthetic-lattice bias study: simulate datasets at a known interaction,
// run each algorithm on every dataset and compare posterior means against the
// grid oracle.
struct StudyConfig {
  int n_datasets = 20;
  int height = 8;
  int width = 8;
  double true_theta = 0.3;
  int data_sweeps = 2000;  // Gibbs sweeps used to synthesise each dataset
  std::vector<Algorithm> algorithms = {Algorithm::Exchange, Algorithm::NoisyExchange};
  int n_aux_noisy = 100;  // auxiliary draws for the noisy variants
  SamplerConfig sampler;  // shared proposal/schedule/budget knobs
  GridSpec grid;
  double prior_variance = 100.0;
  double burnin_fraction = 0.2;
  std::uint64_t seed = 1;

  void validate() const;
};

struct StudyRow {
  int dataset = 0;
  std::string algorithm;
  double post_mean = 0.0;
  double post_sd = 0.0;
  double ess = 0.0;
  double acceptance = 0.0;
  double oracle_mean = 0.0;
  double oracle_sd = 0.0;
  double bias = 0.0;
  double elapsed_s = 0.0;
};

struct StudyAggregate {
  std::string algorithm;
  int n = 0;
  double mean_abs_bias = 0.0;
  double se_abs_bias = 0.0;  // standard error of the mean absolute bias
  double mean_ess = 0.0;
};

struct StudyReport {
  std::vector<StudyRow> rows;
  std::vector<StudyAggregate> aggregates;
};

StudyReport ising_bias_study(const StudyConfig& cfg);

// results.csv + aggregates.csv + bias boxplot + manifest.json, all
// deterministic for a given report.
void write_study_outputs(const StudyReport& report, const StudyConfig& cfg,
                         const std::string& out_dir);

// Single-dataset network study running a set of algorithms on an observed
// graph, with optional inline proposal tuning for the gradient kernels.
struct ErgmStudyConfig {
  std::vector<ErgmStat> stats = {ErgmStat::Edges, ErgmStat::TwoStars};
  std::vector<Algorithm> algorithms = {Algorithm::Exchange, Algorithm::NoisyExchange,
                                       Algorithm::NoisyLangevin, Algorithm::MalaExchange,
                                       Algorithm::NoisyMalaExchange};
  SamplerConfig sampler;
  int n_aux_noisy = 50;
  bool tune_inline = true;  // otherwise sampler.step_matrix must be supplied
  RmSchedule rm;
  int hessian_draws = 4000;
  double prior_variance = 100.0;
  double burnin_fraction = 0.2;
  std::uint64_t seed = 1;
};

struct ErgmStudyRow {
  std::string algorithm;
  VectorXd mean;
  VectorXd sd;
  VectorXd ess;
  double acceptance = 0.0;
  double elapsed_s = 0.0;
};

struct ErgmStudyReport {
  std::vector<std::string> stat_names;
  std::vector<ErgmStudyRow> rows;
  bool tuned = false;
  TuneReport tuning;
  std::vector<Trace> traces;  // one per algorithm, for the density/acf outputs
};

ErgmStudyReport ergm_study(const UndirectedGraph& g, const ErgmStudyConfig& cfg);

// JSON forms of the study configs (strict keys, defaults as in the structs).
StudyConfig study_config_from_json(const nlohmann::json& j);
ErgmStudyConfig ergm_study_config_from_json(const nlohmann::json& j);

// means table (paper layout: one row per algorithm, mean/sd per statistic),
// acf.csv, density.csv, plots, manifest.json.
void write_ergm_outputs(const ErgmStudyReport& report, const ErgmStudyConfig& cfg,
                        const std::string& out_dir);

}  // namespace grfmcmc
