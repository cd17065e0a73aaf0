#pragma once

#include <span>
#include <vector>

#include "grfmcmc/chain.hpp"
#include "grfmcmc/oracle.hpp"

namespace grfmcmc {

struct TraceSummary {
  int n_total = 0;
  int n_used = 0;  // after burn-in removal
  double burnin_fraction = 0.2;
  VectorXd mean;
  VectorXd sd;
  MatrixXd acf;  // (max_lag + 1) x dim, acf(0, .) = 1
  VectorXd ess;  // per parameter, initial-positive-sequence truncation
  double acceptance_rate = 0.0;
  VectorXd bias;          // mean - oracle mean, when a reference grid is given
  bool degenerate = false;  // a parameter was constant after burn-in
};

// Moments, autocorrelations and effective sample sizes of a trace after
// discarding the leading burn-in fraction.  The effective sample size uses
// 1 + 2 * sum of the autocorrelations up to (not including) the first
// negative lag.  A reference posterior grid (one-parameter models) adds the
// bias column.
TraceSummary trace_summaries(const Trace& trace, double burnin_fraction = 0.2, int max_lag = 50,
                             const PosteriorGrid* reference = nullptr);

struct GofResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int dof = 0;
  std::vector<double> expected;  // per-bin expected counts
  std::vector<double> observed;
};

// Chi-squared goodness of fit of scalar samples against a grid posterior,
// with n_bins equal-probability bins cut at the grid quantiles.
GofResult chi_squared_gof(std::span<const double> samples, const PosteriorGrid& grid, int n_bins);

// Column of one parameter from a trace, burn-in removed.
std::vector<double> trace_component(const Trace& trace, int param, double burnin_fraction);

}  // namespace grfmcmc
