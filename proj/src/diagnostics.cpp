#include "grfmcmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "grfmcmc/errors.hpp"

namespace grfmcmc {

std::vector<double> trace_component(const Trace& trace, int param, double burnin_fraction) {
  if (trace.states.empty()) throw ContractError("trace_component: empty trace");
  if (param < 0 || param >= trace.dim()) throw ContractError("trace_component: bad parameter index");
  if (!(burnin_fraction >= 0.0 && burnin_fraction < 1.0))
    throw ContractError("trace_component: burn-in fraction must lie in [0, 1)");
  std::size_t burn = static_cast<std::size_t>(burnin_fraction * static_cast<double>(trace.states.size()));
  std::vector<double> out;
  out.reserve(trace.states.size() - burn);
  for (std::size_t i = burn; i < trace.states.size(); ++i)
    out.push_back(trace.states[i][param]);
  return out;
}

TraceSummary trace_summaries(const Trace& trace, double burnin_fraction, int max_lag,
                             const PosteriorGrid* reference) {
  if (trace.states.empty()) throw ContractError("trace_summaries: empty trace");
  if (!(burnin_fraction >= 0.0 && burnin_fraction < 1.0))
    throw ContractError("trace_summaries: burn-in fraction must lie in [0, 1)");
  if (max_lag < 1) throw ContractError("trace_summaries: max_lag must be at least 1");

  const int dim = trace.dim();
  TraceSummary s;
  s.n_total = static_cast<int>(trace.states.size());
  s.burnin_fraction = burnin_fraction;
  std::size_t burn = static_cast<std::size_t>(burnin_fraction * static_cast<double>(s.n_total));
  s.n_used = s.n_total - static_cast<int>(burn);
  s.acceptance_rate = trace.acceptance_rate();

  const int n = s.n_used;
  const int lags = std::min(max_lag, std::max(0, n - 1));
  s.mean = VectorXd::Zero(dim);
  s.sd = VectorXd::Zero(dim);
  s.ess = VectorXd::Constant(dim, static_cast<double>(n));
  s.acf = MatrixXd::Zero(lags + 1, dim);
  s.acf.row(0).setOnes();

  for (int p = 0; p < dim; ++p) {
    double m = 0.0;
    for (int t = 0; t < n; ++t) m += trace.states[burn + static_cast<std::size_t>(t)][p];
    m /= static_cast<double>(n);
    s.mean[p] = m;
    double c0 = 0.0;
    for (int t = 0; t < n; ++t) {
      double d = trace.states[burn + static_cast<std::size_t>(t)][p] - m;
      c0 += d * d;
    }
    if (c0 <= 0.0) {
      s.degenerate = true;
      s.sd[p] = 0.0;
      continue;  // acf row stays (1, 0, ..., 0), ess stays n
    }
    s.sd[p] = n > 1 ? std::sqrt(c0 / static_cast<double>(n - 1)) : 0.0;
    double acc = 0.0;
    bool truncated = false;
    for (int l = 1; l <= lags; ++l) {
      double cl = 0.0;
      for (int t = 0; t + l < n; ++t) {
        double a = trace.states[burn + static_cast<std::size_t>(t)][p] - m;
        double b = trace.states[burn + static_cast<std::size_t>(t + l)][p] - m;
        cl += a * b;
      }
      double rho = cl / c0;
      s.acf(l, p) = rho;
      if (!truncated) {
        if (rho < 0.0)
          truncated = true;
        else
          acc += rho;
      }
    }
    s.ess[p] = static_cast<double>(n) / (1.0 + 2.0 * acc);
  }

  if (reference != nullptr && dim == 1) {
    GridSummaries g = grid_summaries(*reference);
    s.bias = VectorXd::Constant(1, s.mean[0] - g.mean);
  }
  return s;
}

GofResult chi_squared_gof(std::span<const double> samples, const PosteriorGrid& grid, int n_bins) {
  if (n_bins < 2) throw ContractError("chi_squared_gof: need at least 2 bins");
  if (samples.size() < static_cast<std::size_t>(10 * n_bins))
    throw ContractError("chi_squared_gof: too few samples for the requested bins");

  // Equal-probability bin edges from the grid quantiles; the expected mass is
  // re-evaluated from the grid cdf at the actual edges.
  std::vector<double> edges(static_cast<std::size_t>(n_bins) + 1);
  edges.front() = -std::numeric_limits<double>::infinity();
  edges.back() = std::numeric_limits<double>::infinity();
  for (int k = 1; k < n_bins; ++k)
    edges[static_cast<std::size_t>(k)] =
        grid.quantile(static_cast<double>(k) / static_cast<double>(n_bins));

  GofResult res;
  res.dof = n_bins - 1;
  res.expected.assign(static_cast<std::size_t>(n_bins), 0.0);
  res.observed.assign(static_cast<std::size_t>(n_bins), 0.0);
  const double n = static_cast<double>(samples.size());
  for (int k = 0; k < n_bins; ++k) {
    double lo = k == 0 ? 0.0 : grid.cdf_at(edges[static_cast<std::size_t>(k)]);
    double hi = k == n_bins - 1 ? 1.0 : grid.cdf_at(edges[static_cast<std::size_t>(k) + 1]);
    res.expected[static_cast<std::size_t>(k)] = n * std::max(hi - lo, 1e-300);
  }
  for (double x : samples) {
    auto it = std::upper_bound(edges.begin(), edges.end(), x);
    std::size_t bin = static_cast<std::size_t>(std::distance(edges.begin(), it)) - 1;
    bin = std::min(bin, static_cast<std::size_t>(n_bins - 1));
    res.observed[bin] += 1.0;
  }
  double stat = 0.0;
  for (int k = 0; k < n_bins; ++k) {
    double e = res.expected[static_cast<std::size_t>(k)];
    double d = res.observed[static_cast<std::size_t>(k)] - e;
    stat += d * d / e;
  }
  res.statistic = stat;
  res.p_value = chi2_sf(stat, static_cast<double>(res.dof));
  return res;
}

}  // namespace grfmcmc
