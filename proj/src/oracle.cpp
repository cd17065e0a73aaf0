#include "grfmcmc/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "grfmcmc/errors.hpp"

namespace grfmcmc {

double StatTable::log_z(const VectorXd& theta) const {
  if (theta.size() != stats.cols()) throw ContractError("StatTable: parameter dimension mismatch");
  VectorXd terms = log_counts + stats * theta;
  return log_sum_exp({terms.data(), static_cast<std::size_t>(terms.size())});
}

std::pair<VectorXd, MatrixXd> StatTable::moments(const VectorXd& theta) const {
  double lz = log_z(theta);
  VectorXd terms = log_counts + stats * theta;
  VectorXd w = (terms.array() - lz).exp();
  VectorXd mean = stats.transpose() * w;
  MatrixXd centered = stats.rowwise() - mean.transpose();
  MatrixXd cov = centered.transpose() * (w.asDiagonal() * centered);
  return {mean, 0.5 * (cov + cov.transpose())};
}

namespace {

void check_enumerable(const GrfModel& model) {
  if (model.n_sites() > kMaxEnumSites)
    throw OracleRefusalError("exact enumeration is limited to " + std::to_string(kMaxEnumSites) +
                             " binary sites (2^" + std::to_string(kMaxEnumSites) +
                             " configurations); model has " + std::to_string(model.n_sites()));
  if (model.kind() == GrfModel::Kind::Ergm && model.n_nodes() > kMaxEnumErgmNodes)
    throw OracleRefusalError("exact graph enumeration is limited to " +
                             std::to_string(kMaxEnumErgmNodes) + " nodes; model has " +
                             std::to_string(model.n_nodes()));
}

// Gray-code walk over all spin configurations, collapsing to a histogram of
// the scalar bond statistic (which lives on the integers [-E, E]).
StatTable enumerate_ising(const GrfModel& model) {
  const int h = model.height(), w = model.width();
  const int sites = h * w;
  const int bonds = h * (w - 1) + w * (h - 1);
  SpinLattice lat(h, w, -1);
  long long s = bonds;  // all spins equal
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(2 * bonds + 1), 0);
  counts[static_cast<std::size_t>(s + bonds)] = 1;
  const std::uint64_t total = 1ULL << sites;
  for (std::uint64_t k = 1; k < total; ++k) {
    int site = std::countr_zero(k);
    s += -2LL * lat.spin(site) * lat.neighbor_sum(site);
    lat.flip(site);
    counts[static_cast<std::size_t>(s + bonds)]++;
  }
  std::size_t distinct = 0;
  for (auto c : counts) distinct += (c != 0);
  StatTable t;
  t.stats.resize(static_cast<Eigen::Index>(distinct), 1);
  t.log_counts.resize(static_cast<Eigen::Index>(distinct));
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    t.stats(r, 0) = static_cast<double>(static_cast<long long>(i) - bonds);
    t.log_counts[r] = std::log(static_cast<double>(counts[i]));
    ++r;
  }
  return t;
}

StatTable enumerate_ergm(const GrfModel& model) {
  const int n = model.n_nodes();
  const auto& stats = model.stats();
  const int dim = model.dim();
  UndirectedGraph g(n);
  const int dyads = g.n_dyads();
  std::vector<std::pair<int, int>> pairs(static_cast<std::size_t>(dyads));
  for (int d = 0; d < dyads; ++d) pairs[static_cast<std::size_t>(d)] = g.dyad(d);

  long long cur[4] = {0, 0, 0, 0};  // values of the chosen statistics
  std::unordered_map<std::uint64_t, std::uint64_t> hist;
  auto pack = [&]() {
    std::uint64_t key = 0;
    for (int k = 0; k < dim; ++k) key = (key << 16) | static_cast<std::uint64_t>(cur[k]);
    return key;
  };
  hist[pack()] = 1;

  const std::uint64_t total = 1ULL << dyads;
  for (std::uint64_t k = 1; k < total; ++k) {
    auto [i, j] = pairs[static_cast<std::size_t>(std::countr_zero(k))];
    bool adding = !g.edge(i, j);
    long long di = g.degree(i), dj = g.degree(j);
    for (int q = 0; q < dim; ++q) {
      switch (stats[static_cast<std::size_t>(q)]) {
        case ErgmStat::Edges: cur[q] += adding ? 1 : -1; break;
        case ErgmStat::TwoStars:
          cur[q] += adding ? (di + dj) : -(di - 1 + dj - 1);
          break;
        case ErgmStat::ThreeStars:
          cur[q] += adding ? (di * (di - 1) / 2 + dj * (dj - 1) / 2)
                           : -((di - 1) * (di - 2) / 2 + (dj - 1) * (dj - 2) / 2);
          break;
        case ErgmStat::Triangles: {
          long long c = g.common_neighbors(i, j);
          cur[q] += adding ? c : -c;
          break;
        }
      }
    }
    g.toggle(i, j);
    hist[pack()]++;
  }

  StatTable t;
  t.stats.resize(static_cast<Eigen::Index>(hist.size()), dim);
  t.log_counts.resize(static_cast<Eigen::Index>(hist.size()));
  Eigen::Index r = 0;
  for (const auto& [key, count] : hist) {
    for (int q = 0; q < dim; ++q) {
      std::uint64_t shifted = key >> (16 * (dim - 1 - q));
      t.stats(r, q) = static_cast<double>(shifted & 0xffffULL);
    }
    t.log_counts[r] = std::log(static_cast<double>(count));
    ++r;
  }
  return t;
}

}  // namespace

StatTable enumerate_stat_table(const GrfModel& model) {
  check_enumerable(model);
  if (model.kind() == GrfModel::Kind::Ising) return enumerate_ising(model);
  return enumerate_ergm(model);
}

double brute_force_log_z(const GrfModel& model, const VectorXd& theta) {
  return enumerate_stat_table(model).log_z(theta);
}

double ising_transfer_log_z(int height, int width, double theta) {
  if (height <= 0 || width <= 0)
    throw ContractError("ising_transfer_log_z: dimensions must be positive");
  // Run the recursion over the smaller dimension; Z is symmetric in (h, w).
  int h = std::min(height, width);
  int w = std::max(height, width);
  if (h > kMaxTransferHeight)
    throw OracleRefusalError("transfer-matrix log Z is limited to lattices with min(height, width) <= " +
                             std::to_string(kMaxTransferHeight) + "; got " + std::to_string(h));

  const std::size_t states = std::size_t{1} << h;
  // Vertical bond energy of a column configuration.
  std::vector<double> vweight(states);
  for (std::size_t c = 0; c < states; ++c) {
    int v = 0;
    for (int r = 0; r + 1 < h; ++r) {
      int a = (c >> r) & 1, b = (c >> (r + 1)) & 1;
      v += (a == b) ? 1 : -1;
    }
    vweight[c] = std::exp(theta * v);
  }

  std::vector<double> phi = vweight;  // first column
  double log_scale = 0.0;
  const double ep = std::exp(theta), em = std::exp(-theta);
  for (int col = 1; col < w; ++col) {
    // Horizontal couplings factorise over rows: apply the 2x2 bond operator
    // along each bit dimension of the column state.
    for (int r = 0; r < h; ++r) {
      const std::size_t bit = std::size_t{1} << r;
      for (std::size_t c = 0; c < states; ++c) {
        if (c & bit) continue;
        double a = phi[c], b = phi[c | bit];
        phi[c] = ep * a + em * b;
        phi[c | bit] = em * a + ep * b;
      }
    }
    double m = *std::max_element(phi.begin(), phi.end());
    for (std::size_t c = 0; c < states; ++c) {
      phi[c] = phi[c] / m * vweight[c];
    }
    log_scale += std::log(m);
  }
  double total = 0.0;
  for (double v : phi) total += v;
  return std::log(total) + log_scale;
}

std::pair<double, double> ising_transfer_moments(int height, int width, double theta) {
  const double h = 1e-5;
  double lz_m = ising_transfer_log_z(height, width, theta - h);
  double lz_0 = ising_transfer_log_z(height, width, theta);
  double lz_p = ising_transfer_log_z(height, width, theta + h);
  double mean = (lz_p - lz_m) / (2.0 * h);
  double var = (lz_p - 2.0 * lz_0 + lz_m) / (h * h);
  return {mean, var};
}

std::pair<VectorXd, MatrixXd> exact_moments(const GrfModel& model, const VectorXd& theta) {
  if (theta.size() != model.dim()) throw ContractError("exact_moments: parameter dimension mismatch");
  if (model.n_sites() <= kMaxEnumSites &&
      (model.kind() != GrfModel::Kind::Ergm || model.n_nodes() <= kMaxEnumErgmNodes))
    return enumerate_stat_table(model).moments(theta);
  if (model.kind() == GrfModel::Kind::Ising &&
      std::min(model.height(), model.width()) <= kMaxTransferHeight) {
    auto [mean, var] = ising_transfer_moments(model.height(), model.width(), theta[0]);
    VectorXd m(1);
    m[0] = mean;
    MatrixXd c(1, 1);
    c(0, 0) = var;
    return {m, c};
  }
  throw OracleRefusalError("exact_moments: model is too large for enumeration (" +
                           std::to_string(kMaxEnumSites) + " sites) and has no transfer-matrix form");
}

LogZOracle::LogZOracle(const GrfModel& model) : model_(model) {
  bool enumerable = model.n_sites() <= kMaxEnumSites &&
                    (model.kind() != GrfModel::Kind::Ergm || model.n_nodes() <= kMaxEnumErgmNodes);
  if (enumerable) {
    table_ = std::make_shared<const StatTable>(enumerate_stat_table(model));
  } else if (model.kind() == GrfModel::Kind::Ising &&
             std::min(model.height(), model.width()) <= kMaxTransferHeight) {
    // transfer-matrix fallback, nothing to precompute
  } else {
    throw OracleRefusalError(
        "no exact log Z available: state space exceeds enumeration limits and the model "
        "has no transfer-matrix form");
  }
}

double LogZOracle::log_z(const VectorXd& theta) const {
  if (table_) return table_->log_z(theta);
  if (theta.size() != 1) throw ContractError("LogZOracle: parameter dimension mismatch");
  return ising_transfer_log_z(model_.height(), model_.width(), theta[0]);
}

double LogZOracle::log_z(double theta) const {
  VectorXd t(1);
  t[0] = theta;
  return log_z(t);
}

const StatTable& LogZOracle::table() const {
  if (!table_) throw ContractError("LogZOracle: model was not enumerated");
  return *table_;
}

double PosteriorGrid::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw ContractError("PosteriorGrid::quantile: u outside [0, 1]");
  if (u <= 0.0) return grid[0];
  if (u >= 1.0) return grid[grid.size() - 1];
  // cdf is nondecreasing; find the segment containing u.
  const double* begin = cdf.data();
  const double* end = cdf.data() + cdf.size();
  const double* it = std::upper_bound(begin, end, u);
  Eigen::Index hi = std::min<Eigen::Index>(it - begin, cdf.size() - 1);
  Eigen::Index lo = hi - 1;
  double span = cdf[hi] - cdf[lo];
  double t = span > 0.0 ? (u - cdf[lo]) / span : 0.5;
  return grid[lo] + t * (grid[hi] - grid[lo]);
}

double PosteriorGrid::cdf_at(double theta) const {
  if (theta <= grid[0]) return 0.0;
  if (theta >= grid[grid.size() - 1]) return 1.0;
  const double* begin = grid.data();
  const double* end = grid.data() + grid.size();
  const double* it = std::upper_bound(begin, end, theta);
  Eigen::Index hi = it - begin;
  Eigen::Index lo = hi - 1;
  double t = (theta - grid[lo]) / (grid[hi] - grid[lo]);
  return cdf[lo] + t * (cdf[hi] - cdf[lo]);
}

PosteriorGrid exact_posterior_grid(const GrfModel& model, const GrfState& y, const VectorXd& grid) {
  if (model.dim() != 1)
    throw ContractError("exact_posterior_grid: only one-parameter models have a grid posterior");
  if (grid.size() < 2) throw ContractError("exact_posterior_grid: need at least two grid points");
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw ContractError("exact_posterior_grid: grid must be strictly increasing");
  model.validate_state(y);

  LogZOracle oracle(model);
  const double s_obs = model.suffstats(y)[0];

  PosteriorGrid out;
  out.grid = grid;
  out.log_post.resize(grid.size());
  VectorXd t(1);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    t[0] = grid[i];
    out.log_post[i] = grid[i] * s_obs - oracle.log_z(t) + model.prior().log_density(t);
  }
  double m = out.log_post.maxCoeff();
  VectorXd unnorm = (out.log_post.array() - m).exp();
  double integral = trapezoid(grid, unnorm);
  out.log_normalizer = m + std::log(integral);
  out.density = unnorm / integral;
  out.cdf.resize(grid.size());
  out.cdf[0] = 0.0;
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    out.cdf[i] = out.cdf[i - 1] +
                 0.5 * (grid[i] - grid[i - 1]) * (out.density[i] + out.density[i - 1]);
  return out;
}

PosteriorGrid exact_posterior_grid(const GrfModel& model, const GrfState& y, double theta_min,
                                   double theta_max, int grid_points) {
  if (!(theta_max > theta_min)) throw ContractError("exact_posterior_grid: empty parameter range");
  if (grid_points < 2) throw ContractError("exact_posterior_grid: need at least two grid points");
  VectorXd grid = VectorXd::LinSpaced(grid_points, theta_min, theta_max);
  return exact_posterior_grid(model, y, grid);
}

GridSummaries grid_summaries(const PosteriorGrid& g) {
  GridSummaries s;
  s.mean = trapezoid(g.grid, g.grid.cwiseProduct(g.density));
  VectorXd sq = (g.grid.array() - s.mean).square() * g.density.array();
  s.sd = std::sqrt(std::max(0.0, trapezoid(g.grid, sq)));
  Eigen::Index arg = 0;
  g.density.maxCoeff(&arg);
  s.argmax = g.grid[arg];
  return s;
}

}  // namespace grfmcmc
