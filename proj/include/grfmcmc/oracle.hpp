#pragma once

#include <memory>
#include <utility>

#include "grfmcmc/model.hpp"

namespace grfmcmc {

// Hard limits for the exact computations.  Requests beyond them throw
// OracleRefusalError rather than silently taking forever.
inline constexpr int kMaxEnumSites = 24;      // 2^24 configurations
inline constexpr int kMaxEnumErgmNodes = 7;   // 21 dyads
inline constexpr int kMaxTransferHeight = 20;

// Collapsed enumeration of a model's state space: the distinct sufficient
// statistic vectors and the log multiplicity of each.  Everything exact about
// a small model (Z, moments) reduces to sums over this table.
struct StatTable {
  MatrixXd stats;       // K x dim, distinct statistic vectors
  VectorXd log_counts;  // length K

  double log_z(const VectorXd& theta) const;
  std::pair<VectorXd, MatrixXd> moments(const VectorXd& theta) const;  // E[s], Cov[s]
};

StatTable enumerate_stat_table(const GrfModel& model);

// log Z(theta) by full enumeration (via the collapsed table).
double brute_force_log_z(const GrfModel& model, const VectorXd& theta);

// log Z for the free-boundary Ising lattice by column transfer operators.
// The smaller lattice dimension may be passed as either height or width;
// internally the recursion runs over min(height, width) <= 20 bits.
double ising_transfer_log_z(int height, int width, double theta);

// E[s] and Var[s] for the Ising model from central finite differences of the
// transfer-matrix log Z (step 1e-5).
std::pair<double, double> ising_transfer_moments(int height, int width, double theta);

// Exact mean and covariance of s(y) under f(.|theta): enumeration when the
// state space allows it, transfer-matrix finite differences for larger Ising
// lattices, refusal otherwise.
std::pair<VectorXd, MatrixXd> exact_moments(const GrfModel& model, const VectorXd& theta);

// Reusable exact log-normaliser for one model; builds the enumeration table
// once when possible, otherwise falls back to the Ising transfer matrix.
class LogZOracle {
 public:
  explicit LogZOracle(const GrfModel& model);

  double log_z(const VectorXd& theta) const;
  double log_z(double theta) const;  // one-parameter models
  bool enumerable() const { return table_ != nullptr; }
  const StatTable& table() const;

 private:
  GrfModel model_;
  std::shared_ptr<const StatTable> table_;  // null when using the transfer matrix
};

// Normalised posterior density of a one-parameter model evaluated on a grid,
// with the trapezoid-rule normaliser.
struct PosteriorGrid {
  VectorXd grid;      // strictly increasing parameter values
  VectorXd log_post;  // log unnormalised posterior at grid points
  VectorXd density;   // normalised: trapezoid integral is 1
  VectorXd cdf;       // cumulative trapezoid integral of density, cdf[0] = 0
  double log_normalizer = 0.0;

  // Quantile by linear interpolation of the cdf, u in [0, 1].
  double quantile(double u) const;
  // Interpolated cdf value at an arbitrary parameter value.
  double cdf_at(double theta) const;
};

PosteriorGrid exact_posterior_grid(const GrfModel& model, const GrfState& y, const VectorXd& grid);
PosteriorGrid exact_posterior_grid(const GrfModel& model, const GrfState& y, double theta_min,
                                   double theta_max, int grid_points);

struct GridSummaries {
  double mean = 0.0;
  double sd = 0.0;
  double argmax = 0.0;
};

GridSummaries grid_summaries(const PosteriorGrid& grid);

}  // namespace grfmcmc
