#pragma once

#include <string>
#include <variant>
#include <vector>

#include "grfmcmc/graph.hpp"
#include "grfmcmc/lattice.hpp"
#include "grfmcmc/numeric.hpp"

namespace grfmcmc {

// A binary-site configuration: either a spin lattice or a graph.
using GrfState = std::variant<SpinLattice, UndirectedGraph>;

// Network statistics, in the canonical order used everywhere in the toolkit.
enum class ErgmStat { Edges = 0, TwoStars = 1, ThreeStars = 2, Triangles = 3 };

std::string ergm_stat_name(ErgmStat s);
ErgmStat ergm_stat_from_name(const std::string& name);

// Independent Gaussian prior on the natural parameters.
struct GaussianPrior {
  VectorXd mean;
  VectorXd variance;  // per-coordinate, all > 0

  static GaussianPrior iso(int dim, double mean = 0.0, double variance = 100.0);

  int dim() const { return static_cast<int>(mean.size()); }
  void validate() const;
  double log_density(const VectorXd& theta) const;
  VectorXd grad_log_density(const VectorXd& theta) const;
  MatrixXd hessian_log_density() const;  // constant: -diag(1/variance)
};

// Exponential-family random field f(y|theta) proportional to exp(theta' s(y)),
// over configurations of a fixed site structure.  Two concrete families:
// an Ising lattice (single interaction parameter, nearest-neighbour product
// statistic) and an exponential random graph with a chosen statistic vector.
class GrfModel {
 public:
  enum class Kind { Ising, Ergm };

  static GrfModel ising(int height, int width);
  static GrfModel ising(int height, int width, GaussianPrior prior);
  static GrfModel ergm(int n_nodes, std::vector<ErgmStat> stats);
  static GrfModel ergm(int n_nodes, std::vector<ErgmStat> stats, GaussianPrior prior);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const GaussianPrior& prior() const { return prior_; }

  int height() const;   // Ising only
  int width() const;    // Ising only
  int n_nodes() const;  // ERGM only
  const std::vector<ErgmStat>& stats() const;  // ERGM only

  // Number of binary sites (lattice cells, or dyads); the state space has
  // 2^n_sites() configurations.
  int n_sites() const;

  // Euclidean bound on ||s(y)|| over all configurations.
  double stat_bound() const;

  // Throws ContractError unless the state matches this model's structure.
  void validate_state(const GrfState& y) const;

  VectorXd suffstats(const GrfState& y) const;

  // s(y with site toggled) - s(y), at O(neighbourhood) cost.
  VectorXd change_statistic(const GrfState& y, int site) const;

  double unnorm_logdensity(const VectorXd& theta, const GrfState& y) const;

  // All sites at their reference value (-1 spins / no edges).
  GrfState reference_state() const;

  // Every site set independently uniformly at random.
  GrfState random_state(RngStream& rng) const;

 private:
  GrfModel(Kind kind, int a, int b, std::vector<ErgmStat> stats, GaussianPrior prior);

  Kind kind_;
  int height_ = 0, width_ = 0;  // Ising
  int n_nodes_ = 0;             // ERGM
  std::vector<ErgmStat> stats_;
  int dim_;
  GaussianPrior prior_;
};

// Named statistic evaluators (thin wrappers over GrfModel::suffstats).
double ising_suffstat(const SpinLattice& y);
VectorXd ergm_suffstats(const UndirectedGraph& g, const std::vector<ErgmStat>& stats);

// s(g with dyad toggled) - s(g) for a graph, without going through GrfState.
VectorXd ergm_change_statistic(const UndirectedGraph& g, const std::vector<ErgmStat>& stats,
                               int dyad);

}  // namespace grfmcmc
