#pragma once

#include <functional>
#include <string>
#include <vector>

#include "grfmcmc/oracle.hpp"
#include "grfmcmc/rng.hpp"

namespace grfmcmc {

// Finite-state transition kernel: a validated row-stochastic matrix.
class StochasticMatrix {
 public:
  explicit StochasticMatrix(MatrixXd p);

  int size() const { return static_cast<int>(p_.rows()); }
  const MatrixXd& p() const { return p_; }

  VectorXd stationary() const;
  // Some power up to size^2 is strictly positive (irreducible + aperiodic).
  bool primitive() const;

 private:
  MatrixXd p_;
};

// max_i  (1/2) sum_j |A_ij - B_ij|: the worst-row total-variation distance.
double tv_kernel_distance(const StochasticMatrix& a, const StochasticMatrix& b);

enum class CertMethod { Dobrushin, Minorization };
std::string cert_method_name(CertMethod m);

// Uniform ergodicity certificate: tv(delta_i P^n, pi) <= c * rho^n for all i.
struct ErgodicityCert {
  double c = 1.0;
  double rho = 0.0;
  CertMethod method = CertMethod::Dobrushin;

  int lambda() const;        // ceil(log(1/c) / log(rho)), clamped at 0
  double prefactor() const;  // lambda + c rho^lambda / (1 - rho)
};

// Best certificate available from the Dobrushin coefficient (c = 1) or a
// whole-space minorization (c = 2, rho = 1 - eps), whichever predicts the
// smaller perturbation prefactor.  CertificateError when neither contracts.
ErgodicityCert ergodicity_cert(const StochasticMatrix& p);

struct MitrophanovBound {
  double kappa = 0.0;
  int lambda = 0;
  double prefactor = 0.0;
  double bound = 0.0;  // prefactor * kappa, valid for every n
};

MitrophanovBound mitrophanov_bound(const ErgodicityCert& cert, double kappa);

struct BoundReport {
  double kappa = 0.0;
  int lambda = 0;
  double bound = 0.0;
  std::vector<double> per_n_tv;  // worst-start tv(delta P^n, delta P-hat^n), n = 1..n_max
  double worst_slack = 0.0;      // min over n of bound - per_n_tv
  bool violated = false;         // any n where tv exceeds the bound (or n*kappa)
};

// Numerical check of the perturbation bound for a concrete kernel pair, via
// exact matrix powers; also cross-checks the crude telescoping bound n*kappa.
BoundReport verify_perturbation(const StochasticMatrix& p, const StochasticMatrix& p_hat,
                                int n_max);

struct Theorem3Constants {
  double c = 2.0;
  double rho = 0.0;
  int lambda = 0;
  double prefactor = 0.0;
  double delta_bound = 0.0;  // c_pi^2 c_h^2 K^4 / sqrt(n_aux)
  double total_bound = 0.0;  // prefactor * delta_bound
};

// Constants of the worst-case noisy-kernel bound from the envelope constants
// of the posterior ratio (c_pi), proposal ratio (c_h) and statistic range (K).
// All inputs must be >= 1 and n_aux >= 1.
Theorem3Constants theorem3_constants(double c_pi, double c_h, double k_bound, double n_aux);

struct LangevinDeltaBound {
  double threshold = 0.0;          // 4 k S^2 |Sigma|^2: n_aux must exceed this
  double delta = 0.0;              // moment-generating bound on the gradient error
  double asymptotic = 0.0;         // k log(n/k) / (4 S^2 |Sigma|^2 n)
  double kernel_bound = 0.0;       // sqrt(delta / 2)
  double kernel_bound_loose = 0.0; // sqrt(delta), the weaker constant
};

// One-step kernel deviation bound for the estimated-gradient Langevin kernel.
// OutOfRegimeError when n_aux is not above the threshold.
LangevinDeltaBound langevin_delta_bound(double k_dim, double s_bound, double sigma_norm,
                                        double n_aux);

struct TvEstimate {
  double tv = 0.0;
  double se = 0.0;
  int bins = 0;
};

// Monte Carlo estimate of tv(A(theta0, .), B(theta0, .)) from n_reps draws of
// each one-step kernel, using a shared histogram (bins <= 0 picks
// ceil(n_reps^(1/3))); the standard error comes from 200 bootstrap resamples.
TvEstimate empirical_kernel_tv(const std::function<double(double, RngStream&)>& step_a,
                               const std::function<double(double, RngStream&)>& step_b,
                               double theta0, int n_reps, int bins, RngStream& rng);

struct Corollary1Report {
  ErgodicityCert cert;
  double sup_integral = 0.0;  // sup over the grid of the h-weighted one-step deviation
  double prefactor = 0.0;
  double bound = 0.0;         // prefactor * sup_integral
  double n_aux = 1.0;
};

// Closed-form bound on the distance between the idealised exchange kernel and
// its N-sample noisy version for a one-parameter model, using exact variance
// of the importance weight and a certificate for the grid-discretised exact
// kernel (or a caller-supplied one).
Corollary1Report corollary1_bound(const GrfModel& model, const GrfState& y, const VectorXd& grid,
                                  double proposal_sd, double n_aux,
                                  const ErgodicityCert* cert = nullptr);

// Exact-normaliser Metropolis kernel restricted to the grid; the default
// certificate source for corollary1_bound.
StochasticMatrix discretized_mh_kernel(const GrfModel& model, const GrfState& y,
                                       const VectorXd& grid, double proposal_sd);

// Strictly positive random kernel (rows are Dirichlet(1) draws).
StochasticMatrix random_stochastic_matrix(int n, RngStream& rng);

// Shift up to kappa_max of mass within each row; the perturbed kernel is
// within kappa_max of the original in tv_kernel_distance.
StochasticMatrix perturb_stochastic_matrix(const StochasticMatrix& p, double kappa_max,
                                           RngStream& rng);

}  // namespace grfmcmc
