#pragma once

#include <functional>

#include "grfmcmc/chain.hpp"
#include "grfmcmc/rng.hpp"

namespace grfmcmc {

// Decaying step sizes eps_n = a / (b + n) for stochastic approximation.
struct RmSchedule {
  double a = 0.1;
  double b = 10.0;
  double tol = 1e-3;     // stop when the iterate moves less than this
  int max_iter = 20000;  // hard cap; hitting it reports converged = false

  double step(int n) const { return a / (b + n); }
  void validate() const;
};

struct RmResult {
  VectorXd theta;
  bool converged = false;
  int iterations = 0;
};

// Generic ascent driver theta <- theta + eps_n * grad(theta).  Throws
// DivergenceError when the iterate leaves the ball of the given radius.
RmResult robbins_monro(const std::function<VectorXd(const VectorXd&, RngStream&)>& grad,
                       VectorXd theta0, const RmSchedule& schedule, double divergence_radius,
                       RngStream& rng);

// MAP search for a model: stochastic gradients of the log posterior with
// cfg.n_aux auxiliary draws per iteration, starting from cfg.theta0 (or the
// prior mean).
RmResult robbins_monro_map(const GrfModel& model, const GrfState& y_obs,
                           const RmSchedule& schedule, const SamplerConfig& cfg, RngStream& rng);

// Curvature of the log posterior at theta_star: minus the sample covariance
// of the sufficient statistics (n_draws auxiliary draws, n_draws >= 100)
// plus the prior curvature.  A singular sample covariance is an error.
MatrixXd estimate_log_posterior_hessian(const GrfModel& model, const GrfState& y_obs,
                                        const VectorXd& theta_star, int n_draws,
                                        const SamplerConfig& cfg, RngStream& rng);

// Sigma = scale * (-hessian)^{-1}, checked symmetric positive definite
// (all eigenvalues above 1e-12).
MatrixXd tune_step_matrix(const MatrixXd& hessian, double scale);

struct TuneReport {
  VectorXd theta_star;
  bool rm_converged = false;
  int rm_iterations = 0;
  MatrixXd hessian;
  double scale = 1.0;
  MatrixXd step_matrix;
  double acceptance = 0.0;  // pilot acceptance at the reported scale
  int pilot_runs = 0;
};

// End-to-end proposal tuning: MAP point, curvature, then a bisection search
// on the step-matrix scale until short pilot runs of `pilot_alg` accept
// within target_band of target_acceptance (at most max_rounds pilots).
TuneReport tune_pipeline(const GrfModel& model, const GrfState& y_obs, Algorithm pilot_alg,
                         const RmSchedule& schedule, const SamplerConfig& cfg, int hessian_draws,
                         double target_acceptance, double target_band, long pilot_iters,
                         int max_rounds, RngStream& rng);

}  // namespace grfmcmc
