#pragma once

#include "grfmcmc/model.hpp"
#include "grfmcmc/numeric.hpp"

namespace grfmcmc {

// Log acceptance ratios of the samplers, as pure functions of the quantities
// they depend on.  Keeping these separate from the stepping code lets the
// algebraic identities between the exact and estimated variants be tested
// pointwise.

// Common piece: (theta' - theta)' s_obs + log pi(theta') - log pi(theta).
// This is the log posterior ratio with the intractable normalisers dropped.
double log_posterior_ratio_base(const GaussianPrior& prior, const VectorXd& s_obs,
                                const VectorXd& theta, const VectorXd& theta_prop);

// log of the averaged importance weight (1/N) sum_i exp((theta - theta')' s_i),
// whose expectation over auxiliary draws at theta' is Z(theta)/Z(theta').
// Rows of s_aux are the statistics of the auxiliary draws.
double log_mean_importance_weight(const VectorXd& theta, const VectorXd& theta_prop,
                                  const MatrixXd& s_aux);

// Exchange move with a single auxiliary draw.
double log_exchange_ratio(const GaussianPrior& prior, const VectorXd& s_obs, const VectorXd& theta,
                          const VectorXd& theta_prop, const VectorXd& s_aux);

// Exchange move with the N-sample weight average.
double log_noisy_exchange_ratio(const GaussianPrior& prior, const VectorXd& s_obs,
                                const VectorXd& theta, const VectorXd& theta_prop,
                                const MatrixXd& s_aux);

// Marginal Metropolis-Hastings ratio when log Z is available exactly.
double log_exact_mh_ratio(const GaussianPrior& prior, const VectorXd& s_obs, const VectorXd& theta,
                          const VectorXd& theta_prop, double log_z, double log_z_prop);

// Asymmetry correction for Langevin proposals: the proposal mean at x is
// x + (Sigma/2) grad(x), with innovation covariance Sigma shared both ways.
double log_mala_proposal_ratio(const MvNormal& noise, const VectorXd& theta,
                               const VectorXd& theta_prop, const VectorXd& grad,
                               const VectorXd& grad_prop);

double log_mala_exchange_ratio(const GaussianPrior& prior, const VectorXd& s_obs,
                               const VectorXd& theta, const VectorXd& theta_prop,
                               const VectorXd& grad, const VectorXd& grad_prop,
                               const MvNormal& noise, const VectorXd& s_aux_first);

double log_noisy_mala_exchange_ratio(const GaussianPrior& prior, const VectorXd& s_obs,
                                     const VectorXd& theta, const VectorXd& theta_prop,
                                     const VectorXd& grad, const VectorXd& grad_prop,
                                     const MvNormal& noise, const MatrixXd& s_aux);

// Gradient of the log posterior with the intractable expectation replaced by
// an auxiliary-sample average: grad log pi(theta) + s_obs - mean(s_aux).
VectorXd grad_log_posterior_from_stats(const GaussianPrior& prior, const VectorXd& s_obs,
                                       const VectorXd& theta, const MatrixXd& s_aux);

// min(1, exp(log_ratio)) computed as exp(min(0, log_ratio)).
double acceptance_probability(double log_ratio);

}  // namespace grfmcmc
