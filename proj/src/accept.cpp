#include "grfmcmc/accept.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace grfmcmc {

double log_posterior_ratio_base(const GaussianPrior& prior, const VectorXd& s_obs,
                                const VectorXd& theta, const VectorXd& theta_prop) {
  if (s_obs.size() != theta.size() || theta.size() != theta_prop.size())
    throw ContractError("log_posterior_ratio_base: dimension mismatch");
  return (theta_prop - theta).dot(s_obs) + prior.log_density(theta_prop) -
         prior.log_density(theta);
}

double log_mean_importance_weight(const VectorXd& theta, const VectorXd& theta_prop,
                                  const MatrixXd& s_aux) {
  if (s_aux.rows() < 1) throw ContractError("log_mean_importance_weight: need at least one draw");
  if (s_aux.cols() != theta.size())
    throw ContractError("log_mean_importance_weight: statistic dimension mismatch");
  VectorXd diff = theta - theta_prop;
  VectorXd logs = s_aux * diff;
  return log_sum_exp({logs.data(), static_cast<std::size_t>(logs.size())}) -
         std::log(static_cast<double>(s_aux.rows()));
}

double log_exchange_ratio(const GaussianPrior& prior, const VectorXd& s_obs, const VectorXd& theta,
                          const VectorXd& theta_prop, const VectorXd& s_aux) {
  return log_posterior_ratio_base(prior, s_obs, theta, theta_prop) +
         (theta - theta_prop).dot(s_aux);
}

double log_noisy_exchange_ratio(const GaussianPrior& prior, const VectorXd& s_obs,
                                const VectorXd& theta, const VectorXd& theta_prop,
                                const MatrixXd& s_aux) {
  return log_posterior_ratio_base(prior, s_obs, theta, theta_prop) +
         log_mean_importance_weight(theta, theta_prop, s_aux);
}

double log_exact_mh_ratio(const GaussianPrior& prior, const VectorXd& s_obs, const VectorXd& theta,
                          const VectorXd& theta_prop, double log_z, double log_z_prop) {
  return log_posterior_ratio_base(prior, s_obs, theta, theta_prop) + log_z - log_z_prop;
}

double log_mala_proposal_ratio(const MvNormal& noise, const VectorXd& theta,
                               const VectorXd& theta_prop, const VectorXd& grad,
                               const VectorXd& grad_prop) {
  VectorXd fwd_mean = theta + 0.5 * (noise.cov() * grad);
  VectorXd rev_mean = theta_prop + 0.5 * (noise.cov() * grad_prop);
  return noise.logpdf(theta, rev_mean) - noise.logpdf(theta_prop, fwd_mean);
}

double log_mala_exchange_ratio(const GaussianPrior& prior, const VectorXd& s_obs,
                               const VectorXd& theta, const VectorXd& theta_prop,
                               const VectorXd& grad, const VectorXd& grad_prop,
                               const MvNormal& noise, const VectorXd& s_aux_first) {
  return log_exchange_ratio(prior, s_obs, theta, theta_prop, s_aux_first) +
         log_mala_proposal_ratio(noise, theta, theta_prop, grad, grad_prop);
}

double log_noisy_mala_exchange_ratio(const GaussianPrior& prior, const VectorXd& s_obs,
                                     const VectorXd& theta, const VectorXd& theta_prop,
                                     const VectorXd& grad, const VectorXd& grad_prop,
                                     const MvNormal& noise, const MatrixXd& s_aux) {
  return log_noisy_exchange_ratio(prior, s_obs, theta, theta_prop, s_aux) +
         log_mala_proposal_ratio(noise, theta, theta_prop, grad, grad_prop);
}

VectorXd grad_log_posterior_from_stats(const GaussianPrior& prior, const VectorXd& s_obs,
                                       const VectorXd& theta, const MatrixXd& s_aux) {
  if (s_aux.rows() < 1) throw ContractError("grad_log_posterior_from_stats: need at least one draw");
  if (s_aux.cols() != theta.size() || s_obs.size() != theta.size())
    throw ContractError("grad_log_posterior_from_stats: dimension mismatch");
  VectorXd mean_aux = s_aux.colwise().mean();
  return prior.grad_log_density(theta) + s_obs - mean_aux;
}

double acceptance_probability(double log_ratio) {
  return std::exp(std::min(0.0, log_ratio));
}

}  // namespace grfmcmc
