#include "grfmcmc/tuning.hpp"

#include <cmath>
#include <string>

#include "grfmcmc/errors.hpp"
#include "grfmcmc/samplers.hpp"

namespace grfmcmc {

void RmSchedule::validate() const {
  if (!(a > 0.0) || !(b > 0.0)) throw ContractError("RmSchedule: a and b must be positive");
  if (!(tol > 0.0)) throw ContractError("RmSchedule: tol must be positive");
  if (max_iter < 1) throw ContractError("RmSchedule: max_iter must be at least 1");
}

RmResult robbins_monro(const std::function<VectorXd(const VectorXd&, RngStream&)>& grad,
                       VectorXd theta0, const RmSchedule& schedule, double divergence_radius,
                       RngStream& rng) {
  schedule.validate();
  if (!(divergence_radius > 0.0)) throw ContractError("robbins_monro: radius must be positive");
  RmResult res;
  res.theta = std::move(theta0);
  for (int n = 0; n < schedule.max_iter; ++n) {
    VectorXd g = grad(res.theta, rng);
    VectorXd next = res.theta + schedule.step(n) * g;
    if (next.norm() > divergence_radius)
      throw DivergenceError("robbins_monro: iterate left the trust region (|theta| > " +
                            std::to_string(divergence_radius) + ") after " + std::to_string(n + 1) +
                            " iterations");
    double moved = (next - res.theta).norm();
    res.theta = std::move(next);
    res.iterations = n + 1;
    if (moved < schedule.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

namespace {

// Safety envelope for the MAP search: an iterate this far out means the
// gradient signal is pathological, not that the optimum is far away.
double divergence_radius_for(const GrfModel& model) {
  double prior_sd = std::sqrt(model.prior().variance.maxCoeff());
  return 10.0 * prior_sd * std::sqrt(static_cast<double>(model.dim()));
}

}  // namespace

RmResult robbins_monro_map(const GrfModel& model, const GrfState& y_obs,
                           const RmSchedule& schedule, const SamplerConfig& cfg, RngStream& rng) {
  model.validate_state(y_obs);
  VectorXd theta0 = cfg.theta0.size() != 0 ? cfg.theta0 : model.prior().mean;
  if (theta0.size() != model.dim()) throw ContractError("robbins_monro_map: theta0 dimension");
  auto grad = [&](const VectorXd& theta, RngStream& r) {
    return grad_log_posterior_estimate(model, y_obs, theta, cfg, r);
  };
  return robbins_monro(grad, theta0, schedule, divergence_radius_for(model), rng);
}

MatrixXd estimate_log_posterior_hessian(const GrfModel& model, const GrfState& y_obs,
                                        const VectorXd& theta_star, int n_draws,
                                        const SamplerConfig& cfg, RngStream& rng) {
  model.validate_state(y_obs);
  if (theta_star.size() != model.dim())
    throw ContractError("estimate_log_posterior_hessian: parameter dimension mismatch");
  if (n_draws < 100)
    throw ContractError("estimate_log_posterior_hessian: need at least 100 draws");
  MatrixXd s = draw_auxiliary_stats(model, theta_star, n_draws, cfg.aux_burnin, cfg.aux_thin, rng);
  Eigen::RowVectorXd mean = s.colwise().mean();
  MatrixXd centered = s.rowwise() - mean;
  MatrixXd cov = centered.transpose() * centered / static_cast<double>(n_draws - 1);
  cov = 0.5 * (cov + cov.transpose());

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
  double max_eig = es.eigenvalues().maxCoeff();
  if (es.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, max_eig))
    throw SingularMatrixError(
        "estimate_log_posterior_hessian: sample covariance of the statistics is singular; "
        "increase n_draws or inspect the model (a statistic may be constant at theta_star)");

  return -cov + model.prior().hessian_log_density();
}

MatrixXd tune_step_matrix(const MatrixXd& hessian, double scale) {
  if (hessian.rows() != hessian.cols() || hessian.rows() == 0)
    throw ContractError("tune_step_matrix: hessian must be square");
  if (!(scale > 0.0)) throw ContractError("tune_step_matrix: scale must be positive");
  MatrixXd neg = -0.5 * (hessian + hessian.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(neg);
  if (es.eigenvalues().minCoeff() <= 1e-12)
    throw SingularMatrixError(
        "tune_step_matrix: -hessian is not positive definite; use more draws for the "
        "curvature estimate or strengthen the prior");
  VectorXd inv = es.eigenvalues().cwiseInverse() * scale;
  MatrixXd sigma = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  sigma = 0.5 * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> check(sigma);
  if (check.eigenvalues().minCoeff() <= 1e-12)
    throw SingularMatrixError("tune_step_matrix: resulting step matrix is not positive definite");
  return sigma;
}

TuneReport tune_pipeline(const GrfModel& model, const GrfState& y_obs, Algorithm pilot_alg,
                         const RmSchedule& schedule, const SamplerConfig& cfg, int hessian_draws,
                         double target_acceptance, double target_band, long pilot_iters,
                         int max_rounds, RngStream& rng) {
  if (!algorithm_uses_gradients(pilot_alg) && pilot_alg != Algorithm::Exchange &&
      pilot_alg != Algorithm::NoisyExchange && pilot_alg != Algorithm::ExactMh)
    throw ContractError("tune_pipeline: unsupported pilot algorithm");
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0))
    throw ContractError("tune_pipeline: target acceptance must lie in (0, 1)");
  if (!(target_band > 0.0)) throw ContractError("tune_pipeline: target band must be positive");
  if (pilot_iters < 1 || max_rounds < 1)
    throw ContractError("tune_pipeline: pilot budget must be positive");

  TuneReport rep;
  RmResult rm = robbins_monro_map(model, y_obs, schedule, cfg, rng);
  rep.theta_star = rm.theta;
  rep.rm_converged = rm.converged;
  rep.rm_iterations = rm.iterations;
  rep.hessian = estimate_log_posterior_hessian(model, y_obs, rm.theta, hessian_draws, cfg, rng);

  auto pilot_acceptance = [&](double scale, int round) {
    SamplerConfig pilot = cfg;
    pilot.theta0 = rm.theta;
    pilot.step_matrix = tune_step_matrix(rep.hessian, scale);
    pilot.budget.iterations = pilot_iters;
    pilot.budget.seconds = 0.0;
    pilot.seed = rng.substream(static_cast<std::uint64_t>(round) + 1).next_u64();
    Trace tr = run_chain(pilot_alg, model, y_obs, pilot);
    return tr.acceptance_rate();
  };

  // Acceptance falls as the proposal grows; bisect on log-scale in [0.1, 10].
  double lo = 0.1, hi = 10.0;
  double best_scale = 1.0, best_acc = -1.0;
  double scale = 1.0;
  for (int round = 0; round < max_rounds; ++round) {
    double acc = pilot_acceptance(scale, round);
    rep.pilot_runs = round + 1;
    if (best_acc < 0.0 || std::abs(acc - target_acceptance) < std::abs(best_acc - target_acceptance)) {
      best_acc = acc;
      best_scale = scale;
    }
    if (std::abs(acc - target_acceptance) <= target_band) break;
    if (acc > target_acceptance)
      lo = scale;  // accepting too often: take bigger steps
    else
      hi = scale;
    scale = std::sqrt(lo * hi);
  }
  rep.scale = best_scale;
  rep.acceptance = best_acc;
  rep.step_matrix = tune_step_matrix(rep.hessian, best_scale);
  return rep;
}

}  // namespace grfmcmc
