#include "grfmcmc/samplers.hpp"

#include <chrono>
#include <cmath>
#include <memory>

namespace grfmcmc {

namespace {

VectorXd rw_proposal(const VectorXd& theta, double scale, RngStream& rng) {
  VectorXd prop(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) prop[i] = theta[i] + scale * rng.normal();
  return prop;
}

bool accept_with(double log_ratio, RngStream& rng) {
  return rng.uniform() < acceptance_probability(log_ratio);
}

}  // namespace

VectorXd grad_log_posterior_estimate(const GrfModel& model, const GrfState& y_obs,
                                     const VectorXd& theta, const SamplerConfig& cfg,
                                     RngStream& rng) {
  MatrixXd s_aux =
      draw_auxiliary_stats(model, theta, cfg.n_aux, cfg.aux_burnin, cfg.aux_thin, rng);
  return grad_log_posterior_from_stats(model.prior(), model.suffstats(y_obs), theta, s_aux);
}

ChainState init_chain_state(Algorithm alg, const GrfModel& model, const GrfState& y_obs,
                            const SamplerConfig& cfg, RngStream& rng) {
  ChainState st;
  st.theta = cfg.theta0.size() != 0 ? cfg.theta0 : model.prior().mean;
  bool caches_gradient = alg == Algorithm::MalaExchange || alg == Algorithm::NoisyMalaExchange;
  if (caches_gradient) {
    st.cached_aux =
        draw_auxiliary(model, st.theta, cfg.n_aux, cfg.aux_burnin, cfg.aux_thin, rng);
    MatrixXd s_aux = suffstat_rows(model, st.cached_aux);
    st.cached_grad =
        grad_log_posterior_from_stats(model.prior(), model.suffstats(y_obs), st.theta, s_aux);
  }
  return st;
}

bool exact_mh_step(const GrfModel& model, const LogZOracle& oracle, const GrfState& y_obs,
                   ChainState& state, const SamplerConfig& cfg, RngStream& rng) {
  VectorXd s_obs = model.suffstats(y_obs);
  VectorXd prop = rw_proposal(state.theta, cfg.rw_scale, rng);
  double lr = log_exact_mh_ratio(model.prior(), s_obs, state.theta, prop,
                                 oracle.log_z(state.theta), oracle.log_z(prop));
  if (accept_with(lr, rng)) {
    state.theta = prop;
    return true;
  }
  return false;
}

bool exchange_step(const GrfModel& model, const GrfState& y_obs, ChainState& state,
                   const SamplerConfig& cfg, RngStream& rng) {
  VectorXd s_obs = model.suffstats(y_obs);
  VectorXd prop = rw_proposal(state.theta, cfg.rw_scale, rng);
  std::vector<GrfState> aux = draw_auxiliary(model, prop, 1, cfg.aux_burnin, cfg.aux_thin, rng);
  double lr =
      log_exchange_ratio(model.prior(), s_obs, state.theta, prop, model.suffstats(aux[0]));
  if (accept_with(lr, rng)) {
    state.theta = prop;
    return true;
  }
  return false;
}

bool noisy_exchange_step(const GrfModel& model, const GrfState& y_obs, ChainState& state,
                         const SamplerConfig& cfg, RngStream& rng) {
  VectorXd s_obs = model.suffstats(y_obs);
  VectorXd prop = rw_proposal(state.theta, cfg.rw_scale, rng);
  MatrixXd s_aux = draw_auxiliary_stats(model, prop, cfg.n_aux, cfg.aux_burnin, cfg.aux_thin, rng);
  double lr = log_noisy_exchange_ratio(model.prior(), s_obs, state.theta, prop, s_aux);
  if (accept_with(lr, rng)) {
    state.theta = prop;
    return true;
  }
  return false;
}

bool noisy_langevin_step(const GrfModel& model, const GrfState& y_obs, ChainState& state,
                         const SamplerConfig& cfg, RngStream& rng) {
  MvNormal noise(cfg.step_matrix);
  VectorXd grad = grad_log_posterior_estimate(model, y_obs, state.theta, cfg, rng);
  VectorXd mean = state.theta + 0.5 * (noise.cov() * grad);
  state.theta = noise.sample(mean, rng);
  return true;  // unadjusted: every move is taken
}

namespace {

bool mala_family_step(bool noisy, const GrfModel& model, const GrfState& y_obs, ChainState& state,
                      const SamplerConfig& cfg, RngStream& rng) {
  if (state.cached_grad.size() != model.dim())
    throw ContractError("mala step: chain state is missing the cached gradient; "
                        "initialise with init_chain_state");
  MvNormal noise(cfg.step_matrix);
  VectorXd s_obs = model.suffstats(y_obs);
  VectorXd fwd_mean = state.theta + 0.5 * (noise.cov() * state.cached_grad);
  VectorXd prop = noise.sample(fwd_mean, rng);
  std::vector<GrfState> aux =
      draw_auxiliary(model, prop, cfg.n_aux, cfg.aux_burnin, cfg.aux_thin, rng);
  MatrixXd s_aux = suffstat_rows(model, aux);
  VectorXd grad_prop = grad_log_posterior_from_stats(model.prior(), s_obs, prop, s_aux);
  double lr =
      noisy ? log_noisy_mala_exchange_ratio(model.prior(), s_obs, state.theta, prop,
                                            state.cached_grad, grad_prop, noise, s_aux)
            : log_mala_exchange_ratio(model.prior(), s_obs, state.theta, prop, state.cached_grad,
                                      grad_prop, noise, s_aux.row(0));
  if (accept_with(lr, rng)) {
    state.theta = prop;
    state.cached_grad = grad_prop;
    state.cached_aux = std::move(aux);
    return true;
  }
  return false;  // keep the cached gradient and auxiliary set of theta
}

}  // namespace

bool mala_exchange_step(const GrfModel& model, const GrfState& y_obs, ChainState& state,
                        const SamplerConfig& cfg, RngStream& rng) {
  return mala_family_step(false, model, y_obs, state, cfg, rng);
}

bool noisy_mala_exchange_step(const GrfModel& model, const GrfState& y_obs, ChainState& state,
                              const SamplerConfig& cfg, RngStream& rng) {
  return mala_family_step(true, model, y_obs, state, cfg, rng);
}

Trace run_chain(Algorithm alg, const GrfModel& model, const GrfState& y_obs,
                const SamplerConfig& cfg) {
  model.validate_state(y_obs);
  cfg.validate(model, alg);
  RngStream rng(cfg.seed);

  std::unique_ptr<LogZOracle> oracle;
  if (alg == Algorithm::ExactMh) oracle = std::make_unique<LogZOracle>(model);

  ChainState st = init_chain_state(alg, model, y_obs, cfg, rng);
  Trace tr;
  tr.algorithm = algorithm_name(alg);
  tr.seed = cfg.seed;
  tr.states.push_back(st.theta);
  tr.accepted.push_back(1);
  tr.elapsed_ns.push_back(0);

  using clock = std::chrono::steady_clock;
  const auto t_begin = clock::now();
  const bool timed = cfg.budget.seconds > 0.0;
  long iter = 0;
  while (true) {
    if (timed) {
      double elapsed = std::chrono::duration<double>(clock::now() - t_begin).count();
      if (elapsed >= cfg.budget.seconds) break;
    } else if (iter >= cfg.budget.iterations) {
      break;
    }
    auto t0 = clock::now();
    bool acc = false;
    switch (alg) {
      case Algorithm::ExactMh: acc = exact_mh_step(model, *oracle, y_obs, st, cfg, rng); break;
      case Algorithm::Exchange: acc = exchange_step(model, y_obs, st, cfg, rng); break;
      case Algorithm::NoisyExchange: acc = noisy_exchange_step(model, y_obs, st, cfg, rng); break;
      case Algorithm::NoisyLangevin: acc = noisy_langevin_step(model, y_obs, st, cfg, rng); break;
      case Algorithm::MalaExchange: acc = mala_exchange_step(model, y_obs, st, cfg, rng); break;
      case Algorithm::NoisyMalaExchange:
        acc = noisy_mala_exchange_step(model, y_obs, st, cfg, rng);
        break;
    }
    auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - t0).count();
    tr.states.push_back(st.theta);
    tr.accepted.push_back(acc ? 1 : 0);
    tr.elapsed_ns.push_back(ns);
    ++iter;
  }
  return tr;
}

}  // namespace grfmcmc
