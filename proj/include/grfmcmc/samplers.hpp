#pragma once

#include "grfmcmc/accept.hpp"
#include "grfmcmc/chain.hpp"
#include "grfmcmc/gibbs.hpp"
#include "grfmcmc/oracle.hpp"

namespace grfmcmc {

// Estimated posterior log gradient at theta, using cfg.n_aux auxiliary draws
// simulated at theta with the config's Gibbs schedule.
VectorXd grad_log_posterior_estimate(const GrfModel& model, const GrfState& y_obs,
                                     const VectorXd& theta, const SamplerConfig& cfg,
                                     RngStream& rng);

// Starting state for an algorithm: theta0 (or the prior mean), plus the
// cached gradient/auxiliary set for the kernels that carry them.
ChainState init_chain_state(Algorithm alg, const GrfModel& model, const GrfState& y_obs,
                            const SamplerConfig& cfg, RngStream& rng);

// One transition of each kernel.  The state is updated in place; the return
// value is whether the proposal was accepted (the unadjusted Langevin kernel
// always reports true).
bool exact_mh_step(const GrfModel& model, const LogZOracle& oracle, const GrfState& y_obs,
                   ChainState& state, const SamplerConfig& cfg, RngStream& rng);
bool exchange_step(const GrfModel& model, const GrfState& y_obs, ChainState& state,
                   const SamplerConfig& cfg, RngStream& rng);
bool noisy_exchange_step(const GrfModel& model, const GrfState& y_obs, ChainState& state,
                         const SamplerConfig& cfg, RngStream& rng);
bool noisy_langevin_step(const GrfModel& model, const GrfState& y_obs, ChainState& state,
                         const SamplerConfig& cfg, RngStream& rng);
bool mala_exchange_step(const GrfModel& model, const GrfState& y_obs, ChainState& state,
                        const SamplerConfig& cfg, RngStream& rng);
bool noisy_mala_exchange_step(const GrfModel& model, const GrfState& y_obs, ChainState& state,
                              const SamplerConfig& cfg, RngStream& rng);

// Run a full chain under the config's budget.  Deterministic given the seed
// when the budget is iteration-based.
Trace run_chain(Algorithm alg, const GrfModel& model, const GrfState& y_obs,
                const SamplerConfig& cfg);

}  // namespace grfmcmc
