#include "grfmcmc/chain.hpp"

#include "grfmcmc/errors.hpp"
#include "grfmcmc/numeric.hpp"

namespace grfmcmc {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::ExactMh: return "exact-mh";
    case Algorithm::Exchange: return "exchange";
    case Algorithm::NoisyExchange: return "noisy-exchange";
    case Algorithm::NoisyLangevin: return "noisy-langevin";
    case Algorithm::MalaExchange: return "mala-exchange";
    case Algorithm::NoisyMalaExchange: return "noisy-mala-exchange";
  }
  throw ContractError("algorithm_name: unknown algorithm");
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "exact-mh") return Algorithm::ExactMh;
  if (name == "exchange") return Algorithm::Exchange;
  if (name == "noisy-exchange") return Algorithm::NoisyExchange;
  if (name == "noisy-langevin") return Algorithm::NoisyLangevin;
  if (name == "mala-exchange") return Algorithm::MalaExchange;
  if (name == "noisy-mala-exchange") return Algorithm::NoisyMalaExchange;
  throw ParseError("unknown algorithm: " + name +
                   " (expected exact-mh, exchange, noisy-exchange, noisy-langevin, "
                   "mala-exchange or noisy-mala-exchange)");
}

bool algorithm_uses_gradients(Algorithm a) {
  return a == Algorithm::NoisyLangevin || a == Algorithm::MalaExchange ||
         a == Algorithm::NoisyMalaExchange;
}

void SamplerConfig::validate(const GrfModel& model, Algorithm alg) const {
  if (n_aux < 1) throw ContractError("SamplerConfig: n_aux must be at least 1");
  if (aux_burnin < 0 || aux_thin < 0)
    throw ContractError("SamplerConfig: auxiliary schedule must be non-negative");
  if (budget.iterations < 0) throw ContractError("SamplerConfig: negative iteration budget");
  if (budget.seconds < 0.0) throw ContractError("SamplerConfig: negative time budget");
  if (theta0.size() != 0 && theta0.size() != model.dim())
    throw ContractError("SamplerConfig: theta0 dimension mismatch");
  bool needs_rw = alg == Algorithm::ExactMh || alg == Algorithm::Exchange ||
                  alg == Algorithm::NoisyExchange;
  if (needs_rw && !(rw_scale > 0.0))
    throw ContractError("SamplerConfig: rw_scale must be positive for random-walk proposals");
  if (algorithm_uses_gradients(alg)) {
    if (step_matrix.rows() != model.dim() || step_matrix.cols() != model.dim())
      throw ContractError(
          "SamplerConfig: gradient-based algorithms need a dim x dim step matrix; "
          "run the tune subcommand (or tune_pipeline) to produce one");
    MvNormal check(step_matrix);  // throws unless symmetric positive definite
    (void)check;
  }
}

double Trace::acceptance_rate() const {
  if (states.size() <= 1) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 1; i < accepted.size(); ++i) acc += accepted[i];
  return acc / static_cast<double>(accepted.size() - 1);
}

}  // namespace grfmcmc
