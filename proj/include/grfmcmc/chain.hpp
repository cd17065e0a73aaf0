#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grfmcmc/model.hpp"

namespace grfmcmc {

enum class Algorithm {
  ExactMh,            // Metropolis-Hastings with the exact normaliser (oracle models only)
  Exchange,           // auxiliary-variable exchange, one perfect-in-the-limit draw
  NoisyExchange,      // exchange with the ratio replaced by an N-sample average
  NoisyLangevin,      // unadjusted Langevin with estimated gradients
  MalaExchange,       // Langevin proposal + exchange-style correction
  NoisyMalaExchange,  // as above with an N-sample weight average
};

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);  // ParseError on unknown
bool algorithm_uses_gradients(Algorithm a);

// Iteration budget: wall-clock mode when seconds > 0, fixed count otherwise.
// A zero budget yields a trace holding only the initial state.
struct Budget {
  long iterations = 1000;
  double seconds = 0.0;
};

struct SamplerConfig {
  int n_aux = 1;          // auxiliary draws per proposal (noisy variants, gradients)
  int aux_burnin = 1000;  // Gibbs sweeps before the first auxiliary draw
  int aux_thin = 4;       // sweeps between consecutive auxiliary draws
  double rw_scale = 0.1;  // sd of the spherical random-walk proposal
  MatrixXd step_matrix;   // SPD; required by gradient-based algorithms
  VectorXd theta0;        // empty -> prior mean
  std::uint64_t seed = 1;
  Budget budget;

  // Throws ContractError when a field is unusable for the given algorithm.
  void validate(const GrfModel& model, Algorithm alg) const;
};

// Mutable state carried between iterations.  Gradient-based samplers keep the
// gradient estimate and the auxiliary sample set of the current point so that
// a rejected proposal costs nothing extra.
struct ChainState {
  VectorXd theta;
  VectorXd cached_grad;
  std::vector<GrfState> cached_aux;
};

struct Trace {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<VectorXd> states;        // states[0] is the initial point
  std::vector<std::uint8_t> accepted;  // accepted[i] refers to the move into states[i]
  std::vector<std::int64_t> elapsed_ns;

  int dim() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
  std::size_t n_steps() const { return states.empty() ? 0 : states.size() - 1; }

  double acceptance_rate() const;  // over post-initial entries
};

}  // namespace grfmcmc
