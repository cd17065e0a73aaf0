#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "grfmcmc/accept.hpp"
#include "grfmcmc/errors.hpp"
#include "grfmcmc/samplers.hpp"
#include "helpers.hpp"

using namespace grfmcmc;
using grfmcmc::testing::simulate_lattice;
using grfmcmc::testing::vec;

TEST_SUITE_BEGIN("chain");

TEST_CASE("algorithm names round-trip") {
  for (Algorithm a : {Algorithm::ExactMh, Algorithm::Exchange, Algorithm::NoisyExchange,
                      Algorithm::NoisyLangevin, Algorithm::MalaExchange,
                      Algorithm::NoisyMalaExchange})
    CHECK(algorithm_from_name(algorithm_name(a)) == a);
  CHECK_THROWS_AS(algorithm_from_name("metropolis"), ParseError);
  CHECK(algorithm_uses_gradients(Algorithm::MalaExchange));
  CHECK(algorithm_uses_gradients(Algorithm::NoisyLangevin));
  CHECK_FALSE(algorithm_uses_gradients(Algorithm::Exchange));
}

TEST_CASE("sampler config validation") {
  GrfModel m = GrfModel::ising(3, 3);
  SamplerConfig cfg;
  CHECK_NOTHROW(cfg.validate(m, Algorithm::Exchange));

  SamplerConfig bad = cfg;
  bad.n_aux = 0;
  CHECK_THROWS_AS(bad.validate(m, Algorithm::NoisyExchange), ContractError);
  bad = cfg;
  bad.aux_burnin = -1;
  CHECK_THROWS_AS(bad.validate(m, Algorithm::Exchange), ContractError);
  bad = cfg;
  bad.rw_scale = 0.0;
  CHECK_THROWS_AS(bad.validate(m, Algorithm::Exchange), ContractError);
  bad = cfg;
  bad.theta0 = vec({0.1, 0.2});
  CHECK_THROWS_AS(bad.validate(m, Algorithm::Exchange), ContractError);
  bad = cfg;
  bad.budget.iterations = -5;
  CHECK_THROWS_AS(bad.validate(m, Algorithm::Exchange), ContractError);

  // gradient algorithms must be pointed at the tuner when no step matrix is set
  bad = cfg;
  try {
    bad.validate(m, Algorithm::MalaExchange);
    CHECK(false);
  } catch (const ContractError& e) {
    CHECK(std::string(e.what()).find("tune") != std::string::npos);
  }
  bad.step_matrix = MatrixXd::Constant(1, 1, 0.05);
  CHECK_NOTHROW(bad.validate(m, Algorithm::MalaExchange));
}

TEST_CASE("acceptance ratio identities") {
  GaussianPrior prior = GaussianPrior::iso(1, 0.0, 100.0);
  RngStream rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    VectorXd s_obs = vec({rng.uniform(-10, 10)});
    VectorXd a = vec({rng.uniform(-1, 1)});
    VectorXd b = vec({rng.uniform(-1, 1)});
    // antisymmetry of the base ratio
    double fwd = log_posterior_ratio_base(prior, s_obs, a, b);
    double bwd = log_posterior_ratio_base(prior, s_obs, b, a);
    CHECK(fwd == doctest::Approx(-bwd).epsilon(1e-13));
    // theta == theta' is a null move
    CHECK(log_posterior_ratio_base(prior, s_obs, a, a) == 0.0);

    // single-draw reduction, pointwise
    MatrixXd s_aux(1, 1);
    s_aux(0, 0) = rng.uniform(-12, 12);
    CHECK(log_noisy_exchange_ratio(prior, s_obs, a, b, s_aux) ==
          log_exchange_ratio(prior, s_obs, a, b, s_aux.row(0)));
  }
  CHECK(acceptance_probability(0.0) == 1.0);
  CHECK(acceptance_probability(3.0) == 1.0);
  CHECK(acceptance_probability(-1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("importance weight average is the normaliser ratio in expectation") {
  // enumerate E_{y' ~ theta'}[q_theta(y')/q_theta'(y')] exactly on 2x2
  GrfModel m = GrfModel::ising(2, 2);
  StatTable table = enumerate_stat_table(m);
  RngStream rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    VectorXd theta = vec({rng.uniform(-1, 1)});
    VectorXd prop = vec({rng.uniform(-1, 1)});
    double log_expect = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    for (int k = 0; k < table.stats.rows(); ++k) {
      double log_p = table.log_counts[k] + table.stats.row(k).dot(prop) - table.log_z(prop);
      terms.push_back(log_p + (theta - prop).dot(table.stats.row(k)));
    }
    log_expect = log_sum_exp(terms);
    CHECK(log_expect ==
          doctest::Approx(table.log_z(theta) - table.log_z(prop)).epsilon(1e-12));
  }
}

TEST_CASE("gibbs site update follows the full conditional") {
  GrfModel m = GrfModel::ising(2, 2);
  VectorXd zero = vec({0.0});
  RngStream rng(14);
  GrfState y = m.reference_state();
  int plus = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    gibbs_site_update(m, zero, y, 0, rng);
    plus += std::get<SpinLattice>(y).spin(0) == 1;
  }
  CHECK(std::abs(plus / double(n) - 0.5) < 0.03);

  // strong coupling freezes a site aligned with its neighbours
  GrfState all(SpinLattice(2, 2, 1));
  VectorXd strong = vec({6.0});
  for (int i = 0; i < 50; ++i) gibbs_site_update(m, strong, all, 0, rng);
  CHECK(std::get<SpinLattice>(all).spin(0) == 1);

  CHECK_THROWS_AS(gibbs_site_update(m, zero, y, 4, rng), ContractError);
  CHECK_THROWS_AS(gibbs_site_update(m, vec({0.0, 1.0}), y, 0, rng), ContractError);

  // consumes exactly one uniform per call
  RngStream r1(3), r2(3);
  GrfState s1 = m.reference_state();
  gibbs_site_update(m, zero, s1, 1, r1);
  (void)r2.next_u64();
  CHECK(r1.next_u64() == r2.next_u64());
}

TEST_CASE("gibbs draws match the exact statistic distribution") {
  GrfModel m = GrfModel::ising(2, 2);
  VectorXd theta = vec({0.3});
  // s in {4, 0, -4} with multiplicities 2, 12, 2
  double z = 2 * std::exp(1.2) + 12 + 2 * std::exp(-1.2);
  double p4 = 2 * std::exp(1.2) / z, p0 = 12 / z, pm4 = 2 * std::exp(-1.2) / z;
  RngStream rng(60);
  const int n = 600;
  MatrixXd s = draw_auxiliary_stats(m, theta, n, 30, 3, rng);
  int c4 = 0, c0 = 0, cm4 = 0;
  for (int i = 0; i < n; ++i) {
    if (s(i, 0) == 4.0) ++c4;
    else if (s(i, 0) == 0.0) ++c0;
    else if (s(i, 0) == -4.0) ++cm4;
    else CHECK(false);
  }
  auto close = [&](int c, double p) {
    return std::abs(c / double(n) - p) < 4.5 * std::sqrt(p * (1 - p) / n);
  };
  CHECK(close(c4, p4));
  CHECK(close(c0, p0));
  CHECK(close(cm4, pm4));
}

TEST_CASE("gibbs draws match independent-dyad means for an edge-only ergm") {
  GrfModel m = GrfModel::ergm(4, {ErgmStat::Edges});
  VectorXd theta = vec({0.5});
  double p = 1.0 / (1.0 + std::exp(-0.5));
  RngStream rng(61);
  MatrixXd s = draw_auxiliary_stats(m, theta, 400, 10, 1, rng);
  CHECK(s.col(0).mean() == doctest::Approx(6 * p).epsilon(0.07));
}

TEST_CASE("auxiliary draws are deterministic in the stream") {
  GrfModel m = GrfModel::ising(3, 3);
  RngStream r1(5), r2(5), r3(6);
  auto a = draw_auxiliary(m, vec({0.2}), 4, 10, 2, r1);
  auto b = draw_auxiliary(m, vec({0.2}), 4, 10, 2, r2);
  auto c = draw_auxiliary(m, vec({0.2}), 4, 10, 2, r3);
  REQUIRE(a.size() == 4);
  for (int i = 0; i < 4; ++i)
    CHECK(std::get<SpinLattice>(a[i]) == std::get<SpinLattice>(b[i]));
  bool differ = false;
  for (int i = 0; i < 4; ++i)
    differ = differ || !(std::get<SpinLattice>(a[i]) == std::get<SpinLattice>(c[i]));
  CHECK(differ);
  CHECK_THROWS_AS(draw_auxiliary(m, vec({0.2}), 0, 1, 1, r1), ContractError);
  CHECK_THROWS_AS(draw_auxiliary(m, vec({0.2}), 1, -1, 1, r1), ContractError);
}

TEST_CASE("run_chain honours iteration budgets deterministically") {
  GrfModel m = GrfModel::ising(3, 3);
  GrfState y(simulate_lattice(3, 3, 0.3, 100, 4));
  SamplerConfig cfg;
  cfg.rw_scale = 0.4;
  cfg.aux_burnin = 20;
  cfg.aux_thin = 1;
  cfg.seed = 17;
  cfg.budget.iterations = 60;

  Trace t1 = run_chain(Algorithm::Exchange, m, y, cfg);
  Trace t2 = run_chain(Algorithm::Exchange, m, y, cfg);
  CHECK(t1.n_steps() == 60);
  CHECK(t1.states.size() == 61);
  CHECK(t1.accepted.size() == 61);
  CHECK(t1.accepted[0] == 1);
  CHECK(t1.algorithm == "exchange");
  CHECK(t1.seed == 17);
  for (std::size_t i = 0; i < t1.states.size(); ++i)
    CHECK(t1.states[i][0] == t2.states[i][0]);

  cfg.seed = 18;
  Trace t3 = run_chain(Algorithm::Exchange, m, y, cfg);
  bool differ = false;
  for (std::size_t i = 0; i < t1.states.size(); ++i)
    differ = differ || t1.states[i][0] != t3.states[i][0];
  CHECK(differ);

  double manual = 0.0;
  for (std::size_t i = 1; i < t1.accepted.size(); ++i) manual += t1.accepted[i];
  CHECK(t1.acceptance_rate() == doctest::Approx(manual / 60.0).epsilon(1e-15));

  cfg.budget.iterations = 0;
  Trace t0 = run_chain(Algorithm::Exchange, m, y, cfg);
  CHECK(t0.n_steps() == 0);
  CHECK(t0.states.size() == 1);
}

TEST_CASE("run_chain wall-clock budget takes at least one step") {
  GrfModel m = GrfModel::ising(2, 2);
  GrfState y = m.reference_state();
  SamplerConfig cfg;
  cfg.aux_burnin = 5;
  cfg.budget.iterations = 0;
  cfg.budget.seconds = 0.02;
  Trace t = run_chain(Algorithm::Exchange, m, y, cfg);
  CHECK(t.n_steps() >= 1);
  CHECK(t.elapsed_ns.back() > 0);
}

TEST_CASE("exact-mh needs an oracle-sized model") {
  GrfModel big = GrfModel::ergm(8, {ErgmStat::Edges});
  SamplerConfig cfg;
  cfg.budget.iterations = 5;
  CHECK_THROWS_AS(run_chain(Algorithm::ExactMh, big, big.reference_state(), cfg),
                  OracleRefusalError);
}

TEST_CASE("single-draw noisy traces reproduce their exact counterparts bitwise") {
  GrfModel m = GrfModel::ising(4, 4);
  GrfState y(simulate_lattice(4, 4, 0.3, 200, 12));
  SamplerConfig cfg;
  cfg.n_aux = 1;
  cfg.aux_burnin = 16;
  cfg.aux_thin = 1;
  cfg.rw_scale = 0.5;
  cfg.seed = 33;
  cfg.budget.iterations = 200;

  Trace ex = run_chain(Algorithm::Exchange, m, y, cfg);
  Trace nx = run_chain(Algorithm::NoisyExchange, m, y, cfg);
  REQUIRE(ex.states.size() == nx.states.size());
  for (std::size_t i = 0; i < ex.states.size(); ++i) {
    CHECK(ex.states[i][0] == nx.states[i][0]);
    CHECK(ex.accepted[i] == nx.accepted[i]);
  }

  cfg.step_matrix = MatrixXd::Constant(1, 1, 0.04);
  Trace ma = run_chain(Algorithm::MalaExchange, m, y, cfg);
  Trace nm = run_chain(Algorithm::NoisyMalaExchange, m, y, cfg);
  REQUIRE(ma.states.size() == nm.states.size());
  for (std::size_t i = 0; i < ma.states.size(); ++i) {
    CHECK(ma.states[i][0] == nm.states[i][0]);
    CHECK(ma.accepted[i] == nm.accepted[i]);
  }
  CHECK(ma.acceptance_rate() > 0.0);
}

TEST_CASE("single-draw reduction holds for two-parameter models") {
  GrfModel m = GrfModel::ergm(5, {ErgmStat::Edges, ErgmStat::TwoStars});
  GrfState y(grfmcmc::testing::ring_graph(5));
  SamplerConfig cfg;
  cfg.n_aux = 1;
  cfg.aux_burnin = 10;
  cfg.aux_thin = 1;
  cfg.rw_scale = 0.3;
  cfg.seed = 44;
  cfg.budget.iterations = 150;

  Trace ex = run_chain(Algorithm::Exchange, m, y, cfg);
  Trace nx = run_chain(Algorithm::NoisyExchange, m, y, cfg);
  REQUIRE(ex.states.size() == nx.states.size());
  for (std::size_t i = 0; i < ex.states.size(); ++i)
    CHECK((ex.states[i] - nx.states[i]).norm() < 1e-12);
}

TEST_CASE("gradient samplers require an initialised chain state") {
  GrfModel m = GrfModel::ising(3, 3);
  GrfState y = m.reference_state();
  SamplerConfig cfg;
  cfg.step_matrix = MatrixXd::Constant(1, 1, 0.04);
  RngStream rng(2);
  ChainState bare;
  bare.theta = vec({0.0});
  CHECK_THROWS_AS(mala_exchange_step(m, y, bare, cfg, rng), ContractError);

  ChainState ready = init_chain_state(Algorithm::MalaExchange, m, y, cfg, rng);
  CHECK(ready.cached_grad.size() == 1);
  CHECK_NOTHROW(mala_exchange_step(m, y, ready, cfg, rng));

  ChainState plain = init_chain_state(Algorithm::Exchange, m, y, cfg, rng);
  CHECK(plain.cached_grad.size() == 0);
}

TEST_SUITE_END();
