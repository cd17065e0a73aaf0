#include <doctest.h>

#include <cmath>

#include "grfmcmc/errors.hpp"
#include "grfmcmc/oracle.hpp"
#include "helpers.hpp"

using namespace grfmcmc;
using grfmcmc::testing::simulate_lattice;
using grfmcmc::testing::vec;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("transfer log Z reduces to counting at theta = 0") {
  for (auto [h, w] : {std::pair{1, 5}, {2, 3}, {4, 4}, {6, 10}, {20, 20}})
    CHECK(ising_transfer_log_z(h, w, 0.0) ==
          doctest::Approx(h * w * std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("transfer log Z matches the 1-d chain closed form") {
  // 1 x W chain: Z = 2^W cosh(theta)^(W-1)
  double theta = 0.37;
  CHECK(ising_transfer_log_z(1, 5, theta) ==
        doctest::Approx(5 * std::log(2.0) + 4 * std::log(std::cosh(theta))).epsilon(1e-13));
  CHECK(ising_transfer_log_z(5, 1, theta) == ising_transfer_log_z(1, 5, theta));
}

TEST_CASE("transfer log Z equals brute force on small lattices") {
  for (auto [h, w] : {std::pair{2, 2}, {3, 3}, {3, 4}})
    for (double theta : {-0.4, 0.3, 0.8}) {
      GrfModel m = GrfModel::ising(h, w);
      CHECK(ising_transfer_log_z(h, w, theta) ==
            doctest::Approx(brute_force_log_z(m, vec({theta}))).epsilon(1e-12));
    }
  CHECK(brute_force_log_z(GrfModel::ising(2, 2), vec({0.0})) ==
        doctest::Approx(std::log(16.0)).epsilon(1e-14));
}

TEST_CASE("stat table moments match finite differences of its own log Z") {
  GrfModel m = GrfModel::ising(3, 3);
  StatTable table = enumerate_stat_table(m);
  VectorXd theta = vec({0.25});
  auto [mean, cov] = table.moments(theta);
  double h = 1e-6;
  double up = table.log_z(vec({0.25 + h})), dn = table.log_z(vec({0.25 - h}));
  CHECK(mean[0] == doctest::Approx((up - dn) / (2 * h)).epsilon(1e-6));
  double mid = table.log_z(theta);
  CHECK(cov(0, 0) == doctest::Approx((up - 2 * mid + dn) / (h * h)).epsilon(1e-3));
}

TEST_CASE("enumeration and transfer-matrix moment paths agree") {
  GrfModel m = GrfModel::ising(4, 6);  // 24 sites: enumerable, and transfer applies
  VectorXd theta = vec({0.3});
  auto [mean, cov] = exact_moments(m, theta);
  auto [tmean, tvar] = ising_transfer_moments(4, 6, 0.3);
  CHECK(mean[0] == doctest::Approx(tmean).epsilon(1e-5));
  CHECK(cov(0, 0) == doctest::Approx(tvar).epsilon(1e-3));
}

TEST_CASE("ergm log Z closed forms") {
  GrfModel edges = GrfModel::ergm(3, {ErgmStat::Edges});
  CHECK(brute_force_log_z(edges, vec({0.7})) ==
        doctest::Approx(3 * std::log1p(std::exp(0.7))).epsilon(1e-13));

  // K3 with (edges, triangles): Z = 1 + 3 e^t1 + 3 e^{2 t1} + e^{3 t1 + t2}
  GrfModel et = GrfModel::ergm(3, {ErgmStat::Edges, ErgmStat::Triangles});
  double t1 = 0.3, t2 = -0.2;
  double z = 1 + 3 * std::exp(t1) + 3 * std::exp(2 * t1) + std::exp(3 * t1 + t2);
  CHECK(brute_force_log_z(et, vec({t1, t2})) == doctest::Approx(std::log(z)).epsilon(1e-13));
  CHECK(brute_force_log_z(et, vec({t1, t2})) == doctest::Approx(2.528100671336053).epsilon(1e-12));
}

TEST_CASE("oracle refuses sizes it cannot certify") {
  CHECK_THROWS_AS(enumerate_stat_table(GrfModel::ergm(8, {ErgmStat::Edges})),
                  OracleRefusalError);
  CHECK_THROWS_AS(enumerate_stat_table(GrfModel::ising(5, 5)), OracleRefusalError);
  CHECK_THROWS_AS(ising_transfer_log_z(21, 21, 0.1), OracleRefusalError);
  CHECK_THROWS_AS((LogZOracle(GrfModel::ergm(8, {ErgmStat::Edges}))), OracleRefusalError);
  CHECK_THROWS_AS(exact_moments(GrfModel::ising(25, 25), vec({0.1})), OracleRefusalError);

  // 5 x 30 is beyond enumeration but inside the transfer regime.
  LogZOracle oracle(GrfModel::ising(5, 30));
  CHECK_FALSE(oracle.enumerable());
  CHECK(std::isfinite(oracle.log_z(0.3)));
  CHECK_THROWS_AS(oracle.table(), ContractError);

  LogZOracle small(GrfModel::ising(3, 3));
  CHECK(small.enumerable());
  CHECK(small.log_z(0.3) == doctest::Approx(ising_transfer_log_z(3, 3, 0.3)).epsilon(1e-12));
}

TEST_CASE("posterior grid normalises, orders and inverts") {
  GrfModel m = GrfModel::ising(3, 3);
  GrfState y(simulate_lattice(3, 3, 0.3, 200, 99));
  PosteriorGrid grid = exact_posterior_grid(m, y, -0.8, 1.2, 161);

  CHECK(trapezoid(grid.grid, grid.density) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(grid.cdf[0] == 0.0);
  CHECK(grid.cdf[grid.cdf.size() - 1] == doctest::Approx(1.0).epsilon(1e-10));
  for (int i = 1; i < grid.cdf.size(); ++i) CHECK(grid.cdf[i] >= grid.cdf[i - 1]);

  for (double u : {0.05, 0.25, 0.5, 0.75, 0.95})
    CHECK(grid.cdf_at(grid.quantile(u)) == doctest::Approx(u).epsilon(1e-6));
  CHECK(grid.quantile(0.0) == grid.grid[0]);
  CHECK(grid.quantile(1.0) == grid.grid[grid.grid.size() - 1]);
  CHECK(grid.cdf_at(-100.0) == 0.0);
  CHECK(grid.cdf_at(100.0) == 1.0);
}

TEST_CASE("posterior grid rejects malformed requests") {
  GrfModel m = GrfModel::ising(3, 3);
  GrfState y = m.reference_state();
  CHECK_THROWS_AS(exact_posterior_grid(m, y, vec({0.0, 0.0, 0.1})), ContractError);
  CHECK_THROWS_AS(exact_posterior_grid(m, y, vec({0.0})), ContractError);
  GrfModel two = GrfModel::ergm(4, {ErgmStat::Edges, ErgmStat::TwoStars});
  CHECK_THROWS_AS(exact_posterior_grid(two, two.reference_state(), -1.0, 1.0, 11),
                  ContractError);
}

TEST_CASE("grid summaries find the symmetric centre") {
  // s(y) = 0 on a bipartite lattice gives a posterior symmetric about 0
  // under a mean-zero prior: Z(theta) = Z(-theta) via the checkerboard flip.
  SpinLattice lat(2, 2, 1);
  lat.set(1, 0, -1);  // bonds: +1 -1 -1 +1 -> s = 0
  GrfModel m = GrfModel::ising(2, 2);
  CHECK(ising_suffstat(lat) == 0.0);
  PosteriorGrid grid = exact_posterior_grid(m, GrfState(lat), -1.0, 1.0, 401);
  GridSummaries s = grid_summaries(grid);
  CHECK(s.mean == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(std::abs(s.argmax) < 1e-12);
  CHECK(s.sd > 0.0);
}

TEST_SUITE_END();
