#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "grfmcmc/errors.hpp"
#include "grfmcmc/numeric.hpp"
#include "grfmcmc/rng.hpp"
#include "helpers.hpp"

using namespace grfmcmc;
using grfmcmc::testing::mat2;
using grfmcmc::testing::vec;

TEST_SUITE_BEGIN("numeric");

TEST_CASE("log_sum_exp basics") {
  std::vector<double> one{-1234.5678};
  CHECK(log_sum_exp(one) == -1234.5678);  // single element is returned bitwise
  std::vector<double> tiny{-1e-320};
  CHECK(log_sum_exp(tiny) == -1e-320);

  std::vector<double> pair{std::log(2.0), std::log(3.0)};
  CHECK(log_sum_exp(pair) == doctest::Approx(std::log(5.0)).epsilon(1e-15));

  std::vector<double> big{1000.0, 1000.0};
  CHECK(log_sum_exp(big) == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-15));

  std::vector<double> skewed{0.0, -800.0};
  CHECK(log_sum_exp(skewed) == doctest::Approx(0.0).epsilon(1e-15));

  std::vector<double> empty;
  CHECK(log_sum_exp(empty) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("trapezoid integrates linear functions exactly") {
  VectorXd x = vec({0.0, 0.5, 2.0, 3.0});
  VectorXd y = 2.0 * x.array() + 1.0;
  CHECK(trapezoid(x, y) == doctest::Approx(12.0).epsilon(1e-14));  // x^2 + x on [0,3]

  CHECK_THROWS_AS(trapezoid(vec({0.0}), vec({1.0})), ContractError);
  CHECK_THROWS_AS(trapezoid(vec({0.0, 0.0}), vec({1.0, 1.0})), ContractError);
  CHECK_THROWS_AS(trapezoid(vec({1.0, 0.0}), vec({1.0, 1.0})), ContractError);
}

TEST_CASE("chi-squared survival function closed forms") {
  // df = 2: sf(x) = exp(-x/2)
  for (double x : {0.1, 1.0, 5.0, 20.0})
    CHECK(chi2_sf(x, 2) == doctest::Approx(std::exp(-x / 2)).epsilon(1e-12));
  // df = 4: sf(x) = (1 + x/2) exp(-x/2)
  for (double x : {0.5, 3.0, 10.0})
    CHECK(chi2_sf(x, 4) == doctest::Approx((1 + x / 2) * std::exp(-x / 2)).epsilon(1e-12));
  // df = 1: sf(x) = erfc(sqrt(x/2))
  for (double x : {0.2, 1.0, 4.0})
    CHECK(chi2_sf(x, 1) == doctest::Approx(std::erfc(std::sqrt(x / 2))).epsilon(1e-12));
  CHECK(chi2_sf(0.0, 3) == 1.0);
  CHECK(chi2_sf(-1.0, 3) == 1.0);
  CHECK_THROWS_AS(gamma_q(0.0, 1.0), ContractError);
  CHECK_THROWS_AS(gamma_q(1.0, -1.0), ContractError);
  CHECK(gamma_q(2.5, 0.0) == 1.0);
}

TEST_CASE("binomial coefficients") {
  CHECK(binom(5, 2) == 10.0);
  CHECK(binom(10, 0) == 1.0);
  CHECK(binom(10, 10) == 1.0);
  CHECK(binom(4, 5) == 0.0);
  CHECK(binom(4, -1) == 0.0);
  CHECK(binom(50, 25) == doctest::Approx(126410606437752.0).epsilon(1e-12));
}

TEST_CASE("normal log density and sample moments") {
  CHECK(normal_logpdf(0.0, 0.0, 1.0) ==
        doctest::Approx(-0.5 * std::log(2 * 3.14159265358979323846)).epsilon(1e-15));
  CHECK(normal_logpdf(1.3, 0.5, 2.0) ==
        doctest::Approx(-std::log(2.0) - 0.5 * std::log(2 * 3.14159265358979323846) -
                        0.5 * 0.16)
            .epsilon(1e-12));

  std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  auto [m, sd] = mean_sd(xs);
  CHECK(m == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(sd == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
  std::vector<double> single{7.0};
  CHECK(mean_sd(single).second == 0.0);
  std::vector<double> none;
  CHECK_THROWS_AS(mean_sd(none), ContractError);
}

TEST_CASE("multivariate normal density matches dense formula") {
  MatrixXd cov = mat2(2.0, 0.5, 0.5, 1.0);
  MvNormal mvn(cov);
  VectorXd x = vec({0.3, -0.7});
  VectorXd mu = vec({0.1, 0.2});
  VectorXd d = x - mu;
  double quad = d.dot(cov.inverse() * d);
  double ref = -0.5 * (2 * std::log(2 * 3.14159265358979323846) +
                       std::log(cov.determinant()) + quad);
  CHECK(mvn.logpdf(x, mu) == doctest::Approx(ref).epsilon(1e-12));

  CHECK_THROWS_AS(MvNormal(mat2(1.0, 0.3, 0.2, 1.0)), ContractError);   // asymmetric
  CHECK_THROWS_AS(MvNormal(mat2(1.0, 2.0, 2.0, 1.0)), ContractError);   // indefinite
  MatrixXd rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(MvNormal{rect}, ContractError);
}

TEST_CASE("multivariate normal sampling hits its moments") {
  MatrixXd cov = mat2(1.5, -0.6, -0.6, 0.8);
  MvNormal mvn(cov);
  RngStream rng(42);
  VectorXd mu = vec({1.0, -2.0});
  const int n = 20000;
  VectorXd sum = VectorXd::Zero(2);
  MatrixXd outer = MatrixXd::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    VectorXd z = mvn.sample(mu, rng);
    sum += z;
    outer += (z - mu) * (z - mu).transpose();
  }
  VectorXd mean = sum / n;
  MatrixXd cov_hat = outer / n;
  CHECK((mean - mu).norm() < 0.05);
  CHECK((cov_hat - cov).norm() < 0.1);
}

TEST_CASE("rng streams are deterministic and substreams are independent") {
  RngStream a(123), b(123), c(124);
  for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
  bool differ = false;
  RngStream a2(123);
  for (int i = 0; i < 16; ++i) differ = differ || (a2.next_u64() != c.next_u64());
  CHECK(differ);

  RngStream parent(9);
  RngStream s0 = parent.substream(0);
  RngStream s1 = parent.substream(1);
  CHECK(s0.next_u64() != s1.next_u64());
  // substream derivation does not consume parent state
  RngStream parent2(9);
  CHECK(parent.next_u64() == parent2.next_u64());
}

TEST_CASE("rng normal consumes exactly two engine draws") {
  RngStream a(77), b(77);
  (void)a.normal();
  (void)b.next_u64();
  (void)b.next_u64();
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng uniform variates stay in range with sane moments") {
  RngStream rng(5);
  double sum = 0.0, mn = 1.0, mx = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    sum += u;
    mn = std::min(mn, u);
    mx = std::max(mx, u);
  }
  CHECK(mn >= 0.0);
  CHECK(mx < 1.0);
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));

  CHECK_FALSE(rng.bernoulli(0.0));
  CHECK(rng.bernoulli(1.0));
  for (int i = 0; i < 100; ++i) {
    auto v = rng.uniform_int(7);
    CHECK(v >= 0);
    CHECK(v < 7);
  }
}

TEST_SUITE_END();
