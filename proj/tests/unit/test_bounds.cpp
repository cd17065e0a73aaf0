#include <doctest.h>

#include <cmath>
#include <vector>

#include "grfmcmc/bounds.hpp"
#include "grfmcmc/errors.hpp"
#include "helpers.hpp"

using namespace grfmcmc;
using grfmcmc::testing::mat2;
using grfmcmc::testing::vec;

namespace {

double worst_start_tv_to_pi(const MatrixXd& pn, const VectorXd& pi) {
  double worst = 0.0;
  for (int i = 0; i < pn.rows(); ++i)
    worst = std::max(worst, 0.5 * (pn.row(i).transpose() - pi).lpNorm<1>());
  return worst;
}

}  // namespace

TEST_SUITE_BEGIN("bounds");

TEST_CASE("stochastic matrix validation and stationary distribution") {
  CHECK_THROWS_AS(StochasticMatrix(MatrixXd::Constant(1, 1, 1.0)), ContractError);
  CHECK_THROWS_AS(StochasticMatrix(mat2(0.5, 0.6, 0.5, 0.5)), ContractError);
  CHECK_THROWS_AS(StochasticMatrix(mat2(-0.1, 1.1, 0.5, 0.5)), ContractError);
  MatrixXd rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(StochasticMatrix{rect}, ContractError);

  StochasticMatrix p(mat2(0.9, 0.1, 0.2, 0.8));
  VectorXd pi = p.stationary();
  CHECK(pi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(pi[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK((pi.transpose() * p.p() - pi.transpose()).norm() < 1e-12);
}

TEST_CASE("primitivity detection") {
  CHECK(StochasticMatrix(mat2(0.9, 0.1, 0.2, 0.8)).primitive());
  CHECK_FALSE(StochasticMatrix(mat2(0.0, 1.0, 1.0, 0.0)).primitive());  // period 2
  CHECK_FALSE(StochasticMatrix(MatrixXd::Identity(3, 3)).primitive());  // reducible
}

TEST_CASE("kernel distance is the worst-row total variation") {
  StochasticMatrix a(mat2(0.5, 0.5, 0.2, 0.8));
  StochasticMatrix b(mat2(0.4, 0.6, 0.2, 0.8));
  CHECK(tv_kernel_distance(a, b) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(tv_kernel_distance(a, a) == 0.0);
}

TEST_CASE("certificate prefactor closed forms") {
  ErgodicityCert dob{1.0, 0.5, CertMethod::Dobrushin};
  CHECK(dob.lambda() == 0);
  CHECK(dob.prefactor() == doctest::Approx(2.0).epsilon(1e-15));

  ErgodicityCert minor{2.0, 0.75, CertMethod::Minorization};
  CHECK(minor.lambda() == 3);
  CHECK(minor.prefactor() == doctest::Approx(6.375).epsilon(1e-15));

  MitrophanovBound mb = mitrophanov_bound(minor, 0.01);
  CHECK(mb.lambda == 3);
  CHECK(mb.prefactor == doctest::Approx(6.375).epsilon(1e-15));
  CHECK(mb.bound == doctest::Approx(0.06375).epsilon(1e-15));
  CHECK(mitrophanov_bound(dob, 0.01).bound == doctest::Approx(0.02).epsilon(1e-15));

  CHECK_THROWS_AS(mitrophanov_bound(minor, -0.1), ContractError);
  ErgodicityCert bad_rho{1.0, 1.0, CertMethod::Dobrushin};
  CHECK_THROWS_AS(mitrophanov_bound(bad_rho, 0.1), ContractError);
  ErgodicityCert bad_c{0.5, 0.5, CertMethod::Dobrushin};
  CHECK_THROWS_AS(mitrophanov_bound(bad_c, 0.1), ContractError);
}

TEST_CASE("ergodicity certificates are valid and pick the smaller prefactor") {
  RngStream rng(404);
  for (int rep = 0; rep < 20; ++rep) {
    StochasticMatrix p = random_stochastic_matrix(5, rng);
    ErgodicityCert cert = ergodicity_cert(p);
    CHECK(cert.rho > 0.0);
    CHECK(cert.rho < 1.0);

    // geometric convergence at the certified rate, every start
    VectorXd pi = p.stationary();
    MatrixXd pn = p.p();
    for (int n = 1; n <= 60; ++n) {
      CHECK(worst_start_tv_to_pi(pn, pi) <= cert.c * std::pow(cert.rho, n) + 1e-12);
      pn = pn * p.p();
    }

    // the returned certificate is the better of the two constructions
    double rho_d = 0.0;
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j)
        rho_d = std::max(rho_d, 0.5 * (p.p().row(i) - p.p().row(j)).lpNorm<1>());
    double eps = p.p().colwise().minCoeff().sum();
    ErgodicityCert dob{1.0, rho_d, CertMethod::Dobrushin};
    ErgodicityCert minor{2.0, 1.0 - eps, CertMethod::Minorization};
    CHECK(cert.prefactor() ==
          doctest::Approx(std::min(dob.prefactor(), minor.prefactor())).epsilon(1e-12));
  }
}

TEST_CASE("non-contracting kernels are refused with a diagnosis") {
  CHECK_THROWS_AS(ergodicity_cert(StochasticMatrix(mat2(0.0, 1.0, 1.0, 0.0))),
                  CertificateError);
  CHECK_THROWS_AS(ergodicity_cert(StochasticMatrix(MatrixXd::Identity(3, 3).eval())),
                  CertificateError);
}

TEST_CASE("perturbation bound holds numerically") {
  RngStream rng(505);
  StochasticMatrix p = random_stochastic_matrix(6, rng);
  BoundReport same = verify_perturbation(p, p, 50);
  CHECK(same.kappa == 0.0);
  CHECK_FALSE(same.violated);
  for (double tv : same.per_n_tv) CHECK(tv == 0.0);

  int violations = 0;
  for (int rep = 0; rep < 30; ++rep) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(rep));
    StochasticMatrix base = random_stochastic_matrix(6, sub);
    StochasticMatrix hat = perturb_stochastic_matrix(base, 0.04, sub);
    CHECK(tv_kernel_distance(base, hat) <= 0.04 + 1e-12);
    BoundReport rep_out = verify_perturbation(base, hat, 80);
    CHECK(rep_out.kappa == doctest::Approx(tv_kernel_distance(base, hat)).epsilon(1e-15));
    CHECK(static_cast<int>(rep_out.per_n_tv.size()) == 80);
    violations += rep_out.violated ? 1 : 0;
  }
  CHECK(violations == 0);
}

TEST_CASE("theorem-3 constants: frozen case and exact quartering law") {
  Theorem3Constants t = theorem3_constants(1.2, 1.1, 1.5, 9.0);
  CHECK(t.c == 2.0);
  CHECK(t.rho == doctest::Approx(0.9141158206559696).epsilon(1e-14));
  CHECK(t.lambda == 8);
  CHECK(t.prefactor == doctest::Approx(19.35341802166075).epsilon(1e-12));
  CHECK(t.delta_bound == doctest::Approx(2.9403).epsilon(1e-12));
  CHECK(t.total_bound == doctest::Approx(56.90485500908912).epsilon(1e-12));

  RngStream rng(606);
  for (int rep = 0; rep < 25; ++rep) {
    double c_pi = 1.0 + rng.uniform(0.0, 2.0);
    double c_h = 1.0 + rng.uniform(0.0, 1.0);
    double k = 1.0 + rng.uniform(0.0, 3.0);
    double n = std::floor(rng.uniform(1.0, 2000.0));
    Theorem3Constants a = theorem3_constants(c_pi, c_h, k, n);
    Theorem3Constants b = theorem3_constants(c_pi, c_h, k, 4.0 * n);
    CHECK(a.delta_bound == 2.0 * b.delta_bound);  // exact in floating point
    CHECK(a.total_bound == 2.0 * b.total_bound);
    CHECK(a.prefactor == b.prefactor);
  }

  CHECK_THROWS_AS(theorem3_constants(0.9, 1.1, 1.5, 10.0), ContractError);
  CHECK_THROWS_AS(theorem3_constants(1.1, 0.9, 1.5, 10.0), ContractError);
  CHECK_THROWS_AS(theorem3_constants(1.1, 1.1, 0.5, 10.0), ContractError);
  CHECK_THROWS_AS(theorem3_constants(1.1, 1.1, 1.5, 0.5), ContractError);
}

TEST_CASE("langevin gradient-noise bound") {
  LangevinDeltaBound b = langevin_delta_bound(2.0, 1.5, 0.3, 100.0);
  CHECK(b.threshold == doctest::Approx(1.62).epsilon(1e-14));
  CHECK(b.delta == doctest::Approx(0.1842331461576198).epsilon(1e-12));
  CHECK(b.asymptotic == doctest::Approx(0.09659316062785546).epsilon(1e-12));
  CHECK(b.kernel_bound == doctest::Approx(0.3035071219573107).epsilon(1e-12));
  CHECK(b.kernel_bound_loose ==
        doctest::Approx(std::sqrt(2.0) * b.kernel_bound).epsilon(1e-14));

  // dyadic parameters so the threshold 4 k S^2 |Sigma|^2 = 2 is exact: the
  // regime check must refuse n_aux equal to the threshold, not just below it
  CHECK_THROWS_AS(langevin_delta_bound(2.0, 1.0, 0.5, 2.0), OutOfRegimeError);
  CHECK_THROWS_AS(langevin_delta_bound(2.0, 1.5, 0.3, 1.0), OutOfRegimeError);
  CHECK_THROWS_AS(langevin_delta_bound(0.5, 1.5, 0.3, 100.0), ContractError);
  CHECK_THROWS_AS(langevin_delta_bound(2.0, 0.0, 0.3, 100.0), ContractError);
  CHECK_THROWS_AS(langevin_delta_bound(2.0, 1.5, 0.0, 100.0), ContractError);

  // in the large-N regime the moment bound approaches its asymptote
  LangevinDeltaBound big = langevin_delta_bound(1.0, 1.0, 0.1, 1e8);
  CHECK(big.delta / big.asymptotic == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("empirical kernel tv separates shifted kernels") {
  auto step_same = [](double x, RngStream& r) { return x + r.normal(); };
  auto step_shift = [](double x, RngStream& r) { return x + 0.5 + r.normal(); };

  RngStream rng(707);
  TvEstimate zero = empirical_kernel_tv(step_same, step_same, 0.0, 20000, 20, rng);
  CHECK(zero.tv < 0.06);
  CHECK(zero.se > 0.0);

  TvEstimate shift = empirical_kernel_tv(step_same, step_shift, 0.0, 40000, 40, rng);
  CHECK(std::abs(shift.tv - 0.1974126513658474) < 0.035);

  TvEstimate auto_bins = empirical_kernel_tv(step_same, step_shift, 0.0, 730, 0, rng);
  CHECK(auto_bins.bins == 10);

  CHECK_THROWS_AS(empirical_kernel_tv(step_same, step_same, 0.0, 1, 5, rng), ContractError);
  std::function<double(double, RngStream&)> null_fn;
  CHECK_THROWS_AS(empirical_kernel_tv(null_fn, step_same, 0.0, 100, 5, rng), ContractError);

  auto step_const = [](double, RngStream&) { return 1.0; };
  TvEstimate point = empirical_kernel_tv(step_const, step_const, 0.0, 500, 10, rng);
  CHECK(point.tv == 0.0);
  CHECK(point.se == 0.0);
}

TEST_CASE("discretised exact kernel keeps the grid posterior invariant") {
  GrfModel m = GrfModel::ising(2, 2);
  GrfState y(SpinLattice(2, 2, 1));  // s_obs = 4
  VectorXd grid = VectorXd::LinSpaced(41, -1.0, 1.0);
  StochasticMatrix k = discretized_mh_kernel(m, y, grid, 0.4);
  CHECK(k.size() == 41);

  PosteriorGrid post = exact_posterior_grid(m, y, grid);
  VectorXd w = post.density / post.density.sum();  // point masses at grid nodes
  VectorXd pi = k.stationary();
  CHECK((pi - w).lpNorm<1>() < 1e-8);
}

TEST_CASE("closed-form noisy-exchange deviation bound halves when N quadruples") {
  GrfModel m = GrfModel::ising(2, 2);
  GrfState y(SpinLattice(2, 2, 1));
  VectorXd grid = VectorXd::LinSpaced(81, -1.0, 1.0);

  Corollary1Report r1 = corollary1_bound(m, y, grid, 0.3, 25.0);
  Corollary1Report r4 = corollary1_bound(m, y, grid, 0.3, 100.0);
  CHECK(r1.bound > 0.0);
  CHECK(std::isfinite(r1.bound));
  CHECK(r1.bound == 2.0 * r4.bound);  // exact in floating point
  CHECK(r1.prefactor == r4.prefactor);
  CHECK(r1.cert.rho > 0.0);
  CHECK(r1.cert.rho < 1.0);

  // caller-supplied certificate short-circuits the kernel build
  Corollary1Report r1b = corollary1_bound(m, y, grid, 0.3, 25.0, &r1.cert);
  CHECK(r1b.bound == r1.bound);

  Corollary1Report r16 = corollary1_bound(m, y, grid, 0.3, 400.0);
  CHECK(r4.bound > r16.bound);
}

TEST_CASE("random kernels and their perturbations are well formed") {
  RngStream rng(808);
  StochasticMatrix p = random_stochastic_matrix(7, rng);
  CHECK(p.size() == 7);
  CHECK(p.p().minCoeff() > 0.0);
  for (int i = 0; i < 7; ++i)
    CHECK(p.p().row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));

  RngStream r1(9), r2(9);
  StochasticMatrix a = random_stochastic_matrix(4, r1);
  StochasticMatrix b = random_stochastic_matrix(4, r2);
  CHECK((a.p() - b.p()).norm() == 0.0);
}

TEST_SUITE_END();
