#include "grfmcmc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "grfmcmc/errors.hpp"

namespace grfmcmc {

StochasticMatrix::StochasticMatrix(MatrixXd p) : p_(std::move(p)) {
  if (p_.rows() != p_.cols() || p_.rows() < 2)
    throw ContractError("StochasticMatrix: need a square matrix of size >= 2");
  for (Eigen::Index i = 0; i < p_.rows(); ++i) {
    double row_sum = 0.0;
    for (Eigen::Index j = 0; j < p_.cols(); ++j) {
      if (p_(i, j) < 0.0) throw ContractError("StochasticMatrix: negative entry");
      row_sum += p_(i, j);
    }
    if (std::abs(row_sum - 1.0) > 1e-9)
      throw ContractError("StochasticMatrix: row " + std::to_string(i) + " sums to " +
                          std::to_string(row_sum) + ", not 1");
  }
}

VectorXd StochasticMatrix::stationary() const {
  // Solve pi P = pi with the normalisation sum(pi) = 1 replacing one equation.
  const Eigen::Index n = p_.rows();
  MatrixXd a = p_.transpose() - MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  VectorXd b = VectorXd::Zero(n);
  b[n - 1] = 1.0;
  VectorXd pi = a.fullPivLu().solve(b);
  for (Eigen::Index i = 0; i < n; ++i) pi[i] = std::max(0.0, pi[i]);
  double s = pi.sum();
  if (!(s > 0.0)) throw CertificateError("StochasticMatrix: no stationary distribution found");
  return pi / s;
}

bool StochasticMatrix::primitive() const {
  const Eigen::Index n = p_.rows();
  // Work in the boolean semiring; positivity of powers is monotone once the
  // chain has no unreachable state, so repeated squaring up to n^2 suffices.
  MatrixXd b = (p_.array() > 0.0).cast<double>();
  long power = 1;
  while (power < n * n) {
    if ((b.array() > 0.0).all()) return true;
    b = b * b;
    b = (b.array() > 0.0).cast<double>();
    power *= 2;
  }
  return (b.array() > 0.0).all();
}

double tv_kernel_distance(const StochasticMatrix& a, const StochasticMatrix& b) {
  if (a.size() != b.size()) throw ContractError("tv_kernel_distance: size mismatch");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.p().rows(); ++i)
    worst = std::max(worst, 0.5 * (a.p().row(i) - b.p().row(i)).cwiseAbs().sum());
  return worst;
}

std::string cert_method_name(CertMethod m) {
  return m == CertMethod::Dobrushin ? "dobrushin" : "minorization";
}

int ErgodicityCert::lambda() const {
  if (c <= 1.0) return 0;
  double v = std::log(1.0 / c) / std::log(rho);
  int l = static_cast<int>(std::ceil(v));
  return std::max(0, l);
}

double ErgodicityCert::prefactor() const {
  int l = lambda();
  return static_cast<double>(l) + c * std::pow(rho, l) / (1.0 - rho);
}

ErgodicityCert ergodicity_cert(const StochasticMatrix& p) {
  const MatrixXd& m = p.p();
  const Eigen::Index n = m.rows();

  // Dobrushin coefficient: worst pairwise row distance.
  double rho_d = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = i + 1; k < n; ++k)
      rho_d = std::max(rho_d, 0.5 * (m.row(i) - m.row(k)).cwiseAbs().sum());

  // Whole-space minorization: eps = sum_j min_i P(i, j).
  double eps = m.colwise().minCoeff().sum();

  constexpr double kRhoFloor = 1e-15;
  bool have_d = rho_d < 1.0;
  bool have_m = eps > 0.0;
  ErgodicityCert cd{1.0, std::max(rho_d, kRhoFloor), CertMethod::Dobrushin};
  ErgodicityCert cm{2.0, std::max(1.0 - eps, kRhoFloor), CertMethod::Minorization};
  if (have_d && have_m) return cd.prefactor() <= cm.prefactor() ? cd : cm;
  if (have_d) return cd;
  if (have_m) return cm;
  if (!p.primitive())
    throw CertificateError(
        "ergodicity_cert: kernel is not primitive (irreducible and aperiodic); "
        "no uniform ergodicity certificate exists");
  throw CertificateError(
      "ergodicity_cert: neither the Dobrushin coefficient nor a whole-space "
      "minorization certifies contraction for this kernel");
}

MitrophanovBound mitrophanov_bound(const ErgodicityCert& cert, double kappa) {
  if (kappa < 0.0) throw ContractError("mitrophanov_bound: kappa must be non-negative");
  if (!(cert.rho > 0.0 && cert.rho < 1.0) || !(cert.c >= 1.0))
    throw ContractError("mitrophanov_bound: certificate must have c >= 1 and rho in (0, 1)");
  MitrophanovBound b;
  b.kappa = kappa;
  b.lambda = cert.lambda();
  b.prefactor = cert.prefactor();
  b.bound = b.prefactor * kappa;
  return b;
}

BoundReport verify_perturbation(const StochasticMatrix& p, const StochasticMatrix& p_hat,
                                int n_max) {
  if (p.size() != p_hat.size()) throw ContractError("verify_perturbation: size mismatch");
  if (n_max < 1) throw ContractError("verify_perturbation: n_max must be at least 1");

  ErgodicityCert cert = ergodicity_cert(p);
  double kappa = tv_kernel_distance(p, p_hat);
  MitrophanovBound mb = mitrophanov_bound(cert, kappa);

  BoundReport rep;
  rep.kappa = kappa;
  rep.lambda = mb.lambda;
  rep.bound = mb.bound;
  rep.per_n_tv.reserve(static_cast<std::size_t>(n_max));
  rep.worst_slack = std::numeric_limits<double>::infinity();

  constexpr double kFpSlack = 1e-12;
  MatrixXd pn = p.p();
  MatrixXd qn = p_hat.p();
  for (int n = 1; n <= n_max; ++n) {
    double tv = 0.0;
    for (Eigen::Index i = 0; i < pn.rows(); ++i)
      tv = std::max(tv, 0.5 * (pn.row(i) - qn.row(i)).cwiseAbs().sum());
    rep.per_n_tv.push_back(tv);
    double telescoped = static_cast<double>(n) * kappa;
    if (tv > rep.bound + kFpSlack || tv > telescoped + kFpSlack) rep.violated = true;
    rep.worst_slack = std::min(rep.worst_slack, rep.bound - tv);
    if (n < n_max) {
      pn = pn * p.p();
      qn = qn * p_hat.p();
    }
  }
  return rep;
}

Theorem3Constants theorem3_constants(double c_pi, double c_h, double k_bound, double n_aux) {
  if (!(c_pi >= 1.0)) throw ContractError("theorem3_constants: c_pi must be >= 1");
  if (!(c_h >= 1.0)) throw ContractError("theorem3_constants: c_h must be >= 1");
  if (!(k_bound >= 1.0)) throw ContractError("theorem3_constants: K must be >= 1");
  if (!(n_aux >= 1.0)) throw ContractError("theorem3_constants: n_aux must be >= 1");

  Theorem3Constants t;
  t.c = 2.0;
  double denom = std::pow(c_pi, 3) * std::pow(c_h, 3) * std::pow(k_bound, 4);
  t.rho = std::max(1.0 - 1.0 / denom, 1e-15);
  ErgodicityCert cert{t.c, t.rho, CertMethod::Minorization};
  t.lambda = cert.lambda();
  t.prefactor = cert.prefactor();
  t.delta_bound = c_pi * c_pi * c_h * c_h * std::pow(k_bound, 4) / std::sqrt(n_aux);
  t.total_bound = t.prefactor * t.delta_bound;
  return t;
}

LangevinDeltaBound langevin_delta_bound(double k_dim, double s_bound, double sigma_norm,
                                        double n_aux) {
  if (!(k_dim >= 1.0)) throw ContractError("langevin_delta_bound: dimension must be >= 1");
  if (!(s_bound > 0.0) || !(sigma_norm > 0.0))
    throw ContractError("langevin_delta_bound: S and |Sigma| must be positive");
  LangevinDeltaBound b;
  b.threshold = 4.0 * k_dim * s_bound * s_bound * sigma_norm * sigma_norm;
  if (!(n_aux > b.threshold))
    throw OutOfRegimeError("langevin_delta_bound: bound requires n_aux > 4 k S^2 |Sigma|^2 = " +
                           std::to_string(b.threshold) + "; got n_aux = " +
                           std::to_string(n_aux));
  double denom = 4.0 * s_bound * s_bound * sigma_norm * sigma_norm * n_aux;
  b.delta = std::expm1(k_dim * std::log(n_aux) / denom) +
            4.0 * k_dim * std::sqrt(M_PI) * s_bound * sigma_norm / n_aux;
  b.asymptotic = k_dim * std::log(n_aux / k_dim) / denom;
  b.kernel_bound = std::sqrt(0.5 * b.delta);
  b.kernel_bound_loose = std::sqrt(b.delta);
  return b;
}

TvEstimate empirical_kernel_tv(const std::function<double(double, RngStream&)>& step_a,
                               const std::function<double(double, RngStream&)>& step_b,
                               double theta0, int n_reps, int bins, RngStream& rng) {
  if (n_reps < 2) throw ContractError("empirical_kernel_tv: need at least 2 replicates");
  if (!step_a || !step_b) throw ContractError("empirical_kernel_tv: null kernel");

  std::vector<double> xa(static_cast<std::size_t>(n_reps));
  std::vector<double> xb(static_cast<std::size_t>(n_reps));
  for (int i = 0; i < n_reps; ++i) xa[static_cast<std::size_t>(i)] = step_a(theta0, rng);
  for (int i = 0; i < n_reps; ++i) xb[static_cast<std::size_t>(i)] = step_b(theta0, rng);

  TvEstimate est;
  est.bins = bins > 0 ? bins
                      : static_cast<int>(std::ceil(std::cbrt(static_cast<double>(n_reps))));
  double lo = std::min(*std::min_element(xa.begin(), xa.end()),
                       *std::min_element(xb.begin(), xb.end()));
  double hi = std::max(*std::max_element(xa.begin(), xa.end()),
                       *std::max_element(xb.begin(), xb.end()));
  if (!(hi > lo)) return est;  // all mass in one point on both sides: tv 0

  auto bin_of = [&](double x) {
    int b = static_cast<int>((x - lo) / (hi - lo) * est.bins);
    return std::clamp(b, 0, est.bins - 1);
  };
  std::vector<int> ba(xa.size()), bb(xb.size());
  for (std::size_t i = 0; i < xa.size(); ++i) ba[i] = bin_of(xa[i]);
  for (std::size_t i = 0; i < xb.size(); ++i) bb[i] = bin_of(xb[i]);

  auto tv_of = [&](const std::vector<int>& ia, const std::vector<int>& ib) {
    std::vector<double> ca(static_cast<std::size_t>(est.bins), 0.0);
    std::vector<double> cb(static_cast<std::size_t>(est.bins), 0.0);
    for (int v : ia) ca[static_cast<std::size_t>(v)] += 1.0;
    for (int v : ib) cb[static_cast<std::size_t>(v)] += 1.0;
    double tv = 0.0;
    for (int k = 0; k < est.bins; ++k)
      tv += std::abs(ca[static_cast<std::size_t>(k)] - cb[static_cast<std::size_t>(k)]);
    return 0.5 * tv / static_cast<double>(n_reps);
  };
  est.tv = tv_of(ba, bb);

  // Bootstrap over replicate indices (equivalently multinomial bin counts).
  constexpr int kBoot = 200;
  std::vector<double> boot(kBoot);
  std::vector<int> ra(ba.size()), rb(bb.size());
  for (int r = 0; r < kBoot; ++r) {
    for (std::size_t i = 0; i < ra.size(); ++i)
      ra[i] = ba[static_cast<std::size_t>(rng.uniform_int(n_reps))];
    for (std::size_t i = 0; i < rb.size(); ++i)
      rb[i] = bb[static_cast<std::size_t>(rng.uniform_int(n_reps))];
    boot[static_cast<std::size_t>(r)] = tv_of(ra, rb);
  }
  est.se = mean_sd(boot).second;
  return est;
}

StochasticMatrix discretized_mh_kernel(const GrfModel& model, const GrfState& y,
                                       const VectorXd& grid, double proposal_sd) {
  if (!(proposal_sd > 0.0)) throw ContractError("discretized_mh_kernel: proposal sd must be > 0");
  PosteriorGrid post = exact_posterior_grid(model, y, grid);
  const Eigen::Index n = grid.size();

  // Gaussian proposal restricted and renormalised on the grid.
  MatrixXd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double z = (grid[j] - grid[i]) / proposal_sd;
      h(i, j) = std::exp(-0.5 * z * z);
    }
    h.row(i) /= h.row(i).sum();
  }

  MatrixXd p = MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double stay = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      double log_ratio = post.log_post[j] - post.log_post[i] + std::log(h(j, i)) -
                         std::log(h(i, j));
      double move = h(i, j) * std::exp(std::min(0.0, log_ratio));
      p(i, j) = move;
      stay -= move;
    }
    p(i, i) = std::max(0.0, stay);
  }
  return StochasticMatrix(p);
}

Corollary1Report corollary1_bound(const GrfModel& model, const GrfState& y, const VectorXd& grid,
                                  double proposal_sd, double n_aux, const ErgodicityCert* cert) {
  if (model.dim() != 1) throw ContractError("corollary1_bound: one-parameter models only");
  if (!(n_aux >= 1.0)) throw ContractError("corollary1_bound: n_aux must be >= 1");
  if (!(proposal_sd > 0.0)) throw ContractError("corollary1_bound: proposal sd must be > 0");
  model.validate_state(y);

  LogZOracle oracle(model);
  const double s_obs = model.suffstats(y)[0];
  const GaussianPrior& prior = model.prior();
  const Eigen::Index n = grid.size();
  if (n < 2) throw ContractError("corollary1_bound: need at least two grid points");

  VectorXd th(1);
  VectorXd log_z(n);
  VectorXd log_prior(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    th[0] = grid[i];
    log_z[i] = oracle.log_z(th);
    log_prior[i] = prior.log_density(th);
  }

  // sqrt(N) * delta(theta_i, theta_j): the N-free part of the one-step
  // deviation, with the symmetric proposal density cancelling in the ratio.
  auto delta_base = [&](Eigen::Index i, Eigen::Index j) {
    th[0] = 2.0 * grid[i] - grid[j];
    double log_z_mirror = oracle.log_z(th);
    double second_moment = std::exp(log_z_mirror - log_z[j]);
    double mean_sq = std::exp(2.0 * (log_z[i] - log_z[j]));
    double var = std::max(0.0, second_moment - mean_sq);
    double log_ratio = log_prior[j] - log_prior[i] + (grid[j] - grid[i]) * s_obs;
    return std::exp(log_ratio) * std::sqrt(var);
  };

  double sup_base = 0.0;
  VectorXd integrand(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double z = (grid[j] - grid[i]) / proposal_sd;
      double h = std::exp(-0.5 * z * z) / (proposal_sd * std::sqrt(2.0 * M_PI));
      integrand[j] = h * delta_base(i, j);
    }
    sup_base = std::max(sup_base, trapezoid(grid, integrand));
  }

  Corollary1Report rep;
  rep.n_aux = n_aux;
  rep.cert = cert ? *cert : ergodicity_cert(discretized_mh_kernel(model, y, grid, proposal_sd));
  rep.sup_integral = sup_base / std::sqrt(n_aux);
  rep.prefactor = rep.cert.prefactor();
  rep.bound = rep.prefactor * rep.sup_integral;
  return rep;
}

StochasticMatrix random_stochastic_matrix(int n, RngStream& rng) {
  if (n < 2) throw ContractError("random_stochastic_matrix: need size >= 2");
  MatrixXd p(n, n);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      // Exp(1) draws normalise to a flat Dirichlet row, strictly positive.
      double e = -std::log(1.0 - rng.uniform());
      p(i, j) = e;
      sum += e;
    }
    p.row(i) /= sum;
  }
  return StochasticMatrix(p);
}

StochasticMatrix perturb_stochastic_matrix(const StochasticMatrix& p, double kappa_max,
                                           RngStream& rng) {
  if (!(kappa_max >= 0.0)) throw ContractError("perturb_stochastic_matrix: negative kappa_max");
  MatrixXd q = p.p();
  const int n = p.size();
  for (int i = 0; i < n; ++i) {
    int from = static_cast<int>(rng.uniform_int(n));
    int to = static_cast<int>(rng.uniform_int(n - 1));
    if (to >= from) ++to;
    double eps = std::min(rng.uniform(0.0, kappa_max), q(i, from));
    q(i, from) -= eps;
    q(i, to) += eps;
  }
  return StochasticMatrix(q);
}

}  // namespace grfmcmc
