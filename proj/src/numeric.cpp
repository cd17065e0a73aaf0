#include "grfmcmc/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "grfmcmc/errors.hpp"
#include "grfmcmc/rng.hpp"

namespace grfmcmc {

double log_sum_exp(std::span<const double> x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  double m = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

double trapezoid(const VectorXd& x, const VectorXd& y) {
  if (x.size() != y.size()) throw ContractError("trapezoid: grid/value size mismatch");
  if (x.size() < 2) throw ContractError("trapezoid: need at least two grid points");
  double acc = 0.0;
  for (Eigen::Index i = 1; i < x.size(); ++i) {
    double dx = x[i] - x[i - 1];
    if (dx <= 0.0) throw ContractError("trapezoid: grid must be strictly increasing");
    acc += 0.5 * dx * (y[i] + y[i - 1]);
  }
  return acc;
}

namespace {

// Series expansion of the regularized lower incomplete gamma P(a, x).
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for the regularized upper incomplete gamma Q(a, x).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw ContractError("gamma_q: need a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_sf(double x, double df) {
  if (!(df > 0.0)) throw ContractError("chi2_sf: df must be positive");
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * df, 0.5 * x);
}

double binom(long long n, long long k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (long long i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

double normal_logpdf(double x, double mean, double sd) {
  double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.91893853320467274178;  // log sqrt(2 pi)
}

std::pair<double, double> mean_sd(std::span<const double> x) {
  if (x.empty()) throw ContractError("mean_sd: empty sample");
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  if (x.size() == 1) return {m, 0.0};
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return {m, std::sqrt(ss / static_cast<double>(x.size() - 1))};
}

MvNormal::MvNormal(MatrixXd cov) : cov_(std::move(cov)) {
  if (cov_.rows() != cov_.cols() || cov_.rows() == 0)
    throw ContractError("MvNormal: covariance must be square and non-empty");
  double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw ContractError("MvNormal: covariance must be symmetric");
  Eigen::LLT<MatrixXd> llt(cov_);
  if (llt.info() != Eigen::Success)
    throw ContractError("MvNormal: covariance must be positive definite");
  chol_lower_ = llt.matrixL();
  for (int i = 0; i < chol_lower_.rows(); ++i) {
    if (!(chol_lower_(i, i) > 0.0))
      throw ContractError("MvNormal: covariance must be positive definite");
    log_det_ += 2.0 * std::log(chol_lower_(i, i));
  }
}

VectorXd MvNormal::sample(const VectorXd& mean, RngStream& rng) const {
  if (mean.size() != cov_.rows()) throw ContractError("MvNormal::sample: mean dimension mismatch");
  VectorXd z(dim());
  for (int i = 0; i < dim(); ++i) z[i] = rng.normal();
  return mean + chol_lower_ * z;
}

double MvNormal::logpdf(const VectorXd& x, const VectorXd& mean) const {
  if (x.size() != cov_.rows() || mean.size() != cov_.rows())
    throw ContractError("MvNormal::logpdf: dimension mismatch");
  VectorXd z = chol_lower_.triangularView<Eigen::Lower>().solve(x - mean);
  return -0.5 * z.squaredNorm() - 0.5 * log_det_ -
         0.91893853320467274178 * static_cast<double>(dim());
}

}  // namespace grfmcmc
