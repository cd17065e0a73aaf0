#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace grfmcmc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// log(sum_i exp(x[i])) computed stably; returns -inf for an empty span.
// For a single element the result is bitwise equal to that element.
double log_sum_exp(std::span<const double> x);

// Trapezoid-rule integral of y over the (sorted, strictly increasing) grid x.
double trapezoid(const VectorXd& x, const VectorXd& y);

// Regularized upper incomplete gamma Q(a, x), a > 0, x >= 0.
double gamma_q(double a, double x);

// Survival function of the chi-squared distribution with df > 0.
double chi2_sf(double x, double df);

// Binomial coefficient as a double; returns 0 for k < 0 or k > n.
double binom(long long n, long long k);

// Log density of N(mean, sd^2) at x.
double normal_logpdf(double x, double mean, double sd);

// Sample mean and (n-1)-denominator standard deviation.
std::pair<double, double> mean_sd(std::span<const double> x);

// Multivariate normal with fixed covariance; sampling and log density.
// Construction fails (ContractError) unless the matrix is symmetric positive
// definite.
class MvNormal {
 public:
  explicit MvNormal(MatrixXd cov);

  int dim() const { return static_cast<int>(cov_.rows()); }
  const MatrixXd& cov() const { return cov_; }

  VectorXd sample(const VectorXd& mean, class RngStream& rng) const;
  double logpdf(const VectorXd& x, const VectorXd& mean) const;

 private:
  MatrixXd cov_;
  MatrixXd chol_lower_;
  double log_det_ = 0.0;
};

}  // namespace grfmcmc
