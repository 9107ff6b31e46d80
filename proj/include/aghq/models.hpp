#ifndef AGHQ_MODELS_HPP
#define AGHQ_MODELS_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "aghq/marglaplace.hpp"
#include "aghq/target.hpp"

namespace aghq {

/// Poisson counts with an Exponential(1) mean: Y_i | lambda ~ Poisson(lambda),
/// lambda ~ Exponential(1). The posterior is Gamma(1 + sum Y, n + 1) and the
/// marginal likelihood is known in closed form, so every summary has an exact
/// oracle. The quadrature target lives on theta = log lambda.
struct ConjugateModelInstance {
  std::vector<long> counts;
  long n = 0;
  long sum_y = 0;
  double sum_lgamma_y1 = 0.0;  // sum_i log(y_i!)
  double log_z_exact = 0.0;    // lgamma(1+sum) - (1+sum) log(n+1) - sum_lgamma_y1

  static ConjugateModelInstance from_counts(std::vector<long> y);

  /// Unnormalized log-posterior on theta = log lambda, with analytic
  /// derivatives: -(n+1)e^theta + (1+sum Y) theta - sum log(y_i!).
  LogTarget make_target() const;

  double posterior_shape() const { return 1.0 + static_cast<double>(sum_y); }
  double posterior_rate() const { return static_cast<double>(n) + 1.0; }
  double posterior_mean_lambda() const { return posterior_shape() / posterior_rate(); }
  /// Posterior CDF of theta = log lambda.
  double cdf_theta(double t) const;
  /// Posterior quantile of lambda.
  double quantile_lambda(double alpha) const;
};

/// Multivariate Gaussian with known mean and covariance; AGHQ is exact on it
/// for every k, which makes it the zero-error reference model.
struct GaussianModel {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;

  LogTarget make_target() const;  // -(1/2)(th-mu)^T Sigma^{-1} (th-mu)
  double log_z_exact() const;     // (p/2) log 2pi + (1/2) logdet Sigma
  double marginal_cdf(int dim, double x) const;
  double marginal_quantile(int dim, double alpha) const;
};

/// Normal random-intercept model: y_i = mu + W_{g_i} + eps_i with
/// eps ~ N(0, sd_obs^2), W_g ~ N(0, sd_group^2), mu ~ N(0, sd_mean^2).
/// Jointly Gaussian, so the marginal likelihood and the posterior of W are
/// available exactly by Gaussian conditioning — the oracle for the marginal
/// Laplace pipeline.
struct RandomInterceptModel {
  double sd_obs = 1.0;
  double sd_group = 1.0;
  double sd_mean = 10.0;
  std::vector<int> group;  // 0-based group of each observation
  Eigen::VectorXd y;
  int n_groups = 0;

  JointTarget make_joint() const;  // W latent, theta = (mu)

  double log_marginal_likelihood() const;
  Eigen::VectorXd posterior_mean_w() const;
  Eigen::MatrixXd posterior_cov_w() const;

private:
  Eigen::MatrixXd marginal_cov_y() const;
};

/// Built-in model names accepted by the CLI.
const std::vector<std::string>& registry_names();
bool is_registered(const std::string& name);

/// Single-column CSV of counts with header "y". Malformed rows are reported
/// with their line number.
ConjugateModelInstance load_conjugate_csv(const std::string& path);
/// JSON {"mu": [...], "sigma": [[...], ...]}.
GaussianModel load_gaussian_json(const std::string& path);
/// JSON {"sd_obs": s, "sd_group": s, "sd_mean": s, "group": [...], "y": [...]}
/// with 1-based or 0-based contiguous group labels.
RandomInterceptModel load_random_intercept_json(const std::string& path);

}  // namespace aghq

#endif
