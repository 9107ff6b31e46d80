#ifndef AGHQ_MARGLAPLACE_HPP
#define AGHQ_MARGLAPLACE_HPP

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "aghq/adapt.hpp"

namespace aghq {

/// Joint log-density over a high-dimensional latent block W and a
/// low-dimensional parameter theta. gradient_w / hessian_w differentiate in W
/// for fixed theta; finite differences take over when absent.
struct JointTarget {
  int dim_w = 0;
  int dim_theta = 0;
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> logjoint;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> gradient_w;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> hessian_w;
  Eigen::VectorXd start_w;
  Eigen::VectorXd start_theta;
};

struct LaplaceProfile {
  Eigen::VectorXd w_hat;        // inner mode for this theta
  Eigen::MatrixXd prec_chol;    // lower L with L L^T = H_W(theta)
  double log_la = 0.0;          // logjoint(w_hat) + (m/2) log 2pi - 0.5 logdet H_W
};

/// Laplace approximation of log int exp(logjoint(W, theta)) dW at fixed theta.
/// `warm_start` seeds the inner optimizer (falls back to jt.start_w).
LaplaceProfile laplace_profile(const JointTarget& jt, const Eigen::VectorXd& theta,
                               const std::optional<Eigen::VectorXd>& warm_start = {},
                               const OptimOptions& opts = {});

struct MixtureComponent {
  Eigen::VectorXd theta_node;
  Eigen::VectorXd mean_w;
  Eigen::MatrixXd prec_chol_w;
  double log_weight = 0.0;
};

/// Discrete mixture of Gaussians over W, one component per theta node;
/// logsumexp of the log weights is 0.
struct MixtureApproximation {
  int dim_w = 0;
  std::vector<MixtureComponent> components;
};

struct MarglaplaceOptions {
  OptimOptions optim;
  long point_cap = kDefaultPointCap;
  /// Warm-start inner optimizations from the previous node's optimum. Forces
  /// serial node sweeps; disable to evaluate nodes in parallel.
  bool warm_start = true;
  int threads = 1;
};

struct MarginalLaplaceFit {
  AdaptedPosterior theta_posterior;  // AGHQ fit of the Laplace-profiled target
  MixtureApproximation mixture;
};

MarginalLaplaceFit fit_marginal_laplace(const JointTarget& jt, int k,
                                        const MarglaplaceOptions& opts = {});

/// Exact mixture sampling: categorical component draw, then a Gaussian draw
/// with covariance H_W^{-1}. Column i of the result depends only on (seed, i),
/// so the sweep parallelizes without changing output.
Eigen::MatrixXd sample_mixture(const MixtureApproximation& mix, long n_samples,
                               std::uint64_t seed, int threads = 1);

/// Mixture posterior mean of W: sum_j weight_j mean_w_j.
Eigen::VectorXd mixture_mean(const MixtureApproximation& mix);

/// The (m+p)-dimensional flat view [W; theta] of a joint target, for direct
/// product-rule AGHQ on small problems.
LogTarget joint_as_flat_target(const JointTarget& jt);

}  // namespace aghq

#endif
