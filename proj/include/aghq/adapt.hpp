#ifndef AGHQ_ADAPT_HPP
#define AGHQ_ADAPT_HPP

#include <Eigen/Core>
#include <string>

#include "aghq/optimize.hpp"
#include "aghq/quadrature.hpp"
#include "aghq/target.hpp"

namespace aghq {

struct ModeResult {
  Eigen::VectorXd mode;
  Eigen::MatrixXd neg_hessian;  // H(mode) = -d^2 logdensity, SPD
  Eigen::MatrixXd chol_factor;  // lower L with L L^T = H^{-1}
  double log_density_at_mode = 0.0;
};

struct FitOptions {
  OptimOptions optim;
  long point_cap = kDefaultPointCap;
  /// Node-sweep evaluation: 1 runs the serial reference, anything else the
  /// OpenMP kernel. Results are bit-identical either way.
  int threads = 1;
};

/// The fitted object: everything downstream summaries need, cached once.
struct AdaptedPosterior {
  LogTarget target;
  int k = 0;
  Eigen::VectorXd mode;
  Eigen::MatrixXd neg_hessian;
  Eigen::MatrixXd chol_factor;
  double log_norm_const = 0.0;
  ProductRule rule;
  Eigen::MatrixXd nodes_theta;    // p x k^p, column j = L z_j + mode
  Eigen::VectorXd log_integrand;  // logdensity at each cached node

  int dim() const { return target.dim; }
};

/// Locates the posterior mode by BFGS, forms the negative Hessian there and
/// the lower Cholesky factor of its inverse. Degenerate or indefinite
/// curvature raises CurvatureError.
ModeResult find_mode(const LogTarget& target, const OptimOptions& opts = {});

/// log of Eq.-style adapted normalizing constant,
///   sum_i log L_ii + logsumexp_z[ logdensity(L z + mode) + log omega(z) ],
/// evaluated over the product-rule grid. Non-finite integrand values raise
/// EvaluationError naming the offending node.
double log_norm_const(const LogTarget& target, const ProductRule& rule,
                      const Eigen::VectorXd& mode, const Eigen::MatrixXd& chol_factor,
                      int threads = 1);

AdaptedPosterior fit(const LogTarget& target, int k, const FitOptions& opts = {});

/// |true/approx - 1| from the two log values, expm1-accurate near zero.
double relative_error(double log_z_true, double log_z_approx);

/// JSON serialization (mode, H, L, logNormConst, k, p) for the CLI.
std::string adapted_to_json(const AdaptedPosterior& ap, int indent = 2);

namespace detail {
/// logdensity swept over the columns of `points`; parallel when threads != 1.
/// Writes one slot per column so the result does not depend on scheduling.
Eigen::VectorXd eval_columns(const LogTarget& target, const Eigen::MatrixXd& points,
                             int threads);
}  // namespace detail

}  // namespace aghq

#endif
