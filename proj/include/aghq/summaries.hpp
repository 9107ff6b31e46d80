#ifndef AGHQ_SUMMARIES_HPP
#define AGHQ_SUMMARIES_HPP

#include <Eigen/Core>
#include <functional>
#include <map>
#include <vector>

#include "aghq/adapt.hpp"

namespace aghq {

/// Posterior expectation of f under the fitted approximation, using the
/// cached nodes and weights: |L| sum_z f(Lz+m) exp(l(Lz+m) - logZ) w(z).
/// Log-space accumulation over sign-split node sets.
double moment(const AdaptedPosterior& ap,
              const std::function<double(const Eigen::VectorXd&)>& f);

/// Mode and Cholesky factor after swapping `dim` into the first position.
/// The factor is re-derived from the permuted curvature (a permuted
/// triangular factor would not be triangular).
struct Reordered {
  Eigen::VectorXd mode;         // P mode
  Eigen::MatrixXd chol_factor;  // lower Cholesky of (P H P^T)^{-1}
  // The induced k^p grid, already mapped back to the target's original
  // coordinate order (evaluation-ready).
  Eigen::MatrixXd nodes_theta;
};

Reordered reorder_for_marginal(const AdaptedPosterior& ap, int dim);

/// Barycentric Lagrange interpolant of log-marginal values; degree k-1
/// through k support points. Support coordinates are normalized internally so
/// the barycentric weights stay scaled for any k.
class LogInterpolant {
public:
  LogInterpolant() = default;
  LogInterpolant(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

  double operator()(double x) const;
  int degree() const { return static_cast<int>(x_.size()) - 1; }

private:
  Eigen::VectorXd x_, y_, w_;
  double center_ = 0.0, scale_ = 1.0;
};

/// Per-dimension marginal of the fitted approximation, evaluated at the k
/// support points with the factorized reduced-weight sum.
struct MarginalSummary {
  int dim = 0;                     // 0-based dimension index
  Eigen::VectorXd support_points;  // L'_11 x*_j + mode'_1, ascending
  Eigen::VectorXd log_marginal;    // log marginal density at support points
  double scale11 = 0.0;            // L'_11
  // Filled by cdf_and_quantiles:
  Eigen::VectorXd grid;
  Eigen::VectorXd density;
  Eigen::VectorXd cdf;
};

/// dim is 0-based; threads as in FitOptions.
MarginalSummary marginal_at_nodes(const AdaptedPosterior& ap, int dim, int threads = 1);

/// Throws InterpolationUnavailableError for k = 1 (use the Laplace Gaussian
/// marginal instead).
LogInterpolant interpolate_log_marginal(const MarginalSummary& ms);

struct SummaryOptions {
  int grid_size = 1000;
  double grid_pad_sd = 2.5;  // grid extends this many L'_11 beyond the nodes
  int threads = 1;
};

/// Lays a fine grid over the marginal, accumulates the running-sum CDF of
/// exp(interpolant), fills ms.grid/density/cdf, and returns the quantile for
/// each level: the smallest grid point with cdf >= alpha.
std::vector<double> cdf_and_quantiles(MarginalSummary& ms, const std::vector<double>& alphas,
                                      const SummaryOptions& opts = {});

/// Piecewise-linear lookup of a filled marginal CDF (0 left of the grid,
/// final mass to the right).
double cdf_lookup(const MarginalSummary& ms, double x);

/// max_{x in grid} |cdf_a(x) - cdf_b(x)|.
double ks_distance(const std::function<double(double)>& cdf_a,
                   const std::function<double(double)>& cdf_b,
                   const Eigen::VectorXd& probe_grid);

struct DimSummary {
  int dim = 0;
  double mean = 0.0;
  double sd = 0.0;
  MarginalSummary marginal;
  std::map<double, double> quantiles;  // level -> value
};

/// The full per-dimension pipeline (marginal, interpolant, CDF, quantiles,
/// mean, sd) for every dimension. Requires k >= 2.
std::vector<DimSummary> summarize_all(const AdaptedPosterior& ap,
                                      const std::vector<double>& alphas,
                                      const SummaryOptions& opts = {});

}  // namespace aghq

#endif
