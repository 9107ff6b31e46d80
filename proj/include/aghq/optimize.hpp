#ifndef AGHQ_OPTIMIZE_HPP
#define AGHQ_OPTIMIZE_HPP

#include <Eigen/Core>
#include <functional>

namespace aghq {

struct OptimOptions {
  int max_iter = 500;
  /// Converged when ||grad||_inf <= tol_scale * max(1, |f|).
  double tol_scale = 1e-8;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int max_line_search = 60;
};

struct OptimResult {
  Eigen::VectorXd x;
  double value = 0.0;         // objective at x (maximized)
  double grad_norm = 0.0;     // ||grad||_inf at x
  int iterations = 0;
  bool converged = false;
};

/// Maximizes f by BFGS with a backtracking Armijo line search. Throws
/// OptimizationError with a short trace when the iteration budget runs out,
/// and EvaluationError if f or its gradient turns non-finite at the start.
/// With error_on_failure false, a non-converged result is returned instead.
OptimResult maximize_bfgs(const std::function<double(const Eigen::VectorXd&)>& f,
                          const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                          const Eigen::VectorXd& start, const OptimOptions& opts = {},
                          bool error_on_failure = true);

/// BFGS, then a line-search-free Newton polish when the Armijo test hits the
/// floating-point resolution of f before the gradient tolerance is met (the
/// usual situation when |f| is large at the optimum). Polish steps use the
/// supplied Hessian and are only kept while they shrink the gradient.
OptimResult maximize_polished(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& hess,
    const Eigen::VectorXd& start, const OptimOptions& opts = {});

}  // namespace aghq

#endif
