#ifndef AGHQ_TARGET_HPP
#define AGHQ_TARGET_HPP

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace aghq {

/// Finite-difference step policy. Defaults follow the usual central-difference
/// balance: eps^(1/3) steps for gradients, eps^(1/4) for Hessians, scaled by
/// max(1, |theta_i|).
struct StepRule {
  std::function<double(double)> gradient_step;
  std::function<double(double)> hessian_step;

  static StepRule defaults();
};

/// User-facing unnormalized log-posterior on R^p. `logdensity` must be a pure
/// function of theta (plus immutable captured data): the engine evaluates it
/// concurrently at distinct points. `gradient` and `hessian` are optional;
/// finite differences take over when they are absent.
struct LogTarget {
  int dim = 0;
  std::function<double(const Eigen::VectorXd&)> logdensity;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
  Eigen::VectorXd starting_point;

  bool has_gradient() const { return static_cast<bool>(gradient); }
  bool has_hessian() const { return static_cast<bool>(hessian); }

  /// Analytic gradient if supplied, otherwise central finite differences.
  Eigen::VectorXd grad_or_fd(const Eigen::VectorXd& theta) const;
  /// Analytic Hessian if supplied (symmetrized), otherwise finite differences.
  Eigen::MatrixXd hess_or_fd(const Eigen::VectorXd& theta) const;
};

/// Coordinate-wise change of variables between a constrained space and R^p.
/// `forward` maps constrained -> unconstrained, `inverse` the reverse, and
/// `log_jacobian` is log |det d(inverse)/d(theta)| at an unconstrained point.
struct Transform {
  enum class Kind { Identity, Log, DoubleLogInterval, Custom };

  Kind kind = Kind::Identity;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> forward;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> inverse;
  std::function<double(const Eigen::VectorXd&)> log_jacobian;
  // Per-coordinate d(inverse)/d(theta) and its theta-derivative plus the
  // coordinate-wise log-Jacobian derivatives; set for the builtin kinds and
  // used to push analytic target derivatives through the change of variables.
  std::function<double(int, double)> dinv;
  std::function<double(int, double)> d2inv;
  std::function<double(int, double)> dlogjac;
  std::function<double(int, double)> d2logjac;

  bool coordinatewise() const { return static_cast<bool>(dinv); }
};

Transform identity_transform();
/// theta_i = log(xi_i) on each coordinate; xi_i > 0.
Transform log_transform();
/// theta_i = log(-log((xi_i - a_i) / (b_i - a_i))) on each coordinate;
/// a_i < xi_i < b_i.
Transform double_log_interval_transform(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Log-posterior on the unconstrained scale:
/// logdensity(theta) = base.logdensity(inverse(theta)) + log_jacobian(theta).
/// Analytic derivatives are composed by the chain rule for coordinate-wise
/// transforms and dropped otherwise. The starting point is mapped forward.
LogTarget wrap_transformed(const LogTarget& base, const Transform& t);

/// Central-difference gradient of a scalar function. Throws EvaluationError
/// (naming the coordinate) if any probe is non-finite.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& theta,
                            const StepRule& steps = StepRule::defaults());

/// Central second differences, symmetrized as (A + A^T)/2.
Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& theta,
                           const StepRule& steps = StepRule::defaults());

}  // namespace aghq

#endif
