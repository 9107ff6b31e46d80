#include "aghq/adapt.hpp"

#include <cmath>
#include <exception>
#include <iostream>
#include <limits>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <nlohmann/json.hpp>

#include "aghq/errors.hpp"
#include "aghq/linalg.hpp"
#include "aghq/logsumexp.hpp"

namespace aghq {

namespace {

void probe_neighborhood(const LogTarget& target) {
  if (target.dim < 1) throw InvalidArgumentError("fit: target dimension must be positive");
  if (target.starting_point.size() != target.dim)
    throw InvalidArgumentError("fit: starting point is mandatory and must match dim");
  const Eigen::VectorXd& s = target.starting_point;
  if (!std::isfinite(target.logdensity(s)))
    throw EvaluationError("fit: logdensity non-finite at the starting point");
  Eigen::VectorXd x = s;
  for (int i = 0; i < target.dim; ++i) {
    const double h = 1e-3 * std::max(1.0, std::abs(s[i]));
    for (double sign : {1.0, -1.0}) {
      x[i] = s[i] + sign * h;
      if (!std::isfinite(target.logdensity(x))) {
        std::ostringstream msg;
        msg << "fit: logdensity non-finite near the starting point (coordinate " << i << ")";
        throw EvaluationError(msg.str());
      }
    }
    x[i] = s[i];
  }
}

// One-time advisory check of supplied derivatives against finite differences.
void check_supplied_derivatives(const LogTarget& target) {
  const Eigen::VectorXd& s = target.starting_point;
  if (target.has_gradient()) {
    const Eigen::VectorXd ga = target.gradient(s);
    const Eigen::VectorXd gf = fd_gradient(target.logdensity, s);
    const double scale = std::max(1.0, gf.lpNorm<Eigen::Infinity>());
    if ((ga - gf).lpNorm<Eigen::Infinity>() > 1e-4 * scale)
      std::cerr << "aghq: warning: supplied gradient disagrees with finite "
                   "differences at the starting point\n";
  }
  if (target.has_hessian()) {
    const Eigen::MatrixXd ha = target.hessian(s);
    const double asym = (ha - ha.transpose()).lpNorm<Eigen::Infinity>();
    if (asym > 1e-3 * std::max(1.0, ha.lpNorm<Eigen::Infinity>()))
      std::cerr << "aghq: warning: supplied Hessian is asymmetric beyond 1e-3; "
                   "it will be symmetrized\n";
    const Eigen::MatrixXd hf = fd_hessian(target.logdensity, s);
    const double scale = std::max(1.0, hf.lpNorm<Eigen::Infinity>());
    if ((0.5 * (ha + ha.transpose()) - hf).lpNorm<Eigen::Infinity>() > 1e-4 * scale)
      std::cerr << "aghq: warning: supplied Hessian disagrees with finite "
                   "differences at the starting point\n";
  }
}

void check_nodes_finite(const Eigen::VectorXd& ell, const ProductRule& rule,
                        const char* op) {
  for (Eigen::Index i = 0; i < ell.size(); ++i) {
    if (!std::isfinite(ell[i])) {
      std::ostringstream msg;
      msg << op << ": logdensity non-finite at node z = [";
      for (int d = 0; d < rule.dim; ++d) msg << (d ? ", " : "") << rule.points(d, i);
      msg << "]";
      throw EvaluationError(msg.str());
    }
  }
}

}  // namespace

namespace detail {

Eigen::VectorXd eval_columns(const LogTarget& target, const Eigen::MatrixXd& points,
                             int threads) {
  const Eigen::Index n = points.cols();
  Eigen::VectorXd out(n);
  if (threads == 1) {
    for (Eigen::Index i = 0; i < n; ++i) out[i] = target.logdensity(points.col(i));
    return out;
  }
#ifdef _OPENMP
  std::exception_ptr err;
#pragma omp parallel for schedule(static) num_threads(threads > 0 ? threads : omp_get_max_threads())
  for (Eigen::Index i = 0; i < n; ++i) {
    try {
      out[i] = target.logdensity(points.col(i));
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
#else
  for (Eigen::Index i = 0; i < n; ++i) out[i] = target.logdensity(points.col(i));
#endif
  return out;
}

}  // namespace detail

ModeResult find_mode(const LogTarget& target, const OptimOptions& opts) {
  auto objective = [&target](const Eigen::VectorXd& x) { return target.logdensity(x); };
  auto gradient = [&target](const Eigen::VectorXd& x) { return target.grad_or_fd(x); };
  auto hessian = [&target](const Eigen::VectorXd& x) { return target.hess_or_fd(x); };
  const OptimResult opt =
      maximize_polished(objective, gradient, hessian, target.starting_point, opts);

  ModeResult res;
  res.mode = opt.x;
  res.log_density_at_mode = opt.value;
  res.neg_hessian = -target.hess_or_fd(opt.x);

  // SPD at working precision: a curvature that vanishes relative to the scale
  // of the problem is treated the same as an indefinite one.
  const double floor = std::sqrt(std::numeric_limits<double>::epsilon()) *
                       std::max(1.0, std::abs(opt.value));
  if (min_eigenvalue(res.neg_hessian) <= floor)
    throw CurvatureError(
        "find_mode: curvature at the mode is degenerate or indefinite; "
        "consider a parameter transformation that improves spherical symmetry");
  res.chol_factor = chol_of_inverse(res.neg_hessian);
  return res;
}

double log_norm_const(const LogTarget& target, const ProductRule& rule,
                      const Eigen::VectorXd& mode, const Eigen::MatrixXd& chol_factor,
                      int threads) {
  if (rule.dim != target.dim)
    throw InvalidArgumentError("log_norm_const: rule dimension does not match target");
  Eigen::MatrixXd nodes = (chol_factor * rule.points).colwise() + mode;
  Eigen::VectorXd ell = detail::eval_columns(target, nodes, threads);
  check_nodes_finite(ell, rule, "log_norm_const");
  Eigen::VectorXd terms = ell + rule.log_weights;
  const double lse = logsumexp(std::span<const double>(terms.data(), terms.size()));
  return chol_factor.diagonal().array().log().sum() + lse;
}

AdaptedPosterior fit(const LogTarget& target, int k, const FitOptions& opts) {
  probe_neighborhood(target);
  check_supplied_derivatives(target);

  AdaptedPosterior ap;
  ap.target = target;
  ap.k = k;
  const ModeResult mode = find_mode(target, opts.optim);
  ap.mode = mode.mode;
  ap.neg_hessian = mode.neg_hessian;
  ap.chol_factor = mode.chol_factor;
  ap.rule = product_rule(k, target.dim, opts.point_cap);

  ap.nodes_theta = (ap.chol_factor * ap.rule.points).colwise() + ap.mode;
  ap.log_integrand = detail::eval_columns(target, ap.nodes_theta, opts.threads);
  check_nodes_finite(ap.log_integrand, ap.rule, "fit");

  Eigen::VectorXd terms = ap.log_integrand + ap.rule.log_weights;
  ap.log_norm_const = ap.chol_factor.diagonal().array().log().sum() +
                      logsumexp(std::span<const double>(terms.data(), terms.size()));
  if (!std::isfinite(ap.log_norm_const))
    throw EvaluationError("fit: log normalizing constant is not finite");
  return ap;
}

double relative_error(double log_z_true, double log_z_approx) {
  if (!std::isfinite(log_z_true) || !std::isfinite(log_z_approx))
    throw InvalidArgumentError("relative_error: inputs must be finite");
  return std::abs(std::expm1(log_z_true - log_z_approx));
}

std::string adapted_to_json(const AdaptedPosterior& ap, int indent) {
  nlohmann::json j;
  j["k"] = ap.k;
  j["p"] = ap.dim();
  j["mode"] = std::vector<double>(ap.mode.begin(), ap.mode.end());
  std::vector<std::vector<double>> h(ap.dim()), l(ap.dim());
  for (int i = 0; i < ap.dim(); ++i) {
    h[i].assign(ap.neg_hessian.row(i).begin(), ap.neg_hessian.row(i).end());
    l[i].assign(ap.chol_factor.row(i).begin(), ap.chol_factor.row(i).end());
  }
  j["neg_hessian"] = h;
  j["chol_factor"] = l;
  j["log_norm_const"] = ap.log_norm_const;
  return j.dump(indent);
}

}  // namespace aghq
