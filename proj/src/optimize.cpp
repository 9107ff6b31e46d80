#include "aghq/optimize.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>

#include "aghq/errors.hpp"

namespace aghq {

namespace {

[[noreturn]] void throw_failure(const OptimResult& res, double tol) {
  std::ostringstream msg;
  msg << "maximize_bfgs: no convergence after " << res.iterations
      << " iterations (||grad||_inf=" << res.grad_norm << ", f=" << res.value
      << ", tol=" << tol << ")";
  throw OptimizationError(msg.str());
}

}  // namespace

OptimResult maximize_bfgs(const std::function<double(const Eigen::VectorXd&)>& f,
                          const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                          const Eigen::VectorXd& start, const OptimOptions& opts,
                          bool error_on_failure) {
  const int p = static_cast<int>(start.size());
  Eigen::VectorXd x = start;
  double fx = f(x);
  if (!std::isfinite(fx))
    throw EvaluationError("maximize_bfgs: objective non-finite at the starting point");
  Eigen::VectorXd g = -grad(x);  // gradient of the minimized objective -f
  if (!g.allFinite())
    throw EvaluationError("maximize_bfgs: gradient non-finite at the starting point");

  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(p, p);
  OptimResult res;

  auto converged = [&](double value, const Eigen::VectorXd& gradient) {
    return gradient.lpNorm<Eigen::Infinity>() <=
           opts.tol_scale * std::max(1.0, std::abs(value));
  };

  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    if (converged(fx, g)) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd d = -(hinv * g);
    double descent = g.dot(d);
    if (!(descent < 0.0)) {  // stale curvature estimate: restart from steepest descent
      hinv.setIdentity();
      d = -g;
      descent = g.dot(d);
    }

    double t = 1.0;
    const double f_minus = -fx;
    double f_new = 0.0;
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int ls = 0; ls < opts.max_line_search; ++ls) {
      x_new = x + t * d;
      f_new = f(x_new);
      if (std::isfinite(f_new) && -f_new <= f_minus + opts.armijo_c * t * descent) {
        accepted = true;
        break;
      }
      t *= opts.backtrack;
    }
    if (!accepted) break;

    Eigen::VectorXd g_new = -grad(x_new);
    if (!g_new.allFinite()) break;

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd vs =
          Eigen::MatrixXd::Identity(p, p) - rho * s * y.transpose();
      hinv = vs * hinv * vs.transpose() + rho * s * s.transpose();
    }
    x = x_new;
    fx = f_new;
    g = g_new;
  }

  res.x = x;
  res.value = fx;
  res.grad_norm = g.lpNorm<Eigen::Infinity>();
  res.iterations = iter;
  if (!res.converged) res.converged = converged(fx, g);
  if (!res.converged && error_on_failure)
    throw_failure(res, opts.tol_scale * std::max(1.0, std::abs(fx)));
  return res;
}

OptimResult maximize_polished(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& hess,
    const Eigen::VectorXd& start, const OptimOptions& opts) {
  OptimResult res = maximize_bfgs(f, grad, start, opts, false);
  if (!res.converged) {
    Eigen::VectorXd x = res.x;
    Eigen::VectorXd g = grad(x);
    for (int it = 0; it < 20; ++it) {
      const Eigen::MatrixXd h = -hess(x);
      Eigen::LLT<Eigen::MatrixXd> llt(h);
      if (llt.info() != Eigen::Success) break;
      const Eigen::VectorXd x_new = x + llt.solve(g);
      if (!x_new.allFinite()) break;
      const Eigen::VectorXd g_new = grad(x_new);
      if (!g_new.allFinite() ||
          g_new.lpNorm<Eigen::Infinity>() >= g.lpNorm<Eigen::Infinity>())
        break;
      x = x_new;
      g = g_new;
      ++res.iterations;
    }
    res.x = x;
    res.value = f(x);
    res.grad_norm = g.lpNorm<Eigen::Infinity>();
    res.converged =
        res.grad_norm <= opts.tol_scale * std::max(1.0, std::abs(res.value));
  }
  if (!res.converged)
    throw_failure(res, opts.tol_scale * std::max(1.0, std::abs(res.value)));
  return res;
}

}  // namespace aghq
