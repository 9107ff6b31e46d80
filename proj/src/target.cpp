#include "aghq/target.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "aghq/errors.hpp"

namespace aghq {

namespace {

double cube_root_eps() {
  static const double v = std::cbrt(std::numeric_limits<double>::epsilon());
  return v;
}

double fourth_root_eps() {
  static const double v = std::sqrt(std::sqrt(std::numeric_limits<double>::epsilon()));
  return v;
}

[[noreturn]] void throw_nonfinite(const char* op, int coord) {
  std::ostringstream msg;
  msg << op << ": non-finite evaluation while perturbing coordinate " << coord;
  throw EvaluationError(msg.str());
}

}  // namespace

StepRule StepRule::defaults() {
  StepRule s;
  s.gradient_step = [](double t) { return cube_root_eps() * std::max(1.0, std::abs(t)); };
  s.hessian_step = [](double t) { return fourth_root_eps() * std::max(1.0, std::abs(t)); };
  return s;
}

Eigen::VectorXd LogTarget::grad_or_fd(const Eigen::VectorXd& theta) const {
  if (gradient) return gradient(theta);
  return fd_gradient(logdensity, theta);
}

Eigen::MatrixXd LogTarget::hess_or_fd(const Eigen::VectorXd& theta) const {
  if (hessian) {
    Eigen::MatrixXd h = hessian(theta);
    return 0.5 * (h + h.transpose()).eval();
  }
  return fd_hessian(logdensity, theta);
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& theta, const StepRule& steps) {
  const int p = static_cast<int>(theta.size());
  Eigen::VectorXd g(p);
  Eigen::VectorXd x = theta;
  for (int i = 0; i < p; ++i) {
    const double h = steps.gradient_step(theta[i]);
    x[i] = theta[i] + h;
    const double fp = f(x);
    x[i] = theta[i] - h;
    const double fm = f(x);
    x[i] = theta[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) throw_nonfinite("fd_gradient", i);
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& theta, const StepRule& steps) {
  const int p = static_cast<int>(theta.size());
  Eigen::VectorXd h(p);
  for (int i = 0; i < p; ++i) h[i] = steps.hessian_step(theta[i]);

  const double f0 = f(theta);
  if (!std::isfinite(f0)) throw_nonfinite("fd_hessian", 0);

  Eigen::MatrixXd out(p, p);
  Eigen::VectorXd x = theta;
  for (int i = 0; i < p; ++i) {
    x[i] = theta[i] + h[i];
    const double fp = f(x);
    x[i] = theta[i] - h[i];
    const double fm = f(x);
    x[i] = theta[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) throw_nonfinite("fd_hessian", i);
    out(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    for (int j = i + 1; j < p; ++j) {
      x[i] = theta[i] + h[i];
      x[j] = theta[j] + h[j];
      const double fpp = f(x);
      x[j] = theta[j] - h[j];
      const double fpm = f(x);
      x[i] = theta[i] - h[i];
      const double fmm = f(x);
      x[j] = theta[j] + h[j];
      const double fmp = f(x);
      x[i] = theta[i];
      x[j] = theta[j];
      if (!std::isfinite(fpp) || !std::isfinite(fpm) || !std::isfinite(fmp) ||
          !std::isfinite(fmm))
        throw_nonfinite("fd_hessian", j);
      out(i, j) = out(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
    }
  }
  return 0.5 * (out + out.transpose()).eval();
}

Transform identity_transform() {
  Transform t;
  t.kind = Transform::Kind::Identity;
  t.forward = [](const Eigen::VectorXd& x) { return x; };
  t.inverse = [](const Eigen::VectorXd& x) { return x; };
  t.log_jacobian = [](const Eigen::VectorXd&) { return 0.0; };
  t.dinv = [](int, double) { return 1.0; };
  t.d2inv = [](int, double) { return 0.0; };
  t.dlogjac = [](int, double) { return 0.0; };
  t.d2logjac = [](int, double) { return 0.0; };
  return t;
}

Transform log_transform() {
  Transform t;
  t.kind = Transform::Kind::Log;
  t.forward = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x.array().log(); };
  t.inverse = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x.array().exp(); };
  // xi = e^theta, so log|dxi/dtheta| = theta summed over coordinates.
  t.log_jacobian = [](const Eigen::VectorXd& x) { return x.sum(); };
  t.dinv = [](int, double th) { return std::exp(th); };
  t.d2inv = [](int, double th) { return std::exp(th); };
  t.dlogjac = [](int, double) { return 1.0; };
  t.d2logjac = [](int, double) { return 0.0; };
  return t;
}

Transform double_log_interval_transform(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || ((b - a).array() <= 0.0).any())
    throw InvalidArgumentError("double_log_interval_transform: need a_i < b_i");
  Transform t;
  t.kind = Transform::Kind::DoubleLogInterval;
  // theta = log(-log((xi - a)/(b - a))); xi = a + (b - a) exp(-e^theta).
  t.forward = [a, b](const Eigen::VectorXd& xi) -> Eigen::VectorXd {
    return (-((xi - a).array() / (b - a).array()).log()).log();
  };
  t.inverse = [a, b](const Eigen::VectorXd& th) -> Eigen::VectorXd {
    return a.array() + (b - a).array() * (-th.array().exp()).exp();
  };
  // dxi/dtheta = -(b - a) e^theta exp(-e^theta); log|.| = log(b-a) + theta - e^theta.
  t.log_jacobian = [a, b](const Eigen::VectorXd& th) {
    return ((b - a).array().log() + th.array() - th.array().exp()).sum();
  };
  t.dinv = [a, b](int i, double th) {
    return -(b[i] - a[i]) * std::exp(th - std::exp(th));
  };
  t.d2inv = [a, b](int i, double th) {
    const double et = std::exp(th);
    return -(b[i] - a[i]) * std::exp(th - et) * (1.0 - et);
  };
  t.dlogjac = [](int, double th) { return 1.0 - std::exp(th); };
  t.d2logjac = [](int, double th) { return -std::exp(th); };
  return t;
}

LogTarget wrap_transformed(const LogTarget& base, const Transform& t) {
  LogTarget out;
  out.dim = base.dim;
  auto base_logdensity = base.logdensity;
  auto inverse = t.inverse;
  auto log_jacobian = t.log_jacobian;
  out.logdensity = [base_logdensity, inverse, log_jacobian](const Eigen::VectorXd& th) {
    return base_logdensity(inverse(th)) + log_jacobian(th);
  };
  if (base.starting_point.size() > 0) out.starting_point = t.forward(base.starting_point);

  if (t.coordinatewise() && base.has_gradient()) {
    auto base_grad = base.gradient;
    auto dinv = t.dinv;
    auto dlogjac = t.dlogjac;
    out.gradient = [base_grad, inverse, dinv, dlogjac](const Eigen::VectorXd& th) {
      const Eigen::VectorXd xi = inverse(th);
      Eigen::VectorXd g = base_grad(xi);
      for (int i = 0; i < th.size(); ++i)
        g[i] = g[i] * dinv(i, th[i]) + dlogjac(i, th[i]);
      return g;
    };
    if (base.has_hessian()) {
      auto base_hess = base.hessian;
      auto d2inv = t.d2inv;
      auto d2logjac = t.d2logjac;
      out.hessian = [base_grad, base_hess, inverse, dinv, d2inv, d2logjac](
                        const Eigen::VectorXd& th) {
        const Eigen::VectorXd xi = inverse(th);
        const Eigen::VectorXd g = base_grad(xi);
        Eigen::MatrixXd h = base_hess(xi);
        const int p = static_cast<int>(th.size());
        for (int i = 0; i < p; ++i)
          for (int j = 0; j < p; ++j) h(i, j) *= dinv(i, th[i]) * dinv(j, th[j]);
        for (int i = 0; i < p; ++i)
          h(i, i) += g[i] * d2inv(i, th[i]) + d2logjac(i, th[i]);
        return h;
      };
    }
  }
  return out;
}

}  // namespace aghq
