#include "aghq/marglaplace.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <Eigen/Cholesky>

#include "aghq/errors.hpp"
#include "aghq/linalg.hpp"
#include "aghq/logsumexp.hpp"
#include "aghq/rng.hpp"

namespace aghq {

LaplaceProfile laplace_profile(const JointTarget& jt, const Eigen::VectorXd& theta,
                               const std::optional<Eigen::VectorXd>& warm_start,
                               const OptimOptions& opts) {
  auto obj = [&jt, &theta](const Eigen::VectorXd& w) { return jt.logjoint(w, theta); };
  auto grad = [&jt, &theta](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    if (jt.gradient_w) return jt.gradient_w(w, theta);
    return fd_gradient([&](const Eigen::VectorXd& v) { return jt.logjoint(v, theta); }, w);
  };
  auto hess = [&jt, &theta](const Eigen::VectorXd& w) -> Eigen::MatrixXd {
    if (jt.hessian_w) {
      Eigen::MatrixXd h = jt.hessian_w(w, theta);
      return 0.5 * (h + h.transpose()).eval();
    }
    return fd_hessian([&](const Eigen::VectorXd& v) { return jt.logjoint(v, theta); }, w);
  };
  const Eigen::VectorXd& start = warm_start ? *warm_start : jt.start_w;

  OptimResult inner;
  try {
    inner = maximize_polished(obj, grad, hess, start, opts);
  } catch (const Error& e) {
    std::ostringstream msg;
    msg << "laplace_profile: inner optimization failed at theta = ["
        << theta.transpose() << "]: " << e.what();
    throw OptimizationError(msg.str());
  }

  const Eigen::MatrixXd h_w = -hess(inner.x);
  Eigen::LLT<Eigen::MatrixXd> llt(h_w);
  const double floor = std::sqrt(std::numeric_limits<double>::epsilon()) *
                       std::max(1.0, std::abs(inner.value));
  if (llt.info() != Eigen::Success || min_eigenvalue(h_w) <= floor) {
    std::ostringstream msg;
    msg << "laplace_profile: latent curvature not positive definite at theta = ["
        << theta.transpose() << "]";
    throw CurvatureError(msg.str());
  }

  LaplaceProfile out;
  out.w_hat = inner.x;
  out.prec_chol = llt.matrixL();
  out.log_la = inner.value +
               0.5 * jt.dim_w * std::log(2.0 * std::numbers::pi) -
               out.prec_chol.diagonal().array().log().sum();
  return out;
}

MarginalLaplaceFit fit_marginal_laplace(const JointTarget& jt, int k,
                                        const MarglaplaceOptions& opts) {
  // The profiled target over theta. With warm starting the capture is
  // stateful, so every sweep that touches it must stay serial.
  auto warm = std::make_shared<std::optional<Eigen::VectorXd>>();
  const bool warm_start = opts.warm_start;
  const OptimOptions inner_opts = opts.optim;

  LogTarget profiled;
  profiled.dim = jt.dim_theta;
  profiled.starting_point = jt.start_theta;
  profiled.logdensity = [jt, warm, warm_start, inner_opts](const Eigen::VectorXd& th) {
    const LaplaceProfile prof = laplace_profile(jt, th, *warm, inner_opts);
    if (warm_start) *warm = prof.w_hat;
    return prof.log_la;
  };

  FitOptions fit_opts;
  fit_opts.optim = opts.optim;
  fit_opts.point_cap = opts.point_cap;
  fit_opts.threads = warm_start ? 1 : opts.threads;
  MarginalLaplaceFit out;
  out.theta_posterior = fit(profiled, k, fit_opts);

  const AdaptedPosterior& ap = out.theta_posterior;
  const Eigen::Index n = ap.rule.size();
  const double log_det = ap.chol_factor.diagonal().array().log().sum();

  out.mixture.dim_w = jt.dim_w;
  out.mixture.components.resize(n);
  auto build_component = [&](Eigen::Index j, const std::optional<Eigen::VectorXd>& seed_w) {
    MixtureComponent c;
    c.theta_node = ap.nodes_theta.col(j);
    const LaplaceProfile prof = laplace_profile(jt, c.theta_node, seed_w, inner_opts);
    c.mean_w = prof.w_hat;
    c.prec_chol_w = prof.prec_chol;
    c.log_weight = ap.log_integrand[j] + ap.rule.log_weights[j] + log_det -
                   ap.log_norm_const;
    out.mixture.components[j] = std::move(c);
  };

  if (warm_start || opts.threads == 1) {
    std::optional<Eigen::VectorXd> prev;
    for (Eigen::Index j = 0; j < n; ++j) {
      build_component(j, warm_start ? prev : std::optional<Eigen::VectorXd>{});
      if (warm_start) prev = out.mixture.components[j].mean_w;
    }
  } else {
#ifdef _OPENMP
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) num_threads(opts.threads > 0 ? opts.threads : omp_get_max_threads())
    for (Eigen::Index j = 0; j < n; ++j) {
      try {
        build_component(j, {});
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
#else
    for (Eigen::Index j = 0; j < n; ++j) build_component(j, {});
#endif
  }

  // Normalize: the weights already sum to one by construction of logZ, this
  // just removes residual roundoff.
  std::vector<double> lw(n);
  for (Eigen::Index j = 0; j < n; ++j) lw[j] = out.mixture.components[j].log_weight;
  const double total = logsumexp(std::span<const double>(lw.data(), lw.size()));
  for (Eigen::Index j = 0; j < n; ++j) out.mixture.components[j].log_weight -= total;
  return out;
}

Eigen::MatrixXd sample_mixture(const MixtureApproximation& mix, long n_samples,
                               std::uint64_t seed, int threads) {
  if (n_samples < 1)
    throw InvalidArgumentError("sample_mixture: need at least one sample");
  if (mix.components.empty())
    throw InvalidArgumentError("sample_mixture: empty mixture");
  const int m = mix.dim_w;
  const std::size_t n_comp = mix.components.size();
  std::vector<double> cum(n_comp);
  double acc = 0.0;
  for (std::size_t j = 0; j < n_comp; ++j) {
    acc += std::exp(mix.components[j].log_weight);
    cum[j] = acc;
  }

  Eigen::MatrixXd out(m, n_samples);
  auto draw = [&](long i) {
    RngStream stream(seed, static_cast<std::uint64_t>(i));
    const double u = stream.next_uniform();
    std::size_t j = 0;
    while (j + 1 < n_comp && cum[j] < u) ++j;
    const MixtureComponent& c = mix.components[j];
    Eigen::VectorXd eps(m);
    for (int d = 0; d < m; ++d) eps[d] = stream.next_normal();
    out.col(i) = c.mean_w +
                 c.prec_chol_w.transpose().triangularView<Eigen::Upper>().solve(eps);
  };

  if (threads == 1) {
    for (long i = 0; i < n_samples; ++i) draw(i);
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads > 0 ? threads : omp_get_max_threads())
    for (long i = 0; i < n_samples; ++i) draw(i);
#else
    for (long i = 0; i < n_samples; ++i) draw(i);
#endif
  }
  return out;
}

Eigen::VectorXd mixture_mean(const MixtureApproximation& mix) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(mix.dim_w);
  for (const MixtureComponent& c : mix.components)
    mean += std::exp(c.log_weight) * c.mean_w;
  return mean;
}

LogTarget joint_as_flat_target(const JointTarget& jt) {
  LogTarget t;
  t.dim = jt.dim_w + jt.dim_theta;
  const int m = jt.dim_w;
  auto logjoint = jt.logjoint;
  t.logdensity = [logjoint, m](const Eigen::VectorXd& x) {
    return logjoint(x.head(m), x.tail(x.size() - m));
  };
  t.starting_point.resize(t.dim);
  t.starting_point << jt.start_w, jt.start_theta;
  return t;
}

}  // namespace aghq
