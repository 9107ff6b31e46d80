#include "aghq/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "aghq/errors.hpp"
#include "aghq/linalg.hpp"
#include "aghq/logsumexp.hpp"

namespace aghq {

double moment(const AdaptedPosterior& ap,
              const std::function<double(const Eigen::VectorXd&)>& f) {
  const Eigen::Index n = ap.rule.size();
  const double log_det = ap.chol_factor.diagonal().array().log().sum();
  std::vector<double> pos, neg;
  pos.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double fi = f(ap.nodes_theta.col(i));
    if (!std::isfinite(fi))
      throw EvaluationError("moment: integrand non-finite at a cached node");
    if (fi == 0.0) continue;
    const double term = std::log(std::abs(fi)) + ap.log_integrand[i] -
                        ap.log_norm_const + ap.rule.log_weights[i];
    (fi > 0.0 ? pos : neg).push_back(term);
  }
  const double lp = logsumexp(std::span<const double>(pos.data(), pos.size()));
  const double ln = logsumexp(std::span<const double>(neg.data(), neg.size()));
  return std::exp(log_det + lp) - std::exp(log_det + ln);
}

Reordered reorder_for_marginal(const AdaptedPosterior& ap, int dim) {
  const int p = ap.dim();
  if (dim < 0 || dim >= p)
    throw InvalidArgumentError("reorder_for_marginal: dimension out of range");
  Reordered r;
  if (dim == 0) {
    r.mode = ap.mode;
    r.chol_factor = ap.chol_factor;
    r.nodes_theta = ap.nodes_theta;
    return r;
  }
  Eigen::VectorXi perm = Eigen::VectorXi::LinSpaced(p, 0, p - 1);
  std::swap(perm[0], perm[dim]);
  r.mode.resize(p);
  Eigen::MatrixXd h(p, p);
  for (int i = 0; i < p; ++i) {
    r.mode[i] = ap.mode[perm[i]];
    for (int j = 0; j < p; ++j) h(i, j) = ap.neg_hessian(perm[i], perm[j]);
  }
  r.chol_factor = chol_of_inverse(h);
  // Nodes live in the permuted frame; hand them back in the target's original
  // coordinate order (the swap is its own inverse).
  Eigen::MatrixXd permuted = (r.chol_factor * ap.rule.points).colwise() + r.mode;
  r.nodes_theta.resize(p, permuted.cols());
  for (int i = 0; i < p; ++i) r.nodes_theta.row(perm[i]) = permuted.row(i);
  return r;
}

MarginalSummary marginal_at_nodes(const AdaptedPosterior& ap, int dim, int threads) {
  const int p = ap.dim();
  const int k = ap.k;
  const Reordered r = reorder_for_marginal(ap, dim);

  // Log-density over the reordered grid; dim 0 reuses the cached sweep.
  Eigen::VectorXd ell;
  if (dim == 0)
    ell = ap.log_integrand;
  else
    ell = detail::eval_columns(ap.target, r.nodes_theta, threads);

  const double log_det_tail = r.chol_factor.diagonal().tail(p - 1).array().log().sum();
  const Eigen::VectorXd log_w1 = ap.rule.base.weights.array().log();

  MarginalSummary ms;
  ms.dim = dim;
  ms.scale11 = r.chol_factor(0, 0);
  ms.support_points.resize(k);
  ms.log_marginal.resize(k);

  std::vector<double> terms;
  terms.reserve(ap.rule.size() / k);
  for (int j = 0; j < k; ++j) {
    ms.support_points[j] = r.chol_factor(0, 0) * ap.rule.base.nodes[j] + r.mode[0];
    terms.clear();
    // Nodes whose first coordinate is x*_j: dimension 0 is the fastest-varying
    // digit, so these are the indices congruent to j mod k.
    for (Eigen::Index i = j; i < ap.rule.size(); i += k) {
      if (!std::isfinite(ell[i]))
        throw EvaluationError("marginal_at_nodes: logdensity non-finite at a node");
      terms.push_back(ell[i] - ap.log_norm_const + ap.rule.log_weights[i] - log_w1[j]);
    }
    ms.log_marginal[j] =
        log_det_tail + logsumexp(std::span<const double>(terms.data(), terms.size()));
  }
  return ms;
}

LogInterpolant::LogInterpolant(const Eigen::VectorXd& x, const Eigen::VectorXd& y)
    : x_(x), y_(y) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw InvalidArgumentError("LogInterpolant: need at least two points");
  center_ = 0.5 * (x.maxCoeff() + x.minCoeff());
  scale_ = 0.5 * (x.maxCoeff() - x.minCoeff());
  if (scale_ <= 0.0) throw InvalidArgumentError("LogInterpolant: support points coincide");
  w_.resize(n);
  for (int j = 0; j < n; ++j) {
    double w = 1.0;
    const double uj = (x_[j] - center_) / scale_;
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      w *= uj - (x_[i] - center_) / scale_;
    }
    w_[j] = 1.0 / w;
  }
}

double LogInterpolant::operator()(double x) const {
  const double u = (x - center_) / scale_;
  double num = 0.0, den = 0.0;
  for (int j = 0; j < x_.size(); ++j) {
    const double diff = u - (x_[j] - center_) / scale_;
    if (diff == 0.0) return y_[j];
    const double c = w_[j] / diff;
    num += c * y_[j];
    den += c;
  }
  return num / den;
}

LogInterpolant interpolate_log_marginal(const MarginalSummary& ms) {
  if (ms.support_points.size() < 2)
    throw InterpolationUnavailableError(
        "interpolate_log_marginal: k = 1 has a single support point; "
        "use the Laplace Gaussian marginal instead");
  return LogInterpolant(ms.support_points, ms.log_marginal);
}

std::vector<double> cdf_and_quantiles(MarginalSummary& ms, const std::vector<double>& alphas,
                                      const SummaryOptions& opts) {
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0))
      throw InvalidArgumentError("cdf_and_quantiles: levels must lie in (0,1)");
  if (opts.grid_size < 2)
    throw InvalidArgumentError("cdf_and_quantiles: grid size must be at least 2");

  const LogInterpolant interp = interpolate_log_marginal(ms);
  const int n = opts.grid_size;
  const double lo = ms.support_points.minCoeff() - opts.grid_pad_sd * ms.scale11;
  const double hi = ms.support_points.maxCoeff() + opts.grid_pad_sd * ms.scale11;
  ms.grid = Eigen::VectorXd::LinSpaced(n, lo, hi);
  ms.density.resize(n);
  for (int l = 0; l < n; ++l) ms.density[l] = std::exp(interp(ms.grid[l]));

  ms.cdf.resize(n);
  double acc = 0.0;
  for (int l = 0; l < n; ++l) {
    const double spacing = (l + 1 < n) ? ms.grid[l + 1] - ms.grid[l]
                                       : ms.grid[l] - ms.grid[l - 1];
    acc += ms.density[l] * spacing;
    ms.cdf[l] = acc;
  }

  std::vector<double> out;
  out.reserve(alphas.size());
  for (double a : alphas) {
    int l = 0;
    while (l < n && ms.cdf[l] < a) ++l;
    out.push_back(ms.grid[std::min(l, n - 1)]);
  }
  return out;
}

double cdf_lookup(const MarginalSummary& ms, double x) {
  const Eigen::Index n = ms.grid.size();
  if (n == 0) throw InvalidArgumentError("cdf_lookup: cdf has not been filled");
  if (x <= ms.grid[0]) return 0.0;
  if (x >= ms.grid[n - 1]) return ms.cdf[n - 1];
  const double* begin = ms.grid.data();
  const Eigen::Index hi = std::upper_bound(begin, begin + n, x) - begin;
  const double t = (x - ms.grid[hi - 1]) / (ms.grid[hi] - ms.grid[hi - 1]);
  return ms.cdf[hi - 1] + t * (ms.cdf[hi] - ms.cdf[hi - 1]);
}

double ks_distance(const std::function<double(double)>& cdf_a,
                   const std::function<double(double)>& cdf_b,
                   const Eigen::VectorXd& probe_grid) {
  double d = 0.0;
  for (Eigen::Index i = 0; i < probe_grid.size(); ++i)
    d = std::max(d, std::abs(cdf_a(probe_grid[i]) - cdf_b(probe_grid[i])));
  return d;
}

std::vector<DimSummary> summarize_all(const AdaptedPosterior& ap,
                                      const std::vector<double>& alphas,
                                      const SummaryOptions& opts) {
  std::vector<DimSummary> out;
  out.reserve(ap.dim());
  for (int t = 0; t < ap.dim(); ++t) {
    DimSummary s;
    s.dim = t;
    s.mean = moment(ap, [t](const Eigen::VectorXd& th) { return th[t]; });
    const double mean = s.mean;
    const double var =
        moment(ap, [t, mean](const Eigen::VectorXd& th) { return (th[t] - mean) * (th[t] - mean); });
    s.sd = var > 0.0 ? std::sqrt(var) : 0.0;
    s.marginal = marginal_at_nodes(ap, t, opts.threads);
    const std::vector<double> q = cdf_and_quantiles(s.marginal, alphas, opts);
    for (std::size_t i = 0; i < alphas.size(); ++i) s.quantiles[alphas[i]] = q[i];
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace aghq
