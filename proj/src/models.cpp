#include "aghq/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>
#include <nlohmann/json.hpp>

#include "aghq/errors.hpp"
#include "aghq/special.hpp"

namespace aghq {

ConjugateModelInstance ConjugateModelInstance::from_counts(std::vector<long> y) {
  if (y.empty())
    throw InvalidArgumentError("conjugate model: need at least one observation");
  ConjugateModelInstance m;
  m.counts = std::move(y);
  m.n = static_cast<long>(m.counts.size());
  for (long v : m.counts) {
    if (v < 0) throw InvalidArgumentError("conjugate model: counts must be non-negative");
    m.sum_y += v;
    m.sum_lgamma_y1 += std::lgamma(static_cast<double>(v) + 1.0);
  }
  const double a = 1.0 + static_cast<double>(m.sum_y);
  m.log_z_exact = std::lgamma(a) - a * std::log(static_cast<double>(m.n) + 1.0) -
                  m.sum_lgamma_y1;
  return m;
}

LogTarget ConjugateModelInstance::make_target() const {
  const double a = posterior_shape();
  const double rate = posterior_rate();
  const double c = -sum_lgamma_y1;
  LogTarget t;
  t.dim = 1;
  t.logdensity = [a, rate, c](const Eigen::VectorXd& th) {
    return -rate * std::exp(th[0]) + a * th[0] + c;
  };
  t.gradient = [a, rate](const Eigen::VectorXd& th) {
    Eigen::VectorXd g(1);
    g[0] = -rate * std::exp(th[0]) + a;
    return g;
  };
  t.hessian = [rate](const Eigen::VectorXd& th) {
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = -rate * std::exp(th[0]);
    return h;
  };
  t.starting_point.resize(1);
  t.starting_point[0] =
      std::log((static_cast<double>(sum_y) + 0.5) / static_cast<double>(n));
  return t;
}

double ConjugateModelInstance::cdf_theta(double t) const {
  return gamma_p(posterior_shape(), posterior_rate() * std::exp(t));
}

double ConjugateModelInstance::quantile_lambda(double alpha) const {
  return gamma_quantile(alpha, posterior_shape(), posterior_rate());
}

LogTarget GaussianModel::make_target() const {
  const int p = static_cast<int>(mu.size());
  if (sigma.rows() != p || sigma.cols() != p)
    throw InvalidArgumentError("gaussian model: covariance shape mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw InvalidArgumentError("gaussian model: covariance not positive definite");
  const Eigen::MatrixXd prec = llt.solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::VectorXd mean = mu;

  LogTarget t;
  t.dim = p;
  t.logdensity = [mean, prec](const Eigen::VectorXd& th) {
    const Eigen::VectorXd d = th - mean;
    return -0.5 * d.dot(prec * d);
  };
  t.gradient = [mean, prec](const Eigen::VectorXd& th) -> Eigen::VectorXd {
    return -(prec * (th - mean));
  };
  t.hessian = [prec](const Eigen::VectorXd&) -> Eigen::MatrixXd { return -prec; };
  t.starting_point = Eigen::VectorXd::Zero(p);
  return t;
}

double GaussianModel::log_z_exact() const {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  const Eigen::MatrixXd l = llt.matrixL();
  return 0.5 * mu.size() * std::log(2.0 * std::numbers::pi) +
         l.diagonal().array().log().sum();
}

double GaussianModel::marginal_cdf(int dim, double x) const {
  return normal_cdf((x - mu[dim]) / std::sqrt(sigma(dim, dim)));
}

double GaussianModel::marginal_quantile(int dim, double alpha) const {
  return mu[dim] + std::sqrt(sigma(dim, dim)) * normal_quantile(alpha);
}

JointTarget RandomInterceptModel::make_joint() const {
  const int m = n_groups;
  const int nobs = static_cast<int>(y.size());
  if (static_cast<int>(group.size()) != nobs)
    throw InvalidArgumentError("random intercept model: group/y length mismatch");
  for (int g : group)
    if (g < 0 || g >= m)
      throw InvalidArgumentError("random intercept model: group index out of range");

  const double var_obs = sd_obs * sd_obs;
  const double var_group = sd_group * sd_group;
  const double var_mean = sd_mean * sd_mean;
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  std::vector<int> counts_per_group(m, 0);
  for (int g : group) ++counts_per_group[g];

  const Eigen::VectorXd yv = y;
  const std::vector<int> gv = group;

  JointTarget jt;
  jt.dim_w = m;
  jt.dim_theta = 1;
  jt.logjoint = [yv, gv, var_obs, var_group, var_mean, log_2pi](
                    const Eigen::VectorXd& w, const Eigen::VectorXd& th) {
    const double mu = th[0];
    double out = -0.5 * (log_2pi + std::log(var_mean)) - 0.5 * mu * mu / var_mean;
    for (int g = 0; g < w.size(); ++g)
      out += -0.5 * (log_2pi + std::log(var_group)) - 0.5 * w[g] * w[g] / var_group;
    for (int i = 0; i < yv.size(); ++i) {
      const double r = yv[i] - mu - w[gv[i]];
      out += -0.5 * (log_2pi + std::log(var_obs)) - 0.5 * r * r / var_obs;
    }
    return out;
  };
  jt.gradient_w = [yv, gv, var_obs, var_group](const Eigen::VectorXd& w,
                                               const Eigen::VectorXd& th) {
    Eigen::VectorXd g = -w / var_group;
    for (int i = 0; i < yv.size(); ++i)
      g[gv[i]] += (yv[i] - th[0] - w[gv[i]]) / var_obs;
    return g;
  };
  jt.hessian_w = [counts_per_group, var_obs, var_group](const Eigen::VectorXd& w,
                                                        const Eigen::VectorXd&) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(w.size(), w.size());
    for (int g = 0; g < w.size(); ++g)
      h(g, g) = -(1.0 / var_group + counts_per_group[g] / var_obs);
    return h;
  };
  jt.start_w = Eigen::VectorXd::Zero(m);
  jt.start_theta = Eigen::VectorXd::Zero(1);
  return jt;
}

Eigen::MatrixXd RandomInterceptModel::marginal_cov_y() const {
  const int nobs = static_cast<int>(y.size());
  Eigen::MatrixXd v(nobs, nobs);
  const double var_obs = sd_obs * sd_obs;
  const double var_group = sd_group * sd_group;
  const double var_mean = sd_mean * sd_mean;
  for (int i = 0; i < nobs; ++i)
    for (int j = 0; j < nobs; ++j)
      v(i, j) = var_mean + (group[i] == group[j] ? var_group : 0.0) +
                (i == j ? var_obs : 0.0);
  return v;
}

double RandomInterceptModel::log_marginal_likelihood() const {
  const int nobs = static_cast<int>(y.size());
  Eigen::LLT<Eigen::MatrixXd> llt(marginal_cov_y());
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::VectorXd alpha = llt.solve(y);
  return -0.5 * nobs * std::log(2.0 * std::numbers::pi) -
         l.diagonal().array().log().sum() - 0.5 * y.dot(alpha);
}

Eigen::VectorXd RandomInterceptModel::posterior_mean_w() const {
  // E[W|Y] = Cov(W,Y) V^{-1} Y with Cov(W,Y) = sd_group^2 Z^T.
  const int nobs = static_cast<int>(y.size());
  Eigen::MatrixXd zt = Eigen::MatrixXd::Zero(n_groups, nobs);
  for (int i = 0; i < nobs; ++i) zt(group[i], i) = 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(marginal_cov_y());
  return sd_group * sd_group * (zt * llt.solve(y));
}

Eigen::MatrixXd RandomInterceptModel::posterior_cov_w() const {
  const int nobs = static_cast<int>(y.size());
  Eigen::MatrixXd zt = Eigen::MatrixXd::Zero(n_groups, nobs);
  for (int i = 0; i < nobs; ++i) zt(group[i], i) = 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(marginal_cov_y());
  const double vg = sd_group * sd_group;
  return vg * Eigen::MatrixXd::Identity(n_groups, n_groups) -
         vg * vg * (zt * llt.solve(zt.transpose()));
}

const std::vector<std::string>& registry_names() {
  static const std::vector<std::string> names = {"poisson-gamma", "gaussian",
                                                 "normal-normal"};
  return names;
}

bool is_registered(const std::string& name) {
  const auto& names = registry_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

ConjugateModelInstance load_conjugate_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgumentError("cannot open data file: " + path);
  std::string line;
  long line_no = 0;
  std::vector<long> counts;
  while (std::getline(in, line)) {
    ++line_no;
    // Strip trailing CR and surrounding whitespace.
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    line = line.substr(start);
    if (line_no == 1) {
      if (line != "y") {
        std::ostringstream msg;
        msg << path << ": line 1: expected header \"y\", got \"" << line << "\"";
        throw InvalidArgumentError(msg.str());
      }
      continue;
    }
    try {
      std::size_t pos = 0;
      const long v = std::stol(line, &pos);
      if (pos != line.size() || v < 0) throw std::invalid_argument("not a count");
      counts.push_back(v);
    } catch (const std::exception&) {
      std::ostringstream msg;
      msg << path << ": line " << line_no << ": expected a non-negative count, got \""
          << line << "\"";
      throw InvalidArgumentError(msg.str());
    }
  }
  if (counts.empty())
    throw InvalidArgumentError(path + ": no observations found");
  return ConjugateModelInstance::from_counts(std::move(counts));
}

namespace {

nlohmann::json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgumentError("cannot open data file: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgumentError(path + ": " + e.what());
  }
}

}  // namespace

GaussianModel load_gaussian_json(const std::string& path) {
  const nlohmann::json j = parse_json_file(path);
  if (!j.contains("mu") || !j.contains("sigma"))
    throw InvalidArgumentError(path + ": expected keys \"mu\" and \"sigma\"");
  GaussianModel m;
  const auto mu = j["mu"].get<std::vector<double>>();
  const auto sig = j["sigma"].get<std::vector<std::vector<double>>>();
  const int p = static_cast<int>(mu.size());
  if (static_cast<int>(sig.size()) != p)
    throw InvalidArgumentError(path + ": sigma must be a " + std::to_string(p) + "x" +
                               std::to_string(p) + " matrix");
  m.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), p);
  m.sigma.resize(p, p);
  for (int i = 0; i < p; ++i) {
    if (static_cast<int>(sig[i].size()) != p)
      throw InvalidArgumentError(path + ": sigma row " + std::to_string(i) +
                                 " has the wrong length");
    for (int c = 0; c < p; ++c) m.sigma(i, c) = sig[i][c];
  }
  return m;
}

RandomInterceptModel load_random_intercept_json(const std::string& path) {
  const nlohmann::json j = parse_json_file(path);
  for (const char* key : {"group", "y"})
    if (!j.contains(key))
      throw InvalidArgumentError(path + ": expected key \"" + std::string(key) + "\"");
  RandomInterceptModel m;
  m.sd_obs = j.value("sd_obs", 1.0);
  m.sd_group = j.value("sd_group", 1.0);
  m.sd_mean = j.value("sd_mean", 10.0);
  if (m.sd_obs <= 0.0 || m.sd_group <= 0.0 || m.sd_mean <= 0.0)
    throw InvalidArgumentError(path + ": standard deviations must be positive");
  const auto yv = j["y"].get<std::vector<double>>();
  auto gv = j["group"].get<std::vector<int>>();
  if (yv.size() != gv.size() || yv.empty())
    throw InvalidArgumentError(path + ": group and y must be equal-length and non-empty");
  const int gmin = *std::min_element(gv.begin(), gv.end());
  if (gmin == 1)
    for (int& g : gv) --g;  // accept 1-based labels
  m.group = std::move(gv);
  m.n_groups = *std::max_element(m.group.begin(), m.group.end()) + 1;
  m.y = Eigen::Map<const Eigen::VectorXd>(yv.data(), static_cast<Eigen::Index>(yv.size()));
  return m;
}

}  // namespace aghq
