#include "aghq/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "aghq/errors.hpp"
#include "aghq/special.hpp"

namespace aghq {

double hermite_eval(int k, double x) {
  if (k < 0) throw InvalidArgumentError("hermite_eval: order must be non-negative");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int j = 1; j < k; ++j) {
    const double next = x * cur - static_cast<double>(j) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

// Eigenvalues of a symmetric tridiagonal matrix together with the first
// component of each (normalized) eigenvector, by QL with implicit shifts.
// d: diagonal (overwritten with eigenvalues), e: subdiagonal, first_row:
// overwritten with first eigenvector components. Classic tql2-style sweep
// restricted to tracking one eigenvector row.
void tridiag_ql(std::vector<double>& d, std::vector<double>& e,
                std::vector<double>& first_row) {
  const int n = static_cast<int>(d.size());
  e.push_back(0.0);
  first_row.assign(n, 0.0);
  first_row[0] = 1.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int l = 0; l < n; ++l) {
    for (int iter = 0;; ++iter) {
      int m = l;
      while (m < n - 1) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
        ++m;
      }
      if (m == l) break;
      if (iter >= 60) throw Error("univariate_rule: QL iteration failed to converge");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      int i = m - 1;
      for (; i >= l; --i) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        f = first_row[i + 1];
        first_row[i + 1] = s * first_row[i] + c * f;
        first_row[i] = c * first_row[i] - s * f;
      }
      if (i >= l) continue;  // early deflation inside the sweep
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
  // Sort ascending, carrying the eigenvector components along.
  for (int i = 1; i < n; ++i) {
    const double dv = d[i];
    const double fv = first_row[i];
    int j = i - 1;
    while (j >= 0 && d[j] > dv) {
      d[j + 1] = d[j];
      first_row[j + 1] = first_row[j];
      --j;
    }
    d[j + 1] = dv;
    first_row[j + 1] = fv;
  }
}

double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

}  // namespace

UnivariateRule univariate_rule(int k) {
  if (k < 1 || k > kMaxUnivariateOrder) {
    std::ostringstream msg;
    msg << "univariate_rule: order k=" << k << " outside the supported range [1,"
        << kMaxUnivariateOrder << "]";
    throw InvalidArgumentError(msg.str());
  }

  // Jacobi matrix for the probabilists' Hermite recurrence: zero diagonal,
  // subdiagonal sqrt(1), ..., sqrt(k-1).
  std::vector<double> diag(k, 0.0);
  std::vector<double> sub(k - 1);
  for (int j = 1; j < k; ++j) sub[j - 1] = std::sqrt(static_cast<double>(j));
  std::vector<double> first;
  tridiag_ql(diag, sub, first);

  UnivariateRule rule;
  rule.k = k;
  rule.nodes.resize(k);
  rule.weights.resize(k);

  // Mirror the nonnegative half so symmetry holds bit-for-bit; the middle
  // node of an odd rule is pinned to exactly 0.
  const double log_kfact = log_factorial(k);
  for (int j = k / 2; j < k; ++j) {
    const double x = (k % 2 == 1 && j == k / 2) ? 0.0 : diag[j];
    const double log_phi = -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
    const double h_next = hermite_eval(k + 1, x);
    const double omega = std::exp(log_kfact - 2.0 * std::log(std::abs(h_next)) - log_phi);

    // Cross-check against the eigenvector-derived weight divided by phi.
    const double omega_gw = first[j] * first[j] / std::exp(log_phi);
    if (std::abs(omega_gw / omega - 1.0) > 1e-10)
      throw Error("univariate_rule: Golub-Welsch and closed-form weights disagree");

    rule.nodes[j] = x;
    rule.nodes[k - 1 - j] = -x;
    rule.weights[j] = omega;
    rule.weights[k - 1 - j] = omega;
  }
  return rule;
}

ProductRule product_rule(int k, int p, long point_cap) {
  if (p < 1) throw InvalidArgumentError("product_rule: dimension must be positive");
  if (k < 1 || k > kMaxUnivariateOrder)
    throw InvalidArgumentError("product_rule: order k outside the supported range");
  // Count k^p with overflow guard before allocating anything.
  long n_points = 1;
  bool over = false;
  for (int d = 0; d < p && !over; ++d) {
    over = n_points > point_cap / k;
    if (!over) n_points *= k;
  }
  if (over || n_points > point_cap) {
    std::ostringstream msg;
    msg << "product_rule: k^p exceeds the point cap (k=" << k << ", p=" << p
        << ", k^p=" << std::pow(static_cast<double>(k), p) << " > " << point_cap << ")";
    throw DimensionalBlowupError(msg.str());
  }

  ProductRule rule;
  rule.base = univariate_rule(k);
  rule.dim = p;
  rule.points.resize(p, n_points);
  rule.log_weights.resize(n_points);

  Eigen::VectorXd log_w1 = rule.base.weights.array().log();
  double max_sq = 0.0;
  for (long i = 0; i < n_points; ++i) {
    long rem = i;
    double lw = 0.0;
    double sq = 0.0;
    for (int d = 0; d < p; ++d) {
      const int digit = static_cast<int>(rem % k);
      rem /= k;
      const double x = rule.base.nodes[digit];
      rule.points(d, i) = x;
      lw += log_w1[digit];
      sq += x * x;
    }
    rule.log_weights[i] = lw;
    if (sq > max_sq) max_sq = sq;
  }
  rule.max_norm = std::sqrt(max_sq);
  return rule;
}

PkpReport verify_pkp(const ProductRule& rule, double tol_rel, double tol_abs) {
  if (tol_rel <= 0.0 || tol_abs <= 0.0)
    throw InvalidArgumentError("verify_pkp: tolerances must be positive");
  const int k = rule.base.k;
  const int p = rule.dim;
  const int max_order = 2 * k - 1;
  const Eigen::Index n = rule.size();

  PkpReport report;
  report.k = k;
  report.p = p;
  report.tol_rel = tol_rel;
  report.tol_abs = tol_abs;

  // Per-point prefactor phi_p(z) * omega(z) and coordinate power tables.
  Eigen::VectorXd prefactor(n);
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sq = rule.points.col(i).squaredNorm();
    prefactor[i] = std::exp(-0.5 * sq - 0.5 * p * log_2pi + rule.log_weights[i]);
  }
  // powers[d](a, i) = z_d(i)^a
  std::vector<Eigen::MatrixXd> powers(p);
  for (int d = 0; d < p; ++d) {
    powers[d].resize(max_order + 1, n);
    powers[d].row(0).setOnes();
    for (int a = 1; a <= max_order; ++a)
      powers[d].row(a) = powers[d].row(a - 1).cwiseProduct(rule.points.row(d));
  }
  std::vector<int> alpha(p, 0);
  auto term_at = [&](Eigen::Index i) {
    double term = prefactor[i];
    for (int d = 0; d < p; ++d) term *= powers[d](alpha[d], i);
    return term;
  };
  for (;;) {
    int total = 0;
    for (int a : alpha) total += a;
    if (total <= max_order) {
      PkpEntry entry;
      entry.alpha = alpha;
      // When some exponent is odd, sum in pairs reflected along that
      // coordinate: the two terms are exact negations (the rule mirrors its
      // nodes and weights bit-for-bit), so zero moments come out exactly zero
      // instead of carrying roundoff at the scale of the largest term.
      int odd_dim = -1;
      for (int d = 0; d < p; ++d)
        if (alpha[d] % 2 == 1) {
          odd_dim = d;
          break;
        }
      double quad = 0.0;
      if (odd_dim < 0) {
        for (Eigen::Index i = 0; i < n; ++i) quad += term_at(i);
      } else {
        Eigen::Index stride = 1;
        for (int d = 0; d < odd_dim; ++d) stride *= k;
        for (Eigen::Index i = 0; i < n; ++i) {
          const int digit = static_cast<int>((i / stride) % k);
          const int mirrored = k - 1 - digit;
          if (digit > mirrored) continue;
          if (digit == mirrored)
            quad += term_at(i);  // the zero node: the odd power is exactly 0
          else
            quad += term_at(i) + term_at(i + (mirrored - digit) * stride);
        }
      }
      double exact = 1.0;
      for (int d = 0; d < p; ++d) exact *= gaussian_moment(alpha[d]);
      entry.quadrature = quad;
      entry.exact = exact;
      if (exact == 0.0) {
        entry.error = std::abs(quad);
        entry.pass = entry.error <= tol_abs;
      } else {
        entry.error = std::abs(quad / exact - 1.0);
        entry.pass = entry.error <= tol_rel;
      }
      if (!entry.pass) ++report.failures;
      report.entries.push_back(std::move(entry));
    }
    // next exponent vector with |alpha| bounded by max_order
    int d = 0;
    while (d < p) {
      ++alpha[d];
      int t = 0;
      for (int a : alpha) t += a;
      if (t <= max_order) break;
      alpha[d] = 0;
      ++d;
    }
    if (d == p) break;
  }
  return report;
}

std::string rule_to_json(const ProductRule& rule) {
  nlohmann::json j;
  j["k"] = rule.base.k;
  j["p"] = rule.dim;
  j["nodes"] = std::vector<double>(rule.base.nodes.begin(), rule.base.nodes.end());
  j["weights"] = std::vector<double>(rule.base.weights.begin(), rule.base.weights.end());
  return j.dump(2);
}

}  // namespace aghq
