#ifndef AGHQ_QUADRATURE_HPP
#define AGHQ_QUADRATURE_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

namespace aghq {

/// H_k(x) for the probabilists' Hermite polynomials:
/// H_0 = 1, H_1 = x, H_{j+1}(x) = x H_j(x) - j H_{j-1}(x).
double hermite_eval(int k, double x);

/// Univariate Gauss-Hermite rule in the convention where the rule is applied
/// to phi(x) f(x): sum_j omega_j phi(x_j) f(x_j) ~ int phi(x) f(x) dx, with
/// phi the standard normal density. Nodes are the zeroes of H_k, strictly
/// increasing and exactly symmetric about 0.
struct UnivariateRule {
  int k = 0;
  Eigen::VectorXd nodes;    // ascending; node 0 present iff k odd
  Eigen::VectorXd weights;  // omega(x_j) > 0, symmetric
};

inline constexpr int kMaxUnivariateOrder = 50;

/// Nodes by Golub-Welsch on the Jacobi matrix (in-house implicit-shift QL);
/// weights by the closed form k! / (H_{k+1}(x_j)^2 phi(x_j)), cross-checked
/// against the eigenvector route to 1e-10 relative.
UnivariateRule univariate_rule(int k);

/// Tensor-product extension of the univariate rule to p dimensions.
/// Point i has coordinates base.nodes[digit_d(i)] where digit_d(i) is the
/// d-th base-k digit of i (dimension 0 varies fastest).
struct ProductRule {
  UnivariateRule base;
  int dim = 0;                 // p
  Eigen::MatrixXd points;      // p x k^p, column per point
  Eigen::VectorXd log_weights; // log omega(z), omega(z) = prod_d omega(z_d)
  double max_norm = 0.0;       // max_z ||z||_2

  Eigen::Index size() const { return points.cols(); }
  double weight_of(Eigen::Index i) const { return std::exp(log_weights[i]); }
};

inline constexpr long kDefaultPointCap = 1000000;

ProductRule product_rule(int k, int p, long point_cap = kDefaultPointCap);

/// One row of a polynomial-exactness check: the monomial z^alpha, its
/// quadrature value sum_z phi_p(z) z^alpha omega(z), and the exact Gaussian
/// moment prod_d E[Z^alpha_d].
struct PkpEntry {
  std::vector<int> alpha;
  double quadrature = 0.0;
  double exact = 0.0;
  double error = 0.0;  // absolute when exact == 0, relative otherwise
  bool pass = false;
};

struct PkpReport {
  int k = 0;
  int p = 0;
  double tol_rel = 0.0;
  double tol_abs = 0.0;
  std::vector<PkpEntry> entries;
  int failures = 0;

  bool all_pass() const { return failures == 0; }
};

/// Checks every monomial of total order <= 2k-1 against the exact Gaussian
/// moments. Zero targets are compared absolutely at tol_abs, the rest
/// relatively at tol_rel.
PkpReport verify_pkp(const ProductRule& rule, double tol_rel, double tol_abs);
inline PkpReport verify_pkp(const ProductRule& rule, double tolerance) {
  return verify_pkp(rule, tolerance, tolerance);
}

/// {k, p, nodes, weights} debug serialization of the underlying univariate
/// rule.
std::string rule_to_json(const ProductRule& rule);

}  // namespace aghq

#endif
