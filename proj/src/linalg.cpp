#include "aghq/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "aghq/errors.hpp"

namespace aghq {

Eigen::MatrixXd chol_of_inverse(const Eigen::MatrixXd& h) {
  const Eigen::Index p = h.rows();
  // Reverse row/column order: if PHP^T = C C^T with C lower, then H = R R^T
  // with R = P C P upper, and L = R^{-T} is the lower Cholesky factor of
  // H^{-1} (unique by positive diagonals).
  Eigen::MatrixXd flipped = h.reverse();
  Eigen::LLT<Eigen::MatrixXd> llt(flipped);
  if (llt.info() != Eigen::Success)
    throw CurvatureError(
        "negative Hessian at the mode is not positive definite; "
        "consider reparameterizing toward spherical symmetry");
  Eigen::MatrixXd c = llt.matrixL();
  // L = P (C^{-1})^T P, via a triangular solve against the identity. Forward
  // substitution leaves exact zeros above the diagonal, so L is exactly lower
  // triangular.
  Eigen::MatrixXd cinv =
      c.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::MatrixXd l = cinv.transpose().reverse();
  return l;
}

double min_eigenvalue(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace aghq
