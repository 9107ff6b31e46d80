#ifndef AGHQ_LINALG_HPP
#define AGHQ_LINALG_HPP

#include <Eigen/Core>

namespace aghq {

/// Lower Cholesky factor L of H^{-1} (H symmetric positive definite), computed
/// from triangular factors of H alone: factor the index-reversed H, then
/// invert-transpose, so H^{-1} is never formed. Throws CurvatureError when H
/// is not positive definite at working precision.
Eigen::MatrixXd chol_of_inverse(const Eigen::MatrixXd& h);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& sym);

}  // namespace aghq

#endif
