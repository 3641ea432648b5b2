#pragma once

#include <Eigen/Dense>

namespace cadence::detail {

struct RidgeSolution {
    Eigen::VectorXd beta;
    Eigen::MatrixXd unit_cov;  ///< (A^T A + D)^-1
    double effective_dof = 0.0;  ///< trace((A^T A + D)^-1 A^T A)
};

/// Minimizes ||y - A beta||^2 + beta^T diag(d) beta via the normal equations.
/// Throws SingularDesign when they cannot be solved reliably (rank-deficient
/// even after the ridge).
RidgeSolution ridge_solve(const Eigen::MatrixXd& A,
                          const Eigen::VectorXd& y,
                          const Eigen::VectorXd& ridge_diag);

}  // namespace cadence::detail
