#include "ridge.hpp"

#include "cadence/errors.hpp"

namespace cadence::detail {

RidgeSolution ridge_solve(const Eigen::MatrixXd& A,
                          const Eigen::VectorXd& y,
                          const Eigen::VectorXd& ridge_diag) {
    const Eigen::Index p = A.cols();
    Eigen::MatrixXd M = A.transpose() * A;
    const Eigen::MatrixXd AtA = M;
    M.diagonal() += ridge_diag;
    const Eigen::VectorXd rhs = A.transpose() * y;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
    RidgeSolution sol;
    sol.beta = ldlt.solve(rhs);

    const double scale = rhs.norm() + M.norm() * sol.beta.norm();
    const double gap = (M * sol.beta - rhs).norm();
    if (ldlt.info() != Eigen::Success || !sol.beta.allFinite() ||
        gap > 1e-8 * (scale + 1.0))
        throw SingularDesign("normal equations are rank-deficient even after ridge");

    sol.unit_cov = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
    if (!sol.unit_cov.allFinite())
        throw SingularDesign("normal equations are rank-deficient even after ridge");
    sol.effective_dof = (sol.unit_cov * AtA).trace();
    return sol;
}

}  // namespace cadence::detail
