#pragma once

#include <Eigen/Core>

namespace teng {

enum class LstsqMethod { Svd, Cgls };

struct LstsqConfig {
    LstsqMethod method = LstsqMethod::Svd;
    double rcond = 1e-12;  // singular values below rcond * sigma_max are dropped
    int cg_max_iter = 0;   // 0 -> number of columns
    double cg_tol = 1e-10; // relative normal-equation residual
};

// Truncated-SVD least squares: x = sum_{sigma_i > rcond*sigma_max} v_i (u_i'b)/sigma_i.
// Minimum-norm within the retained subspace. Tall systems are reduced by a
// Householder QR first, which leaves the singular spectrum (and the solution)
// unchanged.
Eigen::VectorXd svd_lstsq(const Eigen::MatrixXd& J, const Eigen::VectorXd& b, double rcond);

enum class CglsStatus { Converged, MaxIter, Breakdown };

struct CglsResult {
    Eigen::VectorXd x;
    CglsStatus status = CglsStatus::Converged;
    int iterations = 0;
};

// Conjugate gradients on the normal equations J'Jx = J'b, started from zero.
// Stops when ||J'(Jx-b)|| <= tol * ||J'b|| or after max_iter iterations.
CglsResult cgls(const Eigen::MatrixXd& J, const Eigen::VectorXd& b, int max_iter, double tol);

// Dispatch on config. CGLS non-convergence is not an error here: TENG
// tolerates approximate solves (the next iteration cleans up).
Eigen::VectorXd solve_lstsq(const Eigen::MatrixXd& J, const Eigen::VectorXd& b,
                            const LstsqConfig& cfg);

} // namespace teng
