#include "teng/lstsq.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace teng {

namespace {

Eigen::VectorXd svd_solve_dense(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                double rcond) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    const double cutoff = sigma.size() > 0 ? rcond * sigma[0] : 0.0;

    Eigen::VectorXd coeff = svd.matrixU().transpose() * b;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        coeff[i] = sigma[i] > cutoff ? coeff[i] / sigma[i] : 0.0;
    return svd.matrixV() * coeff;
}

} // namespace

Eigen::VectorXd svd_lstsq(const Eigen::MatrixXd& J, const Eigen::VectorXd& b, double rcond) {
    if (J.rows() < 1 || J.cols() < 1) throw std::invalid_argument("svd_lstsq: empty matrix");
    if (b.size() != J.rows()) throw std::invalid_argument("svd_lstsq: length of b != rows of J");
    if (!J.allFinite() || !b.allFinite())
        throw std::invalid_argument("svd_lstsq: non-finite input");
    if (!(rcond > 0.0 && rcond < 1.0)) throw std::invalid_argument("svd_lstsq: rcond not in (0,1)");

    if (J.rows() > 2 * J.cols()) {
        // QR reduction: J = Q R, then SVD of the small R factor.
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(J);
        const Eigen::Index m = J.cols();
        Eigen::MatrixXd r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
        Eigen::VectorXd qtb = (qr.householderQ().transpose() * b).head(m);
        return svd_solve_dense(r, qtb, rcond);
    }
    return svd_solve_dense(J, b, rcond);
}

CglsResult cgls(const Eigen::MatrixXd& J, const Eigen::VectorXd& b, int max_iter, double tol) {
    if (b.size() != J.rows()) throw std::invalid_argument("cgls: length of b != rows of J");
    if (!J.allFinite() || !b.allFinite()) throw std::invalid_argument("cgls: non-finite input");
    if (max_iter < 1) throw std::invalid_argument("cgls: max_iter must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("cgls: tol must be positive");

    CglsResult res;
    res.x = Eigen::VectorXd::Zero(J.cols());

    Eigen::VectorXd r = b;                 // residual b - J x
    Eigen::VectorXd s = J.transpose() * r; // normal-equation residual
    const double norms0 = s.norm();
    if (norms0 == 0.0) return res; // b orthogonal to range(J)

    Eigen::VectorXd p = s;
    double gamma = norms0 * norms0;

    for (int it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd q = J * p;
        const double delta = q.squaredNorm();
        if (delta <= 0.0) {
            res.status = CglsStatus::Breakdown;
            return res;
        }
        const double alpha = gamma / delta;
        res.x += alpha * p;
        r -= alpha * q;
        s.noalias() = J.transpose() * r;
        res.iterations = it + 1;

        const double gamma_new = s.squaredNorm();
        if (std::sqrt(gamma_new) <= tol * norms0) return res;
        p = s + (gamma_new / gamma) * p;
        gamma = gamma_new;
    }
    res.status = CglsStatus::MaxIter;
    return res;
}

Eigen::VectorXd solve_lstsq(const Eigen::MatrixXd& J, const Eigen::VectorXd& b,
                            const LstsqConfig& cfg) {
    if (cfg.method == LstsqMethod::Svd) return svd_lstsq(J, b, cfg.rcond);
    const int max_iter = cfg.cg_max_iter > 0 ? cfg.cg_max_iter : static_cast<int>(J.cols());
    return cgls(J, b, max_iter, cfg.cg_tol).x;
}

} // namespace teng
