#include "teng/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace teng {

double rel_l2(const Eigen::VectorXd& u_hat, const Eigen::VectorXd& u_ref,
              const CollocationGrid& grid) {
    const double den = l2_inner(grid, u_ref, u_ref);
    if (!(den > 0.0)) throw std::invalid_argument("rel_l2: reference norm is zero");
    const Eigen::VectorXd d = u_hat - u_ref;
    return std::sqrt(l2_inner(grid, d, d) / den);
}

double global_rel_l2(const std::vector<Eigen::VectorXd>& u_hat,
                     const std::vector<Eigen::VectorXd>& u_ref, const CollocationGrid& grid,
                     double dt) {
    if (u_hat.empty() || u_hat.size() != u_ref.size())
        throw std::invalid_argument("global_rel_l2: need matching non-empty series");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u_hat.size(); ++i) {
        const Eigen::VectorXd d = u_hat[i] - u_ref[i];
        num += l2_inner(grid, d, d) * dt;
        den += l2_inner(grid, u_ref[i], u_ref[i]) * dt;
    }
    if (!(den > 0.0)) throw std::invalid_argument("global_rel_l2: reference norm is zero");
    return std::sqrt(num / den);
}

} // namespace teng
