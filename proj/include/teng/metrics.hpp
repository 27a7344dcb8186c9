#pragma once

#include <Eigen/Core>
#include <vector>

#include "teng/grid.hpp"

namespace teng {

// ||u_hat - u_ref|| / ||u_ref|| in the grid-quadrature L2 norm.
double rel_l2(const Eigen::VectorXd& u_hat, const Eigen::VectorXd& u_ref,
              const CollocationGrid& grid);

// Space-time relative error with uniform time weights:
// sqrt(sum_t ||u_t - ref_t||^2 dt) / sqrt(sum_t ||ref_t||^2 dt).
double global_rel_l2(const std::vector<Eigen::VectorXd>& u_hat,
                     const std::vector<Eigen::VectorXd>& u_ref, const CollocationGrid& grid,
                     double dt);

} // namespace teng
