#pragma once

#include <Eigen/Core>
#include <vector>

#include "teng/rng.hpp"

namespace teng {

// Uniform tensor-product collocation grid on a periodic box, with the
// (constant) trapezoid quadrature weight. On the torus this quadrature is
// spectrally accurate, which keeps the discretized L2 inner products exact
// for band-limited integrands.
struct CollocationGrid {
    int dims = 0;
    int n_per_dim = 0;
    Eigen::MatrixXd points;  // n_per_dim^dims x dims, lexicographic (dim 0 slowest)
    double weight = 0.0;     // prod(lengths) / point count
    Eigen::VectorXd lengths; // per-dimension period

    Eigen::Index point_count() const { return points.rows(); }
};

CollocationGrid tensor_grid(int dims, int n_per_dim, const Eigen::VectorXd& lengths);

// Convenience: every period equal to 2*pi.
CollocationGrid tensor_grid(int dims, int n_per_dim);

// weight * sum_p f_p * g_p
double l2_inner(const CollocationGrid& grid, const Eigen::VectorXd& f,
                const Eigen::VectorXd& g);

using IndexSet = std::vector<Eigen::Index>;

// Uniform sample of n_sub distinct indices from [0, param_count), returned
// strictly increasing. Deterministic given rng; advances rng.
IndexSet subsample_params(Eigen::Index param_count, Eigen::Index n_sub, RngState& rng);

// All indices [0, param_count).
IndexSet full_index_set(Eigen::Index param_count);

} // namespace teng
