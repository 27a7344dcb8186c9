#include "teng/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace teng {

CollocationGrid tensor_grid(int dims, int n_per_dim, const Eigen::VectorXd& lengths) {
    if (dims < 1) throw std::invalid_argument("tensor_grid: dims must be >= 1");
    if (n_per_dim < 2) throw std::invalid_argument("tensor_grid: n_per_dim must be >= 2");
    if (lengths.size() != dims) throw std::invalid_argument("tensor_grid: lengths size != dims");

    CollocationGrid g;
    g.dims = dims;
    g.n_per_dim = n_per_dim;
    g.lengths = lengths;

    Eigen::Index n_total = 1;
    for (int i = 0; i < dims; ++i) n_total *= n_per_dim;

    g.points.resize(n_total, dims);
    for (Eigen::Index p = 0; p < n_total; ++p) {
        Eigen::Index rem = p;
        for (int i = dims - 1; i >= 0; --i) {
            const Eigen::Index idx = rem % n_per_dim;
            rem /= n_per_dim;
            g.points(p, i) = static_cast<double>(idx) * lengths[i] / n_per_dim;
        }
    }
    g.weight = lengths.prod() / static_cast<double>(n_total);
    return g;
}

CollocationGrid tensor_grid(int dims, int n_per_dim) {
    const double two_pi = 6.283185307179586476925287;
    return tensor_grid(dims, n_per_dim, Eigen::VectorXd::Constant(dims, two_pi));
}

double l2_inner(const CollocationGrid& grid, const Eigen::VectorXd& f,
                const Eigen::VectorXd& g) {
    if (f.size() != grid.point_count() || g.size() != grid.point_count())
        throw std::invalid_argument("l2_inner: vector length does not match grid");
    return grid.weight * f.dot(g);
}

IndexSet subsample_params(Eigen::Index param_count, Eigen::Index n_sub, RngState& rng) {
    if (n_sub < 1 || n_sub > param_count)
        throw std::invalid_argument("subsample_params: need 1 <= n_sub <= param_count");

    // Partial Fisher-Yates over a scratch permutation, then sort the prefix.
    std::vector<Eigen::Index> scratch(static_cast<std::size_t>(param_count));
    std::iota(scratch.begin(), scratch.end(), Eigen::Index{0});
    for (Eigen::Index i = 0; i < n_sub; ++i) {
        const auto j = i + static_cast<Eigen::Index>(
                               rng.next_below(static_cast<std::uint64_t>(param_count - i)));
        std::swap(scratch[static_cast<std::size_t>(i)], scratch[static_cast<std::size_t>(j)]);
    }
    IndexSet out(scratch.begin(), scratch.begin() + n_sub);
    std::sort(out.begin(), out.end());
    return out;
}

IndexSet full_index_set(Eigen::Index param_count) {
    IndexSet out(static_cast<std::size_t>(param_count));
    std::iota(out.begin(), out.end(), Eigen::Index{0});
    return out;
}

} // namespace teng
