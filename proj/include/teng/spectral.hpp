#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "teng/pde.hpp"

namespace teng {

// Complex Fourier coefficients of a real field on the truncated lattice
// k in [-kmax, kmax]^dims, stored row-major with index a_i = k_i + kmax.
// Convention: u(x) = sum_k coeffs(k) exp(i kappa . x), kappa_i = 2*pi*k_i/L_i.
struct SpectrumField {
    int dims = 2;
    int kmax = 0;
    Eigen::VectorXd lengths; // per-dimension period
    std::vector<std::complex<double>> coeffs;

    int side() const { return 2 * kmax + 1; }
    std::size_t lattice_size() const;
    std::complex<double>& at(const std::vector<int>& k);
    const std::complex<double>& at(const std::vector<int>& k) const;

    // max |coeffs(-k) - conj(coeffs(k))|
    double hermitian_defect() const;
    double energy() const; // sum |coeffs|^2
};

// Forward DFT of real samples on an n_per_dim^dims tensor grid (lexicographic,
// matching CollocationGrid), truncated to kmax. Normalization: a constant
// field c maps to a single k=0 coefficient equal to c.
SpectrumField dft_forward(const Eigen::VectorXd& values, int dims, int n_per_dim, int kmax,
                          const Eigen::VectorXd& lengths);

// Evaluate the truncated series on an n_per_dim^dims tensor grid.
Eigen::VectorXd dft_inverse(const SpectrumField& s, int n_per_dim);

SpectrumField truncate_spectrum(const SpectrumField& s, int kmax_new);

// Heat kernel applied in coefficient space: coeffs *= exp(-nu |kappa|^2 t).
SpectrumField heat_propagate(const SpectrumField& u0, double nu, double t);

// Exact (band-limited) heat solution evaluated at arbitrary points.
Eigen::VectorXd heat_exact(const SpectrumField& u0, double nu, double t,
                           const Eigen::MatrixXd& eval_points);

// Same solution on a tensor grid via the inverse transform.
Eigen::VectorXd heat_exact_grid(const SpectrumField& u0, double nu, double t, int n_per_dim);

// Right-hand side in coefficient space. Nonlinear terms are computed
// pseudo-spectrally on zero-padded grids (factor 2 for the cubic term, 3/2
// for the quadratic term), which dealiases the retained band exactly.
SpectrumField spectral_rhs(const PdeSpec& pde, const SpectrumField& s);

struct ReferenceSolution {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> fields; // real-space samples, one per time
    int kmax = 0;
    double dt_ref = 0.0;
    int grid_n = 0; // evaluation grid points per dimension
};

// Classical RK4 in coefficient space from t = 0; stores real-space samples on
// an eval_grid_n^dims grid at each requested time (times must be multiples of
// dt_ref). Aborts if any coefficient magnitude exceeds 1e10.
ReferenceSolution spectral_rk4_evolve(const PdeSpec& pde, const Eigen::VectorXd& u0_values,
                                      int ic_grid_n, int kmax, double dt_ref,
                                      const std::vector<double>& store_times, int eval_grid_n,
                                      const Eigen::VectorXd& lengths);

} // namespace teng
