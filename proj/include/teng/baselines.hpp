#pragma once

#include "teng/stepper.hpp"

namespace teng {

// Dirac-Frenkel tangent-space projection of the PDE flow: least-squares
// solution of J * v ~ L(u) restricted to the subset columns. Returns a
// full-length velocity with zeros off the subset.
Eigen::VectorXd tdvp_rhs(const FieldModel& model, const ParamVector& theta, const PdeSpec& pde,
                         const CollocationGrid& grid, const IndexSet& subset,
                         const LstsqConfig& lstsq);

// Classical RK4 on the parameter ODE; one parameter subset is drawn per time
// step and shared by all four stages.
EvolutionState tdvp_rk4_step(const EvolutionState& state);

struct AdamState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    int step = 0;
    double lr0 = 1e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double half_life_iters = 300.0; // lr(t) = lr0 * 2^(-step / half_life_iters)

    static AdamState make(Eigen::Index n, const ObtiConfig& cfg);
};

// Standard Adam with bias correction and exponential lr decay. Returns the
// applied update (theta_new = theta + delta).
Eigen::VectorXd adam_step(AdamState& adam, const Eigen::VectorXd& grad);

// Gradient of the squared-L2 time-integration loss, assembled without
// sub-sampling: 2 * w * J^T r.
Eigen::VectorXd obti_loss_grad(const FieldModel& model, const ParamVector& theta,
                               const CollocationGrid& grid, const Eigen::VectorXd& u_target);

// One physical time step of optimization-based time integration: build the
// Euler target once, then run n_opt_iters Adam iterations on the full
// parameter vector.
EvolutionState obti_step(const EvolutionState& state, int n_opt_iters);

} // namespace teng
