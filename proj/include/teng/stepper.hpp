#pragma once

#include <vector>

#include "teng/grid.hpp"
#include "teng/lstsq.hpp"
#include "teng/net.hpp"
#include "teng/pde.hpp"

namespace teng {

enum class Integrator { Euler, Heun, Rk4 };

// Per-time-step optimization settings. Subsample counts of 0 mean "use the
// full parameter set".
struct StepperConfig {
    int n_it_first_stage = 7;
    int n_it_second_stage = 5;
    Eigen::Index subsample_first = 0;
    Eigen::Index subsample_rest = 0;
    double alpha = 0.5; // alpha = 1/2 makes each iteration a Gauss-Newton step
    double early_stop_loss = 1e-14;

    void validate(Eigen::Index param_count) const;
};

struct StepperResult {
    ParamVector theta;
    double final_loss = 0.0;
    int iterations = 0;
};

struct StepRecord {
    double t = 0.0;
    double final_loss = 0.0;
    int iterations = 0;
    std::vector<double> stage_losses;     // one per fitted stage
    std::vector<double> loss_history;     // per-iteration losses (OBTI only)
};

// u(x_p) + dt * (L u)(x_p) on the grid points.
Eigen::VectorXd build_target_euler(const FieldModel& model, const ParamVector& theta,
                                   const PdeSpec& pde, const CollocationGrid& grid, double dt);

// Squared L2 distance between the model field and a target sampled on the grid.
double field_loss(const FieldModel& model, const ParamVector& theta,
                  const CollocationGrid& grid, const Eigen::VectorXd& u_target);

// Repeated natural-gradient (tangent-space projected) iterations that fit the
// model to u_target. Each iteration solves the quadrature-weighted least
// squares J*dtheta ~ -alpha * dL/du on a fresh random parameter subset and
// updates only those entries. Stops after n_it iterations or when the loss
// drops to early_stop_loss.
StepperResult teng_stepper(const FieldModel& model, const ParamVector& theta_init,
                           const Eigen::VectorXd& u_target, const CollocationGrid& grid,
                           const StepperConfig& cfg, const LstsqConfig& lstsq, int n_it,
                           RngState& rng);

enum class EvolveMethod { TengEuler, TengHeun, TengRk4, TdvpRk4, ObtiAdam };

struct TdvpConfig {
    Eigen::Index subsample = 0; // 0 -> full parameter set
};

struct ObtiConfig {
    int n_opt_iters = 300;
    double lr0 = 1e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double half_life_fraction = 1.0; // lr halves after this fraction of the budget
};

struct EvolutionState {
    double t = 0.0;
    ParamVector theta;
    PdeSpec pde;
    const FieldModel* model = nullptr;
    CollocationGrid grid;
    double dt = 0.0;
    EvolveMethod method = EvolveMethod::TengEuler;
    StepperConfig stepper;
    LstsqConfig lstsq;
    TdvpConfig tdvp;
    ObtiConfig obti;
    RngState rng;
    std::vector<StepRecord> residual_log;
};

EvolutionState step_euler(const EvolutionState& state);
EvolutionState step_heun(const EvolutionState& state);
EvolutionState step_rk4(const EvolutionState& state);

// Dispatch on state.method (including the baseline methods).
EvolutionState advance_step(const EvolutionState& state);

struct Trajectory {
    std::vector<std::pair<double, ParamVector>> checkpoints;
    std::vector<StepRecord> residual_log;
    EvolutionState final_state;
};

// Applies round(T/dt) steps; rejects T that is not an integer multiple of dt
// (relative mismatch above 1e-9). Checkpoints keep (t, theta) at the given
// stride plus the initial and final states.
Trajectory evolve(const EvolutionState& initial, double total_time, int checkpoint_stride);

// Triangle-inequality surrogate for the accumulated optimization error:
// sum_n sqrt(final_loss_n).
double residual_bound(const std::vector<StepRecord>& residual_log);

// Two-stage initial-condition fit: a Sobolev (value + gradient) natural
// gradient descent on the full parameter set, then plain-L2 sparse stepper
// iterations.
struct InitialFitConfig {
    double stage1_tol = 1e-7;
    int stage1_max_iter = 80;
    double stage2_tol = 1e-12;
    int stage2_max_iter = 400;
    Eigen::Index subsample = 0; // stage-2 subset size; 0 -> full
    double alpha = 0.5;
    // Iteration-capped CGLS: the cap acts as spectral regularization of the
    // severely ill-conditioned tangent systems met far from the optimum.
    LstsqConfig lstsq{LstsqMethod::Cgls, 1e-12, 60, 1e-10};
};

struct InitialFitResult {
    ParamVector theta;
    double stage1_loss = 0.0;
    double stage2_loss = 0.0;
    int stage1_iterations = 0;
    int stage2_iterations = 0;
    bool converged = false;
};

InitialFitResult fit_initial(const FieldModel& model, const InitialCondition& ic,
                             const CollocationGrid& grid, const InitialFitConfig& cfg,
                             RngState& rng, const ParamVector& theta0);

// Variant taking precomputed target values/gradients (used by tests and by
// callers with non-preset initial data).
InitialFitResult fit_initial(const FieldModel& model, const FieldBatch& target,
                             const CollocationGrid& grid, const InitialFitConfig& cfg,
                             RngState& rng, const ParamVector& theta0);

} // namespace teng
