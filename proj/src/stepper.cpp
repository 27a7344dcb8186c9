#include "teng/stepper.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "teng/baselines.hpp"

namespace teng {

void StepperConfig::validate(Eigen::Index param_count) const {
    if (n_it_first_stage < 1 || n_it_second_stage < 1)
        throw std::invalid_argument("StepperConfig: iteration counts must be >= 1");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("StepperConfig: alpha must be in (0, 1]");
    if (subsample_first > param_count || subsample_rest > param_count)
        throw std::invalid_argument("StepperConfig: subsample count exceeds parameter count");
    if (subsample_first < 0 || subsample_rest < 0)
        throw std::invalid_argument("StepperConfig: subsample counts must be >= 0");
}

Eigen::VectorXd build_target_euler(const FieldModel& model, const ParamVector& theta,
                                   const PdeSpec& pde, const CollocationGrid& grid, double dt) {
    const FieldBatch fb = model.evaluate(theta, grid.points, 2);
    return fb.value + dt * apply_operator(pde, fb);
}

double field_loss(const FieldModel& model, const ParamVector& theta,
                  const CollocationGrid& grid, const Eigen::VectorXd& u_target) {
    const Eigen::VectorXd r = model.evaluate(theta, grid.points, 0).value - u_target;
    return grid.weight * r.squaredNorm();
}

StepperResult teng_stepper(const FieldModel& model, const ParamVector& theta_init,
                           const Eigen::VectorXd& u_target, const CollocationGrid& grid,
                           const StepperConfig& cfg, const LstsqConfig& lstsq, int n_it,
                           RngState& rng) {
    if (u_target.size() != grid.point_count())
        throw std::invalid_argument("teng_stepper: target length != grid point count");
    cfg.validate(model.param_count());

    const double sqw = std::sqrt(grid.weight);
    StepperResult res;
    res.theta = theta_init;

    Eigen::VectorXd r = model.evaluate(res.theta, grid.points, 0).value - u_target;
    double loss = grid.weight * r.squaredNorm();

    for (int it = 0; it < n_it && loss > cfg.early_stop_loss; ++it) {
        const Eigen::Index want = it == 0 ? cfg.subsample_first : cfg.subsample_rest;
        const bool full = want == 0 || want >= model.param_count();
        const IndexSet subset =
            full ? full_index_set(model.param_count()) : subsample_params(model.param_count(), want, rng);

        Eigen::MatrixXd J;
        try {
            J = model.jacobian(res.theta, grid.points, subset);
        } catch (const std::exception& e) {
            throw std::runtime_error("teng_stepper: iteration " + std::to_string(it) + ": " +
                                     e.what());
        }

        // function-space gradient step, projected to the tangent space
        const Eigen::VectorXd du = -2.0 * cfg.alpha * r;
        Eigen::VectorXd dtheta;
        try {
            dtheta = solve_lstsq(sqw * J, sqw * du, lstsq);
        } catch (const std::exception& e) {
            throw std::runtime_error("teng_stepper: least squares failed at iteration " +
                                     std::to_string(it) + ": " + e.what());
        }

        for (std::size_t s = 0; s < subset.size(); ++s)
            res.theta[subset[s]] += dtheta[static_cast<Eigen::Index>(s)];
        res.iterations = it + 1;

        r = model.evaluate(res.theta, grid.points, 0).value - u_target;
        loss = grid.weight * r.squaredNorm();
    }
    res.final_loss = loss;
    return res;
}

namespace {

EvolutionState do_teng_step(const EvolutionState& state) {
    EvolutionState next = state;
    StepRecord rec;
    rec.t = state.t + state.dt;

    const FieldModel& model = *state.model;
    const CollocationGrid& grid = state.grid;
    const FieldBatch f0 = model.evaluate(state.theta, grid.points, 2);
    const Eigen::VectorXd lu0 = apply_operator(state.pde, f0);

    auto fit = [&](const ParamVector& from, const Eigen::VectorXd& target, int n_it) {
        StepperResult r = teng_stepper(model, from, target, grid, state.stepper, state.lstsq,
                                       n_it, next.rng);
        rec.stage_losses.push_back(r.final_loss);
        rec.iterations += r.iterations;
        return r;
    };
    auto operator_at = [&](const ParamVector& theta) {
        return apply_operator(state.pde, model.evaluate(theta, grid.points, 2));
    };

    StepperResult last;
    switch (state.method) {
    case EvolveMethod::TengEuler: {
        last = fit(state.theta, f0.value + state.dt * lu0, state.stepper.n_it_first_stage);
        break;
    }
    case EvolveMethod::TengHeun: {
        const StepperResult temp =
            fit(state.theta, f0.value + state.dt * lu0, state.stepper.n_it_first_stage);
        const Eigen::VectorXd lu_temp = operator_at(temp.theta);
        last = fit(temp.theta, f0.value + 0.5 * state.dt * (lu0 + lu_temp),
                   state.stepper.n_it_second_stage);
        break;
    }
    case EvolveMethod::TengRk4: {
        const double dt = state.dt;
        const StepperResult s2 =
            fit(state.theta, f0.value + 0.5 * dt * lu0, state.stepper.n_it_first_stage);
        const Eigen::VectorXd k2 = operator_at(s2.theta);
        const StepperResult s3 =
            fit(s2.theta, f0.value + 0.5 * dt * k2, state.stepper.n_it_second_stage);
        const Eigen::VectorXd k3 = operator_at(s3.theta);
        const StepperResult s4 =
            fit(s3.theta, f0.value + dt * k3, state.stepper.n_it_second_stage);
        const Eigen::VectorXd k4 = operator_at(s4.theta);
        last = fit(s4.theta, f0.value + dt / 6.0 * (lu0 + 2.0 * k2 + 2.0 * k3 + k4),
                   state.stepper.n_it_second_stage);
        break;
    }
    default:
        throw std::logic_error("do_teng_step: not a TENG method");
    }

    next.theta = last.theta;
    next.t = state.t + state.dt;
    rec.final_loss = last.final_loss;
    next.residual_log.push_back(std::move(rec));
    return next;
}

} // namespace

EvolutionState step_euler(const EvolutionState& state) {
    EvolutionState s = state;
    s.method = EvolveMethod::TengEuler;
    return do_teng_step(s);
}

EvolutionState step_heun(const EvolutionState& state) {
    EvolutionState s = state;
    s.method = EvolveMethod::TengHeun;
    return do_teng_step(s);
}

EvolutionState step_rk4(const EvolutionState& state) {
    EvolutionState s = state;
    s.method = EvolveMethod::TengRk4;
    return do_teng_step(s);
}

EvolutionState advance_step(const EvolutionState& state) {
    switch (state.method) {
    case EvolveMethod::TengEuler:
    case EvolveMethod::TengHeun:
    case EvolveMethod::TengRk4:
        return do_teng_step(state);
    case EvolveMethod::TdvpRk4:
        return tdvp_rk4_step(state);
    case EvolveMethod::ObtiAdam:
        return obti_step(state, state.obti.n_opt_iters);
    }
    throw std::logic_error("advance_step: unknown method");
}

Trajectory evolve(const EvolutionState& initial, double total_time, int checkpoint_stride) {
    if (total_time < 0.0) throw std::invalid_argument("evolve: total_time must be >= 0");
    if (!(initial.dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
    if (checkpoint_stride < 1) throw std::invalid_argument("evolve: stride must be >= 1");

    const double steps_real = total_time / initial.dt;
    const long n_steps = std::lround(steps_real);
    if (std::abs(n_steps * initial.dt - total_time) >
        1e-9 * std::max(std::abs(total_time), initial.dt))
        throw std::invalid_argument("evolve: total_time is not an integer multiple of dt");

    Trajectory traj;
    EvolutionState state = initial;
    traj.checkpoints.emplace_back(state.t, state.theta);
    for (long i = 1; i <= n_steps; ++i) {
        state = advance_step(state);
        if (!state.theta.allFinite())
            throw std::runtime_error("evolve: non-finite parameters at t = " +
                                     std::to_string(state.t));
        if (i % checkpoint_stride == 0 || i == n_steps)
            traj.checkpoints.emplace_back(state.t, state.theta);
    }
    traj.residual_log = state.residual_log;
    traj.final_state = std::move(state);
    return traj;
}

double residual_bound(const std::vector<StepRecord>& residual_log) {
    double sum = 0.0;
    for (const auto& rec : residual_log) sum += std::sqrt(std::max(rec.final_loss, 0.0));
    return sum;
}

// ---------------------------------------------------------------------------

InitialFitResult fit_initial(const FieldModel& model, const FieldBatch& target,
                             const CollocationGrid& grid, const InitialFitConfig& cfg,
                             RngState& rng, const ParamVector& theta0) {
    if (!target.has_grad())
        throw std::invalid_argument("fit_initial: target gradient required for stage 1");
    const Eigen::Index n = grid.point_count();
    const int d = grid.dims;
    const double sqw = std::sqrt(grid.weight);

    InitialFitResult res;
    res.theta = theta0;
    const IndexSet all = full_index_set(model.param_count());

    // Stacked residual [value; du/dx_1; ...; du/dx_d], quadrature-weighted.
    auto sobolev_residual = [&](const ParamVector& theta) {
        const FieldBatch fb = model.evaluate(theta, grid.points, 1);
        Eigen::VectorXd r((1 + d) * n);
        r.head(n) = fb.value - target.value;
        for (int i = 0; i < d; ++i)
            r.segment(n * (1 + i), n) = fb.grad.col(i) - target.grad.col(i);
        return r;
    };

    Eigen::VectorXd r = sobolev_residual(res.theta);
    double loss = grid.weight * r.squaredNorm();
    for (int it = 0; it < cfg.stage1_max_iter && loss > cfg.stage1_tol; ++it) {
        const Eigen::MatrixXd J = model.jacobian_with_grad(res.theta, grid.points, all);
        const Eigen::VectorXd du = -2.0 * cfg.alpha * r;
        Eigen::VectorXd dtheta = solve_lstsq(sqw * J, sqw * du, cfg.lstsq);

        // Backtracking keeps the Gauss-Newton iteration stable far from the
        // optimum (the target is a whole field, not a small time increment).
        double new_loss = loss;
        Eigen::VectorXd r_new = r;
        int halvings = 0;
        for (; halvings < 30; ++halvings) {
            r_new = sobolev_residual(res.theta + dtheta);
            new_loss = grid.weight * r_new.squaredNorm();
            if (new_loss < loss) break;
            dtheta *= 0.5;
        }
        if (new_loss >= loss) break; // no descent direction left
        res.theta += dtheta;
        res.stage1_iterations = it + 1;
        r = r_new;
        loss = new_loss;
    }
    res.stage1_loss = loss;

    // Stage 2: plain L2 fit with the sparse stepper.
    StepperConfig scfg;
    scfg.n_it_first_stage = cfg.stage2_max_iter;
    scfg.n_it_second_stage = cfg.stage2_max_iter;
    scfg.subsample_first = cfg.subsample;
    scfg.subsample_rest = cfg.subsample;
    scfg.alpha = cfg.alpha;
    scfg.early_stop_loss = cfg.stage2_tol;
    const StepperResult s2 =
        teng_stepper(model, res.theta, target.value, grid, scfg, cfg.lstsq,
                     cfg.stage2_max_iter, rng);
    res.theta = s2.theta;
    res.stage2_loss = s2.final_loss;
    res.stage2_iterations = s2.iterations;
    res.converged = s2.final_loss <= cfg.stage2_tol;
    return res;
}

InitialFitResult fit_initial(const FieldModel& model, const InitialCondition& ic,
                             const CollocationGrid& grid, const InitialFitConfig& cfg,
                             RngState& rng, const ParamVector& theta0) {
    const FieldBatch target = ic.evaluate(grid.points, 1);
    return fit_initial(model, target, grid, cfg, rng, theta0);
}

} // namespace teng
