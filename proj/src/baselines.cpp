#include "teng/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace teng {

Eigen::VectorXd tdvp_rhs(const FieldModel& model, const ParamVector& theta, const PdeSpec& pde,
                         const CollocationGrid& grid, const IndexSet& subset,
                         const LstsqConfig& lstsq) {
    const FieldBatch fb = model.evaluate(theta, grid.points, 2);
    const Eigen::VectorXd lu = apply_operator(pde, fb);
    const Eigen::MatrixXd J = model.jacobian(theta, grid.points, subset);
    const double sqw = std::sqrt(grid.weight);
    const Eigen::VectorXd v_sub = solve_lstsq(sqw * J, sqw * lu, lstsq);

    Eigen::VectorXd v = Eigen::VectorXd::Zero(model.param_count());
    for (std::size_t s = 0; s < subset.size(); ++s)
        v[subset[s]] = v_sub[static_cast<Eigen::Index>(s)];
    return v;
}

EvolutionState tdvp_rk4_step(const EvolutionState& state) {
    EvolutionState next = state;
    const FieldModel& model = *state.model;

    const bool full = state.tdvp.subsample == 0 || state.tdvp.subsample >= model.param_count();
    const IndexSet subset = full ? full_index_set(model.param_count())
                                 : subsample_params(model.param_count(), state.tdvp.subsample,
                                                    next.rng);

    auto rhs = [&](const ParamVector& theta) {
        return tdvp_rhs(model, theta, state.pde, state.grid, subset, state.lstsq);
    };

    const double dt = state.dt;
    const Eigen::VectorXd k1 = rhs(state.theta);
    const Eigen::VectorXd k2 = rhs(state.theta + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = rhs(state.theta + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = rhs(state.theta + dt * k3);
    next.theta = state.theta + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    next.t = state.t + dt;

    // Log the projection residual of the last stage as a diagnostic.
    StepRecord rec;
    rec.t = next.t;
    {
        const ParamVector theta4 = state.theta + dt * k3;
        const FieldBatch fb = model.evaluate(theta4, state.grid.points, 2);
        const Eigen::VectorXd lu = apply_operator(state.pde, fb);
        const Eigen::MatrixXd J = model.jacobian(theta4, state.grid.points, subset);
        Eigen::VectorXd k4_sub(static_cast<Eigen::Index>(subset.size()));
        for (std::size_t s = 0; s < subset.size(); ++s)
            k4_sub[static_cast<Eigen::Index>(s)] = k4[subset[s]];
        rec.final_loss = state.grid.weight * (J * k4_sub - lu).squaredNorm();
    }
    rec.iterations = 0;
    next.residual_log.push_back(std::move(rec));
    return next;
}

AdamState AdamState::make(Eigen::Index n, const ObtiConfig& cfg) {
    AdamState a;
    a.m = Eigen::VectorXd::Zero(n);
    a.v = Eigen::VectorXd::Zero(n);
    a.lr0 = cfg.lr0;
    a.beta1 = cfg.beta1;
    a.beta2 = cfg.beta2;
    a.eps = cfg.eps;
    a.half_life_iters = cfg.half_life_fraction * cfg.n_opt_iters;
    return a;
}

Eigen::VectorXd adam_step(AdamState& adam, const Eigen::VectorXd& grad) {
    if (grad.size() != adam.m.size())
        throw std::invalid_argument("adam_step: gradient length mismatch");
    adam.step += 1;
    adam.m = adam.beta1 * adam.m + (1.0 - adam.beta1) * grad;
    adam.v = adam.beta2 * adam.v + (1.0 - adam.beta2) * grad.array().square().matrix();
    const double bc1 = 1.0 - std::pow(adam.beta1, adam.step);
    const double bc2 = 1.0 - std::pow(adam.beta2, adam.step);
    const double lr =
        adam.lr0 * std::exp2(-static_cast<double>(adam.step) / adam.half_life_iters);
    const Eigen::ArrayXd mhat = adam.m.array() / bc1;
    const Eigen::ArrayXd vhat = adam.v.array() / bc2;
    return (-lr * mhat / (vhat.sqrt() + adam.eps)).matrix();
}

Eigen::VectorXd obti_loss_grad(const FieldModel& model, const ParamVector& theta,
                               const CollocationGrid& grid, const Eigen::VectorXd& u_target) {
    const Eigen::VectorXd r = model.evaluate(theta, grid.points, 0).value - u_target;
    return model.weighted_param_gradient(theta, grid.points, 2.0 * grid.weight * r);
}

EvolutionState obti_step(const EvolutionState& state, int n_opt_iters) {
    EvolutionState next = state;
    const FieldModel& model = *state.model;
    const Eigen::VectorXd u_target =
        build_target_euler(model, state.theta, state.pde, state.grid, state.dt);

    AdamState adam = AdamState::make(model.param_count(), state.obti);

    StepRecord rec;
    rec.t = state.t + state.dt;
    rec.loss_history.reserve(static_cast<std::size_t>(n_opt_iters));

    for (int it = 0; it < n_opt_iters; ++it) {
        const Eigen::VectorXd r =
            model.evaluate(next.theta, state.grid.points, 0).value - u_target;
        rec.loss_history.push_back(state.grid.weight * r.squaredNorm());
        const Eigen::VectorXd grad = model.weighted_param_gradient(
            next.theta, state.grid.points, 2.0 * state.grid.weight * r);
        next.theta += adam_step(adam, grad);
    }
    rec.final_loss = field_loss(model, next.theta, state.grid, u_target);
    rec.iterations = n_opt_iters;
    next.t = state.t + state.dt;
    next.residual_log.push_back(std::move(rec));
    return next;
}

} // namespace teng
