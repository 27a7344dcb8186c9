#include "teng/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "teng/io.hpp"

namespace teng {

namespace {

std::vector<double> step_times(const ExperimentConfig& cfg) {
    const long n = std::lround(cfg.t_final / cfg.dt);
    std::vector<double> times(static_cast<std::size_t>(n));
    for (long i = 1; i <= n; ++i) times[static_cast<std::size_t>(i - 1)] = i * cfg.dt;
    return times;
}

} // namespace

ReferenceSolution build_reference(const ExperimentConfig& cfg) {
    cfg.validate();
    const Eigen::VectorXd lengths = cfg.lengths_vec();
    const InitialCondition ic = initial_condition_by_name(cfg.ic);
    const int kmax = cfg.effective_ref_kmax();
    const int ic_n = cfg.effective_ic_grid_n();

    const CollocationGrid ic_grid = tensor_grid(cfg.pde.dims, ic_n, lengths);
    const Eigen::VectorXd u0 = ic.evaluate(ic_grid.points, 0).value;

    const std::vector<double> times = step_times(cfg);

    if (cfg.pde.kind == PdeKind::Heat) {
        const SpectrumField s0 = dft_forward(u0, cfg.pde.dims, ic_n, kmax, lengths);
        ReferenceSolution ref;
        ref.kmax = kmax;
        ref.dt_ref = 0.0; // exact evolution, no time discretization
        ref.grid_n = cfg.grid_n_per_dim;
        for (double t : times) {
            ref.times.push_back(t);
            ref.fields.push_back(heat_exact_grid(s0, cfg.pde.nu, t, cfg.grid_n_per_dim));
        }
        return ref;
    }

    const double ratio = cfg.dt / cfg.ref_dt;
    if (std::abs(std::lround(ratio) - ratio) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument("build_reference: dt must be an integer multiple of dt_ref");
    return spectral_rk4_evolve(cfg.pde, u0, ic_n, kmax, cfg.ref_dt, times, cfg.grid_n_per_dim,
                               lengths);
}

InitialFitResult prepare_initial_params(const ExperimentConfig& cfg, const MlpNet& model) {
    if (!cfg.init_checkpoint.empty()) {
        InitialFitResult res;
        res.theta = load_checkpoint(cfg.init_checkpoint, model.arch());
        res.converged = true;
        return res;
    }
    const CollocationGrid grid = tensor_grid(cfg.pde.dims, cfg.grid_n_per_dim, cfg.lengths_vec());
    const InitialCondition ic = initial_condition_by_name(cfg.ic);
    const ParamVector theta_raw = init_params(model.arch(), cfg.seed);
    RngState rng = fork_stream(RngState{cfg.seed, 0}, 1);
    return fit_initial(model, ic, grid, cfg.fit, rng, theta_raw);
}

EvolutionState make_state(const ExperimentConfig& cfg, const MlpNet& model,
                          const ParamVector& theta0) {
    EvolutionState st;
    st.t = 0.0;
    st.theta = theta0;
    st.pde = cfg.pde;
    st.model = &model;
    st.grid = tensor_grid(cfg.pde.dims, cfg.grid_n_per_dim, cfg.lengths_vec());
    st.dt = cfg.dt;
    st.method = cfg.method;
    st.stepper = cfg.stepper;
    st.lstsq = cfg.lstsq;
    st.tdvp = cfg.tdvp;
    st.obti = cfg.obti;
    st.rng = fork_stream(RngState{cfg.seed, 0}, 2);
    return st;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    const auto out = [&](const std::string& name) {
        return (fs::path(cfg.output_dir) / name).string();
    };

    const MlpNet model(cfg.net);
    const CollocationGrid grid = tensor_grid(cfg.pde.dims, cfg.grid_n_per_dim, cfg.lengths_vec());

    const ReferenceSolution ref = build_reference(cfg);
    save_reference(out("reference.tref"), ref, cfg.pde.dims);

    const InitialFitResult fit = prepare_initial_params(cfg, model);
    save_checkpoint(out("theta_init.bin"), model.arch(), fit.theta);

    const Trajectory traj = evolve(make_state(cfg, model, fit.theta), cfg.t_final, 1);
    const long n_steps = static_cast<long>(traj.residual_log.size());

    ExperimentResult res;
    res.output_dir = cfg.output_dir;
    res.fit_stage1_loss = fit.stage1_loss;
    res.fit_stage2_loss = fit.stage2_loss;
    res.total_steps = n_steps;

    // Per-step errors against the reference; checkpoints[0] is t = 0.
    std::vector<Eigen::VectorXd> u_hat, u_ref;
    std::vector<std::vector<std::string>> rows;
    double bound_cum = 0.0;
    for (long i = 0; i < n_steps; ++i) {
        const auto& rec = traj.residual_log[static_cast<std::size_t>(i)];
        const ParamVector& theta = traj.checkpoints[static_cast<std::size_t>(i + 1)].second;
        const Eigen::VectorXd u = model.evaluate(theta, grid.points, 0).value;
        const Eigen::VectorXd& r = ref.fields[static_cast<std::size_t>(i)];
        const double err = rel_l2(u, r, grid);
        bound_cum += std::sqrt(std::max(rec.final_loss, 0.0));

        res.times.push_back(rec.t);
        res.rel_l2_series.push_back(err);
        res.step_losses.push_back(rec.final_loss);
        u_hat.push_back(u);
        u_ref.push_back(r);

        rows.push_back({format_full(rec.t), format_full(err), format_full(rec.final_loss),
                        std::to_string(rec.iterations), format_full(bound_cum)});
    }
    write_csv(out("errors.csv"),
              {"t", "rel_l2", "step_final_loss", "stepper_iterations", "residual_bound_cum"},
              rows);

    res.global_rel_l2 = n_steps > 0 ? global_rel_l2(u_hat, u_ref, grid, cfg.dt) : 0.0;
    write_csv(out("global_summary.csv"),
              {"method", "pde", "dt", "T", "global_rel_l2", "total_steps"},
              {{to_string(cfg.method), to_string(cfg.pde.kind), format_full(cfg.dt),
                format_full(cfg.t_final), format_full(res.global_rel_l2),
                std::to_string(res.total_steps)}});

    // Strided parameter checkpoints plus the final state.
    for (std::size_t c = 1; c < traj.checkpoints.size(); ++c) {
        const auto& [t, theta] = traj.checkpoints[c];
        const long step = std::lround(t / cfg.dt);
        if (step % cfg.checkpoint_stride == 0 || step == n_steps) {
            char name[64];
            std::snprintf(name, sizeof(name), "theta_step_%06ld.bin", step);
            save_checkpoint(out(name), model.arch(), theta);
        }
    }
    return res;
}

} // namespace teng
