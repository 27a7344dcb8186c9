#pragma once

#include <string>
#include <vector>

#include "teng/config.hpp"
#include "teng/metrics.hpp"
#include "teng/spectral.hpp"
#include "teng/stepper.hpp"

namespace teng {

// Reference solution sampled on the training grid at every step time
// (t = dt, 2*dt, ..., T). Heat uses the exact Fourier evolution; Allen-Cahn
// and Burgers use the pseudo-spectral RK4 solver.
ReferenceSolution build_reference(const ExperimentConfig& cfg);

// Deterministic initial parameters for this config: init_params(seed) refined
// by the two-stage fit (or loaded from cfg.init_checkpoint when set).
InitialFitResult prepare_initial_params(const ExperimentConfig& cfg, const MlpNet& model);

EvolutionState make_state(const ExperimentConfig& cfg, const MlpNet& model,
                          const ParamVector& theta0);

struct ExperimentResult {
    std::vector<double> times;
    std::vector<double> rel_l2_series;
    std::vector<double> step_losses;
    double global_rel_l2 = 0.0;
    double fit_stage1_loss = 0.0;
    double fit_stage2_loss = 0.0;
    long total_steps = 0;
    std::string output_dir;
};

// Full pipeline: reference, initial fit, evolution, CSV + checkpoint output.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

} // namespace teng
