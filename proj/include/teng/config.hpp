#pragma once

#include <string>
#include <vector>

#include "teng/lstsq.hpp"
#include "teng/net.hpp"
#include "teng/pde.hpp"
#include "teng/stepper.hpp"

namespace teng {

// One benchmark run, fully specified. Parsed from strict JSON: unknown or
// mistyped keys are rejected by name.
struct ExperimentConfig {
    EvolveMethod method = EvolveMethod::TengEuler;
    std::uint64_t seed = 0;
    std::string output_dir = "out";

    PdeSpec pde;
    std::string ic = "two-dim-exp";
    std::vector<double> domain_lengths; // empty -> 2*pi per dim

    NetworkArch net{2, 8, 16, 3, {}};
    int grid_n_per_dim = 64;

    double dt = 0.005;
    double t_final = 0.2;
    int checkpoint_stride = 1;

    StepperConfig stepper;
    InitialFitConfig fit;
    TdvpConfig tdvp{512};
    ObtiConfig obti;
    LstsqConfig lstsq;

    int ref_kmax = 0;      // 0 -> default: heat 32, Allen-Cahn 48, Burgers 64 (3D: 8)
    double ref_dt = 1e-3;
    int ref_ic_grid_n = 0; // 0 -> default: 256 in 2D, 24 in 3D

    std::string init_checkpoint; // optional: load initial parameters instead of fitting

    Eigen::VectorXd lengths_vec() const;
    int effective_ref_kmax() const;
    int effective_ic_grid_n() const;
    void validate() const;
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& json_text);
std::string serialize_config(const ExperimentConfig& cfg);

// Dotted-path override, e.g. "time.dt=0.01" or "method=teng-heun". The value
// is parsed as JSON when possible, otherwise taken as a string.
std::string apply_overrides(const std::string& json_text,
                            const std::vector<std::string>& overrides);

std::string to_string(EvolveMethod m);
EvolveMethod method_from_string(const std::string& s);
std::string to_string(PdeKind k);
PdeKind pde_kind_from_string(const std::string& s);

} // namespace teng
