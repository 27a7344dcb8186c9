// Command-line driver for the TENG benchmark suite.
//
//   teng fit-init  --config c.json [--seed N] [--out DIR] [--override k=v]...
//   teng reference --config c.json ...
//   teng solve     --config c.json ...
//   teng benchmark --config list.json ...
//   teng report    DIR...

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "teng/experiment.hpp"
#include "teng/io.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "path to the JSON experiment config")
        ->required();
    cmd->add_option("--override", opts.overrides,
                    "dotted-path override, e.g. time.dt=0.01 (repeatable)");
    cmd->add_option("--out", opts.out_dir, "output directory (overrides output_dir)");
    cmd->add_option("--seed", opts.seed, "RNG seed (overrides seed)")
        ->check(CLI::NonNegativeNumber);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

teng::ExperimentConfig load_config(const CommonOpts& opts, CLI::App* cmd) {
    std::vector<std::string> ov = opts.overrides;
    if (!opts.out_dir.empty()) ov.push_back("output_dir=" + opts.out_dir);
    if (cmd->count("--seed") > 0) ov.push_back("seed=" + std::to_string(opts.seed));
    const std::string text = teng::apply_overrides(read_file(opts.config_path), ov);
    return teng::parse_config_text(text);
}

int cmd_fit_init(const teng::ExperimentConfig& cfg) {
    const teng::MlpNet model(cfg.net);
    const teng::InitialFitResult fit = teng::prepare_initial_params(cfg, model);
    fs::create_directories(cfg.output_dir);
    const std::string path = (fs::path(cfg.output_dir) / "theta_init.bin").string();
    teng::save_checkpoint(path, model.arch(), fit.theta);
    std::cout << "stage1_loss=" << teng::format_full(fit.stage1_loss)
              << " stage2_loss=" << teng::format_full(fit.stage2_loss)
              << " converged=" << (fit.converged ? "yes" : "no") << "\n"
              << "wrote " << path << "\n";
    return fit.converged ? 0 : 3;
}

int cmd_reference(const teng::ExperimentConfig& cfg) {
    const teng::ReferenceSolution ref = teng::build_reference(cfg);
    fs::create_directories(cfg.output_dir);
    const std::string path = (fs::path(cfg.output_dir) / "reference.tref").string();
    teng::save_reference(path, ref, cfg.pde.dims);
    std::cout << "stored " << ref.times.size() << " time samples on a " << ref.grid_n
              << "^" << cfg.pde.dims << " grid\nwrote " << path << "\n";
    return 0;
}

int cmd_solve(const teng::ExperimentConfig& cfg) {
    const teng::ExperimentResult res = teng::run_experiment(cfg);
    std::cout << "method=" << teng::to_string(cfg.method) << " pde=" << teng::to_string(cfg.pde.kind)
              << " steps=" << res.total_steps
              << " global_rel_l2=" << teng::format_full(res.global_rel_l2) << "\n"
              << "wrote " << res.output_dir << "/errors.csv, global_summary.csv\n";
    return 0;
}

int cmd_benchmark(const CommonOpts& opts, CLI::App* cmd) {
    nlohmann::json j = nlohmann::json::parse(read_file(opts.config_path));
    nlohmann::json experiments;
    if (j.is_array())
        experiments = j;
    else if (j.is_object() && j.contains("experiments"))
        experiments = j["experiments"];
    else
        throw std::runtime_error(
            "benchmark config must be a JSON array or an object with \"experiments\"");

    const std::string base_out = opts.out_dir.empty() ? "bench_out" : opts.out_dir;
    fs::create_directories(base_out);

    std::vector<std::vector<std::string>> summary_rows;
    int idx = 0;
    for (const auto& e : experiments) {
        std::vector<std::string> ov = opts.overrides;
        if (cmd->count("--seed") > 0) ov.push_back("seed=" + std::to_string(opts.seed));
        std::string text = teng::apply_overrides(e.dump(), ov);
        teng::ExperimentConfig cfg = teng::parse_config_text(text);
        char sub[32];
        std::snprintf(sub, sizeof(sub), "exp_%03d", idx++);
        cfg.output_dir = (fs::path(base_out) / sub).string();

        std::cout << "[" << sub << "] " << teng::to_string(cfg.method) << " on "
                  << teng::to_string(cfg.pde.kind) << " ..." << std::flush;
        const teng::ExperimentResult res = teng::run_experiment(cfg);
        std::cout << " global_rel_l2=" << teng::format_full(res.global_rel_l2) << "\n";
        summary_rows.push_back({teng::to_string(cfg.method), teng::to_string(cfg.pde.kind),
                                teng::format_full(cfg.dt), teng::format_full(cfg.t_final),
                                teng::format_full(res.global_rel_l2),
                                std::to_string(res.total_steps)});
    }
    teng::write_csv((fs::path(base_out) / "global_summary.csv").string(),
                    {"method", "pde", "dt", "T", "global_rel_l2", "total_steps"}, summary_rows);
    std::cout << "wrote " << base_out << "/global_summary.csv\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& dirs) {
    for (const auto& dir : dirs) {
        for (const auto& entry : fs::recursive_directory_iterator(dir)) {
            if (entry.path().filename() != "global_summary.csv") continue;
            std::ifstream in(entry.path());
            std::string line;
            std::getline(in, line); // header
            while (std::getline(in, line))
                std::cout << entry.path().parent_path().string() << ": " << line << "\n";
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"TENG PDE benchmark suite"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::vector<std::string> report_dirs;

    CLI::App* fit = app.add_subcommand("fit-init", "fit initial parameters and save a checkpoint");
    add_common(fit, opts);
    CLI::App* ref = app.add_subcommand("reference", "build and store the reference solution");
    add_common(ref, opts);
    CLI::App* solve = app.add_subcommand("solve", "run one full experiment");
    add_common(solve, opts);
    CLI::App* bench = app.add_subcommand("benchmark", "run a list of experiments");
    add_common(bench, opts);
    CLI::App* report = app.add_subcommand("report", "summarize results in output directories");
    report->add_option("dirs", report_dirs, "directories to scan")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed()) return cmd_fit_init(load_config(opts, fit));
        if (ref->parsed()) return cmd_reference(load_config(opts, ref));
        if (solve->parsed()) return cmd_solve(load_config(opts, solve));
        if (bench->parsed()) return cmd_benchmark(opts, bench);
        if (report->parsed()) return cmd_report(report_dirs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
