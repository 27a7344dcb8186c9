#include "teng/config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace teng {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

// Strict object reader: every key must be declared, leftovers are rejected by
// name so typos surface immediately.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) fail(path_.empty() ? "expected an object" : path_ + ": expected an object");
    }

    template <typename F>
    void key(const char* name, F&& f) {
        known_.insert(name);
        auto it = j_.find(name);
        if (it != j_.end()) f(*it, sub(name));
    }

    template <typename F>
    void require(const char* name, F&& f) {
        known_.insert(name);
        auto it = j_.find(name);
        if (it == j_.end()) fail("missing required key \"" + sub(name) + "\"");
        f(*it, sub(name));
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!known_.count(it.key())) fail("unknown key \"" + sub(it.key()) + "\"");
    }

private:
    std::string sub(const std::string& name) const {
        return path_.empty() ? name : path_ + "." + name;
    }
    const json& j_;
    std::string path_;
    std::set<std::string> known_;
};

double as_double(const json& v, const std::string& p) {
    if (!v.is_number()) fail(p + ": expected a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& p) {
    if (!v.is_number_integer()) fail(p + ": expected an integer");
    return v.get<int>();
}

std::uint64_t as_u64(const json& v, const std::string& p) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        fail(p + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string as_string(const json& v, const std::string& p) {
    if (!v.is_string()) fail(p + ": expected a string");
    return v.get<std::string>();
}

} // namespace

std::string to_string(EvolveMethod m) {
    switch (m) {
    case EvolveMethod::TengEuler: return "teng-euler";
    case EvolveMethod::TengHeun: return "teng-heun";
    case EvolveMethod::TengRk4: return "teng-rk4";
    case EvolveMethod::TdvpRk4: return "tdvp-rk4";
    case EvolveMethod::ObtiAdam: return "obti-adam";
    }
    return "?";
}

EvolveMethod method_from_string(const std::string& s) {
    if (s == "teng-euler") return EvolveMethod::TengEuler;
    if (s == "teng-heun") return EvolveMethod::TengHeun;
    if (s == "teng-rk4") return EvolveMethod::TengRk4;
    if (s == "tdvp-rk4") return EvolveMethod::TdvpRk4;
    if (s == "obti-adam") return EvolveMethod::ObtiAdam;
    fail("unknown method \"" + s + "\"");
}

std::string to_string(PdeKind k) {
    switch (k) {
    case PdeKind::Heat: return "heat";
    case PdeKind::AllenCahn: return "allen-cahn";
    case PdeKind::Burgers: return "burgers";
    }
    return "?";
}

PdeKind pde_kind_from_string(const std::string& s) {
    if (s == "heat") return PdeKind::Heat;
    if (s == "allen-cahn") return PdeKind::AllenCahn;
    if (s == "burgers") return PdeKind::Burgers;
    fail("unknown pde kind \"" + s + "\"");
}

Eigen::VectorXd ExperimentConfig::lengths_vec() const {
    if (domain_lengths.empty())
        return Eigen::VectorXd::Constant(pde.dims, 6.283185307179586476925287);
    Eigen::VectorXd v(static_cast<Eigen::Index>(domain_lengths.size()));
    for (std::size_t i = 0; i < domain_lengths.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = domain_lengths[i];
    return v;
}

int ExperimentConfig::effective_ref_kmax() const {
    if (ref_kmax > 0) return ref_kmax;
    if (pde.dims == 3) return 8;
    switch (pde.kind) {
    case PdeKind::Heat: return 32;
    case PdeKind::AllenCahn: return 48;
    case PdeKind::Burgers: return 64;
    }
    return 32;
}

int ExperimentConfig::effective_ic_grid_n() const {
    if (ref_ic_grid_n > 0) return ref_ic_grid_n;
    return pde.dims == 3 ? 24 : 256;
}

void ExperimentConfig::validate() const {
    pde.validate();
    net.validate();
    if (net.input_dim != pde.dims) fail("net input dimension must match pde.dims");
    if (!domain_lengths.empty() && static_cast<int>(domain_lengths.size()) != pde.dims)
        fail("domain_lengths size must match pde.dims");
    for (double l : domain_lengths)
        if (!(l > 0.0)) fail("domain_lengths entries must be positive");
    if (initial_condition_by_name(ic).dims() != pde.dims)
        fail("initial condition dimensionality must match pde.dims");
    if (grid_n_per_dim < 2) fail("grid_n_per_dim must be >= 2");
    if (!(dt > 0.0)) fail("time.dt must be positive");
    if (t_final < 0.0) fail("time.t_final must be >= 0");
    if (checkpoint_stride < 1) fail("time.checkpoint_stride must be >= 1");
    const double steps = t_final / dt;
    if (std::abs(std::lround(steps) * dt - t_final) > 1e-9 * std::max(t_final, dt))
        fail("time.t_final must be an integer multiple of time.dt");
    if (!(lstsq.rcond > 0.0 && lstsq.rcond < 1.0)) fail("lstsq.rcond must be in (0,1)");
    if (!(lstsq.cg_tol > 0.0)) fail("lstsq.cg_tol must be positive");
    if (lstsq.cg_max_iter < 0) fail("lstsq.cg_max_iter must be >= 0");
    // method-specific settings are validated for the chosen method only
    switch (method) {
    case EvolveMethod::TengEuler:
    case EvolveMethod::TengHeun:
    case EvolveMethod::TengRk4:
        stepper.validate(net.param_count());
        break;
    case EvolveMethod::TdvpRk4:
        if (tdvp.subsample < 0 || tdvp.subsample > net.param_count())
            fail("tdvp.subsample exceeds parameter count");
        break;
    case EvolveMethod::ObtiAdam:
        if (obti.n_opt_iters < 1) fail("obti.iters must be >= 1");
        if (!(obti.beta1 > 0.0 && obti.beta1 < 1.0 && obti.beta2 > 0.0 && obti.beta2 < 1.0))
            fail("obti.beta1/beta2 must be in (0,1)");
        break;
    }
    if (fit.subsample < 0 || fit.subsample > net.param_count())
        fail("fit.subsample exceeds parameter count");
    if (!(ref_dt > 0.0)) fail("reference.dt_ref must be positive");
    if (effective_ic_grid_n() < 2 * effective_ref_kmax() + 1)
        fail("reference.ic_grid_n must be >= 2*kmax+1");
}

ExperimentConfig parse_config_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(std::string("invalid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    Obj root(j, "");

    root.require("method", [&](const json& v, const std::string& p) {
        cfg.method = method_from_string(as_string(v, p));
    });
    root.key("seed", [&](const json& v, const std::string& p) { cfg.seed = as_u64(v, p); });
    root.key("output_dir",
             [&](const json& v, const std::string& p) { cfg.output_dir = as_string(v, p); });
    root.key("ic", [&](const json& v, const std::string& p) { cfg.ic = as_string(v, p); });
    root.key("init_checkpoint",
             [&](const json& v, const std::string& p) { cfg.init_checkpoint = as_string(v, p); });

    root.key("pde", [&](const json& v, const std::string& p) {
        Obj o(v, p);
        o.key("kind", [&](const json& w, const std::string& q) {
            cfg.pde.kind = pde_kind_from_string(as_string(w, q));
        });
        o.key("nu", [&](const json& w, const std::string& q) { cfg.pde.nu = as_double(w, q); });
        o.key("dims", [&](const json& w, const std::string& q) { cfg.pde.dims = as_int(w, q); });
        o.finish();
    });

    root.key("domain_lengths", [&](const json& v, const std::string& p) {
        if (!v.is_array()) fail(p + ": expected an array");
        cfg.domain_lengths.clear();
        for (std::size_t i = 0; i < v.size(); ++i)
            cfg.domain_lengths.push_back(as_double(v[i], p + "[" + std::to_string(i) + "]"));
    });

    root.key("net", [&](const json& v, const std::string& p) {
        Obj o(v, p);
        o.key("n_layers",
              [&](const json& w, const std::string& q) { cfg.net.n_layers = as_int(w, q); });
        o.key("hidden_dim",
              [&](const json& w, const std::string& q) { cfg.net.hidden_dim = as_int(w, q); });
        o.key("embed_terms",
              [&](const json& w, const std::string& q) { cfg.net.embed_terms = as_int(w, q); });
        o.finish();
    });

    root.key("grid_n_per_dim",
             [&](const json& v, const std::string& p) { cfg.grid_n_per_dim = as_int(v, p); });

    root.key("time", [&](const json& v, const std::string& p) {
        Obj o(v, p);
        o.key("dt", [&](const json& w, const std::string& q) { cfg.dt = as_double(w, q); });
        o.key("t_final",
              [&](const json& w, const std::string& q) { cfg.t_final = as_double(w, q); });
        o.key("checkpoint_stride",
              [&](const json& w, const std::string& q) { cfg.checkpoint_stride = as_int(w, q); });
        o.finish();
    });

    root.key("stepper", [&](const json& v, const std::string& p) {
        Obj o(v, p);
        o.key("n_it_first_stage", [&](const json& w, const std::string& q) {
            cfg.stepper.n_it_first_stage = as_int(w, q);
        });
        o.key("n_it_second_stage", [&](const json& w, const std::string& q) {
            cfg.stepper.n_it_second_stage = as_int(w, q);
        });
        o.key("subsample_first", [&](const json& w, const std::string& q) {
            cfg.stepper.subsample_first = as_int(w, q);
        });
        o.key("subsample_rest", [&](const json& w, const std::string& q) {
            cfg.stepper.subsample_rest = as_int(w, q);
        });
        o.key("alpha",
              [&](const json& w, const std::string& q) { cfg.stepper.alpha = as_double(w, q); });
        o.key("early_stop_loss", [&](const json& w, const std::string& q) {
            cfg.stepper.early_stop_loss = as_double(w, q);
        });
        o.finish();
    });

    root.key("fit", [&](const json& v, const std::string& p) {
        Obj o(v, p);
        o.key("stage1_tol",
              [&](const json& w, const std::string& q) { cfg.fit.stage1_tol = as_double(w, q); });
        o.key("stage1_max_iter", [&](const json& w, const std::string& q) {
            cfg.fit.stage1_max_iter = as_int(w, q);
        });
        o.key("stage2_tol",
              [&](const json& w, const std::string& q) { cfg.fit.stage2_tol = as_double(w, q); });
        o.key("stage2_max_iter", [&](const json& w, const std::string& q) {
            cfg.fit.stage2_max_iter = as_int(w, q);
        });
        o.key("subsample",
              [&](const json& w, const std::string& q) { cfg.fit.subsample = as_int(w, q); });
        o.key("cg_max_iter", [&](const json& w, const std::string& q) {
            cfg.fit.lstsq.cg_max_iter = as_int(w, q);
        });
        o.finish();
    });

    root.key("tdvp", [&](const json& v, const std::string& p) {
        Obj o(v, p);
        o.key("subsample",
              [&](const json& w, const std::string& q) { cfg.tdvp.subsample = as_int(w, q); });
        o.finish();
    });

    root.key("obti", [&](const json& v, const std::string& p) {
        Obj o(v, p);
        o.key("iters",
              [&](const json& w, const std::string& q) { cfg.obti.n_opt_iters = as_int(w, q); });
        o.key("lr0", [&](const json& w, const std::string& q) { cfg.obti.lr0 = as_double(w, q); });
        o.key("beta1",
              [&](const json& w, const std::string& q) { cfg.obti.beta1 = as_double(w, q); });
        o.key("beta2",
              [&](const json& w, const std::string& q) { cfg.obti.beta2 = as_double(w, q); });
        o.key("eps", [&](const json& w, const std::string& q) { cfg.obti.eps = as_double(w, q); });
        o.key("half_life_fraction", [&](const json& w, const std::string& q) {
            cfg.obti.half_life_fraction = as_double(w, q);
        });
        o.finish();
    });

    root.key("lstsq", [&](const json& v, const std::string& p) {
        Obj o(v, p);
        o.key("method", [&](const json& w, const std::string& q) {
            const std::string s = as_string(w, q);
            if (s == "svd")
                cfg.lstsq.method = LstsqMethod::Svd;
            else if (s == "cgls")
                cfg.lstsq.method = LstsqMethod::Cgls;
            else
                fail(q + ": expected \"svd\" or \"cgls\"");
        });
        o.key("rcond",
              [&](const json& w, const std::string& q) { cfg.lstsq.rcond = as_double(w, q); });
        o.key("cg_max_iter",
              [&](const json& w, const std::string& q) { cfg.lstsq.cg_max_iter = as_int(w, q); });
        o.key("cg_tol",
              [&](const json& w, const std::string& q) { cfg.lstsq.cg_tol = as_double(w, q); });
        o.finish();
    });

    root.key("reference", [&](const json& v, const std::string& p) {
        Obj o(v, p);
        o.key("kmax", [&](const json& w, const std::string& q) { cfg.ref_kmax = as_int(w, q); });
        o.key("dt_ref",
              [&](const json& w, const std::string& q) { cfg.ref_dt = as_double(w, q); });
        o.key("ic_grid_n",
              [&](const json& w, const std::string& q) { cfg.ref_ic_grid_n = as_int(w, q); });
        o.finish();
    });

    root.finish();

    // derived fields
    cfg.net.input_dim = cfg.pde.dims;
    if (!cfg.domain_lengths.empty()) {
        Eigen::VectorXd l(static_cast<Eigen::Index>(cfg.domain_lengths.size()));
        for (std::size_t i = 0; i < cfg.domain_lengths.size(); ++i)
            l[static_cast<Eigen::Index>(i)] = cfg.domain_lengths[i];
        cfg.net.lengths = l;
    } else {
        cfg.net.lengths = Eigen::VectorXd();
    }
    cfg.fit.alpha = cfg.stepper.alpha;

    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json j;
    j["method"] = to_string(cfg.method);
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir;
    j["ic"] = cfg.ic;
    if (!cfg.init_checkpoint.empty()) j["init_checkpoint"] = cfg.init_checkpoint;
    j["pde"] = {{"kind", to_string(cfg.pde.kind)}, {"nu", cfg.pde.nu}, {"dims", cfg.pde.dims}};
    if (!cfg.domain_lengths.empty()) j["domain_lengths"] = cfg.domain_lengths;
    j["net"] = {{"n_layers", cfg.net.n_layers},
                {"hidden_dim", cfg.net.hidden_dim},
                {"embed_terms", cfg.net.embed_terms}};
    j["grid_n_per_dim"] = cfg.grid_n_per_dim;
    j["time"] = {{"dt", cfg.dt},
                 {"t_final", cfg.t_final},
                 {"checkpoint_stride", cfg.checkpoint_stride}};
    j["stepper"] = {{"n_it_first_stage", cfg.stepper.n_it_first_stage},
                    {"n_it_second_stage", cfg.stepper.n_it_second_stage},
                    {"subsample_first", cfg.stepper.subsample_first},
                    {"subsample_rest", cfg.stepper.subsample_rest},
                    {"alpha", cfg.stepper.alpha},
                    {"early_stop_loss", cfg.stepper.early_stop_loss}};
    j["fit"] = {{"stage1_tol", cfg.fit.stage1_tol},
                {"stage1_max_iter", cfg.fit.stage1_max_iter},
                {"stage2_tol", cfg.fit.stage2_tol},
                {"stage2_max_iter", cfg.fit.stage2_max_iter},
                {"subsample", cfg.fit.subsample},
                {"cg_max_iter", cfg.fit.lstsq.cg_max_iter}};
    j["tdvp"] = {{"subsample", cfg.tdvp.subsample}};
    j["obti"] = {{"iters", cfg.obti.n_opt_iters},
                 {"lr0", cfg.obti.lr0},
                 {"beta1", cfg.obti.beta1},
                 {"beta2", cfg.obti.beta2},
                 {"eps", cfg.obti.eps},
                 {"half_life_fraction", cfg.obti.half_life_fraction}};
    j["lstsq"] = {{"method", cfg.lstsq.method == LstsqMethod::Svd ? "svd" : "cgls"},
                  {"rcond", cfg.lstsq.rcond},
                  {"cg_max_iter", cfg.lstsq.cg_max_iter},
                  {"cg_tol", cfg.lstsq.cg_tol}};
    j["reference"] = {{"kmax", cfg.effective_ref_kmax()},
                      {"dt_ref", cfg.ref_dt},
                      {"ic_grid_n", cfg.effective_ic_grid_n()}};
    return j.dump(2);
}

std::string apply_overrides(const std::string& json_text,
                            const std::vector<std::string>& overrides) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(std::string("invalid JSON: ") + e.what());
    }
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos) fail("override must look like key=value: " + ov);
        const std::string path = ov.substr(0, eq);
        const std::string value = ov.substr(eq + 1);

        json parsed = json::parse(value, nullptr, false);
        if (parsed.is_discarded()) parsed = value; // plain string

        json* node = &j;
        std::size_t start = 0;
        while (true) {
            const auto dot = path.find('.', start);
            const std::string part = path.substr(start, dot - start);
            if (part.empty()) fail("bad override path: " + path);
            if (dot == std::string::npos) {
                (*node)[part] = parsed;
                break;
            }
            node = &(*node)[part];
            start = dot + 1;
        }
    }
    return j.dump(2);
}

} // namespace teng
