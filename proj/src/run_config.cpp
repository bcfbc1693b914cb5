#include "afc/run_config.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "afc/errors.hpp"

namespace afc {

FixedPointConfig RunConfig::nonlinear_config() const {
    FixedPointConfig fp;
    if (tol > 0) fp.tol = tol;
    if (tol2 > 0) fp.tol2 = tol2;
    if (max_nonlinear > 0) fp.max_iter = max_nonlinear;
    if (stopping == "residual")
        fp.stopping = FixedPointConfig::Stopping::Residual;
    else if (stopping == "stagnation")
        fp.stopping = FixedPointConfig::Stopping::Stagnation;
    else if (!stopping.empty())
        throw ConfigError("unknown stopping mode: " + stopping);
    return fp;
}

LinearSolverConfig RunConfig::linear_config() const {
    LinearSolverConfig lin;
    if (!method.empty()) lin.method = parse_method(method);
    if (!precond.empty()) lin.precond = parse_precond(precond);
    if (atol > 0) lin.atol = atol;
    if (restart > 0) lin.restart = restart;
    if (sor_omega > 0) lin.sor_omega = sor_omega;
    if (n_blocks > 0) lin.n_blocks = n_blocks;
    if (max_linear > 0) lin.max_iter = max_linear;
    return lin;
}

void apply_problem_preset(RunConfig& cfg) {
    auto set_if_unset = [](auto& field, auto value) {
        if (field <= 0) field = value;
    };
    if (cfg.problem == "rotating-shapes") {
        if (cfg.level < 0) cfg.level = 6;
        set_if_unset(cfg.dt, 1e-3);
        set_if_unset(cfg.T, 2.0 * std::acos(-1.0));
        set_if_unset(cfg.tol, 4e-12);
        set_if_unset(cfg.atol, 1e-14);
        if (cfg.stopping.empty()) cfg.stopping = "residual";
        if (cfg.probes.empty()) cfg.probes.push_back({0.5, 0.25, 0.5});
    } else if (cfg.problem == "species") {
        if (cfg.level < 0) cfg.level = 5;
        set_if_unset(cfg.dt, 5e-3);
        set_if_unset(cfg.T, 3.0);
        set_if_unset(cfg.tol, 1e-14);
        set_if_unset(cfg.atol, 1e-16);
        if (cfg.stopping.empty()) cfg.stopping = "residual";
        if (cfg.probes.empty())
            cfg.probes.push_back({1.0, 7.0 / 16.0, 9.0 / 16.0});
    } else if (cfg.problem == "nonconstant-convection") {
        if (cfg.level < 0) cfg.level = 1;
        set_if_unset(cfg.tol, 1e-10);
        set_if_unset(cfg.atol, 1e-14);
        if (cfg.stopping.empty()) cfg.stopping = "residual";
        if (cfg.scheme.empty()) cfg.scheme = "steady-mu";
    } else if (cfg.problem == "circular-convection") {
        if (cfg.level < 0) cfg.level = 5;
        set_if_unset(cfg.tol2, 1e-6);
        set_if_unset(cfg.atol, 1e-14);
        if (cfg.stopping.empty()) cfg.stopping = "stagnation";
        if (cfg.scheme.empty()) cfg.scheme = "steady-mc";
    }
    if (cfg.scheme.empty()) cfg.scheme = "cn-zal-linear";
    if (cfg.level < 0) cfg.level = 4;
    if (cfg.dt <= 0) cfg.dt = 1e-3;
}

void load_run_config(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }

    auto get = [&](const char* key, auto& dst) {
        if (j.contains(key)) {
            try {
                dst = j.at(key).get<std::decay_t<decltype(dst)>>();
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError("config field '" + std::string(key) +
                                  "': " + e.what());
            }
        }
    };
    get("problem", cfg.problem);
    get("scheme", cfg.scheme);
    get("level", cfg.level);
    get("dt", cfg.dt);
    get("T", cfg.T);
    get("tol", cfg.tol);
    get("tol2", cfg.tol2);
    get("max_nonlinear", cfg.max_nonlinear);
    get("stopping", cfg.stopping);
    get("method", cfg.method);
    get("precond", cfg.precond);
    get("atol", cfg.atol);
    get("restart", cfg.restart);
    get("sor_omega", cfg.sor_omega);
    get("n_blocks", cfg.n_blocks);
    get("max_linear", cfg.max_linear);
    get("quad_order", cfg.quad_order);
    get("probe_stride", cfg.probe_stride);
    get("csv", cfg.csv_path);
    get("vtk", cfg.vtk_path);
    get("mesh_file", cfg.mesh_file);
    get("threads", cfg.threads);
    get("simd", cfg.simd);
    if (j.contains("clip")) cfg.clip = j.at("clip").get<bool>();
    if (j.contains("probes")) {
        cfg.probes.clear();
        for (const auto& pj : j.at("probes")) {
            if (!pj.is_array() || pj.size() != 3)
                throw ConfigError("probe points must be [x, y, z] triples");
            cfg.probes.push_back(
                {pj[0].get<double>(), pj[1].get<double>(), pj[2].get<double>()});
        }
    }
}

}  // namespace afc
