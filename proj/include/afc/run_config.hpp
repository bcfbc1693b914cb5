#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "afc/geometry.hpp"
#include "afc/linsolve.hpp"
#include "afc/steady.hpp"

namespace afc {

// One run: problem, scheme, discretization and solver settings. Unset values
// (negative numbers / empty strings) are filled from the benchmark preset, so
// the precedence is: flags > config file > preset > built-in defaults.
struct RunConfig {
    std::string problem = "rotating-shapes";
    std::string scheme;
    int level = -1;
    double dt = -1.0;
    double T = -1.0;

    double tol = -1.0;
    double tol2 = -1.0;
    std::int64_t max_nonlinear = -1;
    std::string stopping;  // residual | stagnation

    std::string method, precond;
    double atol = -1.0;
    int restart = -1;
    double sor_omega = -1.0;
    int n_blocks = -1;
    std::int64_t max_linear = -1;

    int quad_order = 2;
    std::optional<bool> clip;
    std::vector<Vec3> probes;
    int probe_stride = 1;
    std::string csv_path, vtk_path;
    std::string mesh_file;
    int threads = 1;
    std::string simd = "auto";

    FixedPointConfig nonlinear_config() const;
    LinearSolverConfig linear_config() const;
};

// Fills unset fields with the benchmark's tolerances and scales.
void apply_problem_preset(RunConfig& cfg);

// Reads a JSON config file over the current values.
void load_run_config(RunConfig& cfg, const std::string& path);

}  // namespace afc
