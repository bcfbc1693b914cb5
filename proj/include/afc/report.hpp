#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace afc {

struct PhaseTimers {
    double assembly = 0.0;
    double limiting = 0.0;
    double linear_solve = 0.0;

    double sum() const { return assembly + limiting + linear_solve; }
};

// Accumulates seconds into a phase while alive.
class ScopedTimer {
public:
    explicit ScopedTimer(double& acc)
        : acc_(acc), t0_(std::chrono::steady_clock::now()) {}
    ~ScopedTimer() {
        acc_ += std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0_)
                    .count();
    }

private:
    double& acc_;
    std::chrono::steady_clock::time_point t0_;
};

struct StepRecord {
    std::int64_t step = 0;
    double t = 0.0;
    int nonlinear_iterations = 0;
    std::int64_t linear_iterations = 0;
    double residual = 0.0;
    double omega = 1.0;
    double u_min = 0.0, u_max = 0.0;
    std::vector<double> probes;
};

struct RunReport {
    std::string problem, scheme;
    int level = 0;
    double dt = 0.0, T = 0.0;
    std::int64_t n_nodes = 0, n_cells = 0, n_dof = 0;

    std::vector<StepRecord> steps;  // transient: per step; steady: per iteration
    PhaseTimers timers;
    double total_wall = 0.0;

    double u_min_global = std::numeric_limits<double>::infinity();
    double u_max_global = -std::numeric_limits<double>::infinity();
    std::int64_t total_linear_iterations = 0;
    std::int64_t total_nonlinear_iterations = 0;

    double l1_error = std::numeric_limits<double>::quiet_NaN();
    double l2_error = std::numeric_limits<double>::quiet_NaN();
    double cfl_dt_max = std::numeric_limits<double>::quiet_NaN();

    void track_bounds(double lo, double hi) {
        u_min_global = lo < u_min_global ? lo : u_min_global;
        u_max_global = hi > u_max_global ? hi : u_max_global;
    }
};

// One row per step/iteration; stable, versioned header.
void write_csv_report(const RunReport& report, const std::string& path);

}  // namespace afc
