#pragma once

#include <vector>

#include "afc/assembly.hpp"
#include "afc/limiters.hpp"
#include "afc/linsolve.hpp"
#include "afc/report.hpp"

namespace afc {

enum class LimiterKind { Zalesak, MC, MU, LP };

LimiterKind parse_limiter(const std::string& s);
std::string to_string(LimiterKind k);

struct FixedPointConfig {
    enum class Stopping { Residual, Stagnation };

    double tol = 1e-10;   // residual mode: R < sqrt(#dof) * tol
    double tol2 = 1e-6;   // stagnation mode: |R_new - R_old| / R_new < tol2
    std::int64_t max_iter = 20000;
    Stopping stopping = Stopping::Residual;
    bool error_on_max_iter = true;

    double omega0 = 1.0;
    double omega_decrease = 0.5;
    double omega_increase = 1.1;
    double omega_floor = 0.01;
    // a long rejection burst means the residual cannot decrease monotonically
    // from the accepted state; accept the candidate to break the cycle
    std::int64_t forced_accept_after = 20;
};

// Stationary AFC system: matrix, right-hand side, limiter and flux track,
// assembled once per mesh.
class SteadySystem {
public:
    SteadySystem(const Mesh& mesh, const ProblemSpec& spec, LimiterKind limiter,
                 const AssemblyOptions& opts = {});

    // F*(u): limited antidiffusive correction, zero on Dirichlet rows.
    void correction(const std::vector<double>& u, std::vector<double>& f_star);

    // Euclidean norm of A u - F - F* over non-Dirichlet rows.
    double residual_norm(const std::vector<double>& u,
                         const std::vector<double>& f_star) const;

    const SparseMatrix& system_matrix() const { return A_bc_; }
    const std::vector<double>& rhs() const { return F_bc_; }
    const BoundaryClassification& boundary() const { return bc_; }
    const Mesh& mesh() const { return *mesh_; }
    const OperatorSet& operators() const { return ops_; }
    std::int64_t n_dof() const { return n_dof_; }
    LimiterKind limiter() const { return limiter_; }
    PhaseTimers& timers() { return timers_; }

private:
    const Mesh* mesh_;
    LimiterKind limiter_;
    BoundaryClassification bc_;
    OperatorSet ops_;
    LpOperators lp_;
    PatchConstant patch_;
    SparseMatrix A_bc_;            // constrained copy of the system operator
    const SparseMatrix* sys_raw_;  // unconstrained system operator
    const SparseMatrix* flux_d_;   // artificial diffusion track for r_ss
    std::vector<double> F_bc_;
    std::int64_t n_dof_ = 0;
    EdgeField r_ss_, alpha_;
    PhaseTimers timers_;
};

struct SteadyResult {
    std::vector<double> u;
    RunReport report;
};

// Damped fixed-point iteration A u^{v+1} = F + omega F*(u^v) with the
// prepared operator reused across all iterations.
SteadyResult solve_steady(SteadySystem& system, const FixedPointConfig& cfg,
                          const LinearSolverConfig& lin);

// Convenience entry: builds the mesh at `level` and solves.
SteadyResult solve_steady(const ProblemSpec& spec, LimiterKind limiter,
                          int level, const FixedPointConfig& cfg,
                          const LinearSolverConfig& lin,
                          const AssemblyOptions& opts = {});

}  // namespace afc
