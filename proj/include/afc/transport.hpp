#pragma once

#include <optional>
#include <vector>

#include "afc/assembly.hpp"
#include "afc/limiters.hpp"
#include "afc/linsolve.hpp"
#include "afc/report.hpp"
#include "afc/steady.hpp"

namespace afc {

enum class Scheme {
    CnZalNonlinear,
    CnZalLinear,
    Ssp2Zal,
    CnMc,
    Ssp2Mc,
    SteadyMc,
    SteadyMu,
    SteadyLp,
};

Scheme parse_scheme(const std::string& s);
std::string to_string(Scheme s);
bool is_transient(Scheme s);

struct TransientConfig {
    double dt = 1e-3;
    double T = 1.0;
    FixedPointConfig nonlinear;
    LinearSolverConfig linear;
    AssemblyOptions assembly;
    double prelimit_L = 2.0;
    // -1: limit normally; 0/1: force alpha (consistency checks)
    int alpha_override = -1;
    std::optional<bool> clip_negative;  // default: problem's setting
    std::vector<Vec3> probes;
    int probe_stride = 1;
};

// Time integration state and the per-step schemes. The operators and the
// prepared Crank-Nicolson matrix are built once and reused by every step.
class TransientSystem {
public:
    TransientSystem(const Mesh& mesh, const ProblemSpec& spec, Scheme scheme,
                    const TransientConfig& cfg);

    // advance state from t to t+dt; returns the per-step record
    StepRecord step();

    const std::vector<double>& solution() const { return u_; }
    double time() const { return t_; }
    const Mesh& mesh() const { return *mesh_; }
    const BoundaryClassification& boundary() const { return bc_; }
    const OperatorSet& operators() const { return ops_; }
    std::int64_t n_dof() const { return n_dof_; }
    PhaseTimers& timers() { return timers_; }
    double cfl_dt_max() const { return cfl_dt_max_; }

    void set_dt(double dt);  // re-prepares the CN matrix (shortened last step)

private:
    // scheme building blocks
    void low_order_predictor_cn(const std::vector<double>& u_old,
                                std::vector<double>& u_tilde) const;
    void cn_flux(const std::vector<double>& u_cur,
                 const std::vector<double>& u_old, EdgeField& r) const;
    void ssp_flux(const std::vector<double>& u, const std::vector<double>& udot,
                  EdgeField& r) const;
    void correction_zalesak(const std::vector<double>& u_cur,
                            const std::vector<double>& u_old,
                            const std::vector<double>& u_tilde,
                            std::vector<double>& f_star);
    void correction_mc(const std::vector<double>& u,
                       std::vector<double>& f_star);

    StepRecord step_cn_fct_nonlinear();
    StepRecord step_cn_fct_linear();
    StepRecord step_ssp2();
    StepRecord step_cn_mc();

    int solve_fixed_point(const std::vector<double>& rhs0,
                          std::vector<double>& u,
                          const std::vector<double>& u_old,
                          const std::vector<double>& u_tilde,
                          StepRecord& rec);

    const Mesh* mesh_;
    const ProblemSpec* spec_;
    Scheme scheme_;
    TransientConfig cfg_;
    BoundaryClassification bc_;
    OperatorSet ops_;
    const SparseMatrix* low_;     // low-order operator of the stepped system
    const SparseMatrix* flux_d_;  // artificial diffusion used in the fluxes
    SparseMatrix cn_matrix_;      // (1/dt) M_L + 0.5 A, Dirichlet rows identity
    std::optional<PreparedOperator> prep_;
    std::vector<double> u_;
    double t_ = 0.0;
    double dt_ = 0.0;
    std::int64_t step_index_ = 0;
    std::int64_t n_dof_ = 0;
    double cfl_dt_max_ = 0.0;
    bool clip_ = false;
    EdgeField r_, alpha_, r_old_;
    PhaseTimers timers_;
    std::vector<double> scratch_, udot_;
};

struct TransientResult {
    std::vector<double> u;
    RunReport report;
};

// Steps from 0 to T (the final step is shortened to land on T exactly) and
// records residuals, iteration counts, probe values and solution bounds.
TransientResult run_transient(const ProblemSpec& spec, Scheme scheme, int level,
                              const TransientConfig& cfg);
TransientResult run_transient(const Mesh& mesh, const ProblemSpec& spec,
                              Scheme scheme, const TransientConfig& cfg);

}  // namespace afc
