#include "afc/steady.hpp"

#include <cmath>

#include "afc/errors.hpp"
#include "afc/harness.hpp"
#include "afc/simd/kernels.hpp"

namespace afc {

LimiterKind parse_limiter(const std::string& s) {
    if (s == "zalesak" || s == "zal") return LimiterKind::Zalesak;
    if (s == "mc") return LimiterKind::MC;
    if (s == "mu") return LimiterKind::MU;
    if (s == "lp") return LimiterKind::LP;
    throw ConfigError("unknown limiter: " + s);
}

std::string to_string(LimiterKind k) {
    switch (k) {
        case LimiterKind::Zalesak: return "zalesak";
        case LimiterKind::MC: return "mc";
        case LimiterKind::MU: return "mu";
        default: return "lp";
    }
}

SteadySystem::SteadySystem(const Mesh& mesh, const ProblemSpec& spec,
                           LimiterKind limiter, const AssemblyOptions& opts)
    : mesh_(&mesh), limiter_(limiter) {
    if (limiter == LimiterKind::Zalesak)
        throw ConfigError("Zalesak's limiter has no stationary form; use mc, mu or lp");

    ScopedTimer t(timers_.assembly);
    bc_ = classify_boundary(mesh, spec, 0.0);
    ops_ = build_operators(mesh, spec, 0.0, opts, limiter == LimiterKind::MC);

    switch (limiter) {
        case LimiterKind::MC:
            sys_raw_ = &ops_.low_mc;
            flux_d_ = &ops_.D_conv;
            break;
        case LimiterKind::MU:
            sys_raw_ = &ops_.low_full;
            flux_d_ = &ops_.D_full;
            break;
        default:  // LP
            lp_ = build_lp_operators(ops_.A_full, bc_);
            patch_ = compute_gamma(mesh, lp_.D);
            sys_raw_ = &ops_.low_full;
            flux_d_ = &lp_.D;
            break;
    }

    A_bc_ = *sys_raw_;
    apply_dirichlet_rows(A_bc_, bc_);
    F_bc_ = ops_.F;
    apply_dirichlet_rhs(F_bc_, bc_);
    n_dof_ = bc_.count_free();

    r_ss_ = EdgeField(ops_.pattern);
    alpha_ = EdgeField(ops_.pattern);
}

void SteadySystem::correction(const std::vector<double>& u,
                              std::vector<double>& f_star) {
    ScopedTimer t(timers_.limiting);
    const auto& pat = *ops_.pattern;
    const auto& d = flux_d_->values;
    for (std::int64_t i = 0; i < pat.n; ++i)
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k) {
            const std::int32_t j = pat.cols[k];
            r_ss_.v[k] = j == i ? 0.0 : d[k] * (u[j] - u[i]);
        }

    f_star.resize(pat.n);
    switch (limiter_) {
        case LimiterKind::MC: {
            const LocalBounds bounds = compute_local_bounds(u.data(), pat);
            mc_limit(r_ss_, u.data(), bounds, ops_.A_conv, ops_.D_conv, alpha_);
            assemble_correction(alpha_, bc_, f_star.data());
            break;
        }
        case LimiterKind::MU:
            mu_limit(r_ss_, ops_.A_full, bc_, alpha_);
            assemble_correction(alpha_, r_ss_, bc_, f_star.data());
            break;
        default: {  // LP
            const LocalBounds bounds = compute_local_bounds(u.data(), pat);
            lp_limit(r_ss_, u.data(), bounds, patch_, bc_, alpha_);
            assemble_correction(alpha_, r_ss_, bc_, f_star.data());
            break;
        }
    }
}

double SteadySystem::residual_norm(const std::vector<double>& u,
                                   const std::vector<double>& f_star) const {
    const std::int64_t n = ops_.pattern->n;
    std::vector<double> r(n);
    A_bc_.mv(u.data(), r.data());
    double s = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        if (bc_.is_dirichlet(i)) continue;
        const double ri = r[i] - F_bc_[i] - f_star[i];
        s += ri * ri;
    }
    return std::sqrt(s);
}

SteadyResult solve_steady(SteadySystem& sys, const FixedPointConfig& cfg,
                          const LinearSolverConfig& lin) {
    const std::int64_t n = sys.system_matrix().pattern->n;
    SteadyResult out;
    RunReport& rep = out.report;
    const auto wall0 = std::chrono::steady_clock::now();

    rep.n_nodes = n;
    rep.n_cells = sys.mesh().n_cells();
    rep.n_dof = sys.n_dof();
    rep.level = sys.mesh().level;
    rep.scheme = "steady-" + to_string(sys.limiter());

    PreparedOperator prep = [&] {
        ScopedTimer t(sys.timers().linear_solve);
        return PreparedOperator(sys.system_matrix(), lin);
    }();

    // bound-preserving start: the low-order solution (alpha = 0)
    std::vector<double> u(n, 0.0);
    apply_dirichlet_rhs(u, sys.boundary());
    {
        ScopedTimer t(sys.timers().linear_solve);
        const SolveInfo info = prep.solve(sys.rhs().data(), u.data());
        rep.total_linear_iterations += info.iterations;
    }

    std::vector<double> f_star, u_new(n), f_star_new;
    sys.correction(u, f_star);
    double R_old = sys.residual_norm(u, f_star);
    std::vector<double> history{R_old};

    const double residual_target = std::sqrt(double(sys.n_dof())) * cfg.tol;
    double omega = cfg.omega0;
    std::int64_t rejects_in_row = 0;

    // per-iteration records keep the iterate bounds; the report's global
    // range is set from the accepted final solution below
    auto record = [&](std::int64_t it, double R, double om,
                      std::int64_t lin_it) {
        StepRecord s;
        s.step = it;
        s.residual = R;
        s.omega = om;
        s.linear_iterations = lin_it;
        double lo, hi;
        simd::minmax(u.data(), n, lo, hi);
        s.u_min = lo;
        s.u_max = hi;
        rep.steps.push_back(std::move(s));
    };
    auto finalize_bounds = [&](const std::vector<double>& sol) {
        double lo, hi;
        simd::minmax(sol.data(), n, lo, hi);
        rep.u_min_global = lo;
        rep.u_max_global = hi;
    };
    record(0, R_old, omega, rep.total_linear_iterations);

    if (cfg.stopping == FixedPointConfig::Stopping::Residual &&
        R_old < residual_target) {
        finalize_bounds(u);
        out.u = u;
        rep.timers = sys.timers();
        rep.total_wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          wall0)
                .count();
        return out;
    }

    // R_acc: residual of the accepted state (drives the damping);
    // R_prev: residual of the previous candidate (drives the stagnation rule,
    // which compares successive residuals whether accepted or not)
    double R_acc = R_old;
    double R_prev = R_old;
    for (std::int64_t it = 1; it <= cfg.max_iter; ++it) {
        // rhs = F + omega F*(u)
        std::vector<double> rhs(sys.rhs());
        simd::axpy(omega, f_star.data(), rhs.data(), n);

        u_new = u;
        std::int64_t lin_it = 0;
        {
            ScopedTimer t(sys.timers().linear_solve);
            const SolveInfo info = prep.solve(rhs.data(), u_new.data());
            lin_it = info.iterations;
            rep.total_linear_iterations += info.iterations;
        }
        sys.correction(u_new, f_star_new);
        const double R_new = sys.residual_norm(u_new, f_star_new);
        history.push_back(R_new);
        rep.total_nonlinear_iterations = it;

        bool done = false;
        if (cfg.stopping == FixedPointConfig::Stopping::Residual) {
            done = R_new < residual_target;
        } else {
            double lo, hi;
            simd::minmax(u_new.data(), n, lo, hi);
            done = R_new == 0.0 ||
                   (std::abs(R_new - R_prev) / R_new < cfg.tol2 &&
                    lo >= -1e-16);
        }
        R_prev = R_new;
        if (done) {
            u.swap(u_new);
            record(it, R_new, omega, lin_it);
            finalize_bounds(u);
            out.u = std::move(u);
            rep.timers = sys.timers();
            rep.total_wall = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - wall0)
                                 .count();
            return out;
        }

        const bool reject = !(R_new <= R_acc * (1.0 + 1e-12)) &&
                            rejects_in_row < cfg.forced_accept_after;
        if (reject) {
            omega = std::max(omega * cfg.omega_decrease, cfg.omega_floor);
            ++rejects_in_row;
            record(it, R_new, omega, lin_it);
            continue;
        }
        rejects_in_row = 0;

        u.swap(u_new);
        f_star.swap(f_star_new);
        record(it, R_new, omega, lin_it);
        R_acc = R_new;
        omega = std::min(1.0, omega * cfg.omega_increase);
    }

    if (cfg.error_on_max_iter)
        throw SolveError("fixed-point iteration reached max_iter = " +
                             std::to_string(cfg.max_iter),
                         history);
    finalize_bounds(u);
    out.u = std::move(u);
    rep.timers = sys.timers();
    rep.total_wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0)
            .count();
    return out;
}

SteadyResult solve_steady(const ProblemSpec& spec, LimiterKind limiter,
                          int level, const FixedPointConfig& cfg,
                          const LinearSolverConfig& lin,
                          const AssemblyOptions& opts) {
    const Mesh mesh = spec.make_mesh(level);
    SteadySystem sys(mesh, spec, limiter, opts);
    SteadyResult res = solve_steady(sys, cfg, lin);
    res.report.problem = spec.name;
    if (spec.exact_solution) {
        const auto [l1, l2] = error_norms(res.u, spec.exact_solution, mesh);
        res.report.l1_error = l1;
        res.report.l2_error = l2;
    }
    return res;
}

}  // namespace afc
