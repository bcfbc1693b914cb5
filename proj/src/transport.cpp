#include "afc/transport.hpp"

#include <cmath>
#include <functional>

#include "afc/errors.hpp"
#include "afc/harness.hpp"
#include "afc/simd/kernels.hpp"

namespace afc {

Scheme parse_scheme(const std::string& s) {
    if (s == "cn-zal-nonlinear" || s == "cn-zal") return Scheme::CnZalNonlinear;
    if (s == "cn-zal-linear") return Scheme::CnZalLinear;
    if (s == "ssp2-zal" || s == "ssp2") return Scheme::Ssp2Zal;
    if (s == "cn-mc") return Scheme::CnMc;
    if (s == "ssp2-mc") return Scheme::Ssp2Mc;
    if (s == "steady-mc") return Scheme::SteadyMc;
    if (s == "steady-mu") return Scheme::SteadyMu;
    if (s == "steady-lp") return Scheme::SteadyLp;
    throw ConfigError("unknown scheme: " + s);
}

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::CnZalNonlinear: return "cn-zal-nonlinear";
        case Scheme::CnZalLinear: return "cn-zal-linear";
        case Scheme::Ssp2Zal: return "ssp2-zal";
        case Scheme::CnMc: return "cn-mc";
        case Scheme::Ssp2Mc: return "ssp2-mc";
        case Scheme::SteadyMc: return "steady-mc";
        case Scheme::SteadyMu: return "steady-mu";
        default: return "steady-lp";
    }
}

bool is_transient(Scheme s) {
    return s != Scheme::SteadyMc && s != Scheme::SteadyMu &&
           s != Scheme::SteadyLp;
}

namespace {
bool uses_mc(Scheme s) { return s == Scheme::CnMc || s == Scheme::Ssp2Mc; }
bool is_cn(Scheme s) {
    return s == Scheme::CnZalNonlinear || s == Scheme::CnZalLinear ||
           s == Scheme::CnMc;
}
}  // namespace

TransientSystem::TransientSystem(const Mesh& mesh, const ProblemSpec& spec,
                                 Scheme scheme, const TransientConfig& cfg)
    : mesh_(&mesh), spec_(&spec), scheme_(scheme), cfg_(cfg) {
    if (!is_transient(scheme))
        throw ConfigError("TransientSystem requires a transient scheme");
    if (cfg.dt <= 0.0) throw ConfigError("dt must be positive");

    {
        ScopedTimer t(timers_.assembly);
        bc_ = classify_boundary(mesh, spec, 0.0);
        ops_ = build_operators(mesh, spec, 0.0, cfg.assembly, uses_mc(scheme));
    }
    if (uses_mc(scheme)) {
        low_ = &ops_.low_mc;
        flux_d_ = &ops_.D_conv;
    } else {
        low_ = &ops_.low_full;
        flux_d_ = &ops_.D_full;
    }
    n_dof_ = bc_.count_free();
    clip_ = cfg.clip_negative.value_or(spec.clip_negative && uses_mc(scheme));

    const auto& pat = *ops_.pattern;
    cfl_dt_max_ = std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < pat.n; ++i) {
        if (bc_.is_dirichlet(i)) continue;
        const double a_ii = low_->values[pat.diag[i]];
        if (a_ii > 0.0)
            cfl_dt_max_ = std::min(cfl_dt_max_, ops_.M_L.m[i] / a_ii);
    }

    r_ = EdgeField(ops_.pattern);
    alpha_ = EdgeField(ops_.pattern);
    if (scheme == Scheme::CnMc) r_old_ = EdgeField(ops_.pattern);
    scratch_.resize(pat.n);
    udot_.resize(pat.n);

    // nodal interpolation of the initial condition
    u_.resize(pat.n);
    for (std::int64_t i = 0; i < pat.n; ++i)
        u_[i] = spec.initial ? spec.initial(mesh.nodes[i]) : 0.0;
    refresh_dirichlet_values(bc_, mesh, spec, 0.0);
    apply_dirichlet_rhs(u_, bc_);

    set_dt(cfg.dt);
}

void TransientSystem::set_dt(double dt) {
    dt_ = dt;
    if (!is_cn(scheme_)) return;
    ScopedTimer t(timers_.assembly);
    cn_matrix_ = SparseMatrix(ops_.pattern);
    const auto& pat = *ops_.pattern;
    for (std::int64_t i = 0; i < pat.n; ++i) {
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k)
            cn_matrix_.values[k] = 0.5 * low_->values[k];
        cn_matrix_.values[pat.diag[i]] += ops_.M_L.m[i] / dt_;
    }
    apply_dirichlet_rows(cn_matrix_, bc_);
    prep_.emplace(cn_matrix_, cfg_.linear);
}

void TransientSystem::low_order_predictor_cn(const std::vector<double>& u_old,
                                             std::vector<double>& u_tilde) const {
    const std::int64_t n = ops_.pattern->n;
    u_tilde.resize(n);
    low_->mv(u_old.data(), u_tilde.data());  // A u
    for (std::int64_t i = 0; i < n; ++i)
        u_tilde[i] = u_old[i] - 0.5 * dt_ / ops_.M_L.m[i] *
                                    (u_tilde[i] - ops_.F[i]);
    for (std::int64_t i = 0; i < n; ++i)
        if (bc_.is_dirichlet(i)) u_tilde[i] = bc_.value[i];
}

void TransientSystem::cn_flux(const std::vector<double>& u_cur,
                              const std::vector<double>& u_old,
                              EdgeField& r) const {
    const auto& pat = *ops_.pattern;
    const auto& m = ops_.M_C.values;
    const auto& d = flux_d_->values;
    for (std::int64_t i = 0; i < pat.n; ++i)
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k) {
            const std::int32_t j = pat.cols[k];
            if (j == i) {
                r.v[k] = 0.0;
                continue;
            }
            r.v[k] = m[k] / dt_ *
                         ((u_cur[i] - u_old[i]) - (u_cur[j] - u_old[j])) +
                     0.5 * d[k] *
                         ((u_cur[j] + u_old[j]) - (u_cur[i] + u_old[i]));
        }
}

void TransientSystem::ssp_flux(const std::vector<double>& u,
                               const std::vector<double>& udot,
                               EdgeField& r) const {
    const auto& pat = *ops_.pattern;
    const auto& m = ops_.M_C.values;
    const auto& d = flux_d_->values;
    for (std::int64_t i = 0; i < pat.n; ++i)
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k) {
            const std::int32_t j = pat.cols[k];
            if (j == i) {
                r.v[k] = 0.0;
                continue;
            }
            r.v[k] = m[k] * (udot[i] - udot[j]) + d[k] * (u[j] - u[i]);
        }
}

void TransientSystem::correction_zalesak(const std::vector<double>& u_cur,
                                         const std::vector<double>& u_old,
                                         const std::vector<double>& u_tilde,
                                         std::vector<double>& f_star) {
    ScopedTimer t(timers_.limiting);
    cn_flux(u_cur, u_old, r_);
    f_star.resize(ops_.pattern->n);
    if (cfg_.alpha_override >= 0) {
        std::fill(alpha_.v.begin(), alpha_.v.end(),
                  double(cfg_.alpha_override));
        assemble_correction(alpha_, r_, bc_, f_star.data());
        return;
    }
    prelimit_minmod(r_, u_tilde.data(), *flux_d_, cfg_.prelimit_L);
    zalesak(r_, u_tilde.data(), ops_.M_L, dt_, bc_, alpha_);
    assemble_correction(alpha_, r_, bc_, f_star.data());
}

void TransientSystem::correction_mc(const std::vector<double>& u,
                                    std::vector<double>& f_star) {
    ScopedTimer t(timers_.limiting);
    const std::int64_t n = ops_.pattern->n;
    low_->mv(u.data(), udot_.data());
    for (std::int64_t i = 0; i < n; ++i)
        udot_[i] = (ops_.F[i] - udot_[i]) / ops_.M_L.m[i];
    ssp_flux(u, udot_, r_);
    f_star.resize(n);
    if (cfg_.alpha_override >= 0) {
        std::fill(alpha_.v.begin(), alpha_.v.end(),
                  double(cfg_.alpha_override));
        assemble_correction(alpha_, r_, bc_, f_star.data());
        return;
    }
    const LocalBounds bounds = compute_local_bounds(u.data(), *ops_.pattern);
    mc_limit(r_, u.data(), bounds, ops_.A_conv, ops_.D_conv, alpha_);
    assemble_correction(alpha_, bc_, f_star.data());
}

int TransientSystem::solve_fixed_point(const std::vector<double>& rhs0,
                                       std::vector<double>& u,
                                       const std::vector<double>& u_old,
                                       const std::vector<double>& u_tilde,
                                       StepRecord& rec) {
    const std::int64_t n = ops_.pattern->n;
    const FixedPointConfig& fp = cfg_.nonlinear;
    const double target = std::sqrt(double(n_dof_)) * fp.tol;

    std::vector<double> f_star_old_level;  // MC: fluxes at the old time level
    std::function<void(const std::vector<double>&, std::vector<double>&)> corr;
    if (scheme_ == Scheme::CnMc) {
        correction_mc(u_old, f_star_old_level);
        corr = [&](const std::vector<double>& v, std::vector<double>& f) {
            correction_mc(v, f);
            simd::waxpby(f.data(), 0.5, f_star_old_level.data(), 0.5, f.data(),
                         n);
        };
    } else {
        corr = [&](const std::vector<double>& v, std::vector<double>& f) {
            correction_zalesak(v, u_old, u_tilde, f);
        };
    }

    auto residual = [&](const std::vector<double>& v,
                        const std::vector<double>& f) {
        cn_matrix_.mv(v.data(), scratch_.data());
        double s = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            if (bc_.is_dirichlet(i)) continue;
            const double ri = scratch_[i] - rhs0[i] - f[i];
            s += ri * ri;
        }
        return std::sqrt(s);
    };

    std::vector<double> f_star, f_star_new, u_new(n), rhs(n);
    corr(u, f_star);
    double R_old = residual(u, f_star);
    std::vector<double> history{R_old};
    double omega = fp.omega0;
    std::int64_t rejects_in_row = 0;
    int iters = 0;

    while (R_old >= target) {
        if (iters >= fp.max_iter) {
            if (fp.error_on_max_iter)
                throw SolveError(
                    "nonlinear step did not converge (residual " +
                        std::to_string(R_old) + ", step " +
                        std::to_string(step_index_ + 1) + ")",
                    history);
            break;
        }
        simd::copy(rhs0.data(), rhs.data(), n);
        simd::axpy(omega, f_star.data(), rhs.data(), n);
        simd::copy(u.data(), u_new.data(), n);
        {
            ScopedTimer t(timers_.linear_solve);
            const SolveInfo info = prep_->solve(rhs.data(), u_new.data());
            rec.linear_iterations += info.iterations;
        }
        ++iters;
        corr(u_new, f_star_new);
        const double R_new = residual(u_new, f_star_new);
        history.push_back(R_new);

        if (!(R_new <= R_old * (1.0 + 1e-12)) &&
            rejects_in_row < fp.forced_accept_after) {
            omega = std::max(omega * fp.omega_decrease, fp.omega_floor);
            ++rejects_in_row;
            continue;
        }
        rejects_in_row = 0;
        u.swap(u_new);
        f_star.swap(f_star_new);
        R_old = R_new;
        omega = std::min(1.0, omega * fp.omega_increase);
    }
    rec.residual = R_old;
    rec.omega = omega;
    return iters;
}

namespace {

// rhs of the CN step: [M_L/dt - A/2] u_old + (F^n + F^{n-1}) / 2
void cn_rhs(const OperatorSet& ops, const SparseMatrix& low, double dt,
            const std::vector<double>& u_old, std::vector<double>& rhs) {
    const std::int64_t n = ops.pattern->n;
    rhs.resize(n);
    low.mv(u_old.data(), rhs.data());
    for (std::int64_t i = 0; i < n; ++i)
        rhs[i] = ops.M_L.m[i] / dt * u_old[i] - 0.5 * rhs[i] + ops.F[i];
}

}  // namespace

StepRecord TransientSystem::step_cn_fct_nonlinear() {
    StepRecord rec;
    const std::vector<double> u_old = u_;
    std::vector<double> u_tilde;

    refresh_dirichlet_values(bc_, *mesh_, *spec_, t_ + 0.5 * dt_);
    low_order_predictor_cn(u_old, u_tilde);

    std::vector<double> rhs0;
    cn_rhs(ops_, *low_, dt_, u_old, rhs0);
    refresh_dirichlet_values(bc_, *mesh_, *spec_, t_ + dt_);
    apply_dirichlet_rhs(rhs0, bc_);

    // initial iterate 2*u_tilde - u_old
    simd::waxpby(u_.data(), 2.0, u_tilde.data(), -1.0, u_old.data(),
                 ops_.pattern->n);
    apply_dirichlet_rhs(u_, bc_);

    rec.nonlinear_iterations = solve_fixed_point(rhs0, u_, u_old, u_tilde, rec);
    t_ += dt_;
    return rec;
}

StepRecord TransientSystem::step_cn_fct_linear() {
    StepRecord rec;
    const std::vector<double> u_old = u_;
    const std::int64_t n = ops_.pattern->n;
    std::vector<double> u_tilde;

    refresh_dirichlet_values(bc_, *mesh_, *spec_, t_ + 0.5 * dt_);
    low_order_predictor_cn(u_old, u_tilde);

    std::vector<double> rhs0;
    cn_rhs(ops_, *low_, dt_, u_old, rhs0);
    refresh_dirichlet_values(bc_, *mesh_, *spec_, t_ + dt_);
    apply_dirichlet_rhs(rhs0, bc_);

    std::vector<double> u_approx(n);
    simd::waxpby(u_approx.data(), 2.0, u_tilde.data(), -1.0, u_old.data(), n);
    apply_dirichlet_rhs(u_approx, bc_);

    std::vector<double> f_star;
    correction_zalesak(u_approx, u_old, u_tilde, f_star);
    simd::axpy(1.0, f_star.data(), rhs0.data(), n);

    u_ = u_approx;
    {
        ScopedTimer t(timers_.linear_solve);
        const SolveInfo info = prep_->solve(rhs0.data(), u_.data());
        rec.linear_iterations = info.iterations;
        rec.residual = info.residual;
    }
    rec.nonlinear_iterations = 1;
    t_ += dt_;
    return rec;
}

StepRecord TransientSystem::step_ssp2() {
    StepRecord rec;
    const std::int64_t n = ops_.pattern->n;
    const std::vector<double> u0 = u_;
    std::vector<double> stage = u_, u_tilde(n), f_star(n);

    for (int s = 1; s <= 2; ++s) {
        const double t_target = t_ + double(s) * dt_;
        refresh_dirichlet_values(bc_, *mesh_, *spec_, t_target);

        {
            ScopedTimer t(timers_.limiting);
            low_->mv(stage.data(), udot_.data());
            for (std::int64_t i = 0; i < n; ++i)
                udot_[i] = (ops_.F[i] - udot_[i]) / ops_.M_L.m[i];
        }
        // low-order predictor of the stage
        for (std::int64_t i = 0; i < n; ++i)
            u_tilde[i] = stage[i] + dt_ * udot_[i];
        apply_dirichlet_rhs(u_tilde, bc_);

        {
            ScopedTimer t(timers_.limiting);
            ssp_flux(stage, udot_, r_);
            if (cfg_.alpha_override >= 0) {
                std::fill(alpha_.v.begin(), alpha_.v.end(),
                          double(cfg_.alpha_override));
                assemble_correction(alpha_, r_, bc_, f_star.data());
            } else if (scheme_ == Scheme::Ssp2Zal) {
                zalesak(r_, u_tilde.data(), ops_.M_L, dt_, bc_, alpha_);
                assemble_correction(alpha_, r_, bc_, f_star.data());
            } else {
                const LocalBounds bounds =
                    compute_local_bounds(stage.data(), *ops_.pattern);
                mc_limit(r_, stage.data(), bounds, ops_.A_conv, ops_.D_conv,
                         alpha_);
                assemble_correction(alpha_, bc_, f_star.data());
            }
        }
        for (std::int64_t i = 0; i < n; ++i)
            stage[i] = u_tilde[i] + dt_ / ops_.M_L.m[i] * f_star[i];
        apply_dirichlet_rhs(stage, bc_);
    }

    refresh_dirichlet_values(bc_, *mesh_, *spec_, t_ + dt_);
    simd::waxpby(u_.data(), 0.5, u0.data(), 0.5, stage.data(), n);
    apply_dirichlet_rhs(u_, bc_);
    rec.nonlinear_iterations = 0;
    t_ += dt_;
    return rec;
}

StepRecord TransientSystem::step_cn_mc() {
    StepRecord rec;
    const std::vector<double> u_old = u_;

    std::vector<double> rhs0;
    cn_rhs(ops_, *low_, dt_, u_old, rhs0);
    refresh_dirichlet_values(bc_, *mesh_, *spec_, t_ + dt_);
    apply_dirichlet_rhs(rhs0, bc_);
    apply_dirichlet_rhs(u_, bc_);

    rec.nonlinear_iterations = solve_fixed_point(rhs0, u_, u_old, u_old, rec);
    t_ += dt_;
    return rec;
}

StepRecord TransientSystem::step() {
    StepRecord rec;
    switch (scheme_) {
        case Scheme::CnZalNonlinear: rec = step_cn_fct_nonlinear(); break;
        case Scheme::CnZalLinear: rec = step_cn_fct_linear(); break;
        case Scheme::Ssp2Zal:
        case Scheme::Ssp2Mc: rec = step_ssp2(); break;
        case Scheme::CnMc: rec = step_cn_mc(); break;
        default: throw ConfigError("not a transient scheme");
    }
    if (clip_) simd::clamp_floor(u_.data(), 0.0, u_.size());
    rec.step = ++step_index_;
    rec.t = t_;
    double lo, hi;
    simd::minmax(u_.data(), u_.size(), lo, hi);
    rec.u_min = lo;
    rec.u_max = hi;
    return rec;
}

TransientResult run_transient(const ProblemSpec& spec, Scheme scheme, int level,
                              const TransientConfig& cfg) {
    const Mesh mesh = spec.make_mesh(level);
    return run_transient(mesh, spec, scheme, cfg);
}

TransientResult run_transient(const Mesh& mesh, const ProblemSpec& spec,
                              Scheme scheme, const TransientConfig& cfg) {
    const auto wall0 = std::chrono::steady_clock::now();
    TransientResult out;
    RunReport& rep = out.report;
    rep.problem = spec.name;
    rep.scheme = to_string(scheme);
    rep.level = mesh.level;
    rep.dt = cfg.dt;
    rep.T = cfg.T;
    rep.n_nodes = mesh.n_nodes();
    rep.n_cells = mesh.n_cells();

    TransientSystem sys(mesh, spec, scheme, cfg);
    rep.n_dof = sys.n_dof();
    rep.cfl_dt_max = sys.cfl_dt_max();

    std::vector<ProbeLocation> probes;
    for (const auto& p : cfg.probes) probes.push_back(locate_point(mesh, p));

    auto probe_values = [&](StepRecord& rec) {
        for (const auto& loc : probes)
            rec.probes.push_back(loc.eval(sys.solution()));
    };

    {
        StepRecord init;
        init.step = 0;
        init.t = 0.0;
        double lo, hi;
        simd::minmax(sys.solution().data(), sys.solution().size(), lo, hi);
        init.u_min = lo;
        init.u_max = hi;
        probe_values(init);
        rep.track_bounds(lo, hi);
        rep.steps.push_back(std::move(init));
    }

    const double eps_t = 1e-12 * std::max(1.0, cfg.T);
    while (sys.time() < cfg.T - eps_t) {
        const double dt_step = std::min(cfg.dt, cfg.T - sys.time());
        if (std::abs(dt_step - cfg.dt) > 1e-15 * cfg.dt &&
            dt_step < cfg.dt * (1.0 - 1e-12))
            sys.set_dt(dt_step);
        StepRecord rec = sys.step();
        rep.total_linear_iterations += rec.linear_iterations;
        rep.total_nonlinear_iterations += rec.nonlinear_iterations;
        rep.track_bounds(rec.u_min, rec.u_max);
        if (rec.step % cfg.probe_stride == 0) probe_values(rec);
        rep.steps.push_back(std::move(rec));
    }

    if (spec.exact_solution) {
        const auto [l1, l2] =
            error_norms(sys.solution(), spec.exact_solution, mesh);
        rep.l1_error = l1;
        rep.l2_error = l2;
    }
    rep.timers = sys.timers();
    rep.total_wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0)
            .count();
    out.u = sys.solution();
    return out;
}

}  // namespace afc
