#include <cstdio>
#include <map>

#include <CLI11.hpp>

#include "afc/errors.hpp"
#include "afc/harness.hpp"
#include "afc/msh_reader.hpp"
#include "afc/problems.hpp"
#include "afc/report.hpp"
#include "afc/run_config.hpp"
#include "afc/simd/kernels.hpp"
#include "afc/steady.hpp"
#include "afc/transport.hpp"

namespace {

using namespace afc;

void add_common_options(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--problem", cfg.problem,
                    "rotating-shapes | species | nonconstant-convection | "
                    "circular-convection");
    cmd->add_option("--scheme", cfg.scheme,
                    "cn-zal-nonlinear | cn-zal-linear | ssp2-zal | cn-mc | "
                    "ssp2-mc | steady-mc | steady-mu | steady-lp");
    cmd->add_option("--level", cfg.level, "refinement level");
    cmd->add_option("--dt", cfg.dt, "time step");
    cmd->add_option("--T", cfg.T, "final time");
    cmd->add_option("--tol", cfg.tol, "nonlinear tolerance");
    cmd->add_option("--tol2", cfg.tol2, "stagnation tolerance");
    cmd->add_option("--stopping", cfg.stopping, "residual | stagnation");
    cmd->add_option("--max-nonlinear", cfg.max_nonlinear,
                    "nonlinear iteration cap");
    cmd->add_option("--method", cfg.method, "gmres | bicgstab | direct");
    cmd->add_option("--precond", cfg.precond, "none | jacobi | sor | bjacobi");
    cmd->add_option("--atol", cfg.atol, "linear absolute tolerance");
    cmd->add_option("--restart", cfg.restart, "GMRES restart length");
    cmd->add_option("--sor-omega", cfg.sor_omega, "SOR relaxation");
    cmd->add_option("--blocks", cfg.n_blocks, "block-Jacobi blocks");
    cmd->add_option("--max-linear", cfg.max_linear, "linear iteration cap");
    cmd->add_option("--quad-order", cfg.quad_order, "quadrature order (2 or 3)");
    cmd->add_option("--mesh-file", cfg.mesh_file, "external MSH file");
    cmd->add_option("--threads", cfg.threads, "worker threads");
    cmd->add_option("--simd", cfg.simd, "auto | scalar | avx2");
    cmd->add_option("--csv", cfg.csv_path, "step report CSV path");
    cmd->add_option("--vtk", cfg.vtk_path, "final solution VTK path");
    cmd->add_flag_function(
        "--clip,!--no-clip", [&cfg](std::int64_t v) { cfg.clip = v > 0; },
        "clip negative solution values each step");
}

void setup_runtime(const RunConfig& cfg) {
    simd::set_threads(cfg.threads);
    if (cfg.simd == "scalar")
        simd::select_backend(simd::Backend::Scalar);
    else if (cfg.simd == "avx2")
        simd::select_backend(simd::Backend::Avx2);
    else if (cfg.simd != "auto")
        throw ConfigError("unknown simd backend: " + cfg.simd);
}

ProblemSpec make_problem(const RunConfig& cfg) {
    if (cfg.problem == "nonconstant-convection")
        return nonconstant_convection(cfg.mesh_file);
    return problem_by_name(cfg.problem);
}

LimiterKind steady_limiter(Scheme s) {
    return s == Scheme::SteadyMc   ? LimiterKind::MC
           : s == Scheme::SteadyMu ? LimiterKind::MU
                                   : LimiterKind::LP;
}

void print_report(const RunReport& r) {
    std::printf(
        "problem %s, scheme %s, level %d: %lld nodes, %lld cells, %lld dof\n",
        r.problem.c_str(), r.scheme.c_str(), r.level,
        static_cast<long long>(r.n_nodes), static_cast<long long>(r.n_cells),
        static_cast<long long>(r.n_dof));
    if (!r.steps.empty())
        std::printf(
            "steps/iterations: %zu, nonlinear total %lld, linear total %lld\n",
            r.steps.size() - 1,
            static_cast<long long>(r.total_nonlinear_iterations),
            static_cast<long long>(r.total_linear_iterations));
    std::printf("u range: [%.6e, %.6e]\n", r.u_min_global, r.u_max_global);
    if (!std::isnan(r.l1_error))
        std::printf("errors: L1 %.3e, L2 %.3e\n", r.l1_error, r.l2_error);
    if (!std::isnan(r.cfl_dt_max))
        std::printf("explicit bound-preservation step limit: %.3e\n",
                    r.cfl_dt_max);
    std::printf(
        "wall %.2fs (assembly %.2fs, limiting %.2fs, linear solve %.2fs)\n",
        r.total_wall, r.timers.assembly, r.timers.limiting,
        r.timers.linear_solve);
}

int cmd_run(const RunConfig& cfg) {
    setup_runtime(cfg);
    const ProblemSpec spec = make_problem(cfg);
    const Scheme scheme = parse_scheme(cfg.scheme);

    RunReport report;
    std::vector<double> u;
    const Mesh mesh = spec.make_mesh(cfg.level);

    if (is_transient(scheme)) {
        if (!spec.transient)
            throw ConfigError(spec.name + " is a stationary benchmark");
        TransientConfig tc;
        tc.dt = cfg.dt;
        tc.T = cfg.T > 0 ? cfg.T : spec.final_time;
        tc.nonlinear = cfg.nonlinear_config();
        tc.linear = cfg.linear_config();
        tc.assembly.quad_order = cfg.quad_order;
        tc.clip_negative = cfg.clip;
        tc.probes = cfg.probes;
        tc.probe_stride = cfg.probe_stride;
        TransientResult res = run_transient(mesh, spec, scheme, tc);
        report = std::move(res.report);
        u = std::move(res.u);
    } else {
        SteadySystem sys(mesh, spec, steady_limiter(scheme),
                         AssemblyOptions{cfg.quad_order});
        SteadyResult res =
            solve_steady(sys, cfg.nonlinear_config(), cfg.linear_config());
        report = std::move(res.report);
        u = std::move(res.u);
        if (spec.exact_solution) {
            const auto [l1, l2] = error_norms(u, spec.exact_solution, mesh);
            report.l1_error = l1;
            report.l2_error = l2;
        }
    }
    report.problem = spec.name;

    print_report(report);
    if (!cfg.csv_path.empty()) write_csv_report(report, cfg.csv_path);
    if (!cfg.vtk_path.empty()) write_vtk(u, mesh, cfg.vtk_path);
    return 0;
}

int cmd_convergence(const RunConfig& cfg, const std::string& levels_arg,
                    const std::string& limiters_arg) {
    setup_runtime(cfg);
    std::vector<int> levels;
    for (const auto& tok : CLI::detail::split(levels_arg, ','))
        levels.push_back(std::stoi(tok));
    std::vector<LimiterKind> limiters;
    for (const auto& tok : CLI::detail::split(limiters_arg, ','))
        limiters.push_back(parse_limiter(tok));

    const ProblemSpec spec = circular_convection();

    struct Row {
        int level;
        LimiterKind limiter;
        double l1, l2, wall;
        std::int64_t iters;
    };
    std::vector<Row> rows;
    for (int level : levels) {
        const Mesh mesh = spec.make_mesh(level);
        for (LimiterKind lk : limiters) {
            SteadySystem sys(mesh, spec, lk, AssemblyOptions{cfg.quad_order});
            SteadyResult res =
                solve_steady(sys, cfg.nonlinear_config(), cfg.linear_config());
            const auto [l1, l2] = error_norms(res.u, spec.exact_solution, mesh);
            rows.push_back({level, lk, l1, l2, res.report.total_wall,
                            res.report.total_nonlinear_iterations});
            std::printf(
                "level %d, %s: L1 %.2e  L2 %.2e  (%lld iterations, %.1fs)\n",
                level, to_string(lk).c_str(), l1, l2,
                static_cast<long long>(rows.back().iters), rows.back().wall);
            std::fflush(stdout);
        }
    }

    for (const char* norm : {"L1", "L2"}) {
        std::printf("\nerror in %s\nlevel", norm);
        for (LimiterKind lk : limiters)
            std::printf("  %8s", to_string(lk).c_str());
        std::printf("\n");
        for (int level : levels) {
            std::printf("%5d", level);
            for (LimiterKind lk : limiters)
                for (const auto& r : rows)
                    if (r.level == level && r.limiter == lk)
                        std::printf("  %8.2e", norm[1] == '1' ? r.l1 : r.l2);
            std::printf("\n");
        }
    }

    if (!cfg.csv_path.empty()) {
        std::FILE* f = std::fopen(cfg.csv_path.c_str(), "w");
        if (!f) throw Error("cannot open for writing: " + cfg.csv_path);
        std::fprintf(f, "# afc3d convergence table, schema v1\n");
        std::fprintf(f,
                     "level,limiter,l1,l2,nonlinear_iterations,wall_seconds\n");
        for (const auto& r : rows)
            std::fprintf(f, "%d,%s,%.9e,%.9e,%lld,%.3f\n", r.level,
                         to_string(r.limiter).c_str(), r.l1, r.l2,
                         static_cast<long long>(r.iters), r.wall);
        std::fclose(f);
    }
    return 0;
}

int cmd_bench(const RunConfig& cfg) {
    setup_runtime(cfg);
    const ProblemSpec spec = make_problem(cfg);
    const Scheme scheme = parse_scheme(cfg.scheme);
    const Mesh mesh = spec.make_mesh(cfg.level);

    std::FILE* csv = nullptr;
    if (!cfg.csv_path.empty()) {
        csv = std::fopen(cfg.csv_path.c_str(), "w");
        if (!csv) throw Error("cannot open for writing: " + cfg.csv_path);
        std::fprintf(csv, "# afc3d solver bench, schema v1\n");
        std::fprintf(csv,
                     "method,precond,wall_seconds,linear_iterations,status\n");
    }
    for (auto method : {KrylovMethod::Gmres, KrylovMethod::BiCgStab}) {
        for (auto pc : {Preconditioner::Jacobi, Preconditioner::Sor,
                        Preconditioner::BlockJacobi, Preconditioner::None}) {
            LinearSolverConfig lin = cfg.linear_config();
            lin.method = method;
            lin.precond = pc;
            std::string status = "ok";
            double wall = 0.0;
            std::int64_t iters = 0;
            try {
                if (is_transient(scheme)) {
                    TransientConfig tc;
                    tc.dt = cfg.dt;
                    tc.T = cfg.T > 0 ? cfg.T : spec.final_time;
                    tc.nonlinear = cfg.nonlinear_config();
                    tc.linear = lin;
                    tc.clip_negative = cfg.clip;
                    TransientResult res = run_transient(mesh, spec, scheme, tc);
                    wall = res.report.total_wall;
                    iters = res.report.total_linear_iterations;
                } else {
                    SteadySystem sys(mesh, spec, steady_limiter(scheme),
                                     AssemblyOptions{cfg.quad_order});
                    SteadyResult res =
                        solve_steady(sys, cfg.nonlinear_config(), lin);
                    wall = res.report.total_wall;
                    iters = res.report.total_linear_iterations;
                }
            } catch (const Error& err) {
                status = err.what();
            }
            std::printf("%-9s %-8s  %8.2fs  %10lld  %s\n",
                        to_string(method).c_str(), to_string(pc).c_str(), wall,
                        static_cast<long long>(iters), status.c_str());
            std::fflush(stdout);
            if (csv)
                std::fprintf(csv, "%s,%s,%.3f,%lld,%s\n",
                             to_string(method).c_str(), to_string(pc).c_str(),
                             wall, static_cast<long long>(iters),
                             status == "ok" ? "ok" : "failed");
        }
    }
    if (csv) std::fclose(csv);
    return 0;
}

int cmd_mesh_info(const RunConfig& cfg) {
    Mesh mesh;
    if (!cfg.mesh_file.empty()) {
        mesh = load_msh(cfg.mesh_file);
        for (int l = 0; l < std::max(0, cfg.level); ++l)
            mesh = refine_uniform(mesh);
    } else {
        const ProblemSpec spec = make_problem(cfg);
        mesh = spec.make_mesh(std::max(0, cfg.level));
    }
    check_mesh(mesh);
    std::printf("cells: %lld (%s)\n", static_cast<long long>(mesh.n_cells()),
                mesh.cell_type == CellType::Tet ? "tet" : "hex");
    std::printf("nodes: %lld\n", static_cast<long long>(mesh.n_nodes()));
    std::printf("boundary facets: %zu\n", mesh.boundary_facets.size());
    std::printf("total volume: %.12g\n", mesh.total_volume());
    std::printf("max cell diameter: %.6g\n", mesh.max_diameter());
    std::map<int, std::int64_t> tags;
    for (const auto& f : mesh.boundary_facets) ++tags[f.tag];
    for (const auto& [tag, count] : tags)
        std::printf("  facet tag %d: %lld\n", tag,
                    static_cast<long long>(count));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"afc3d: bound-preserving finite element transport solver"};
    app.require_subcommand(0, 1);

    RunConfig cfg;
    std::string config_path;
    std::string levels_arg = "5", limiters_arg = "mc,lp,mu";

    CLI::App* run = app.add_subcommand("run", "run one configured simulation");
    add_common_options(run, cfg, config_path);

    CLI::App* conv = app.add_subcommand(
        "convergence", "error table on the circular-convection benchmark");
    add_common_options(conv, cfg, config_path);
    conv->add_option("--levels", levels_arg, "comma-separated levels");
    conv->add_option("--limiters", limiters_arg, "comma-separated limiters");

    CLI::App* bench = app.add_subcommand(
        "bench", "sweep linear solver and preconditioner combinations");
    add_common_options(bench, cfg, config_path);

    CLI::App* info = app.add_subcommand("mesh-info", "mesh statistics");
    add_common_options(info, cfg, config_path);

    if (argc <= 1) {
        std::puts(app.help().c_str());
        return 2;
    }
    try {
        app.parse(argc, argv);
        if (!config_path.empty()) {
            // precedence: flags > config file > preset; reparse the flags on
            // top of the file values
            RunConfig file_cfg;
            load_run_config(file_cfg, config_path);
            cfg = file_cfg;
            app.clear();
            app.parse(argc, argv);
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    }

    try {
        RunConfig effective = cfg;
        if (conv->parsed()) effective.problem = "circular-convection";
        apply_problem_preset(effective);
        if (run->parsed()) return cmd_run(effective);
        if (conv->parsed())
            return cmd_convergence(effective, levels_arg, limiters_arg);
        if (bench->parsed()) return cmd_bench(effective);
        if (info->parsed()) return cmd_mesh_info(effective);
        std::puts(app.help().c_str());
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
