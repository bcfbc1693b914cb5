#include "afc/report.hpp"

#include <cstdio>

#include "afc/errors.hpp"

namespace afc {

void write_csv_report(const RunReport& report, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("cannot open for writing: " + path);

    std::fprintf(f, "# afc3d step report, schema v1\n");
    std::fprintf(f,
                 "# problem=%s scheme=%s level=%d dt=%.17g T=%.17g n_dof=%lld\n",
                 report.problem.c_str(), report.scheme.c_str(), report.level,
                 report.dt, report.T, static_cast<long long>(report.n_dof));
    std::fprintf(f,
                 "# wall=%.6f assembly=%.6f limiting=%.6f linear_solve=%.6f "
                 "l1=%.9e l2=%.9e min=%.17g max=%.17g\n",
                 report.total_wall, report.timers.assembly,
                 report.timers.limiting, report.timers.linear_solve,
                 report.l1_error, report.l2_error, report.u_min_global,
                 report.u_max_global);
    std::fprintf(f,
                 "step,t,nonlinear_iterations,linear_iterations,residual,omega,"
                 "u_min,u_max");
    std::size_t n_probes = 0;
    for (const auto& s : report.steps)
        n_probes = std::max(n_probes, s.probes.size());
    for (std::size_t p = 0; p < n_probes; ++p)
        std::fprintf(f, ",probe%zu", p);
    std::fprintf(f, "\n");

    for (const auto& s : report.steps) {
        std::fprintf(f, "%lld,%.17g,%d,%lld,%.17g,%.17g,%.17g,%.17g",
                     static_cast<long long>(s.step), s.t,
                     s.nonlinear_iterations,
                     static_cast<long long>(s.linear_iterations), s.residual,
                     s.omega, s.u_min, s.u_max);
        for (std::size_t p = 0; p < n_probes; ++p)
            std::fprintf(f, ",%.17g", p < s.probes.size() ? s.probes[p] : 0.0);
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

}  // namespace afc
