#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "afc/errors.hpp"
#include "afc/harness.hpp"
#include "afc/problems.hpp"
#include "afc/report.hpp"
#include "afc/run_config.hpp"

using namespace afc;

namespace {

std::vector<double> interpolate(const Mesh& mesh,
                                const std::function<double(const Vec3&)>& f) {
    std::vector<double> u(mesh.n_nodes());
    for (std::int64_t i = 0; i < mesh.n_nodes(); ++i) u[i] = f(mesh.nodes[i]);
    return u;
}

}  // namespace

TEST_CASE("error norms vanish for exactly representable data") {
    auto affine = [](const Vec3& x) { return 1.0 + 2 * x[0] - x[1] + 0.5 * x[2]; };
    for (int tet = 0; tet <= 1; ++tet) {
        const Mesh mesh = tet ? build_tet_mesh(unit_cube(), 2)
                              : build_hex_mesh(unit_cube(), 2);
        const auto u = interpolate(mesh, affine);
        const auto [l1, l2] = error_norms(u, affine, mesh);
        CHECK(l1 < 1e-13);
        CHECK(l2 < 1e-13);
    }
}

TEST_CASE("constant offset yields unit L1 and L2 norms") {
    auto affine = [](const Vec3& x) { return x[0] - 0.3 * x[2]; };
    auto shifted = [&](const Vec3& x) { return affine(x) + 1.0; };
    const Mesh mesh = build_tet_mesh(unit_cube(), 2);
    const auto u = interpolate(mesh, affine);
    const auto [l1, l2] = error_norms(u, shifted, mesh);
    CHECK(l1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(l2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("probe: nodal values, centroids, and out-of-mesh errors") {
    const Mesh mesh = build_tet_mesh(unit_cube(), 1);
    std::vector<double> u(mesh.n_nodes());
    auto affine = [](const Vec3& x) { return 0.2 + x[0] + 2 * x[1] - x[2]; };
    for (std::int64_t i = 0; i < mesh.n_nodes(); ++i)
        u[i] = affine(mesh.nodes[i]);

    // exact nodal evaluation
    CHECK(probe(u, mesh, mesh.nodes[5]) == u[5]);
    // P1 interpolation is exact for affine data anywhere
    for (const Vec3 x : {Vec3{0.31, 0.47, 0.11}, Vec3{0.9, 0.02, 0.77}})
        CHECK(probe(u, mesh, x) == doctest::Approx(affine(x)).epsilon(1e-13));
    // cell centroid value is the vertex mean
    const std::int32_t* v = mesh.cell(0);
    Vec3 centroid = {0, 0, 0};
    double mean = 0;
    for (int k = 0; k < 4; ++k) {
        centroid = centroid + mesh.nodes[v[k]];
        mean += u[v[k]];
    }
    centroid = 0.25 * centroid;
    mean /= 4;
    CHECK(probe(u, mesh, centroid) == doctest::Approx(mean).epsilon(1e-13));

    CHECK_THROWS_AS(probe(u, mesh, {2.0, 2.0, 2.0}), Error);
}

TEST_CASE("probe: Q1 interpolation on hex meshes") {
    const Mesh mesh = build_hex_mesh(unit_cube(), 2);
    std::vector<double> u(mesh.n_nodes());
    auto trilinear = [](const Vec3& x) { return x[0] * x[1] * x[2]; };
    for (std::int64_t i = 0; i < mesh.n_nodes(); ++i)
        u[i] = trilinear(mesh.nodes[i]);
    // trilinear data is reproduced exactly inside each cell
    CHECK(probe(u, mesh, {0.1, 0.2, 0.3}) ==
          doctest::Approx(0.1 * 0.2 * 0.3).epsilon(1e-13));
}

TEST_CASE("vtk writer: cell counts round-trip") {
    const Mesh mesh = build_hex_mesh(unit_cube(), 0);
    std::vector<double> u(mesh.n_nodes(), 0.0);
    u[3] = -1.5;
    u[6] = 2.5;
    const std::string path = "/tmp/afc_test_out.vtk";
    write_vtk(u, mesh, path);

    std::ifstream in(path);
    REQUIRE(bool(in));
    std::string line;
    std::int64_t points = -1, cells = -1, scalars = 0;
    double umin = 1e300, umax = -1e300;
    bool in_scalars = false;
    while (std::getline(in, line)) {
        std::istringstream ts(line);
        std::string word;
        ts >> word;
        if (word == "POINTS") ts >> points;
        if (word == "CELLS") ts >> cells;
        if (word == "LOOKUP_TABLE") {
            in_scalars = true;
            continue;
        }
        if (in_scalars && !word.empty()) {
            const double v = std::stod(word);
            ++scalars;
            umin = std::min(umin, v);
            umax = std::max(umax, v);
        }
    }
    CHECK(points == 8);
    CHECK(cells == 1);
    CHECK(scalars == 8);
    CHECK(umin == -1.5);
    CHECK(umax == 2.5);
    std::remove(path.c_str());
}

TEST_CASE("csv report: stable schema, one row per step") {
    RunReport rep;
    rep.problem = "species";
    rep.scheme = "cn-zal-linear";
    rep.level = 3;
    rep.n_dof = 100;
    const std::string path = "/tmp/afc_test_report.csv";

    SUBCASE("empty run produces only the header") {
        write_csv_report(rep, path);
        std::ifstream in(path);
        std::string line;
        int rows = 0, comments = 0;
        bool saw_header = false;
        while (std::getline(in, line)) {
            if (line.rfind("#", 0) == 0) {
                ++comments;
                continue;
            }
            if (line.rfind("step,", 0) == 0) {
                saw_header = true;
                continue;
            }
            ++rows;
        }
        CHECK(saw_header);
        CHECK(comments >= 1);
        CHECK(rows == 0);
    }

    SUBCASE("rows match the recorded steps") {
        for (int s = 0; s < 4; ++s) {
            StepRecord rec;
            rec.step = s;
            rec.t = s * 0.1;
            rec.probes = {double(s)};
            rep.steps.push_back(rec);
        }
        write_csv_report(rep, path);
        std::ifstream in(path);
        std::string line;
        int rows = 0;
        std::string header;
        while (std::getline(in, line)) {
            if (line.rfind("#", 0) == 0) continue;
            if (line.rfind("step,", 0) == 0) {
                header = line;
                continue;
            }
            ++rows;
        }
        CHECK(rows == 4);
        CHECK(header ==
              "step,t,nonlinear_iterations,linear_iterations,residual,omega,"
              "u_min,u_max,probe0");
    }
    std::remove(path.c_str());
}

TEST_CASE("run config: file values, flag precedence and presets") {
    const std::string path = "/tmp/afc_test_cfg.json";
    {
        std::ofstream out(path);
        out << R"({"problem": "species", "level": 3, "dt": 0.01,
                   "method": "bicgstab", "precond": "sor",
                   "probes": [[0.5, 0.5, 0.5]]})";
    }
    RunConfig cfg;
    load_run_config(cfg, path);
    CHECK(cfg.problem == "species");
    CHECK(cfg.level == 3);
    CHECK(cfg.dt == 0.01);
    CHECK(cfg.probes.size() == 1);

    apply_problem_preset(cfg);
    CHECK(cfg.level == 3);            // explicit value kept
    CHECK(cfg.tol == 1e-14);          // species preset
    CHECK(cfg.atol == 1e-16);
    CHECK(cfg.linear_config().method == KrylovMethod::BiCgStab);
    CHECK(cfg.linear_config().precond == Preconditioner::Sor);
    CHECK(cfg.nonlinear_config().tol == 1e-14);
    std::remove(path.c_str());

    RunConfig fresh;
    fresh.problem = "circular-convection";
    apply_problem_preset(fresh);
    CHECK(fresh.nonlinear_config().stopping ==
          FixedPointConfig::Stopping::Stagnation);
    CHECK(fresh.tol2 == 1e-6);
    CHECK(fresh.atol == 1e-14);

    CHECK_THROWS_AS(load_run_config(fresh, "/nonexistent.json"), ConfigError);
}
