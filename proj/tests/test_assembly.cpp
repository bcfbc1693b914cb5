#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "afc/assembly.hpp"
#include "afc/errors.hpp"
#include "afc/mesh.hpp"
#include "afc/problems.hpp"

using namespace afc;

namespace {

ProblemSpec diffusion_spec(double eps) {
    ProblemSpec s;
    s.name = "test-diffusion";
    s.epsilon = eps;
    s.facet_kind = [](const Vec3&, int) {
        return std::optional<BoundaryKind>(BoundaryKind::Dirichlet);
    };
    s.dirichlet_value = [](double, const Vec3&) { return 0.0; };
    return s;
}

ProblemSpec convection_spec() {
    ProblemSpec s = diffusion_spec(0.0);
    s.velocity = [](double, const Vec3& x) {
        return Vec3{0.5 - x[1], x[0] - 0.5, 0.0};  // divergence-free
    };
    return s;
}

std::vector<bool> boundary_nodes(const Mesh& mesh) {
    std::vector<bool> on(mesh.n_nodes(), false);
    for (const auto& f : mesh.boundary_facets)
        for (int k = 0; k < f.nv; ++k) on[f.v[k]] = true;
    return on;
}

Mesh unit_volume_tet() {
    Mesh m;
    m.cell_type = CellType::Tet;
    m.nodes = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 6}};
    m.cells = {0, 1, 2, 3};
    return m;
}

}  // namespace

TEST_CASE("mass matrix: single unit Q1 hex") {
    const Mesh mesh = build_hex_mesh(unit_cube(), 0);
    auto p = build_pattern(mesh);
    const SparseMatrix M = assemble_mass(mesh, p);
    // row sums are integrals of the basis functions
    for (std::int32_t i = 0; i < 8; ++i) {
        double s = 0;
        for (std::int64_t k = p->row_offsets[i]; k < p->row_offsets[i + 1]; ++k)
            s += M.values[k];
        CHECK(s == doctest::Approx(0.125).epsilon(1e-14));
    }
    const LumpedMass lumped = lump_mass(M);
    for (double m : lumped.m) CHECK(m == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("mass matrix: single unit-volume P1 tet") {
    const Mesh mesh = unit_volume_tet();
    const double vol = mesh.cell_volume(0);
    REQUIRE(vol == doctest::Approx(1.0));
    auto p = build_pattern(mesh);
    const SparseMatrix M = assemble_mass(mesh, p);
    for (std::int32_t i = 0; i < 4; ++i)
        for (std::int32_t j = 0; j < 4; ++j)
            CHECK(M(i, j) ==
                  doctest::Approx(i == j ? 0.1 : 0.05).epsilon(1e-13));
}

TEST_CASE("mass matrix: entry total equals the domain volume") {
    for (int level : {1, 2}) {
        const Mesh mesh = build_tet_mesh(unit_cube(), level);
        auto p = build_pattern(mesh);
        const SparseMatrix M = assemble_mass(mesh, p);
        double total = 0;
        for (double v : M.values) total += v;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(lump_mass(M).total() == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("lumped mass: interior node of the level-1 hex mesh") {
    const Mesh mesh = build_hex_mesh(unit_cube(), 1);
    auto p = build_pattern(mesh);
    const LumpedMass lumped = lump_mass(assemble_mass(mesh, p));
    // the center node is shared by all 8 cells: 8 * (1/8) * (1/8)
    std::int64_t center = -1;
    for (std::int64_t i = 0; i < mesh.n_nodes(); ++i)
        if (norm(mesh.nodes[i] - Vec3{0.5, 0.5, 0.5}) < 1e-14) center = i;
    REQUIRE(center >= 0);
    CHECK(lumped.m[center] == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("stiffness: pure diffusion has zero row sums") {
    for (auto build : {build_tet_mesh, build_hex_mesh}) {
        const Mesh mesh = build(unit_cube(), 2);
        auto p = build_pattern(mesh);
        const ProblemSpec spec = diffusion_spec(1.0);
        const SparseMatrix A = assemble_stiffness(mesh, spec, 0.0, p);
        for (std::int64_t i = 0; i < p->n; ++i) {
            double s = 0;
            for (std::int64_t k = p->row_offsets[i]; k < p->row_offsets[i + 1];
                 ++k)
                s += A.values[k];
            CHECK(std::abs(s) < 1e-13);
        }
        // symmetric
        for (std::int64_t i = 0; i < p->n; ++i)
            for (std::int64_t k = p->row_offsets[i]; k < p->row_offsets[i + 1];
                 ++k)
                CHECK(A.values[k] ==
                      doctest::Approx(A.values[p->trans[k]]).epsilon(1e-12));
    }
}

TEST_CASE("stiffness: divergence-free convection is skew away from the boundary") {
    const Mesh mesh = build_hex_mesh(unit_cube(), 2);
    auto p = build_pattern(mesh);
    const SparseMatrix A = assemble_stiffness(mesh, convection_spec(), 0.0, p);
    const auto on_boundary = boundary_nodes(mesh);
    for (std::int64_t i = 0; i < p->n; ++i)
        for (std::int64_t k = p->row_offsets[i]; k < p->row_offsets[i + 1]; ++k) {
            const std::int32_t j = p->cols[k];
            if (on_boundary[i] && on_boundary[j]) continue;
            CHECK(std::abs(A.values[k] + A.values[p->trans[k]]) < 1e-14);
        }
}

TEST_CASE("artificial diffusion: forced formula cases") {
    // two nodes coupled two ways
    const std::vector<std::int32_t> cells = {0, 1, 2, 3};
    auto p = SparsityPattern::build(4, cells, 4);
    SparseMatrix A(p);
    auto set = [&](std::int32_t i, std::int32_t j, double v) {
        A.values[p->find(i, j)] = v;
    };
    set(0, 1, 2.0);
    set(1, 0, -3.0);
    set(2, 3, -1.0);
    set(3, 2, -2.0);
    const SparseMatrix D = artificial_diffusion(A);
    CHECK(D(0, 1) == -2.0);
    CHECK(D(1, 0) == -2.0);
    CHECK(D(2, 3) == 0.0);
    CHECK(D(3, 2) == 0.0);
}

TEST_CASE("artificial diffusion: brute force on random structurally symmetric matrices") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> dist(-3, 3);
    const std::vector<std::int32_t> cells = {0, 1, 2, 3, 1, 2, 3, 4};
    auto p = SparsityPattern::build(5, cells, 4);
    for (int trial = 0; trial < 200; ++trial) {
        SparseMatrix A(p);
        for (auto& v : A.values) v = dist(rng);
        const SparseMatrix D = artificial_diffusion(A);

        double dense_a[5][5] = {}, dense_d[5][5] = {};
        bool present[5][5] = {};
        for (std::int32_t i = 0; i < 5; ++i)
            for (std::int64_t k = p->row_offsets[i]; k < p->row_offsets[i + 1];
                 ++k) {
                dense_a[i][p->cols[k]] = A.values[k];
                present[i][p->cols[k]] = true;
            }
        for (int i = 0; i < 5; ++i) {
            double row = 0;
            for (int j = 0; j < 5; ++j) {
                if (i == j || !present[i][j]) continue;
                dense_d[i][j] = -std::max({dense_a[i][j], 0.0, dense_a[j][i]});
                row += dense_d[i][j];
            }
            dense_d[i][i] = -row;
        }
        for (std::int32_t i = 0; i < 5; ++i) {
            double row = 0;
            for (std::int64_t k = p->row_offsets[i]; k < p->row_offsets[i + 1];
                 ++k) {
                CHECK(D.values[k] == dense_d[i][p->cols[k]]);
                row += D.values[k];
                CHECK(D.values[k] == D.values[p->trans[k]]);  // symmetry
                if (p->cols[k] != i) {
                    CHECK(D.values[k] <= 0.0);
                    CHECK(A.values[k] + D.values[k] <= 1e-15);
                }
            }
            CHECK(std::abs(row) < 1e-13);
        }
    }
}

TEST_CASE("low-order operator is an M-matrix candidate on a real problem") {
    const ProblemSpec spec = circular_convection();
    const Mesh mesh = spec.make_mesh(2);
    const OperatorSet ops = build_operators(mesh, spec, 0.0);
    const auto& p = *ops.pattern;
    for (std::int64_t i = 0; i < p.n; ++i)
        for (std::int64_t k = p.row_offsets[i]; k < p.row_offsets[i + 1]; ++k)
            if (p.cols[k] != i) CHECK(ops.low_full.values[k] <= 1e-15);
}

TEST_CASE("rhs assembly") {
    const Mesh mesh = build_hex_mesh(unit_cube(), 2);
    ProblemSpec spec = diffusion_spec(1.0);
    SUBCASE("no source term gives the zero vector") {
        const auto F = assemble_rhs(mesh, spec, 0.0);
        for (double v : F) CHECK(v == 0.0);
    }
    SUBCASE("unit source integrates to the volume") {
        spec.source = [](double, const Vec3&) { return 1.0; };
        const auto F = assemble_rhs(mesh, spec, 0.0);
        double s = 0;
        for (double v : F) s += v;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
    }
    SUBCASE("nonzero Neumann data is rejected") {
        spec.nonzero_neumann = true;
        CHECK_THROWS_AS(assemble_rhs(mesh, spec, 0.0), UnsupportedError);
    }
}

TEST_CASE("Dirichlet rows become identity rows") {
    const Mesh mesh = build_hex_mesh(unit_cube(), 0);
    const ProblemSpec spec = diffusion_spec(1.0);
    auto p = build_pattern(mesh);
    SparseMatrix A = assemble_stiffness(mesh, spec, 0.0, p);
    const BoundaryClassification bc = classify_boundary(mesh, spec, 0.0);
    apply_dirichlet_rows(A, bc);
    // level 0: all 8 nodes are boundary nodes, so the system is the identity
    for (std::int32_t i = 0; i < 8; ++i)
        for (std::int64_t k = p->row_offsets[i]; k < p->row_offsets[i + 1]; ++k)
            CHECK(A.values[k] == (p->cols[k] == i ? 1.0 : 0.0));
}

TEST_CASE("LP operators zero the Dirichlet columns of free rows") {
    const ProblemSpec spec = circular_convection();
    const Mesh mesh = spec.make_mesh(2);
    const BoundaryClassification bc = classify_boundary(mesh, spec, 0.0);
    const OperatorSet ops = build_operators(mesh, spec, 0.0);
    const LpOperators lp = build_lp_operators(ops.A_full, bc);
    const auto& p = *ops.pattern;
    for (std::int64_t i = 0; i < p.n; ++i)
        for (std::int64_t k = p.row_offsets[i]; k < p.row_offsets[i + 1]; ++k) {
            const std::int32_t j = p.cols[k];
            if (!bc.is_dirichlet(i) && bc.is_dirichlet(j) && j != i)
                CHECK(lp.A.values[k] == 0.0);
            else
                CHECK(lp.A.values[k] == ops.A_full.values[k]);
        }
    // D rebuilt from the modified matrix still has zero row sums
    for (std::int64_t i = 0; i < p.n; ++i) {
        double row = 0;
        for (std::int64_t k = p.row_offsets[i]; k < p.row_offsets[i + 1]; ++k)
            row += lp.D.values[k];
        CHECK(std::abs(row) < 1e-13);
    }
}

TEST_CASE("degenerate cells are reported") {
    Mesh mesh = unit_volume_tet();
    std::swap(mesh.cells[2], mesh.cells[3]);  // inverted
    auto p = build_pattern(mesh);
    CHECK_THROWS_AS(assemble_mass(mesh, p), AssemblyError);
}

TEST_CASE("quadrature orders 2 and 3 agree on exactly integrable terms") {
    const Mesh mesh = build_tet_mesh(unit_cube(), 1);
    auto p = build_pattern(mesh);
    const SparseMatrix M2 = assemble_mass(mesh, p, {2});
    const SparseMatrix M3 = assemble_mass(mesh, p, {3});
    for (std::size_t k = 0; k < M2.values.size(); ++k)
        CHECK(M2.values[k] == doctest::Approx(M3.values[k]).epsilon(1e-13));
}

TEST_CASE("row sums of the constrained low-order operator stay nonnegative") {
    const ProblemSpec spec = species_concentration();
    const Mesh mesh = spec.make_mesh(3);
    const BoundaryClassification bc = classify_boundary(mesh, spec, 0.0);
    const OperatorSet ops = build_operators(mesh, spec, 0.0);
    SparseMatrix low = ops.low_full;
    apply_dirichlet_rows(low, bc);
    const auto& p = *ops.pattern;
    for (std::int64_t i = 0; i < p.n; ++i) {
        if (bc.is_dirichlet(i)) continue;
        double s = 0;
        for (std::int64_t k = p.row_offsets[i]; k < p.row_offsets[i + 1]; ++k)
            s += low.values[k];
        CHECK(s >= -1e-12);
    }
}
