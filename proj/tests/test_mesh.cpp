#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "afc/errors.hpp"
#include "afc/mesh.hpp"

using namespace afc;

namespace {

// canonical form: nodes sorted lexicographically, cells as sorted vertex
// sets of sorted coordinates
struct Canonical {
    std::vector<Vec3> nodes;
    std::vector<std::vector<Vec3>> cells;
};

Canonical canonical(const Mesh& m) {
    Canonical c;
    c.nodes = m.nodes;
    std::sort(c.nodes.begin(), c.nodes.end());
    for (std::int64_t t = 0; t < m.n_cells(); ++t) {
        std::vector<Vec3> verts;
        for (int k = 0; k < m.verts_per_cell(); ++k)
            verts.push_back(m.nodes[m.cell(t)[k]]);
        std::sort(verts.begin(), verts.end());
        c.cells.push_back(std::move(verts));
    }
    std::sort(c.cells.begin(), c.cells.end());
    return c;
}

}  // namespace

TEST_CASE("hex mesh: counts and ordering") {
    const Mesh m0 = build_hex_mesh(unit_cube(), 0);
    CHECK(m0.n_cells() == 1);
    CHECK(m0.n_nodes() == 8);
    check_mesh(m0);

    const Mesh m5 = build_hex_mesh(unit_cube(), 5);
    CHECK(m5.n_cells() == 32768);
    CHECK(m5.n_nodes() == 35937);
    // lexicographic (x, y, z) node order
    CHECK(std::is_sorted(m5.nodes.begin(), m5.nodes.end()));
    CHECK(m5.total_volume() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hex mesh: level 8 edge length") {
    // matches the reference grid of the rotating-shapes study
    const Mesh m = build_hex_mesh(unit_cube(), 8);
    CHECK(m.n_cells() == std::int64_t(1) << 24);
    const Vec3 e = m.nodes[1] - m.nodes[0];
    CHECK(norm(e) == doctest::Approx(std::pow(2.0, -8)).epsilon(1e-14));
}

TEST_CASE("tet mesh: Kuhn split and refinement counts") {
    const Mesh m0 = build_tet_mesh(unit_cube(), 0);
    CHECK(m0.n_cells() == 6);
    CHECK(m0.total_volume() == doctest::Approx(1.0).epsilon(1e-15));
    check_mesh(m0);

    const Mesh m5 = build_tet_mesh(unit_cube(), 5);
    CHECK(m5.n_cells() == 196608);  // 6 * 8^5
    CHECK(m5.total_volume() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tet mesh: reference diameter sequence") {
    // sqrt(6)/2^level from level 1 on
    const Mesh m5 = build_tet_mesh(unit_cube(), 5);
    CHECK(m5.max_diameter() == doctest::Approx(0.0765).epsilon(2e-3));
    CHECK(m5.max_diameter() ==
          doctest::Approx(std::sqrt(6.0) / 32.0).epsilon(1e-13));
}

TEST_CASE("refinement: volume preserved, cells x8, facet tags inherited") {
    Mesh m = build_tet_mesh(unit_cube(), 0);
    const Mesh r = refine_uniform(m);
    CHECK(r.n_cells() == 48);
    CHECK(r.total_volume() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.boundary_facets.size() == m.boundary_facets.size() * 4);
    check_mesh(r);

    std::map<int, int> tags_before, tags_after;
    for (const auto& f : m.boundary_facets) ++tags_before[f.tag];
    for (const auto& f : r.boundary_facets) ++tags_after[f.tag];
    for (const auto& [tag, count] : tags_before)
        CHECK(tags_after[tag] == 4 * count);
}

TEST_CASE("refinement preserves parent node coordinates exactly") {
    const Mesh m = build_tet_mesh(Box{{0.1, -0.2, 0.3}, {1.4, 0.9, 2.0}}, 1);
    const Mesh r = refine_uniform(m);
    for (std::size_t i = 0; i < m.nodes.size(); ++i) CHECK(m.nodes[i] == r.nodes[i]);
}

TEST_CASE("refinement is deterministic") {
    const Mesh a = refine_uniform(build_tet_mesh(unit_cube(), 2));
    const Mesh b = refine_uniform(build_tet_mesh(unit_cube(), 2));
    CHECK(a.nodes == b.nodes);
    CHECK(a.cells == b.cells);
}

TEST_CASE("hex refinement consistent with direct construction") {
    const Mesh direct = build_hex_mesh(unit_cube(), 3);
    const Mesh refined = refine_uniform(build_hex_mesh(unit_cube(), 2));
    CHECK(refined.n_cells() == direct.n_cells());
    CHECK(refined.n_nodes() == direct.n_nodes());
    const Canonical a = canonical(direct), b = canonical(refined);
    CHECK(a.nodes == b.nodes);  // dyadic coordinates are exact
    CHECK(a.cells == b.cells);
    check_mesh(refined);
}

TEST_CASE("refinement of a level-3 structured tet mesh stays valid") {
    const Mesh m = build_tet_mesh(Box{{0, 0, 0}, {2, 1, 1}}, 3);
    CHECK(m.n_cells() == 6 * 8 * 8 * 8);
    CHECK(m.total_volume() == doctest::Approx(2.0).epsilon(1e-12));
    check_mesh(m);
}

TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(build_hex_mesh(unit_cube(), -1), Error);
    CHECK_THROWS_AS(build_tet_mesh(unit_cube(), -2), Error);
}
