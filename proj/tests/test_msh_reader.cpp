#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "afc/errors.hpp"
#include "afc/msh_reader.hpp"

using namespace afc;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = "/tmp/afc_test_" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

const char* kTinyV22 = R"($MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
5
1 0 0 0
2 1 0 0
3 0 1 0
4 0 0 1
5 1 1 1
$EndNodes
$Elements
4
1 4 2 0 1 1 2 3 4
2 4 2 0 1 2 3 4 5
3 2 2 7 1 1 2 3
4 15 2 0 0 1
$EndElements
)";

const char* kTinyV41 = R"($MeshFormat
4.1 0 8
$EndMeshFormat
$Entities
0 0 1 1
1 0 0 0 1 1 1 1 7 0
1 0 0 0 1 1 1 0 1 1
$EndEntities
$Nodes
2 5 1 5
2 1 0 3
1
2
3
0 0 0
1 0 0
0 1 0
3 1 0 2
4
5
0 0 1
1 1 1
$EndNodes
$Elements
2 3 1 3
2 1 2 1
1 1 2 3
3 1 4 2
2 1 2 3 4
3 2 3 4 5
$EndElements
)";

}  // namespace

TEST_CASE("v2.2: tets, triangles and tags") {
    const auto path = write_temp("v22.msh", kTinyV22);
    const Mesh m = load_msh(path);
    CHECK(m.n_cells() == 2);
    CHECK(m.n_nodes() == 5);
    REQUIRE(m.boundary_facets.size() == 1);
    CHECK(m.boundary_facets[0].tag == 7);
    CHECK(m.cell_volume(0) > 0.0);
    CHECK(m.cell_volume(1) > 0.0);
    std::remove(path.c_str());
}

TEST_CASE("v4.1: entity physical tags propagate to triangles") {
    const auto path = write_temp("v41.msh", kTinyV41);
    const Mesh m = load_msh(path);
    CHECK(m.n_cells() == 2);
    CHECK(m.n_nodes() == 5);
    REQUIRE(m.boundary_facets.size() == 1);
    CHECK(m.boundary_facets[0].tag == 7);
    std::remove(path.c_str());
}

TEST_CASE("hexahedra are rejected") {
    const auto path = write_temp("hex.msh", R"($MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
8
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
5 0 0 1
6 1 0 1
7 1 1 1
8 0 1 1
$EndNodes
$Elements
1
1 5 2 0 1 1 2 3 4 5 6 7 8
$EndElements
)");
    CHECK_THROWS_AS(load_msh(path), UnsupportedError);
    std::remove(path.c_str());
}

TEST_CASE("empty element section is an error") {
    const auto path = write_temp("empty.msh", R"($MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
1
1 0 0 0
$EndNodes
$Elements
0
$EndElements
)");
    CHECK_THROWS_AS(load_msh(path), Error);
    std::remove(path.c_str());
}

TEST_CASE("parse errors carry line numbers") {
    const auto path = write_temp("broken.msh", R"($MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
2
1 0 0 0
2 oops 0 0
$EndNodes
)");
    try {
        load_msh(path);
        FAIL("expected a ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 7);
    }
    std::remove(path.c_str());
}

TEST_CASE("missing file") {
    CHECK_THROWS_AS(load_msh("/nonexistent/afc.msh"), Error);
}

TEST_CASE("bundled channel mesh loads and refines 1:8") {
    const std::string path = std::string(AFC_DATA_DIR) + "/nonconstant_convection.msh";
    const Mesh m = load_msh(path);
    CHECK(m.n_cells() == 426);
    check_mesh(m);

    const Mesh r = refine_uniform(m);
    CHECK(r.n_cells() == 426 * 8);
    check_mesh(r);
    // channel minus block
    const double vol = 5.0 * 2.0 * 2.0 - 0.3 * 0.4 * 0.4;
    CHECK(m.total_volume() == doctest::Approx(vol).epsilon(1e-12));
    CHECK(r.total_volume() == doctest::Approx(vol).epsilon(1e-12));

    int tags[4] = {0, 0, 0, 0};
    for (const auto& f : m.boundary_facets)
        if (f.tag >= 1 && f.tag <= 3) ++tags[f.tag];
    CHECK(tags[1] > 0);  // outer walls
    CHECK(tags[2] > 0);  // block walls
    CHECK(tags[3] > 0);  // outlet
}
