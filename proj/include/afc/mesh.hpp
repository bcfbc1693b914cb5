#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "afc/geometry.hpp"

namespace afc {

enum class CellType { Tet, Hex };

struct BoundaryFacet {
    std::array<std::int32_t, 4> v{};  // cyclic order for quads
    int nv = 3;                       // 3 = triangle, 4 = quad
    int tag = 0;
};

struct Mesh {
    CellType cell_type = CellType::Tet;
    std::vector<Vec3> nodes;
    std::vector<std::int32_t> cells;  // flattened, verts_per_cell() per cell
    std::vector<BoundaryFacet> boundary_facets;
    int level = 0;

    int verts_per_cell() const { return cell_type == CellType::Tet ? 4 : 8; }
    std::int64_t n_nodes() const { return static_cast<std::int64_t>(nodes.size()); }
    std::int64_t n_cells() const {
        return static_cast<std::int64_t>(cells.size()) / verts_per_cell();
    }
    const std::int32_t* cell(std::int64_t c) const {
        return cells.data() + c * verts_per_cell();
    }

    double cell_volume(std::int64_t c) const;
    double cell_diameter(std::int64_t c) const;
    double total_volume() const;
    double max_diameter() const;
};

// Structured hexahedral mesh of a box: (2^level)^3 congruent cells, nodes in
// lexicographic (x,y,z) order. Boundary facets tagged 0..5 for the faces
// x-,x+,y-,y+,z-,z+.
Mesh build_hex_mesh(const Box& box, int level);

// Kuhn 6-tetrahedron split of the box at level 0, then `level` rounds of
// regular 1:8 refinement.
Mesh build_tet_mesh(const Box& box, int level);

// Regular 1:8 refinement (Bey's rule for tetrahedra). Parent node
// coordinates are preserved exactly and boundary tags are inherited by child
// facets.
Mesh refine_uniform(const Mesh& mesh);

// Validates the structural mesh invariants; throws afc::Error on violation.
void check_mesh(const Mesh& mesh);

}  // namespace afc
