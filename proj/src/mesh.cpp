#include "afc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "afc/errors.hpp"

namespace afc {

namespace {

double tet_signed_volume(const Vec3& a, const Vec3& b, const Vec3& c,
                         const Vec3& d) {
    return dot(b - a, cross(c - a, d - a)) / 6.0;
}

// Pack an undirected vertex pair into one key.
std::int64_t edge_key(std::int32_t a, std::int32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::int64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

struct MidpointCache {
    std::unordered_map<std::int64_t, std::int32_t> edge;
    std::map<std::array<std::int32_t, 4>, std::int32_t> face;

    std::int32_t edge_mid(std::vector<Vec3>& nodes, std::int32_t a,
                          std::int32_t b) {
        const auto key = edge_key(a, b);
        auto it = edge.find(key);
        if (it != edge.end()) return it->second;
        const std::int32_t id = static_cast<std::int32_t>(nodes.size());
        nodes.push_back(0.5 * (nodes[a] + nodes[b]));
        edge.emplace(key, id);
        return id;
    }

    std::int32_t face_mid(std::vector<Vec3>& nodes, std::int32_t a,
                          std::int32_t b, std::int32_t c, std::int32_t d) {
        std::array<std::int32_t, 4> key{a, b, c, d};
        std::sort(key.begin(), key.end());
        auto it = face.find(key);
        if (it != face.end()) return it->second;
        const std::int32_t id = static_cast<std::int32_t>(nodes.size());
        nodes.push_back(0.25 * (nodes[a] + nodes[b] + nodes[c] + nodes[d]));
        face.emplace(key, id);
        return id;
    }
};

// Appends a tet in Bey labeling. A negative orientation is fixed by swapping
// positions 1 and 3, which flips the sign but keeps the refinement diagonal
// pairing {v0,v2} / {v1,v3} intact.
void push_tet(std::vector<std::int32_t>& cells, const std::vector<Vec3>& nodes,
              std::int32_t a, std::int32_t b, std::int32_t c, std::int32_t d) {
    if (tet_signed_volume(nodes[a], nodes[b], nodes[c], nodes[d]) < 0.0)
        std::swap(b, d);
    cells.insert(cells.end(), {a, b, c, d});
}

int box_face_of(const std::vector<Vec3>& nodes, const BoundaryFacet& f,
                const Box& box) {
    constexpr double tol = 1e-12;
    for (int axis = 0; axis < 3; ++axis)
        for (int side = 0; side < 2; ++side) {
            const double plane = side == 0 ? box.lo[axis] : box.hi[axis];
            bool all = true;
            for (int k = 0; k < f.nv; ++k)
                all = all && std::abs(nodes[f.v[k]][axis] - plane) <= tol;
            if (all) return 2 * axis + side;
        }
    return -1;
}

// Boundary facets of a tet mesh: triangle faces owned by exactly one cell.
struct TriKey {
    std::array<std::int32_t, 3> s;
    bool operator<(const TriKey& o) const { return s < o.s; }
};

TriKey tri_key(std::int32_t a, std::int32_t b, std::int32_t c) {
    TriKey k{{a, b, c}};
    std::sort(k.s.begin(), k.s.end());
    return k;
}

}  // namespace

double Mesh::cell_volume(std::int64_t c) const {
    const std::int32_t* v = cell(c);
    if (cell_type == CellType::Tet)
        return tet_signed_volume(nodes[v[0]], nodes[v[1]], nodes[v[2]],
                                 nodes[v[3]]);
    // axis-aligned hex, VTK vertex order
    const Vec3 d = nodes[v[6]] - nodes[v[0]];
    return d[0] * d[1] * d[2];
}

double Mesh::cell_diameter(std::int64_t c) const {
    const std::int32_t* v = cell(c);
    const int nv = verts_per_cell();
    double d2 = 0.0;
    for (int a = 0; a < nv; ++a)
        for (int b = a + 1; b < nv; ++b) {
            const Vec3 e = nodes[v[a]] - nodes[v[b]];
            d2 = std::max(d2, dot(e, e));
        }
    return std::sqrt(d2);
}

double Mesh::total_volume() const {
    // compensated summation; plain accumulation drifts past 1e-12 relative
    // on meshes with millions of cells
    double s = 0.0, comp = 0.0;
    for (std::int64_t c = 0; c < n_cells(); ++c) {
        const double y = cell_volume(c) - comp;
        const double t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    return s;
}

double Mesh::max_diameter() const {
    double d = 0.0;
    for (std::int64_t c = 0; c < n_cells(); ++c)
        d = std::max(d, cell_diameter(c));
    return d;
}

Mesh build_hex_mesh(const Box& box, int level) {
    if (level < 0) throw Error("refinement level must be nonnegative");
    const std::int64_t m = std::int64_t(1) << level;
    const std::int64_t n1 = m + 1;

    Mesh mesh;
    mesh.cell_type = CellType::Hex;
    mesh.level = level;
    mesh.nodes.reserve(n1 * n1 * n1);

    const Vec3 h = {(box.hi[0] - box.lo[0]) / double(m),
                    (box.hi[1] - box.lo[1]) / double(m),
                    (box.hi[2] - box.lo[2]) / double(m)};
    // lexicographic (x,y,z): x slowest, z fastest
    for (std::int64_t i = 0; i <= m; ++i)
        for (std::int64_t j = 0; j <= m; ++j)
            for (std::int64_t k = 0; k <= m; ++k)
                mesh.nodes.push_back({box.lo[0] + double(i) * h[0],
                                      box.lo[1] + double(j) * h[1],
                                      box.lo[2] + double(k) * h[2]});

    auto id = [&](std::int64_t i, std::int64_t j, std::int64_t k) {
        return static_cast<std::int32_t>((i * n1 + j) * n1 + k);
    };

    mesh.cells.reserve(m * m * m * 8);
    for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t j = 0; j < m; ++j)
            for (std::int64_t k = 0; k < m; ++k) {
                // VTK hexahedron order: bottom quad then top quad
                mesh.cells.insert(
                    mesh.cells.end(),
                    {id(i, j, k), id(i + 1, j, k), id(i + 1, j + 1, k),
                     id(i, j + 1, k), id(i, j, k + 1), id(i + 1, j, k + 1),
                     id(i + 1, j + 1, k + 1), id(i, j + 1, k + 1)});
            }

    auto add_quad = [&](std::int32_t a, std::int32_t b, std::int32_t c,
                        std::int32_t d, int tag) {
        mesh.boundary_facets.push_back({{a, b, c, d}, 4, tag});
    };
    for (std::int64_t a = 0; a < m; ++a)
        for (std::int64_t b = 0; b < m; ++b) {
            add_quad(id(0, a, b), id(0, a + 1, b), id(0, a + 1, b + 1),
                     id(0, a, b + 1), 0);
            add_quad(id(m, a, b), id(m, a + 1, b), id(m, a + 1, b + 1),
                     id(m, a, b + 1), 1);
            add_quad(id(a, 0, b), id(a + 1, 0, b), id(a + 1, 0, b + 1),
                     id(a, 0, b + 1), 2);
            add_quad(id(a, m, b), id(a + 1, m, b), id(a + 1, m, b + 1),
                     id(a, m, b + 1), 3);
            add_quad(id(a, b, 0), id(a + 1, b, 0), id(a + 1, b + 1, 0),
                     id(a, b + 1, 0), 4);
            add_quad(id(a, b, m), id(a + 1, b, m), id(a + 1, b + 1, m),
                     id(a, b + 1, m), 5);
        }
    return mesh;
}

Mesh build_tet_mesh(const Box& box, int level) {
    if (level < 0) throw Error("refinement level must be nonnegative");

    Mesh mesh;
    mesh.cell_type = CellType::Tet;
    mesh.level = 0;
    const Vec3 lo = box.lo;
    const Vec3 hi = box.hi;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                mesh.nodes.push_back({i ? hi[0] : lo[0], j ? hi[1] : lo[1],
                                      k ? hi[2] : lo[2]});
    auto corner = [](int i, int j, int k) {
        return static_cast<std::int32_t>(4 * i + 2 * j + k);
    };

    // Kuhn split: one tet per permutation of the axis order along the
    // diagonal from lo to hi. The vertex labeling (p0, p3, p1, p2) of the
    // path (p0, p1, p2, p3) keeps the orientation positive and makes Bey's
    // refinement pick the long octahedron diagonal, matching the reference
    // diameter sequence sqrt(6)/2^level for level >= 1.
    const std::array<std::array<int, 3>, 6> perms = {
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    for (const auto& p : perms) {
        int c[3] = {0, 0, 0};
        const std::int32_t p0 = corner(0, 0, 0);
        c[p[0]] = 1;
        const std::int32_t p1 = corner(c[0], c[1], c[2]);
        c[p[1]] = 1;
        const std::int32_t p2 = corner(c[0], c[1], c[2]);
        const std::int32_t p3 = corner(1, 1, 1);
        push_tet(mesh.cells, mesh.nodes, p0, p3, p1, p2);
    }

    // Boundary triangles: faces used by exactly one tet, tagged by box face.
    std::map<TriKey, int> tri_count;
    static const int faces[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    for (std::int64_t c = 0; c < mesh.n_cells(); ++c) {
        const std::int32_t* v = mesh.cell(c);
        for (const auto& f : faces)
            ++tri_count[tri_key(v[f[0]], v[f[1]], v[f[2]])];
    }
    for (const auto& [key, count] : tri_count)
        if (count == 1) {
            BoundaryFacet f;
            f.v = {key.s[0], key.s[1], key.s[2], -1};
            f.nv = 3;
            f.tag = 0;
            const int face = box_face_of(mesh.nodes, f, box);
            if (face < 0) throw Error("tet boundary facet not on a box face");
            f.tag = face;
            mesh.boundary_facets.push_back(f);
        }

    for (int l = 0; l < level; ++l) mesh = refine_uniform(mesh);
    return mesh;
}

namespace {

// Bey's red refinement: the child vertex orderings below keep the family of
// descendants within at most three similarity classes, so diameters halve
// from one level to the next.
Mesh refine_tet(const Mesh& mesh) {
    Mesh out;
    out.cell_type = CellType::Tet;
    out.level = mesh.level + 1;
    out.nodes = mesh.nodes;
    MidpointCache cache;

    out.cells.reserve(mesh.cells.size() * 8);
    for (std::int64_t c = 0; c < mesh.n_cells(); ++c) {
        const std::int32_t* v = mesh.cell(c);
        const std::int32_t m01 = cache.edge_mid(out.nodes, v[0], v[1]);
        const std::int32_t m02 = cache.edge_mid(out.nodes, v[0], v[2]);
        const std::int32_t m03 = cache.edge_mid(out.nodes, v[0], v[3]);
        const std::int32_t m12 = cache.edge_mid(out.nodes, v[1], v[2]);
        const std::int32_t m13 = cache.edge_mid(out.nodes, v[1], v[3]);
        const std::int32_t m23 = cache.edge_mid(out.nodes, v[2], v[3]);

        const std::int32_t children[8][4] = {
            {v[0], m01, m02, m03}, {m01, v[1], m12, m13},
            {m02, m12, v[2], m23}, {m03, m13, m23, v[3]},
            {m01, m02, m03, m13},  {m01, m02, m12, m13},
            {m02, m03, m13, m23},  {m02, m12, m13, m23},
        };
        for (const auto& ch : children)
            push_tet(out.cells, out.nodes, ch[0], ch[1], ch[2], ch[3]);
    }

    out.boundary_facets.reserve(mesh.boundary_facets.size() * 4);
    for (const auto& f : mesh.boundary_facets) {
        const std::int32_t a = f.v[0], b = f.v[1], c = f.v[2];
        const std::int32_t mab = cache.edge_mid(out.nodes, a, b);
        const std::int32_t mac = cache.edge_mid(out.nodes, a, c);
        const std::int32_t mbc = cache.edge_mid(out.nodes, b, c);
        out.boundary_facets.push_back({{a, mab, mac, -1}, 3, f.tag});
        out.boundary_facets.push_back({{b, mab, mbc, -1}, 3, f.tag});
        out.boundary_facets.push_back({{c, mac, mbc, -1}, 3, f.tag});
        out.boundary_facets.push_back({{mab, mbc, mac, -1}, 3, f.tag});
    }
    return out;
}

Mesh refine_hex(const Mesh& mesh) {
    Mesh out;
    out.cell_type = CellType::Hex;
    out.level = mesh.level + 1;
    out.nodes = mesh.nodes;
    MidpointCache cache;

    // VTK hex numbering mapped onto the 3x3x3 refinement lattice.
    static const int corner_at[2][2][2] = {{{0, 4}, {3, 7}}, {{1, 5}, {2, 6}}};

    out.cells.reserve(mesh.cells.size() * 8);
    for (std::int64_t c = 0; c < mesh.n_cells(); ++c) {
        const std::int32_t* v = mesh.cell(c);
        std::int32_t lat[3][3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    // corners whose lattice coordinates are compatible
                    std::vector<std::int32_t> def;
                    for (int a : (i == 1 ? std::vector<int>{0, 1}
                                         : std::vector<int>{i / 2}))
                        for (int b : (j == 1 ? std::vector<int>{0, 1}
                                             : std::vector<int>{j / 2}))
                            for (int g : (k == 1 ? std::vector<int>{0, 1}
                                                 : std::vector<int>{k / 2}))
                                def.push_back(v[corner_at[a][b][g]]);
                    if (def.size() == 1) {
                        lat[i][j][k] = def[0];
                    } else if (def.size() == 2) {
                        lat[i][j][k] = cache.edge_mid(out.nodes, def[0], def[1]);
                    } else if (def.size() == 4) {
                        lat[i][j][k] = cache.face_mid(out.nodes, def[0], def[1],
                                                      def[2], def[3]);
                    } else {
                        const std::int32_t id =
                            static_cast<std::int32_t>(out.nodes.size());
                        Vec3 ctr = {0, 0, 0};
                        for (auto n : def) ctr = ctr + out.nodes[n];
                        out.nodes.push_back(0.125 * ctr);
                        lat[i][j][k] = id;
                    }
                }
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int g = 0; g < 2; ++g)
                    out.cells.insert(
                        out.cells.end(),
                        {lat[a][b][g], lat[a + 1][b][g], lat[a + 1][b + 1][g],
                         lat[a][b + 1][g], lat[a][b][g + 1], lat[a + 1][b][g + 1],
                         lat[a + 1][b + 1][g + 1], lat[a][b + 1][g + 1]});
    }

    out.boundary_facets.reserve(mesh.boundary_facets.size() * 4);
    for (const auto& f : mesh.boundary_facets) {
        const std::int32_t a = f.v[0], b = f.v[1], c = f.v[2], d = f.v[3];
        const std::int32_t mab = cache.edge_mid(out.nodes, a, b);
        const std::int32_t mbc = cache.edge_mid(out.nodes, b, c);
        const std::int32_t mcd = cache.edge_mid(out.nodes, c, d);
        const std::int32_t mda = cache.edge_mid(out.nodes, d, a);
        const std::int32_t ctr = cache.face_mid(out.nodes, a, b, c, d);
        out.boundary_facets.push_back({{a, mab, ctr, mda}, 4, f.tag});
        out.boundary_facets.push_back({{b, mbc, ctr, mab}, 4, f.tag});
        out.boundary_facets.push_back({{c, mcd, ctr, mbc}, 4, f.tag});
        out.boundary_facets.push_back({{d, mda, ctr, mcd}, 4, f.tag});
    }
    return out;
}

}  // namespace

Mesh refine_uniform(const Mesh& mesh) {
    return mesh.cell_type == CellType::Tet ? refine_tet(mesh) : refine_hex(mesh);
}

void check_mesh(const Mesh& mesh) {
    const int nv = mesh.verts_per_cell();
    const std::int64_t n = mesh.n_nodes();
    for (std::int64_t c = 0; c < mesh.n_cells(); ++c) {
        const std::int32_t* v = mesh.cell(c);
        for (int a = 0; a < nv; ++a) {
            if (v[a] < 0 || v[a] >= n)
                throw Error("cell vertex index out of range");
            for (int b = a + 1; b < nv; ++b)
                if (v[a] == v[b]) throw Error("cell has repeated vertices");
        }
        if (mesh.cell_volume(c) <= 0.0)
            throw Error("cell " + std::to_string(c) + " has nonpositive volume");
    }

    // every boundary facet must be a face of exactly one cell
    std::map<std::array<std::int32_t, 4>, int> face_count;
    auto face_key = [](const std::int32_t* w, int cnt) {
        std::array<std::int32_t, 4> k{-1, -1, -1, -1};
        for (int i = 0; i < cnt; ++i) k[i] = w[i];
        std::sort(k.begin(), k.end());
        return k;
    };
    if (mesh.cell_type == CellType::Tet) {
        static const int faces[4][3] = {
            {0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
        for (std::int64_t c = 0; c < mesh.n_cells(); ++c) {
            const std::int32_t* v = mesh.cell(c);
            for (const auto& f : faces) {
                std::int32_t w[3] = {v[f[0]], v[f[1]], v[f[2]]};
                ++face_count[face_key(w, 3)];
            }
        }
    } else {
        static const int faces[6][4] = {{0, 1, 2, 3}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                        {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
        for (std::int64_t c = 0; c < mesh.n_cells(); ++c) {
            const std::int32_t* v = mesh.cell(c);
            for (const auto& f : faces) {
                std::int32_t w[4] = {v[f[0]], v[f[1]], v[f[2]], v[f[3]]};
                ++face_count[face_key(w, 4)];
            }
        }
    }
    for (const auto& f : mesh.boundary_facets) {
        auto it = face_count.find(face_key(f.v.data(), f.nv));
        if (it == face_count.end() || it->second != 1)
            throw Error("boundary facet does not match exactly one cell face");
    }
}

}  // namespace afc
