#include <cmath>

#include "afc/errors.hpp"
#include "afc/harness.hpp"

namespace afc {

namespace {
constexpr double kInsideTol = 1e-10;
}

ProbeLocation locate_point(const Mesh& mesh, const Vec3& point) {
    ProbeLocation loc;
    if (mesh.cell_type == CellType::Tet) {
        for (std::int64_t c = 0; c < mesh.n_cells(); ++c) {
            const std::int32_t* v = mesh.cell(c);
            const Vec3& p0 = mesh.nodes[v[0]];
            const Vec3 e1 = mesh.nodes[v[1]] - p0;
            const Vec3 e2 = mesh.nodes[v[2]] - p0;
            const Vec3 e3 = mesh.nodes[v[3]] - p0;
            const double det = dot(e1, cross(e2, e3));
            const Vec3 r = point - p0;
            const double l1 = dot(r, cross(e2, e3)) / det;
            const double l2 = dot(e1, cross(r, e3)) / det;
            const double l3 = dot(e1, cross(e2, r)) / det;
            const double l0 = 1.0 - l1 - l2 - l3;
            if (l0 >= -kInsideTol && l1 >= -kInsideTol && l2 >= -kInsideTol &&
                l3 >= -kInsideTol) {
                loc.cell = c;
                loc.n = 4;
                loc.weights = {l0, l1, l2, l3};
                for (int i = 0; i < 4; ++i) loc.nodes[i] = v[i];
                return loc;
            }
        }
    } else {
        for (std::int64_t c = 0; c < mesh.n_cells(); ++c) {
            const std::int32_t* v = mesh.cell(c);
            const Vec3& p0 = mesh.nodes[v[0]];
            const Vec3 h = mesh.nodes[v[6]] - p0;
            const Vec3 r = point - p0;
            const double sx = r[0] / h[0];
            const double sy = r[1] / h[1];
            const double sz = r[2] / h[2];
            if (sx < -kInsideTol || sx > 1 + kInsideTol || sy < -kInsideTol ||
                sy > 1 + kInsideTol || sz < -kInsideTol || sz > 1 + kInsideTol)
                continue;
            static const double ref[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0},
                                             {0, 1, 0}, {0, 0, 1}, {1, 0, 1},
                                             {1, 1, 1}, {0, 1, 1}};
            loc.cell = c;
            loc.n = 8;
            for (int i = 0; i < 8; ++i) {
                const double fx = ref[i][0] > 0.5 ? sx : 1.0 - sx;
                const double fy = ref[i][1] > 0.5 ? sy : 1.0 - sy;
                const double fz = ref[i][2] > 0.5 ? sz : 1.0 - sz;
                loc.weights[i] = fx * fy * fz;
                loc.nodes[i] = v[i];
            }
            return loc;
        }
    }
    throw Error("probe point lies outside the mesh");
}

double probe(const std::vector<double>& u_h, const Mesh& mesh,
             const Vec3& point) {
    return locate_point(mesh, point).eval(u_h);
}

}  // namespace afc
