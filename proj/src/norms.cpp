#include <cmath>

#include "afc/errors.hpp"
#include "afc/harness.hpp"

namespace afc {

namespace {

// degree-3 rule with positive weights: vertices 1/40, face centroids 9/40
struct TetQp {
    double l[4];
    double w;
};
const TetQp kTetRule[8] = {
    {{1, 0, 0, 0}, 1.0 / 40.0},
    {{0, 1, 0, 0}, 1.0 / 40.0},
    {{0, 0, 1, 0}, 1.0 / 40.0},
    {{0, 0, 0, 1}, 1.0 / 40.0},
    {{1.0 / 3, 1.0 / 3, 1.0 / 3, 0}, 9.0 / 40.0},
    {{1.0 / 3, 1.0 / 3, 0, 1.0 / 3}, 9.0 / 40.0},
    {{1.0 / 3, 0, 1.0 / 3, 1.0 / 3}, 9.0 / 40.0},
    {{0, 1.0 / 3, 1.0 / 3, 1.0 / 3}, 9.0 / 40.0},
};

}  // namespace

std::pair<double, double> error_norms(
    const std::vector<double>& u_h,
    const std::function<double(const Vec3&)>& exact, const Mesh& mesh) {
    double l1 = 0.0, l2 = 0.0;

    if (mesh.cell_type == CellType::Tet) {
        for (std::int64_t c = 0; c < mesh.n_cells(); ++c) {
            const std::int32_t* v = mesh.cell(c);
            const double vol = mesh.cell_volume(c);
            for (const auto& q : kTetRule) {
                Vec3 x = {0, 0, 0};
                double uh = 0.0;
                for (int i = 0; i < 4; ++i) {
                    x = x + q.l[i] * mesh.nodes[v[i]];
                    uh += q.l[i] * u_h[v[i]];
                }
                const double e = exact(x) - uh;
                l1 += q.w * vol * std::abs(e);
                l2 += q.w * vol * e * e;
            }
        }
    } else {
        // 3x3x3 Gauss on axis-aligned hexahedra
        static const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
        static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
        static const double ref[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0},
                                         {0, 1, 0}, {0, 0, 1}, {1, 0, 1},
                                         {1, 1, 1}, {0, 1, 1}};
        for (std::int64_t c = 0; c < mesh.n_cells(); ++c) {
            const std::int32_t* v = mesh.cell(c);
            const Vec3& p0 = mesh.nodes[v[0]];
            const Vec3 h = mesh.nodes[v[6]] - p0;
            const double jac = h[0] * h[1] * h[2] / 8.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    for (int g = 0; g < 3; ++g) {
                        const double xi[3] = {gx[a], gx[b], gx[g]};
                        const Vec3 x = {p0[0] + 0.5 * (xi[0] + 1) * h[0],
                                        p0[1] + 0.5 * (xi[1] + 1) * h[1],
                                        p0[2] + 0.5 * (xi[2] + 1) * h[2]};
                        double uh = 0.0;
                        for (int i = 0; i < 8; ++i) {
                            const double fx =
                                0.5 * (1 + (ref[i][0] > 0.5 ? 1 : -1) * xi[0]);
                            const double fy =
                                0.5 * (1 + (ref[i][1] > 0.5 ? 1 : -1) * xi[1]);
                            const double fz =
                                0.5 * (1 + (ref[i][2] > 0.5 ? 1 : -1) * xi[2]);
                            uh += fx * fy * fz * u_h[v[i]];
                        }
                        const double w = gw[a] * gw[b] * gw[g] * jac;
                        const double e = exact(x) - uh;
                        l1 += w * std::abs(e);
                        l2 += w * e * e;
                    }
        }
    }
    return {l1, std::sqrt(l2)};
}

}  // namespace afc
