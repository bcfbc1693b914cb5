#include "afc/assembly.hpp"

#include <cmath>

#include "afc/errors.hpp"

namespace afc {

namespace {

struct QuadPoint {
    Vec3 x;          // physical coordinates
    double w;        // weight including the Jacobian
    double phi[8];   // basis values
    Vec3 grad[8];    // basis gradients
};

// Tetrahedron rules in barycentric coordinates with weights as volume
// fractions. The degree-3 rule (vertices 1/40, face centroids 9/40) has
// positive weights only.
struct BaryPoint {
    double l[4];
    double w;
};

const std::vector<BaryPoint>& tet_rule(int order) {
    static const double a = 0.5854101966249685;  // (5 + 3*sqrt(5)) / 20
    static const double b = 0.1381966011250105;
    static const std::vector<BaryPoint> order2 = {
        {{a, b, b, b}, 0.25},
        {{b, a, b, b}, 0.25},
        {{b, b, a, b}, 0.25},
        {{b, b, b, a}, 0.25},
    };
    static const double t = 1.0 / 3.0;
    static const std::vector<BaryPoint> order3 = {
        {{1, 0, 0, 0}, 1.0 / 40.0}, {{0, 1, 0, 0}, 1.0 / 40.0},
        {{0, 0, 1, 0}, 1.0 / 40.0}, {{0, 0, 0, 1}, 1.0 / 40.0},
        {{t, t, t, 0}, 9.0 / 40.0}, {{t, t, 0, t}, 9.0 / 40.0},
        {{t, 0, t, t}, 9.0 / 40.0}, {{0, t, t, t}, 9.0 / 40.0},
    };
    return order >= 3 ? order3 : order2;
}

const std::vector<double>& gauss_1d(int order) {
    static const std::vector<double> g2 = {-1.0 / std::sqrt(3.0),
                                           1.0 / std::sqrt(3.0)};
    static const std::vector<double> g3 = {-std::sqrt(0.6), 0.0,
                                           std::sqrt(0.6)};
    return order >= 3 ? g3 : g2;
}
const std::vector<double>& gauss_1d_w(int order) {
    static const std::vector<double> w2 = {1.0, 1.0};
    static const std::vector<double> w3 = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    return order >= 3 ? w3 : w2;
}

int tet_points(const Mesh& mesh, std::int64_t c, int order,
               std::vector<QuadPoint>& qp) {
    const std::int32_t* v = mesh.cell(c);
    const Vec3& p0 = mesh.nodes[v[0]];
    const Vec3 e1 = mesh.nodes[v[1]] - p0;
    const Vec3 e2 = mesh.nodes[v[2]] - p0;
    const Vec3 e3 = mesh.nodes[v[3]] - p0;
    const double det = dot(e1, cross(e2, e3));
    if (det <= 0.0)
        throw AssemblyError("degenerate tetrahedron, cell " + std::to_string(c));
    const double vol = det / 6.0;

    // gradients of barycentric coordinates
    Vec3 g[4];
    g[1] = (1.0 / det) * cross(e2, e3);
    g[2] = (1.0 / det) * cross(e3, e1);
    g[3] = (1.0 / det) * cross(e1, e2);
    g[0] = {-g[1][0] - g[2][0] - g[3][0], -g[1][1] - g[2][1] - g[3][1],
            -g[1][2] - g[2][2] - g[3][2]};

    const auto& rule = tet_rule(order);
    qp.resize(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        QuadPoint& p = qp[q];
        p.w = rule[q].w * vol;
        p.x = p0 + rule[q].l[1] * e1 + rule[q].l[2] * e2 + rule[q].l[3] * e3;
        for (int i = 0; i < 4; ++i) {
            p.phi[i] = rule[q].l[i];
            p.grad[i] = g[i];
        }
    }
    return 4;
}

int hex_points(const Mesh& mesh, std::int64_t c, int order,
               std::vector<QuadPoint>& qp) {
    const std::int32_t* v = mesh.cell(c);
    const Vec3& p0 = mesh.nodes[v[0]];
    const Vec3& p6 = mesh.nodes[v[6]];
    const Vec3 h = p6 - p0;
    if (h[0] <= 0.0 || h[1] <= 0.0 || h[2] <= 0.0)
        throw AssemblyError("degenerate hexahedron, cell " + std::to_string(c));

    // local reference coordinates of the VTK hex vertices
    static const double ref[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                     {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
    for (int i = 0; i < 8; ++i) {
        const Vec3 expect = {p0[0] + ref[i][0] * h[0], p0[1] + ref[i][1] * h[1],
                             p0[2] + ref[i][2] * h[2]};
        const Vec3 diff = mesh.nodes[v[i]] - expect;
        if (norm(diff) > 1e-10 * norm(h))
            throw AssemblyError("hexahedron is not an axis-aligned box, cell " +
                                std::to_string(c));
    }

    const auto& gx = gauss_1d(order);
    const auto& gw = gauss_1d_w(order);
    const int ng = static_cast<int>(gx.size());
    const double jac = h[0] * h[1] * h[2] / 8.0;

    qp.clear();
    qp.reserve(ng * ng * ng);
    for (int a = 0; a < ng; ++a)
        for (int b = 0; b < ng; ++b)
            for (int g = 0; g < ng; ++g) {
                QuadPoint p;
                const double xi[3] = {gx[a], gx[b], gx[g]};
                p.w = gw[a] * gw[b] * gw[g] * jac;
                p.x = {p0[0] + 0.5 * (xi[0] + 1.0) * h[0],
                       p0[1] + 0.5 * (xi[1] + 1.0) * h[1],
                       p0[2] + 0.5 * (xi[2] + 1.0) * h[2]};
                for (int i = 0; i < 8; ++i) {
                    const double sx = ref[i][0] > 0.5 ? 1.0 : -1.0;
                    const double sy = ref[i][1] > 0.5 ? 1.0 : -1.0;
                    const double sz = ref[i][2] > 0.5 ? 1.0 : -1.0;
                    const double fx = 0.5 * (1.0 + sx * xi[0]);
                    const double fy = 0.5 * (1.0 + sy * xi[1]);
                    const double fz = 0.5 * (1.0 + sz * xi[2]);
                    p.phi[i] = fx * fy * fz;
                    p.grad[i] = {sx / h[0] * fy * fz, sy / h[1] * fx * fz,
                                 sz / h[2] * fx * fy};
                }
                qp.push_back(p);
            }
    return 8;
}

template <class LocalFn>
void assemble_cells(const Mesh& mesh, int quad_order, SparseMatrix& M,
                    LocalFn&& local) {
    const auto& pat = *M.pattern;
    std::vector<QuadPoint> qp;
    double lm[8][8];
    for (std::int64_t c = 0; c < mesh.n_cells(); ++c) {
        const int nv = mesh.cell_type == CellType::Tet
                           ? tet_points(mesh, c, quad_order, qp)
                           : hex_points(mesh, c, quad_order, qp);
        for (int i = 0; i < nv; ++i)
            for (int j = 0; j < nv; ++j) lm[i][j] = 0.0;
        local(qp, nv, lm);
        const std::int32_t* v = mesh.cell(c);
        for (int i = 0; i < nv; ++i)
            for (int j = 0; j < nv; ++j) {
                const std::int64_t k = pat.find(v[i], v[j]);
                M.values[k] += lm[i][j];
            }
    }
}

}  // namespace

double LumpedMass::total() const {
    double s = 0.0;
    for (double x : m) s += x;
    return s;
}

std::shared_ptr<const SparsityPattern> build_pattern(const Mesh& mesh) {
    return SparsityPattern::build(mesh.n_nodes(), mesh.cells,
                                  mesh.verts_per_cell());
}

SparseMatrix assemble_mass(const Mesh& mesh,
                           std::shared_ptr<const SparsityPattern> pattern,
                           const AssemblyOptions& opts) {
    SparseMatrix M(std::move(pattern));
    assemble_cells(mesh, opts.quad_order, M,
                   [](const std::vector<QuadPoint>& qp, int nv,
                      double lm[8][8]) {
                       for (const auto& p : qp)
                           for (int i = 0; i < nv; ++i)
                               for (int j = 0; j < nv; ++j)
                                   lm[i][j] += p.w * p.phi[i] * p.phi[j];
                   });
    return M;
}

LumpedMass lump_mass(const SparseMatrix& M_C) {
    const auto& pat = *M_C.pattern;
    LumpedMass lumped;
    lumped.m.resize(pat.n);
    for (std::int64_t i = 0; i < pat.n; ++i) {
        double s = 0.0;
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k)
            s += M_C.values[k];
        if (!(s > 0.0))
            throw AssemblyError("nonpositive lumped mass at node " +
                                std::to_string(i));
        lumped.m[i] = s;
    }
    return lumped;
}

SparseMatrix assemble_stiffness(const Mesh& mesh, const ProblemSpec& spec,
                                double t,
                                std::shared_ptr<const SparsityPattern> pattern,
                                const AssemblyOptions& opts,
                                bool convective_only) {
    const double eps = convective_only ? 0.0 : spec.epsilon;
    const bool with_reaction = !convective_only && bool(spec.reaction);
    SparseMatrix A(std::move(pattern));
    assemble_cells(
        mesh, opts.quad_order, A,
        [&](const std::vector<QuadPoint>& qp, int nv, double lm[8][8]) {
            for (const auto& p : qp) {
                const Vec3 b = spec.velocity ? spec.velocity(t, p.x)
                                             : Vec3{0.0, 0.0, 0.0};
                const double c = with_reaction ? spec.reaction(t, p.x) : 0.0;
                for (int j = 0; j < nv; ++j) {
                    const double conv = dot(b, p.grad[j]);
                    for (int i = 0; i < nv; ++i)
                        lm[i][j] += p.w * (eps * dot(p.grad[j], p.grad[i]) +
                                           conv * p.phi[i] +
                                           c * p.phi[j] * p.phi[i]);
                }
            }
        });
    return A;
}

SparseMatrix artificial_diffusion(const SparseMatrix& A) {
    const auto& pat = *A.pattern;
    SparseMatrix D(A.pattern);
    for (std::int64_t i = 0; i < pat.n; ++i) {
        double row_sum = 0.0;
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k) {
            if (pat.cols[k] == i) continue;
            const double aij = A.values[k];
            const double aji = A.values[pat.trans[k]];
            const double d = -std::max({aij, 0.0, aji});
            D.values[k] = d;
            row_sum += d;
        }
        D.values[pat.diag[i]] = -row_sum;
    }
    return D;
}

std::vector<double> assemble_rhs(const Mesh& mesh, const ProblemSpec& spec,
                                 double t, const AssemblyOptions& opts) {
    if (spec.nonzero_neumann)
        throw UnsupportedError(
            "nonzero Neumann data is not supported; only g_N = 0");
    std::vector<double> F(mesh.n_nodes(), 0.0);
    if (!spec.source) return F;
    std::vector<QuadPoint> qp;
    for (std::int64_t c = 0; c < mesh.n_cells(); ++c) {
        const int nv = mesh.cell_type == CellType::Tet
                           ? tet_points(mesh, c, opts.quad_order, qp)
                           : hex_points(mesh, c, opts.quad_order, qp);
        const std::int32_t* v = mesh.cell(c);
        for (const auto& p : qp) {
            const double f = spec.source(t, p.x);
            for (int i = 0; i < nv; ++i) F[v[i]] += p.w * f * p.phi[i];
        }
    }
    return F;
}

SparseMatrix matrix_sum(const SparseMatrix& A, const SparseMatrix& B) {
    if (A.pattern != B.pattern)
        throw Error("matrix_sum requires a shared sparsity pattern");
    SparseMatrix C(A.pattern);
    for (std::size_t k = 0; k < C.values.size(); ++k)
        C.values[k] = A.values[k] + B.values[k];
    return C;
}

void apply_dirichlet_rows(SparseMatrix& A, const BoundaryClassification& bc) {
    const auto& pat = *A.pattern;
    for (std::int64_t i = 0; i < pat.n; ++i) {
        if (!bc.is_dirichlet(i)) continue;
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k)
            A.values[k] = pat.cols[k] == i ? 1.0 : 0.0;
    }
}

void apply_dirichlet_rhs(std::vector<double>& rhs,
                         const BoundaryClassification& bc) {
    for (std::size_t i = 0; i < rhs.size(); ++i)
        if (bc.is_dirichlet(static_cast<std::int64_t>(i)))
            rhs[i] = bc.value[i];
}

OperatorSet build_operators(const Mesh& mesh, const ProblemSpec& spec, double t,
                            const AssemblyOptions& opts, bool with_conv_track) {
    OperatorSet ops;
    ops.pattern = build_pattern(mesh);
    ops.M_C = assemble_mass(mesh, ops.pattern, opts);
    ops.M_L = lump_mass(ops.M_C);
    ops.A_full = assemble_stiffness(mesh, spec, t, ops.pattern, opts, false);
    ops.D_full = artificial_diffusion(ops.A_full);
    ops.low_full = matrix_sum(ops.A_full, ops.D_full);
    ops.F = assemble_rhs(mesh, spec, t, opts);
    if (with_conv_track) {
        ops.A_conv = assemble_stiffness(mesh, spec, t, ops.pattern, opts, true);
        ops.D_conv = artificial_diffusion(ops.A_conv);
        ops.low_mc = matrix_sum(ops.A_full, ops.D_conv);
        ops.has_conv_track = true;
    }
    return ops;
}

LpOperators build_lp_operators(const SparseMatrix& A_full,
                               const BoundaryClassification& bc) {
    LpOperators lp;
    lp.A = A_full;
    const auto& pat = *A_full.pattern;
    for (std::int64_t i = 0; i < pat.n; ++i) {
        if (bc.is_dirichlet(i)) continue;
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k)
            if (pat.cols[k] != i && bc.is_dirichlet(pat.cols[k]))
                lp.A.values[k] = 0.0;
    }
    lp.D = artificial_diffusion(lp.A);
    return lp;
}

}  // namespace afc
