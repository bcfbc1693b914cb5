#include "afc/limiters.hpp"

#include <algorithm>
#include <cmath>

#include "afc/errors.hpp"
#include "afc/simd/kernels.hpp"

namespace afc {

double minmod(double a, double b) {
    if (a > 0.0 && b > 0.0) return std::min(a, b);
    if (a < 0.0 && b < 0.0) return std::max(a, b);
    return 0.0;
}

LocalBounds compute_local_bounds(const double* u, const SparsityPattern& pat) {
    LocalBounds lb;
    lb.umin.resize(pat.n);
    lb.umax.resize(pat.n);
    simd::row_gather_minmax(pat.row_offsets.data(), pat.cols.data(), u,
                            lb.umin.data(), lb.umax.data(),
                            static_cast<std::size_t>(pat.n));
    return lb;
}

void prelimit_minmod(EdgeField& r, const double* u, const SparseMatrix& D,
                     double L) {
    const auto& pat = *r.pattern;
    for (std::int64_t i = 0; i < pat.n; ++i)
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k) {
            const std::int32_t j = pat.cols[k];
            if (j == i) continue;
            r.v[k] = minmod(r.v[k], L * D.values[k] * (u[j] - u[i]));
        }
}

void zalesak(const EdgeField& r, const double* u_tilde, const LumpedMass& m,
             double dt, const BoundaryClassification& bc, EdgeField& alpha) {
    const auto& pat = *r.pattern;
    std::vector<double> Rp(pat.n), Rm(pat.n);

    for (std::int64_t i = 0; i < pat.n; ++i) {
        if (bc.is_dirichlet(i)) {
            Rp[i] = 1.0;
            Rm[i] = 1.0;
            continue;
        }
        double Pp = 0.0, Pm = 0.0;
        double Qp = 0.0, Qm = 0.0;
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k) {
            const std::int32_t j = pat.cols[k];
            if (j == i) continue;
            Pp += std::max(r.v[k], 0.0);
            Pm += std::min(r.v[k], 0.0);
            const double du = u_tilde[j] - u_tilde[i];
            Qp = std::max(Qp, du);
            Qm = std::min(Qm, du);
        }
        Rp[i] = Pp == 0.0 ? 1.0 : std::min(1.0, (m.m[i] * Qp) / (dt * Pp));
        Rm[i] = Pm == 0.0 ? 1.0 : std::min(1.0, (m.m[i] * Qm) / (dt * Pm));
    }

    for (std::int64_t i = 0; i < pat.n; ++i)
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k) {
            const std::int32_t j = pat.cols[k];
            if (j == i) {
                alpha.v[k] = 0.0;
                continue;
            }
            alpha.v[k] =
                r.v[k] > 0.0 ? std::min(Rp[i], Rm[j]) : std::min(Rm[i], Rp[j]);
        }
}

void mc_limit(const EdgeField& r, const double* u, const LocalBounds& bounds,
              const SparseMatrix& A_conv, const SparseMatrix& D_conv,
              EdgeField& r_star) {
    const auto& pat = *r.pattern;
    for (std::int64_t i = 0; i < pat.n; ++i)
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k) {
            const std::int32_t j = pat.cols[k];
            if (j == i) {
                r_star.v[k] = 0.0;
                continue;
            }
            const double d = D_conv.values[k];
            if (d == 0.0) {
                r_star.v[k] = 0.0;
                continue;
            }
            const double aij = A_conv.values[k];
            const double aji = A_conv.values[pat.trans[k]];
            const double s = d * (u[i] + u[j]);
            const double ubar_ij = (s + aij * (u[j] - u[i])) / (2.0 * d);
            const double ubar_ji = (s + aji * (u[i] - u[j])) / (2.0 * d);
            if (r.v[k] > 0.0) {
                r_star.v[k] = std::min(
                    r.v[k], std::min(2.0 * d * (ubar_ij - bounds.umax[i]),
                                     2.0 * d * (bounds.umin[j] - ubar_ji)));
            } else {
                r_star.v[k] = std::max(
                    r.v[k], std::max(2.0 * d * (ubar_ij - bounds.umin[i]),
                                     2.0 * d * (bounds.umax[j] - ubar_ji)));
            }
        }
}

void mu_limit(const EdgeField& r_ss, const SparseMatrix& A,
              const BoundaryClassification& bc, EdgeField& alpha) {
    const auto& pat = *r_ss.pattern;
    std::vector<double> Rp(pat.n), Rm(pat.n);

    for (std::int64_t i = 0; i < pat.n; ++i) {
        if (bc.is_dirichlet(i)) {
            Rp[i] = 1.0;
            Rm[i] = 1.0;
            continue;
        }
        double Pp = 0.0, Pm = 0.0, Qp = 0.0, Qm = 0.0;
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k) {
            const std::int32_t j = pat.cols[k];
            if (j == i) continue;
            const double rp = std::max(r_ss.v[k], 0.0);
            const double rm = std::min(r_ss.v[k], 0.0);
            if (A.values[pat.trans[k]] <= A.values[k]) {  // a_ji <= a_ij
                Pp += rp;
                Pm += rm;
            }
            Qp += -rm;
            Qm += -rp;
        }
        Rp[i] = Pp == 0.0 ? 1.0 : std::min(1.0, Qp / Pp);
        Rm[i] = Pm == 0.0 ? 1.0 : std::min(1.0, Qm / Pm);
    }

    std::fill(alpha.v.begin(), alpha.v.end(), 1.0);
    for (std::int64_t i = 0; i < pat.n; ++i)
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k) {
            const std::int32_t j = pat.cols[k];
            if (j == i) {
                alpha.v[k] = 0.0;
                continue;
            }
            if (A.values[pat.trans[k]] <= A.values[k]) {
                const double a = r_ss.v[k] > 0.0   ? Rp[i]
                                 : r_ss.v[k] < 0.0 ? Rm[i]
                                                   : 1.0;
                alpha.v[k] = a;
                alpha.v[pat.trans[k]] = a;
            }
        }
}

void lp_limit(const EdgeField& r_ss, const double* u, const LocalBounds& bounds,
              const PatchConstant& pc, const BoundaryClassification& bc,
              EdgeField& alpha) {
    const auto& pat = *r_ss.pattern;
    std::vector<double> Rp(pat.n), Rm(pat.n);

    for (std::int64_t i = 0; i < pat.n; ++i) {
        if (bc.is_dirichlet(i)) {
            Rp[i] = 1.0;
            Rm[i] = 1.0;
            continue;
        }
        double Pp = 0.0, Pm = 0.0;
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k) {
            if (pat.cols[k] == i) continue;
            Pp += std::max(r_ss.v[k], 0.0);
            Pm += std::min(r_ss.v[k], 0.0);
        }
        const double Qp = pc.q[i] * (bounds.umax[i] - u[i]);
        const double Qm = pc.q[i] * (bounds.umin[i] - u[i]);
        Rp[i] = Pp == 0.0 ? 1.0 : std::min(1.0, Qp / Pp);
        Rm[i] = Pm == 0.0 ? 1.0 : std::min(1.0, Qm / Pm);
    }

    // abar per directed edge, then the symmetric combination
    std::vector<double> abar(pat.cols.size(), 1.0);
    for (std::int64_t i = 0; i < pat.n; ++i)
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k) {
            if (pat.cols[k] == i) continue;
            abar[k] = r_ss.v[k] > 0.0   ? Rp[i]
                      : r_ss.v[k] < 0.0 ? Rm[i]
                                        : 1.0;
        }
    for (std::int64_t i = 0; i < pat.n; ++i)
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k) {
            const std::int32_t j = pat.cols[k];
            if (j == i) {
                alpha.v[k] = 0.0;
                continue;
            }
            const bool di = bc.is_dirichlet(i), dj = bc.is_dirichlet(j);
            if (!di && !dj)
                alpha.v[k] = std::min(abar[k], abar[pat.trans[k]]);
            else if (!di && dj)
                alpha.v[k] = abar[k];
            else if (di && !dj)
                alpha.v[k] = abar[pat.trans[k]];
            else
                alpha.v[k] = 1.0;
        }
}

PatchConstant compute_gamma(const Mesh& mesh, const SparseMatrix& D) {
    if (mesh.cell_type != CellType::Tet)
        throw UnsupportedError(
            "the linearity-preserving limiter requires a P1 (tetrahedral) mesh");
    const auto& pat = *D.pattern;
    PatchConstant pc;
    pc.gamma.assign(pat.n, 1.0);
    pc.q.assign(pat.n, 0.0);

    std::vector<Vec3> v;
    for (std::int64_t i = 0; i < pat.n; ++i) {
        v.clear();
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k) {
            const std::int32_t j = pat.cols[k];
            if (j != i) v.push_back(mesh.nodes[j] - mesh.nodes[i]);
        }
        const int nn = static_cast<int>(v.size());
        double scale2 = 0.0;
        for (const auto& w : v) scale2 = std::max(scale2, dot(w, w));

        // Vertices of {g : g.v_j <= 1}; the worst one-sided growth over the
        // patch bounds the flux sums for every affine field.
        double best = 1.0;
        for (int a = 0; a < nn; ++a)
            for (int b = a + 1; b < nn; ++b)
                for (int c = b + 1; c < nn; ++c) {
                    const Vec3 rxc = cross(v[b], v[c]);
                    const double det = dot(v[a], rxc);
                    if (std::abs(det) <= 1e-10 * scale2 * std::sqrt(scale2))
                        continue;
                    // solve [v_a; v_b; v_c] g = (1,1,1)
                    const Vec3 g = (1.0 / det) *
                                   (rxc + cross(v[c], v[a]) + cross(v[a], v[b]));
                    bool feasible = true;
                    double neg = 0.0;
                    for (int j = 0; j < nn && feasible; ++j) {
                        const double gv = dot(g, v[j]);
                        feasible = gv <= 1.0 + 1e-9;
                        neg = std::max(neg, -gv);
                    }
                    if (feasible) best = std::max(best, neg);
                }
        pc.gamma[i] = best * (1.0 + 1e-10);
        pc.q[i] = pc.gamma[i] * D.values[pat.diag[i]];
    }
    return pc;
}

void assemble_correction(const EdgeField& alpha, const EdgeField& r,
                         const BoundaryClassification& bc, double* f_star) {
    const auto& pat = *r.pattern;
    for (std::int64_t i = 0; i < pat.n; ++i) {
        if (bc.is_dirichlet(i)) {
            f_star[i] = 0.0;
            continue;
        }
        double s = 0.0;
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k)
            if (pat.cols[k] != i) s += alpha.v[k] * r.v[k];
        f_star[i] = s;
    }
}

void assemble_correction(const EdgeField& r_star,
                         const BoundaryClassification& bc, double* f_star) {
    const auto& pat = *r_star.pattern;
    for (std::int64_t i = 0; i < pat.n; ++i) {
        if (bc.is_dirichlet(i)) {
            f_star[i] = 0.0;
            continue;
        }
        double s = 0.0;
        for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
             ++k)
            if (pat.cols[k] != i) s += r_star.v[k];
        f_star[i] = s;
    }
}

}  // namespace afc
