#include "afc/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "afc/errors.hpp"
#include "afc/simd/kernels.hpp"

namespace afc {

namespace {
constexpr std::int64_t kDenseLimit = 2048;
constexpr double kBreakdownTol = 1e-300;
}  // namespace

KrylovMethod parse_method(const std::string& s) {
    if (s == "gmres") return KrylovMethod::Gmres;
    if (s == "bicgstab") return KrylovMethod::BiCgStab;
    if (s == "direct") return KrylovMethod::Direct;
    throw ConfigError("unknown linear solver: " + s);
}

Preconditioner parse_precond(const std::string& s) {
    if (s == "none") return Preconditioner::None;
    if (s == "jacobi") return Preconditioner::Jacobi;
    if (s == "sor") return Preconditioner::Sor;
    if (s == "bjacobi") return Preconditioner::BlockJacobi;
    throw ConfigError("unknown preconditioner: " + s);
}

std::string to_string(KrylovMethod m) {
    switch (m) {
        case KrylovMethod::Gmres: return "gmres";
        case KrylovMethod::BiCgStab: return "bicgstab";
        default: return "direct";
    }
}

std::string to_string(Preconditioner p) {
    switch (p) {
        case Preconditioner::None: return "none";
        case Preconditioner::Jacobi: return "jacobi";
        case Preconditioner::Sor: return "sor";
        default: return "bjacobi";
    }
}

PreparedOperator::PreparedOperator(const SparseMatrix& A,
                                   const LinearSolverConfig& cfg)
    : A_(&A), cfg_(cfg) {
    const auto& pat = *A.pattern;
    const std::int64_t n = pat.n;
    if (cfg_.atol <= 0.0) throw ConfigError("atol must be positive");
    if (cfg_.restart < 1) throw ConfigError("GMRES restart must be >= 1");

    if (cfg_.method == KrylovMethod::Direct) {
        band_ = 0;
        for (std::int64_t i = 0; i < n; ++i)
            for (std::int64_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1];
                 ++k)
                band_ = std::max(band_, std::abs(std::int64_t(pat.cols[k]) - i));
        dense_lu_ = n <= kDenseLimit && band_ > n / 4;
        if (dense_lu_) {
            factor_.assign(n * n, 0.0);
            for (std::int64_t i = 0; i < n; ++i)
                for (std::int64_t k = pat.row_offsets[i];
                     k < pat.row_offsets[i + 1]; ++k)
                    factor_[i * n + pat.cols[k]] = A.values[k];
            pivots_.resize(n);
            for (std::int64_t c = 0; c < n; ++c) {
                std::int64_t p = c;
                for (std::int64_t r = c + 1; r < n; ++r)
                    if (std::abs(factor_[r * n + c]) >
                        std::abs(factor_[p * n + c]))
                        p = r;
                pivots_[c] = static_cast<std::int32_t>(p);
                if (p != c)
                    for (std::int64_t j = 0; j < n; ++j)
                        std::swap(factor_[c * n + j], factor_[p * n + j]);
                const double piv = factor_[c * n + c];
                if (piv == 0.0)
                    throw SolveError("direct solver hit a zero pivot");
                for (std::int64_t r = c + 1; r < n; ++r) {
                    const double l = factor_[r * n + c] / piv;
                    factor_[r * n + c] = l;
                    if (l != 0.0)
                        for (std::int64_t j = c + 1; j < n; ++j)
                            factor_[r * n + j] -= l * factor_[c * n + j];
                }
            }
        } else {
            const std::int64_t width = 2 * band_ + 1;
            if (width * n * 8 > std::int64_t(2) << 30)
                throw SolveError(
                    "system too large for the banded direct solver; use an "
                    "iterative method");
            factor_.assign(width * n, 0.0);
            auto at = [&](std::int64_t i, std::int64_t j) -> double& {
                return factor_[i * width + (j - i + band_)];
            };
            for (std::int64_t i = 0; i < n; ++i)
                for (std::int64_t k = pat.row_offsets[i];
                     k < pat.row_offsets[i + 1]; ++k)
                    at(i, pat.cols[k]) = A.values[k];
            // no pivoting; intended for the diagonally dominant operators
            // assembled here
            for (std::int64_t c = 0; c < n; ++c) {
                const double piv = at(c, c);
                if (std::abs(piv) < kBreakdownTol)
                    throw SolveError(
                        "banded LU hit a (near-)zero pivot; use an iterative "
                        "method");
                const std::int64_t rmax = std::min(n - 1, c + band_);
                for (std::int64_t r = c + 1; r <= rmax; ++r) {
                    const double l = at(r, c) / piv;
                    at(r, c) = l;
                    if (l != 0.0) {
                        const std::int64_t jmax = std::min(n - 1, c + band_);
                        for (std::int64_t j = c + 1; j <= jmax; ++j)
                            at(r, j) -= l * at(c, j);
                    }
                }
            }
        }
        return;
    }

    if (cfg_.precond == Preconditioner::Jacobi ||
        cfg_.precond == Preconditioner::Sor) {
        inv_diag_.resize(n);
        for (std::int64_t i = 0; i < n; ++i) {
            const double d = A.values[pat.diag[i]];
            if (d == 0.0)
                throw SolveError("zero diagonal entry; Jacobi/SOR preconditioner "
                                 "is singular");
            inv_diag_[i] = 1.0 / d;
        }
    }

    if (cfg_.precond == Preconditioner::BlockJacobi) {
        const int nb = std::max(1, cfg_.n_blocks);
        blocks_.resize(nb);
        for (int b = 0; b < nb; ++b) {
            IluBlock& blk = blocks_[b];
            blk.row_begin = n * b / nb;
            blk.row_end = n * (b + 1) / nb;
            const std::int64_t bn = blk.row_end - blk.row_begin;
            blk.row_offsets.assign(bn + 1, 0);
            for (std::int64_t i = 0; i < bn; ++i) {
                const std::int64_t gi = blk.row_begin + i;
                for (std::int64_t k = pat.row_offsets[gi];
                     k < pat.row_offsets[gi + 1]; ++k)
                    if (pat.cols[k] >= blk.row_begin && pat.cols[k] < blk.row_end)
                        ++blk.row_offsets[i + 1];
            }
            for (std::int64_t i = 0; i < bn; ++i)
                blk.row_offsets[i + 1] += blk.row_offsets[i];
            blk.cols.resize(blk.row_offsets[bn]);
            blk.val.resize(blk.row_offsets[bn]);
            blk.diag.assign(bn, -1);
            for (std::int64_t i = 0; i < bn; ++i) {
                const std::int64_t gi = blk.row_begin + i;
                std::int64_t pos = blk.row_offsets[i];
                for (std::int64_t k = pat.row_offsets[gi];
                     k < pat.row_offsets[gi + 1]; ++k)
                    if (pat.cols[k] >= blk.row_begin &&
                        pat.cols[k] < blk.row_end) {
                        blk.cols[pos] =
                            static_cast<std::int32_t>(pat.cols[k] - blk.row_begin);
                        blk.val[pos] = A.values[k];
                        if (blk.cols[pos] == i) blk.diag[i] = pos;
                        ++pos;
                    }
                if (blk.diag[i] < 0)
                    throw SolveError("block-Jacobi block misses a diagonal entry");
            }
            // ILU(0) on the block, IKJ ordering
            for (std::int64_t i = 0; i < bn; ++i) {
                for (std::int64_t kk = blk.row_offsets[i];
                     kk < blk.row_offsets[i + 1]; ++kk) {
                    const std::int32_t kcol = blk.cols[kk];
                    if (kcol >= i) break;
                    const double pivot = blk.val[blk.diag[kcol]];
                    if (pivot == 0.0)
                        throw SolveError("ILU(0) hit a zero pivot");
                    const double lik = blk.val[kk] / pivot;
                    blk.val[kk] = lik;
                    if (lik == 0.0) continue;
                    // subtract lik * row k from the tail of row i
                    std::int64_t pi = kk + 1;
                    std::int64_t pk = blk.diag[kcol] + 1;
                    while (pi < blk.row_offsets[i + 1] &&
                           pk < blk.row_offsets[kcol + 1]) {
                        if (blk.cols[pi] == blk.cols[pk]) {
                            blk.val[pi] -= lik * blk.val[pk];
                            ++pi;
                            ++pk;
                        } else if (blk.cols[pi] < blk.cols[pk]) {
                            ++pi;
                        } else {
                            ++pk;
                        }
                    }
                }
                if (blk.val[blk.diag[i]] == 0.0)
                    throw SolveError("ILU(0) produced a zero pivot");
            }
        }
    }
}

void PreparedOperator::apply_preconditioner(const double* x, double* y) const {
    const auto& pat = *A_->pattern;
    const std::int64_t n = pat.n;
    switch (cfg_.precond) {
        case Preconditioner::None:
            std::memcpy(y, x, n * sizeof(double));
            return;
        case Preconditioner::Jacobi:
            simd::vmul(y, x, inv_diag_.data(), static_cast<std::size_t>(n));
            return;
        case Preconditioner::Sor: {
            // forward solve with M = D/omega + L
            const double w = cfg_.sor_omega;
            for (std::int64_t i = 0; i < n; ++i) {
                double s = x[i];
                for (std::int64_t k = pat.row_offsets[i]; k < pat.diag[i]; ++k)
                    s -= A_->values[k] * y[pat.cols[k]];
                y[i] = s * w * inv_diag_[i];
            }
            return;
        }
        case Preconditioner::BlockJacobi: {
            for (const auto& blk : blocks_) {
                const std::int64_t bn = blk.row_end - blk.row_begin;
                // L z = x (unit diagonal), then U y = z
                for (std::int64_t i = 0; i < bn; ++i) {
                    double s = x[blk.row_begin + i];
                    for (std::int64_t k = blk.row_offsets[i]; k < blk.diag[i];
                         ++k)
                        s -= blk.val[k] * y[blk.row_begin + blk.cols[k]];
                    y[blk.row_begin + i] = s;
                }
                for (std::int64_t i = bn - 1; i >= 0; --i) {
                    double s = y[blk.row_begin + i];
                    for (std::int64_t k = blk.diag[i] + 1;
                         k < blk.row_offsets[i + 1]; ++k)
                        s -= blk.val[k] * y[blk.row_begin + blk.cols[k]];
                    y[blk.row_begin + i] = s / blk.val[blk.diag[i]];
                }
            }
            return;
        }
    }
}

SolveInfo PreparedOperator::solve(const double* b, double* x) const {
    switch (cfg_.method) {
        case KrylovMethod::Gmres: return solve_gmres(b, x);
        case KrylovMethod::BiCgStab: return solve_bicgstab(b, x);
        default: return solve_direct(b, x);
    }
}

SolveInfo PreparedOperator::solve_direct(const double* b, double* x) const {
    const std::int64_t n = A_->pattern->n;
    std::vector<double> y(b, b + n);
    if (dense_lu_) {
        for (std::int64_t c = 0; c < n; ++c)
            if (pivots_[c] != c) std::swap(y[c], y[pivots_[c]]);
        for (std::int64_t i = 0; i < n; ++i) {
            double s = y[i];
            for (std::int64_t j = 0; j < i; ++j) s -= factor_[i * n + j] * y[j];
            y[i] = s;
        }
        for (std::int64_t i = n - 1; i >= 0; --i) {
            double s = y[i];
            for (std::int64_t j = i + 1; j < n; ++j)
                s -= factor_[i * n + j] * y[j];
            y[i] = s / factor_[i * n + i];
        }
    } else {
        const std::int64_t width = 2 * band_ + 1;
        auto at = [&](std::int64_t i, std::int64_t j) {
            return factor_[i * width + (j - i + band_)];
        };
        for (std::int64_t i = 0; i < n; ++i) {
            double s = y[i];
            for (std::int64_t j = std::max<std::int64_t>(0, i - band_); j < i;
                 ++j)
                s -= at(i, j) * y[j];
            y[i] = s;
        }
        for (std::int64_t i = n - 1; i >= 0; --i) {
            double s = y[i];
            const std::int64_t jmax = std::min(n - 1, i + band_);
            for (std::int64_t j = i + 1; j <= jmax; ++j) s -= at(i, j) * y[j];
            y[i] = s / at(i, i);
        }
    }
    std::memcpy(x, y.data(), n * sizeof(double));
    std::vector<double> r(n);
    A_->residual(b, x, r.data());
    return {0, simd::norm2(r.data(), static_cast<std::size_t>(n))};
}

SolveInfo PreparedOperator::solve_gmres(const double* b, double* x) const {
    const std::int64_t n = A_->pattern->n;
    const int m = cfg_.restart;
    SolveInfo info;

    std::vector<double> r(n), z(n), w(n);
    std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
    std::vector<double> H((m + 1) * m, 0.0);
    std::vector<double> cs(m), sn(m), g(m + 1);

    A_->residual(b, x, r.data());
    double beta = simd::norm2(r.data(), n);
    info.residual = beta;

    while (beta >= cfg_.atol) {
        if (info.iterations >= cfg_.max_iter)
            throw SolveError("GMRES did not converge: residual " +
                                 std::to_string(beta) + " after " +
                                 std::to_string(info.iterations) + " iterations",
                             {beta});
        simd::waxpby(V[0].data(), 1.0 / beta, r.data(), 0.0, r.data(), n);
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;

        int j = 0;
        for (; j < m && info.iterations < cfg_.max_iter; ++j) {
            apply_preconditioner(V[j].data(), z.data());
            A_->mv(z.data(), w.data());
            ++info.iterations;
            for (int i = 0; i <= j; ++i) {
                const double h = simd::dot(w.data(), V[i].data(), n);
                H[i * m + j] = h;
                simd::axpy(-h, V[i].data(), w.data(), n);
            }
            double h1 = simd::norm2(w.data(), n);
            H[(j + 1) * m + j] = h1;
            const bool lucky = h1 == 0.0;
            if (!lucky)
                simd::waxpby(V[j + 1].data(), 1.0 / h1, w.data(), 0.0, w.data(),
                             n);
            // apply accumulated Givens rotations to column j
            for (int i = 0; i < j; ++i) {
                const double t = cs[i] * H[i * m + j] + sn[i] * H[(i + 1) * m + j];
                H[(i + 1) * m + j] =
                    -sn[i] * H[i * m + j] + cs[i] * H[(i + 1) * m + j];
                H[i * m + j] = t;
            }
            const double denom = std::hypot(H[j * m + j], H[(j + 1) * m + j]);
            cs[j] = denom == 0.0 ? 1.0 : H[j * m + j] / denom;
            sn[j] = denom == 0.0 ? 0.0 : H[(j + 1) * m + j] / denom;
            H[j * m + j] = denom;
            H[(j + 1) * m + j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            if (std::abs(g[j + 1]) < cfg_.atol || lucky) {
                ++j;
                break;
            }
        }

        // y = H^{-1} g, x += P^{-1} (V y)
        std::vector<double> y(j);
        for (int i = j - 1; i >= 0; --i) {
            double s = g[i];
            for (int k = i + 1; k < j; ++k) s -= H[i * m + k] * y[k];
            y[i] = s / H[i * m + i];
        }
        std::fill(w.begin(), w.end(), 0.0);
        for (int i = 0; i < j; ++i) simd::axpy(y[i], V[i].data(), w.data(), n);
        apply_preconditioner(w.data(), z.data());
        simd::axpy(1.0, z.data(), x, n);

        A_->residual(b, x, r.data());
        beta = simd::norm2(r.data(), n);
        info.residual = beta;
    }
    return info;
}

SolveInfo PreparedOperator::solve_bicgstab(const double* b, double* x) const {
    const std::int64_t n = A_->pattern->n;
    SolveInfo info;

    std::vector<double> r(n), r0(n), p(n, 0.0), v(n, 0.0), s(n), t(n), ph(n),
        sh(n), true_r(n);
    A_->residual(b, x, r.data());
    double rnorm = simd::norm2(r.data(), n);
    info.residual = rnorm;
    if (rnorm < cfg_.atol) return info;
    simd::copy(r.data(), r0.data(), n);

    double rho = 1.0, alpha = 1.0, omega = 1.0;
    while (true) {
        if (info.iterations >= cfg_.max_iter)
            throw SolveError("BiCGStab did not converge: residual " +
                                 std::to_string(rnorm) + " after " +
                                 std::to_string(info.iterations) +
                                 " iterations",
                             {rnorm});
        const double rho_new = simd::dot(r0.data(), r.data(), n);
        if (std::abs(rho_new) < kBreakdownTol)
            throw SolveError(
                "BiCGStab breakdown (rho ~ 0); restart with GMRES");
        if (info.iterations == 0) {
            simd::copy(r.data(), p.data(), n);
        } else {
            const double beta = (rho_new / rho) * (alpha / omega);
            // p = r + beta (p - omega v)
            simd::axpy(-omega, v.data(), p.data(), n);
            simd::waxpby(p.data(), 1.0, r.data(), beta, p.data(), n);
        }
        rho = rho_new;
        apply_preconditioner(p.data(), ph.data());
        A_->mv(ph.data(), v.data());
        const double r0v = simd::dot(r0.data(), v.data(), n);
        if (std::abs(r0v) < kBreakdownTol)
            throw SolveError(
                "BiCGStab breakdown (r0.v ~ 0); restart with GMRES");
        alpha = rho / r0v;
        simd::copy(r.data(), s.data(), n);
        simd::axpy(-alpha, v.data(), s.data(), n);
        ++info.iterations;
        if (simd::norm2(s.data(), n) < cfg_.atol) {
            simd::axpy(alpha, ph.data(), x, n);
            A_->residual(b, x, true_r.data());
            rnorm = simd::norm2(true_r.data(), n);
            info.residual = rnorm;
            if (rnorm < cfg_.atol) return info;
            simd::copy(true_r.data(), r.data(), n);
            continue;
        }
        apply_preconditioner(s.data(), sh.data());
        A_->mv(sh.data(), t.data());
        const double tt = simd::dot(t.data(), t.data(), n);
        if (tt == 0.0)
            throw SolveError("BiCGStab breakdown (t = 0); restart with GMRES");
        omega = simd::dot(t.data(), s.data(), n) / tt;
        if (omega == 0.0)
            throw SolveError(
                "BiCGStab breakdown (omega = 0); restart with GMRES");
        simd::axpy(alpha, ph.data(), x, n);
        simd::axpy(omega, sh.data(), x, n);
        simd::waxpby(r.data(), 1.0, s.data(), -omega, t.data(), n);
        rnorm = simd::norm2(r.data(), n);
        if (rnorm < cfg_.atol) {
            A_->residual(b, x, true_r.data());
            rnorm = simd::norm2(true_r.data(), n);
            info.residual = rnorm;
            if (rnorm < cfg_.atol) return info;
            simd::copy(true_r.data(), r.data(), n);
        }
        info.residual = rnorm;
    }
}

}  // namespace afc
