#include "afc/simd/kernels.hpp"

#include <limits>

namespace afc::simd {
namespace {

void s_axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void s_waxpby(double* w, double a, const double* x, double b, const double* y,
              std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) w[i] = a * x[i] + b * y[i];
}

void s_scale(double* x, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void s_vmul(double* w, const double* x, const double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) w[i] = x[i] * y[i];
}

void s_clamp_floor(double* x, double lo, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] = x[i] < lo ? lo : x[i];
}

double s_dot_block(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void s_minmax(const double* x, std::size_t n, double* mn, double* mx) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        lo = x[i] < lo ? x[i] : lo;
        hi = x[i] > hi ? x[i] : hi;
    }
    *mn = lo;
    *mx = hi;
}

void s_spmv_range(const std::int64_t* rowptr, const std::int32_t* col,
                  const double* val, const double* x, double* y,
                  std::size_t row_begin, std::size_t row_end) {
    for (std::size_t i = row_begin; i < row_end; ++i) {
        double s = 0.0;
        for (std::int64_t k = rowptr[i]; k < rowptr[i + 1]; ++k)
            s += val[k] * x[col[k]];
        y[i] = s;
    }
}

void s_row_gather_minmax(const std::int64_t* rowptr, const std::int32_t* col,
                         const double* u, double* umin, double* umax,
                         std::size_t row_begin, std::size_t row_end) {
    for (std::size_t i = row_begin; i < row_end; ++i) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::int64_t k = rowptr[i]; k < rowptr[i + 1]; ++k) {
            const double v = u[col[k]];
            lo = v < lo ? v : lo;
            hi = v > hi ? v : hi;
        }
        umin[i] = lo;
        umax[i] = hi;
    }
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable t = {
        "scalar",    s_axpy,        s_waxpby,     s_scale,
        s_vmul,      s_clamp_floor, s_dot_block,  s_minmax,
        s_spmv_range, s_row_gather_minmax,
    };
    return t;
}

}  // namespace afc::simd
