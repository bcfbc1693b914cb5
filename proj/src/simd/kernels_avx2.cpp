#include "afc/simd/kernels.hpp"

#ifdef __x86_64__

#include <immintrin.h>

#include <limits>

namespace afc::simd {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// The elementwise kernels avoid FMA: they must match the scalar reference
// bitwise (mul then add, two roundings).
void v_axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d ax = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(ax, _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] = a * x[i] + y[i];
}

void v_waxpby(double* w, double a, const double* x, double b, const double* y,
              std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    const __m256d bv = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d ax = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
        const __m256d by = _mm256_mul_pd(bv, _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(w + i, _mm256_add_pd(ax, by));
    }
    for (; i < n; ++i) w[i] = a * x[i] + b * y[i];
}

void v_scale(double* x, double a, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void v_vmul(double* w, const double* x, const double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(
            w + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) w[i] = x[i] * y[i];
}

void v_clamp_floor(double* x, double lo, std::size_t n) {
    const __m256d lov = _mm256_set1_pd(lo);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_max_pd(_mm256_loadu_pd(x + i), lov));
    for (; i < n; ++i) x[i] = x[i] < lo ? lo : x[i];
}

double v_dot_block(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                               acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                               _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                               acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void v_minmax(const double* x, std::size_t n, double* mn, double* mx) {
    __m256d lov = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256d hiv = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        lov = _mm256_min_pd(lov, v);
        hiv = _mm256_max_pd(hiv, v);
    }
    alignas(32) double tl[4], th[4];
    _mm256_store_pd(tl, lov);
    _mm256_store_pd(th, hiv);
    double lo = tl[0], hi = th[0];
    for (int k = 1; k < 4; ++k) {
        lo = tl[k] < lo ? tl[k] : lo;
        hi = th[k] > hi ? th[k] : hi;
    }
    for (; i < n; ++i) {
        lo = x[i] < lo ? x[i] : lo;
        hi = x[i] > hi ? x[i] : hi;
    }
    *mn = lo;
    *mx = hi;
}

void v_spmv_range(const std::int64_t* rowptr, const std::int32_t* col,
                  const double* val, const double* x, double* y,
                  std::size_t row_begin, std::size_t row_end) {
    for (std::size_t i = row_begin; i < row_end; ++i) {
        const std::int64_t b = rowptr[i], e = rowptr[i + 1];
        __m256d acc = _mm256_setzero_pd();
        std::int64_t k = b;
        for (; k + 4 <= e; k += 4) {
            const __m128i idx =
                _mm_loadu_si128(reinterpret_cast<const __m128i*>(col + k));
            const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(val + k), xv, acc);
        }
        double s = hsum(acc);
        for (; k < e; ++k) s += val[k] * x[col[k]];
        y[i] = s;
    }
}

void v_row_gather_minmax(const std::int64_t* rowptr, const std::int32_t* col,
                         const double* u, double* umin, double* umax,
                         std::size_t row_begin, std::size_t row_end) {
    for (std::size_t i = row_begin; i < row_end; ++i) {
        const std::int64_t b = rowptr[i], e = rowptr[i + 1];
        __m256d lov = _mm256_set1_pd(std::numeric_limits<double>::infinity());
        __m256d hiv = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
        std::int64_t k = b;
        for (; k + 4 <= e; k += 4) {
            const __m128i idx =
                _mm_loadu_si128(reinterpret_cast<const __m128i*>(col + k));
            const __m256d v = _mm256_i32gather_pd(u, idx, 8);
            lov = _mm256_min_pd(lov, v);
            hiv = _mm256_max_pd(hiv, v);
        }
        alignas(32) double tl[4], th[4];
        _mm256_store_pd(tl, lov);
        _mm256_store_pd(th, hiv);
        double lo = tl[0], hi = th[0];
        for (int t = 1; t < 4; ++t) {
            lo = tl[t] < lo ? tl[t] : lo;
            hi = th[t] > hi ? th[t] : hi;
        }
        for (; k < e; ++k) {
            const double v = u[col[k]];
            lo = v < lo ? v : lo;
            hi = v > hi ? v : hi;
        }
        umin[i] = lo;
        umax[i] = hi;
    }
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable t = {
        "avx2",      v_axpy,        v_waxpby,     v_scale,
        v_vmul,      v_clamp_floor, v_dot_block,  v_minmax,
        v_spmv_range, v_row_gather_minmax,
    };
    return t;
}

}  // namespace afc::simd

#endif  // __x86_64__
