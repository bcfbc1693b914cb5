#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

// Data-parallel arithmetic kernels used by the solver inner loops.
//
// Every kernel exists as a scalar reference implementation plus (on x86-64)
// an AVX2/FMA variant. The backend is selected once at startup: the CPU is
// probed, and the AFC_SIMD environment variable ("scalar", "avx2", "auto")
// or select_backend() can override the choice.
//
// Equivalence contract, enforced by tests/test_kernels.cpp:
//   - elementwise kernels and min/max reductions are bitwise-identical
//     across backends,
//   - sum-based reductions (dot, spmv) agree to ~1e-13 relative accuracy
//     (they reassociate the summation).
//
// Reductions over long vectors are split into fixed-size blocks combined in
// block order, so results do not depend on the worker thread count.

namespace afc::simd {

enum class Backend { Auto, Scalar, Avx2 };

struct KernelTable {
    const char* name;

    // y += a*x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // w = a*x + b*y   (w may alias x or y)
    void (*waxpby)(double* w, double a, const double* x, double b,
                   const double* y, std::size_t n);
    // x *= a
    void (*scale)(double* x, double a, std::size_t n);
    // w = x .* y
    void (*vmul)(double* w, const double* x, const double* y, std::size_t n);
    // x = max(x, lo)
    void (*clamp_floor)(double* x, double lo, std::size_t n);
    // single-block dot product; callers block and combine
    double (*dot_block)(const double* x, const double* y, std::size_t n);
    // min/max of x[0..n)
    void (*minmax)(const double* x, std::size_t n, double* mn, double* mx);
    // CSR mat-vec on a row range: y[i] = sum_k val[k]*x[col[k]]
    void (*spmv_range)(const std::int64_t* rowptr, const std::int32_t* col,
                       const double* val, const double* x, double* y,
                       std::size_t row_begin, std::size_t row_end);
    // per-row stencil extrema: umin[i]/umax[i] over {u[col[k]] : k in row i}
    void (*row_gather_minmax)(const std::int64_t* rowptr,
                              const std::int32_t* col, const double* u,
                              double* umin, double* umax,
                              std::size_t row_begin, std::size_t row_end);
};

const KernelTable& scalar_table();
#ifdef __x86_64__
const KernelTable& avx2_table();
#endif

bool cpu_has_avx2();
void select_backend(Backend b);  // throws std::runtime_error if unsupported
Backend current_backend();
const KernelTable& active();
std::string backend_name();

// ---- worker threads -------------------------------------------------------

// Number of threads used by the blocked wrappers below (default 1).
void set_threads(int n);
int threads();

// ---- blocked, thread-aware wrappers ---------------------------------------

void axpy(double a, const double* x, double* y, std::size_t n);
void waxpby(double* w, double a, const double* x, double b, const double* y,
            std::size_t n);
void scale(double* x, double a, std::size_t n);
void vmul(double* w, const double* x, const double* y, std::size_t n);
void clamp_floor(double* x, double lo, std::size_t n);
void copy(const double* x, double* y, std::size_t n);
void fill(double* x, double v, std::size_t n);

double dot(const double* x, const double* y, std::size_t n);
double norm2(const double* x, std::size_t n);
void minmax(const double* x, std::size_t n, double& mn, double& mx);

void spmv(const std::int64_t* rowptr, const std::int32_t* col,
          const double* val, const double* x, double* y, std::size_t nrows);
void row_gather_minmax(const std::int64_t* rowptr, const std::int32_t* col,
                       const double* u, double* umin, double* umax,
                       std::size_t nrows);

}  // namespace afc::simd
