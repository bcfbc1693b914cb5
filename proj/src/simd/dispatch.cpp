#include "afc/simd/kernels.hpp"
#include "afc/simd/thread_pool.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace afc::simd {
namespace {

// Fixed block sizes keep reduction results independent of the thread count:
// blocks are reduced individually and combined in block order.
constexpr std::size_t kReduceBlock = 16384;
constexpr std::size_t kElemBlock = 65536;
constexpr std::size_t kRowBlock = 4096;

const KernelTable* g_table = nullptr;
Backend g_backend = Backend::Scalar;

Backend env_backend() {
    const char* s = std::getenv("AFC_SIMD");
    if (!s) return Backend::Auto;
    if (std::strcmp(s, "scalar") == 0) return Backend::Scalar;
    if (std::strcmp(s, "avx2") == 0) return Backend::Avx2;
    return Backend::Auto;
}

void init_once() {
    if (g_table) return;
    Backend want = env_backend();
    if (want == Backend::Auto)
        want = cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
    select_backend(want);
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) && defined(AFC_HAVE_AVX2_SOURCES)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

void select_backend(Backend b) {
    if (b == Backend::Auto)
        b = cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
    if (b == Backend::Avx2) {
#if defined(__x86_64__) && defined(AFC_HAVE_AVX2_SOURCES)
        if (!cpu_has_avx2())
            throw std::runtime_error("avx2 backend requested but CPU lacks AVX2/FMA");
        g_table = &avx2_table();
#else
        throw std::runtime_error("avx2 backend not compiled in");
#endif
    } else {
        g_table = &scalar_table();
    }
    g_backend = b;
}

Backend current_backend() {
    init_once();
    return g_backend;
}

const KernelTable& active() {
    init_once();
    return *g_table;
}

std::string backend_name() { return active().name; }

void set_threads(int n) { ThreadPool::instance().resize(n); }
int threads() { return ThreadPool::instance().size(); }

// ---- blocked wrappers ------------------------------------------------------

namespace {

template <class Fn>
void for_blocks(std::size_t n, std::size_t block, Fn&& body) {
    const std::size_t nb = (n + block - 1) / block;
    if (nb <= 1 || ThreadPool::instance().size() <= 1) {
        for (std::size_t b = 0; b < nb; ++b)
            body(b * block, std::min(n, (b + 1) * block));
        return;
    }
    ThreadPool::instance().run(nb, [&](std::size_t b) {
        body(b * block, std::min(n, (b + 1) * block));
    });
}

}  // namespace

void axpy(double a, const double* x, double* y, std::size_t n) {
    const auto& k = active();
    for_blocks(n, kElemBlock,
               [&](std::size_t b, std::size_t e) { k.axpy(a, x + b, y + b, e - b); });
}

void waxpby(double* w, double a, const double* x, double b, const double* y,
            std::size_t n) {
    const auto& k = active();
    for_blocks(n, kElemBlock, [&](std::size_t lo, std::size_t hi) {
        k.waxpby(w + lo, a, x + lo, b, y + lo, hi - lo);
    });
}

void scale(double* x, double a, std::size_t n) {
    const auto& k = active();
    for_blocks(n, kElemBlock,
               [&](std::size_t b, std::size_t e) { k.scale(x + b, a, e - b); });
}

void vmul(double* w, const double* x, const double* y, std::size_t n) {
    const auto& k = active();
    for_blocks(n, kElemBlock, [&](std::size_t b, std::size_t e) {
        k.vmul(w + b, x + b, y + b, e - b);
    });
}

void clamp_floor(double* x, double lo, std::size_t n) {
    const auto& k = active();
    for_blocks(n, kElemBlock,
               [&](std::size_t b, std::size_t e) { k.clamp_floor(x + b, lo, e - b); });
}

void copy(const double* x, double* y, std::size_t n) {
    std::memcpy(y, x, n * sizeof(double));
}

void fill(double* x, double v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] = v;
}

double dot(const double* x, const double* y, std::size_t n) {
    const auto& k = active();
    const std::size_t nb = (n + kReduceBlock - 1) / kReduceBlock;
    if (nb <= 1) return k.dot_block(x, y, n);
    std::vector<double> partial(nb);
    for_blocks(n, kReduceBlock, [&](std::size_t b, std::size_t e) {
        partial[b / kReduceBlock] = k.dot_block(x + b, y + b, e - b);
    });
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

double norm2(const double* x, std::size_t n) {
    return std::sqrt(dot(x, x, n));
}

void minmax(const double* x, std::size_t n, double& mn, double& mx) {
    const auto& k = active();
    const std::size_t nb = (n + kReduceBlock - 1) / kReduceBlock;
    if (nb <= 1) {
        k.minmax(x, n, &mn, &mx);
        return;
    }
    std::vector<double> pmn(nb), pmx(nb);
    for_blocks(n, kReduceBlock, [&](std::size_t b, std::size_t e) {
        k.minmax(x + b, e - b, &pmn[b / kReduceBlock], &pmx[b / kReduceBlock]);
    });
    mn = pmn[0];
    mx = pmx[0];
    for (std::size_t i = 1; i < nb; ++i) {
        mn = pmn[i] < mn ? pmn[i] : mn;
        mx = pmx[i] > mx ? pmx[i] : mx;
    }
}

void spmv(const std::int64_t* rowptr, const std::int32_t* col,
          const double* val, const double* x, double* y, std::size_t nrows) {
    const auto& k = active();
    for_blocks(nrows, kRowBlock, [&](std::size_t b, std::size_t e) {
        k.spmv_range(rowptr, col, val, x, y, b, e);
    });
}

void row_gather_minmax(const std::int64_t* rowptr, const std::int32_t* col,
                       const double* u, double* umin, double* umax,
                       std::size_t nrows) {
    const auto& k = active();
    for_blocks(nrows, kRowBlock, [&](std::size_t b, std::size_t e) {
        k.row_gather_minmax(rowptr, col, u, umin, umax, b, e);
    });
}

}  // namespace afc::simd
