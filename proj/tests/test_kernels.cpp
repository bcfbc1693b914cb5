#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "afc/simd/kernels.hpp"

using namespace afc;

namespace {

std::vector<double> random_vec(std::mt19937& rng, std::size_t n, double lo = -1,
                               double hi = 1) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

// small CSR matrix with sorted columns
struct Csr {
    std::vector<std::int64_t> rowptr;
    std::vector<std::int32_t> col;
    std::vector<double> val;
};

Csr random_csr(std::mt19937& rng, std::size_t n, int per_row) {
    Csr m;
    m.rowptr.push_back(0);
    std::uniform_int_distribution<std::int32_t> pick(0, int(n) - 1);
    std::uniform_real_distribution<double> dist(-1, 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::int32_t> cols;
        for (int k = 0; k < per_row; ++k) cols.push_back(pick(rng));
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        for (auto c : cols) {
            m.col.push_back(c);
            m.val.push_back(dist(rng));
        }
        m.rowptr.push_back(std::int64_t(m.col.size()));
    }
    return m;
}

bool backend_pair_available() { return simd::cpu_has_avx2(); }

}  // namespace

TEST_CASE("scalar kernels: basic semantics") {
    simd::select_backend(simd::Backend::Scalar);
    std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> y = {10, 20, 30, 40, 50};
    simd::axpy(2.0, x.data(), y.data(), 5);
    CHECK(y[0] == 12.0);
    CHECK(y[4] == 60.0);

    std::vector<double> w(5);
    simd::waxpby(w.data(), 1.0, x.data(), -1.0, y.data(), 5);
    CHECK(w[2] == 3.0 - 36.0);

    CHECK(simd::dot(x.data(), x.data(), 5) == doctest::Approx(55.0));
    CHECK(simd::norm2(x.data(), 5) == doctest::Approx(std::sqrt(55.0)));

    double lo, hi;
    simd::minmax(x.data(), 5, lo, hi);
    CHECK(lo == 1.0);
    CHECK(hi == 5.0);

    std::vector<double> z = {-1, 0.5, -0.25, 3, 0};
    simd::clamp_floor(z.data(), 0.0, 5);
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 0.5);
    CHECK(z[2] == 0.0);
}

TEST_CASE("avx2 kernels match scalar kernels") {
    if (!backend_pair_available()) return;

    std::mt19937 rng(7);
    for (std::size_t n : {std::size_t(1), std::size_t(3), std::size_t(4),
                          std::size_t(17), std::size_t(1000),
                          std::size_t(40001)}) {
        auto x = random_vec(rng, n);
        auto y = random_vec(rng, n);

        // elementwise ops must agree bitwise
        auto ys = y, yv = y;
        simd::select_backend(simd::Backend::Scalar);
        simd::axpy(1.7, x.data(), ys.data(), n);
        simd::select_backend(simd::Backend::Avx2);
        simd::axpy(1.7, x.data(), yv.data(), n);
        CHECK(ys == yv);

        std::vector<double> ws(n), wv(n);
        simd::select_backend(simd::Backend::Scalar);
        simd::waxpby(ws.data(), -0.3, x.data(), 2.1, y.data(), n);
        simd::select_backend(simd::Backend::Avx2);
        simd::waxpby(wv.data(), -0.3, x.data(), 2.1, y.data(), n);
        CHECK(ws == wv);

        auto cs = x, cv = x;
        simd::select_backend(simd::Backend::Scalar);
        simd::clamp_floor(cs.data(), 0.1, n);
        simd::select_backend(simd::Backend::Avx2);
        simd::clamp_floor(cv.data(), 0.1, n);
        CHECK(cs == cv);

        // min/max reductions are exact in any order
        double ls, hs, lv, hv;
        simd::select_backend(simd::Backend::Scalar);
        simd::minmax(x.data(), n, ls, hs);
        simd::select_backend(simd::Backend::Avx2);
        simd::minmax(x.data(), n, lv, hv);
        CHECK(ls == lv);
        CHECK(hs == hv);

        // dot reassociates: relative agreement only
        simd::select_backend(simd::Backend::Scalar);
        const double ds = simd::dot(x.data(), y.data(), n);
        simd::select_backend(simd::Backend::Avx2);
        const double dv = simd::dot(x.data(), y.data(), n);
        CHECK(std::abs(ds - dv) <= 1e-13 * std::max({1.0, std::abs(ds)}) *
                                       std::sqrt(double(n)));
    }
    simd::select_backend(simd::Backend::Auto);
}

TEST_CASE("avx2 spmv and row extrema match scalar") {
    if (!backend_pair_available()) return;

    std::mt19937 rng(11);
    const std::size_t n = 500;
    Csr m = random_csr(rng, n, 9);
    auto x = random_vec(rng, n);

    std::vector<double> ys(n), yv(n);
    simd::select_backend(simd::Backend::Scalar);
    simd::spmv(m.rowptr.data(), m.col.data(), m.val.data(), x.data(), ys.data(),
               n);
    simd::select_backend(simd::Backend::Avx2);
    simd::spmv(m.rowptr.data(), m.col.data(), m.val.data(), x.data(), yv.data(),
               n);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(ys[i] - yv[i]) <= 1e-14 * (1.0 + std::abs(ys[i])));

    std::vector<double> lo_s(n), hi_s(n), lo_v(n), hi_v(n);
    simd::select_backend(simd::Backend::Scalar);
    simd::row_gather_minmax(m.rowptr.data(), m.col.data(), x.data(),
                            lo_s.data(), hi_s.data(), n);
    simd::select_backend(simd::Backend::Avx2);
    simd::row_gather_minmax(m.rowptr.data(), m.col.data(), x.data(),
                            lo_v.data(), hi_v.data(), n);
    CHECK(lo_s == lo_v);  // min/max gathering is exact
    CHECK(hi_s == hi_v);
    simd::select_backend(simd::Backend::Auto);
}

TEST_CASE("reductions are independent of the thread count") {
    std::mt19937 rng(3);
    const std::size_t n = 123457;
    auto x = random_vec(rng, n);
    auto y = random_vec(rng, n);

    simd::set_threads(1);
    const double d1 = simd::dot(x.data(), y.data(), n);
    double lo1, hi1;
    simd::minmax(x.data(), n, lo1, hi1);

    for (int threads : {2, 3, 4}) {
        simd::set_threads(threads);
        CHECK(simd::dot(x.data(), y.data(), n) == d1);  // bitwise
        double lo, hi;
        simd::minmax(x.data(), n, lo, hi);
        CHECK(lo == lo1);
        CHECK(hi == hi1);
    }
    simd::set_threads(1);
}

TEST_CASE("spmv is independent of the thread count") {
    std::mt19937 rng(5);
    const std::size_t n = 20000;
    Csr m = random_csr(rng, n, 11);
    auto x = random_vec(rng, n);

    simd::set_threads(1);
    std::vector<double> y1(n);
    simd::spmv(m.rowptr.data(), m.col.data(), m.val.data(), x.data(), y1.data(),
               n);

    simd::set_threads(4);
    std::vector<double> y4(n);
    simd::spmv(m.rowptr.data(), m.col.data(), m.val.data(), x.data(), y4.data(),
               n);
    CHECK(y1 == y4);  // rows are computed identically regardless of partition
    simd::set_threads(1);
}

TEST_CASE("backend selection reporting") {
    simd::select_backend(simd::Backend::Scalar);
    CHECK(simd::backend_name() == "scalar");
    if (simd::cpu_has_avx2()) {
        simd::select_backend(simd::Backend::Avx2);
        CHECK(simd::backend_name() == "avx2");
    }
    simd::select_backend(simd::Backend::Auto);
}
