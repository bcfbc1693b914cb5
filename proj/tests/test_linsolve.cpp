#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "afc/errors.hpp"
#include "afc/linsolve.hpp"
#include "afc/mesh.hpp"
#include "afc/assembly.hpp"
#include "afc/problems.hpp"
#include "afc/simd/kernels.hpp"

using namespace afc;

namespace {

std::shared_ptr<const SparsityPattern> dense_pattern(int n) {
    std::vector<std::int32_t> cells(n);
    for (int i = 0; i < n; ++i) cells[i] = i;
    return SparsityPattern::build(n, cells, n);
}

// diagonally dominant random matrix: safe for every method/preconditioner
SparseMatrix random_matrix(std::mt19937& rng, int n) {
    std::uniform_real_distribution<double> dist(-1, 1);
    SparseMatrix A(dense_pattern(n));
    const auto& p = *A.pattern;
    for (std::int32_t i = 0; i < n; ++i) {
        double off = 0;
        for (std::int64_t k = p.row_offsets[i]; k < p.row_offsets[i + 1]; ++k)
            if (p.cols[k] != i) {
                A.values[k] = dist(rng);
                off += std::abs(A.values[k]);
            }
        A.values[p.diag[i]] = off + 1.0 + std::abs(dist(rng));
    }
    return A;
}

// partial-pivoting Gaussian elimination, the independent reference
std::vector<double> dense_solve(const SparseMatrix& A,
                                std::vector<double> b) {
    const int n = int(A.rows());
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    const auto& p = *A.pattern;
    for (std::int32_t i = 0; i < n; ++i)
        for (std::int64_t k = p.row_offsets[i]; k < p.row_offsets[i + 1]; ++k)
            m[i][p.cols[k]] = A.values[k];
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        std::swap(m[c], m[piv]);
        std::swap(b[c], b[piv]);
        for (int r = c + 1; r < n; ++r) {
            const double f = m[r][c] / m[c][c];
            for (int j = c; j < n; ++j) m[r][j] -= f * m[c][j];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= m[i][j] * x[j];
        x[i] = s / m[i][i];
    }
    return x;
}

double residual_norm(const SparseMatrix& A, const std::vector<double>& b,
                     const std::vector<double>& x) {
    std::vector<double> r(b.size());
    A.residual(b.data(), x.data(), r.data());
    return simd::norm2(r.data(), r.size());
}

}  // namespace

TEST_CASE("identity matrix with the Jacobi preconditioner") {
    SparseMatrix A(dense_pattern(4));
    for (int i = 0; i < 4; ++i) A.values[A.pattern->diag[i]] = 1.0;
    LinearSolverConfig cfg;
    cfg.precond = Preconditioner::Jacobi;
    PreparedOperator op(A, cfg);
    std::vector<double> x = {3, -1, 2, 0.5}, y(4);
    op.apply_preconditioner(x.data(), y.data());
    CHECK(x == y);
}

TEST_CASE("diagonal matrix, direct solve is elementwise division") {
    SparseMatrix A(dense_pattern(5));
    for (int i = 0; i < 5; ++i) A.values[A.pattern->diag[i]] = double(i + 1);
    LinearSolverConfig cfg;
    cfg.method = KrylovMethod::Direct;
    PreparedOperator op(A, cfg);
    std::vector<double> b = {1, 2, 3, 4, 5}, x(5, 0.0);
    op.solve(b.data(), x.data());
    for (int i = 0; i < 5; ++i) CHECK(x[i] == doctest::Approx(1.0));
}

TEST_CASE("zero right-hand side and zero guess: zero iterations") {
    std::mt19937 rng(5);
    const SparseMatrix A = random_matrix(rng, 8);
    for (auto method : {KrylovMethod::Gmres, KrylovMethod::BiCgStab}) {
        LinearSolverConfig cfg;
        cfg.method = method;
        cfg.atol = 1e-12;
        PreparedOperator op(A, cfg);
        std::vector<double> b(8, 0.0), x(8, 0.0);
        const SolveInfo info = op.solve(b.data(), x.data());
        CHECK(info.iterations == 0);
        for (double v : x) CHECK(v == 0.0);
    }
}

TEST_CASE("SPD system vs the dense oracle") {
    // 1D Laplacian, 5 nodes
    std::vector<std::int32_t> cells = {0, 1, 1, 2, 2, 3, 3, 4};
    auto p = SparsityPattern::build(5, cells, 2);
    SparseMatrix A(p);
    for (std::int32_t i = 0; i < 5; ++i) {
        A.values[p->diag[i]] = 2.0;
        if (i > 0) A.values[p->find(i, i - 1)] = -1.0;
        if (i < 4) A.values[p->find(i, i + 1)] = -1.0;
    }
    std::vector<double> b = {1, 0, 2, -1, 0.5};
    const auto xref = dense_solve(A, b);
    for (auto method : {KrylovMethod::Gmres, KrylovMethod::BiCgStab,
                        KrylovMethod::Direct}) {
        LinearSolverConfig cfg;
        cfg.method = method;
        cfg.atol = 1e-12;
        cfg.precond = Preconditioner::Sor;
        PreparedOperator op(A, cfg);
        std::vector<double> x(5, 0.0);
        op.solve(b.data(), x.data());
        for (int i = 0; i < 5; ++i)
            CHECK(x[i] == doctest::Approx(xref[i]).epsilon(1e-9));
    }
}

TEST_CASE("every method and preconditioner matches the dense oracle") {
    std::mt19937 rng(77);
    std::uniform_int_distribution<int> size(2, 50);
    std::uniform_real_distribution<double> dist(-1, 1);
    int count = 0;
    while (count < 200) {
        const int n = size(rng);
        const SparseMatrix A = random_matrix(rng, n);
        std::vector<double> b(n);
        for (auto& v : b) v = dist(rng);
        const auto xref = dense_solve(A, b);

        for (auto method : {KrylovMethod::Gmres, KrylovMethod::BiCgStab}) {
            for (auto pc :
                 {Preconditioner::None, Preconditioner::Jacobi,
                  Preconditioner::Sor, Preconditioner::BlockJacobi}) {
                LinearSolverConfig cfg;
                cfg.method = method;
                cfg.precond = pc;
                cfg.atol = 1e-12;
                cfg.restart = 60;  // >= n: full GMRES
                cfg.n_blocks = 3;
                cfg.max_iter = 10000;
                PreparedOperator op(A, cfg);
                std::vector<double> x(n, 0.0);
                const SolveInfo info = op.solve(b.data(), x.data());
                CHECK(info.residual < 1e-12);
                CHECK(residual_norm(A, b, x) < 1e-12);
                for (int i = 0; i < n; ++i)
                    CHECK(std::abs(x[i] - xref[i]) < 1e-9);
                ++count;
            }
        }
    }
}

TEST_CASE("preconditioner application is linear") {
    std::mt19937 rng(11);
    const SparseMatrix A = random_matrix(rng, 30);
    std::uniform_real_distribution<double> dist(-1, 1);
    for (auto pc : {Preconditioner::Jacobi, Preconditioner::Sor,
                    Preconditioner::BlockJacobi}) {
        LinearSolverConfig cfg;
        cfg.precond = pc;
        cfg.n_blocks = 4;
        PreparedOperator op(A, cfg);
        std::vector<double> x(30), y(30), px(30), py(30), pz(30), z(30);
        for (int i = 0; i < 30; ++i) {
            x[i] = dist(rng);
            y[i] = dist(rng);
        }
        const double a = 1.3, b = -0.7;
        for (int i = 0; i < 30; ++i) z[i] = a * x[i] + b * y[i];
        op.apply_preconditioner(x.data(), px.data());
        op.apply_preconditioner(y.data(), py.data());
        op.apply_preconditioner(z.data(), pz.data());
        for (int i = 0; i < 30; ++i)
            CHECK(pz[i] ==
                  doctest::Approx(a * px[i] + b * py[i]).epsilon(1e-13));
    }
}

TEST_CASE("full GMRES reproduces the dense solution on random systems") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> dist(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 10;
        const SparseMatrix A = random_matrix(rng, n);
        std::vector<double> b(n);
        for (auto& v : b) v = dist(rng);
        const auto xref = dense_solve(A, b);
        LinearSolverConfig cfg;
        cfg.restart = n + 2;
        cfg.atol = 1e-13;
        cfg.precond = Preconditioner::None;
        PreparedOperator op(A, cfg);
        std::vector<double> x(n, 0.0);
        op.solve(b.data(), x.data());
        for (int i = 0; i < n; ++i) CHECK(std::abs(x[i] - xref[i]) < 1e-10);
    }
}

TEST_CASE("prepared operators solve reproducibly") {
    std::mt19937 rng(17);
    const SparseMatrix A = random_matrix(rng, 40);
    std::vector<double> b(40);
    std::uniform_real_distribution<double> dist(-1, 1);
    for (auto& v : b) v = dist(rng);
    LinearSolverConfig cfg;
    cfg.atol = 1e-11;
    PreparedOperator op(A, cfg);
    std::vector<double> x1(40, 0.0), x2(40, 0.0);
    op.solve(b.data(), x1.data());
    op.solve(b.data(), x2.data());
    CHECK(x1 == x2);  // bitwise
}

TEST_CASE("singular preconditioner and non-convergence are reported") {
    SparseMatrix A(dense_pattern(3));  // zero diagonal
    LinearSolverConfig cfg;
    cfg.precond = Preconditioner::Jacobi;
    CHECK_THROWS_AS(PreparedOperator(A, cfg), SolveError);

    std::mt19937 rng(19);
    const SparseMatrix B = random_matrix(rng, 20);
    LinearSolverConfig tight;
    tight.atol = 1e-13;
    tight.max_iter = 2;
    tight.precond = Preconditioner::None;
    PreparedOperator op(B, tight);
    std::vector<double> b(20, 1.0), x(20, 0.0);
    CHECK_THROWS_AS(op.solve(b.data(), x.data()), SolveError);
}

TEST_CASE("assembled transport operator is accepted by prepare") {
    const ProblemSpec spec = species_concentration();
    const Mesh mesh = spec.make_mesh(2);
    const OperatorSet ops = build_operators(mesh, spec, 0.0);
    const BoundaryClassification bc = classify_boundary(mesh, spec, 0.0);

    // CN matrix: (1/dt) M_L + A/2, Dirichlet rows replaced
    const double dt = 1e-2;
    SparseMatrix cn = ops.low_full;
    const auto& p = *ops.pattern;
    for (auto& v : cn.values) v *= 0.5;
    for (std::int64_t i = 0; i < p.n; ++i)
        cn.values[p.diag[i]] += ops.M_L.m[i] / dt;
    apply_dirichlet_rows(cn, bc);

    for (auto pc : {Preconditioner::Jacobi, Preconditioner::Sor,
                    Preconditioner::BlockJacobi}) {
        LinearSolverConfig cfg;
        cfg.precond = pc;
        cfg.atol = 1e-12;
        cfg.max_iter = 10 * p.n;
        PreparedOperator op(cn, cfg);
        std::vector<double> b(p.n, 1.0), x(p.n, 0.0);
        const SolveInfo info = op.solve(b.data(), x.data());
        CHECK(info.residual < 1e-12);
        CHECK(info.iterations < 10 * p.n);
    }
}
