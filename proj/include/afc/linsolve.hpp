#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "afc/sparse.hpp"

namespace afc {

enum class KrylovMethod { Gmres, BiCgStab, Direct };
enum class Preconditioner { None, Jacobi, Sor, BlockJacobi };

struct LinearSolverConfig {
    KrylovMethod method = KrylovMethod::Gmres;
    Preconditioner precond = Preconditioner::Jacobi;
    int restart = 30;
    double sor_omega = 1.0;
    int n_blocks = 1;
    double atol = 1e-12;   // stopping rule: Euclidean residual < atol (rtol=0)
    std::int64_t max_iter = 100000;
};

struct SolveInfo {
    std::int64_t iterations = 0;
    double residual = 0.0;
};

KrylovMethod parse_method(const std::string& s);
Preconditioner parse_precond(const std::string& s);
std::string to_string(KrylovMethod m);
std::string to_string(Preconditioner p);

// Preconditioner / factorization state built once per matrix; the matrix
// itself is referenced, not copied, and must outlive the prepared operator.
class PreparedOperator {
public:
    PreparedOperator(const SparseMatrix& A, const LinearSolverConfig& cfg);

    // x holds the initial guess on entry and the solution on return.
    SolveInfo solve(const double* b, double* x) const;

    const SparseMatrix& matrix() const { return *A_; }
    const LinearSolverConfig& config() const { return cfg_; }

    // y = M^{-1} x
    void apply_preconditioner(const double* x, double* y) const;

private:
    SolveInfo solve_gmres(const double* b, double* x) const;
    SolveInfo solve_bicgstab(const double* b, double* x) const;
    SolveInfo solve_direct(const double* b, double* x) const;

    const SparseMatrix* A_;
    LinearSolverConfig cfg_;

    std::vector<double> inv_diag_;  // Jacobi / SOR

    struct IluBlock {
        std::int64_t row_begin = 0, row_end = 0;
        std::vector<std::int64_t> row_offsets;
        std::vector<std::int32_t> cols;  // block-local
        std::vector<double> val;
        std::vector<std::int64_t> diag;
    };
    std::vector<IluBlock> blocks_;

    // direct path: banded LU (no pivoting) or dense LU with partial pivoting
    bool dense_lu_ = false;
    std::int64_t band_ = 0;
    std::vector<double> factor_;
    std::vector<std::int32_t> pivots_;
};

inline PreparedOperator prepare(const SparseMatrix& A,
                                const LinearSolverConfig& cfg) {
    return PreparedOperator(A, cfg);
}

}  // namespace afc
