#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace afc {

// CSR sparsity pattern shared by all operators assembled on one mesh.
// The pattern is structurally symmetric, column indices are sorted strictly
// increasing per row, and every row contains its diagonal.
struct SparsityPattern {
    std::int64_t n = 0;
    std::vector<std::int64_t> row_offsets;  // size n+1
    std::vector<std::int32_t> cols;         // size nnz
    std::vector<std::int64_t> diag;         // position of (i,i)
    std::vector<std::int64_t> trans;        // position of (cols[k], row_of(k))

    std::int64_t nnz() const { return static_cast<std::int64_t>(cols.size()); }

    std::int64_t find(std::int32_t i, std::int32_t j) const;  // -1 if absent

    // Build from homogeneous cells (flattened vertex indices).
    static std::shared_ptr<const SparsityPattern> build(
        std::int64_t n_nodes, std::span<const std::int32_t> cells,
        int verts_per_cell);
};

struct SparseMatrix {
    std::shared_ptr<const SparsityPattern> pattern;
    std::vector<double> values;

    SparseMatrix() = default;
    explicit SparseMatrix(std::shared_ptr<const SparsityPattern> p)
        : pattern(std::move(p)), values(pattern->nnz(), 0.0) {}

    std::int64_t rows() const { return pattern ? pattern->n : 0; }

    double operator()(std::int32_t i, std::int32_t j) const;

    // y = A x
    void mv(const double* x, double* y) const;
    // y = b - A x
    void residual(const double* b, const double* x, double* y) const;
};

// Scalar field stored on the off-diagonal entries of a shared pattern
// (diagonal slots exist but stay zero). Used for antidiffusive fluxes and
// correction factors.
struct EdgeField {
    std::shared_ptr<const SparsityPattern> pattern;
    std::vector<double> v;

    EdgeField() = default;
    explicit EdgeField(std::shared_ptr<const SparsityPattern> p)
        : pattern(std::move(p)), v(pattern->nnz(), 0.0) {}

    void zero() { std::fill(v.begin(), v.end(), 0.0); }
};

}  // namespace afc
