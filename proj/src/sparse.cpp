#include "afc/sparse.hpp"

#include <algorithm>
#include <cstring>

#include "afc/errors.hpp"
#include "afc/simd/kernels.hpp"

namespace afc {

std::int64_t SparsityPattern::find(std::int32_t i, std::int32_t j) const {
    const auto b = cols.begin() + row_offsets[i];
    const auto e = cols.begin() + row_offsets[i + 1];
    const auto it = std::lower_bound(b, e, j);
    if (it == e || *it != j) return -1;
    return it - cols.begin();
}

std::shared_ptr<const SparsityPattern> SparsityPattern::build(
    std::int64_t n_nodes, std::span<const std::int32_t> cells,
    int verts_per_cell) {
    const std::int64_t n_cells = cells.size() / verts_per_cell;

    // Gather all (i,j) pairs touched by a cell, dedupe via sort.
    std::vector<std::int64_t> keys;
    keys.reserve(n_cells * verts_per_cell * verts_per_cell);
    for (std::int64_t c = 0; c < n_cells; ++c) {
        const std::int32_t* cv = cells.data() + c * verts_per_cell;
        for (int a = 0; a < verts_per_cell; ++a)
            for (int b = 0; b < verts_per_cell; ++b)
                keys.push_back(static_cast<std::int64_t>(cv[a]) * n_nodes + cv[b]);
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

    auto p = std::make_shared<SparsityPattern>();
    p->n = n_nodes;
    p->row_offsets.assign(n_nodes + 1, 0);
    p->cols.resize(keys.size());
    for (std::size_t k = 0; k < keys.size(); ++k) {
        const std::int64_t i = keys[k] / n_nodes;
        p->cols[k] = static_cast<std::int32_t>(keys[k] % n_nodes);
        ++p->row_offsets[i + 1];
    }
    for (std::int64_t i = 0; i < n_nodes; ++i)
        p->row_offsets[i + 1] += p->row_offsets[i];

    p->diag.resize(n_nodes);
    for (std::int64_t i = 0; i < n_nodes; ++i) {
        const std::int64_t d = p->find(static_cast<std::int32_t>(i),
                                       static_cast<std::int32_t>(i));
        if (d < 0) throw Error("sparsity pattern misses a diagonal entry");
        p->diag[i] = d;
    }

    p->trans.resize(p->cols.size());
    for (std::int64_t i = 0; i < n_nodes; ++i)
        for (std::int64_t k = p->row_offsets[i]; k < p->row_offsets[i + 1]; ++k) {
            const std::int64_t t =
                p->find(p->cols[k], static_cast<std::int32_t>(i));
            if (t < 0) throw Error("sparsity pattern is not structurally symmetric");
            p->trans[k] = t;
        }
    return p;
}

double SparseMatrix::operator()(std::int32_t i, std::int32_t j) const {
    const std::int64_t k = pattern->find(i, j);
    return k < 0 ? 0.0 : values[k];
}

void SparseMatrix::mv(const double* x, double* y) const {
    simd::spmv(pattern->row_offsets.data(), pattern->cols.data(), values.data(),
               x, y, static_cast<std::size_t>(pattern->n));
}

void SparseMatrix::residual(const double* b, const double* x, double* y) const {
    mv(x, y);
    simd::waxpby(y, 1.0, b, -1.0, y, static_cast<std::size_t>(pattern->n));
}

}  // namespace afc
