#pragma once

#include <memory>
#include <vector>

#include "afc/mesh.hpp"
#include "afc/problems.hpp"
#include "afc/sparse.hpp"

namespace afc {

struct LumpedMass {
    std::vector<double> m;

    double total() const;
};

struct AssemblyOptions {
    int quad_order = 2;  // 2 or 3
};

std::shared_ptr<const SparsityPattern> build_pattern(const Mesh& mesh);

// m_ij = (phi_j, phi_i), symmetric positive definite.
SparseMatrix assemble_mass(const Mesh& mesh,
                           std::shared_ptr<const SparsityPattern> pattern,
                           const AssemblyOptions& opts = {});

// Exact row sums of the consistent mass matrix; throws on nonpositive m_i.
LumpedMass lump_mass(const SparseMatrix& M_C);

// a_ij = eps (grad phi_j, grad phi_i) + (b.grad phi_j, phi_i) + (c phi_j, phi_i).
// With convective_only the diffusive and reactive parts are dropped.
SparseMatrix assemble_stiffness(const Mesh& mesh, const ProblemSpec& spec,
                                double t,
                                std::shared_ptr<const SparsityPattern> pattern,
                                const AssemblyOptions& opts = {},
                                bool convective_only = false);

// d_ij = -max{a_ij, 0, a_ji} for i != j, d_ii = -sum_{j != i} d_ij.
SparseMatrix artificial_diffusion(const SparseMatrix& A);

// F_i = (f, phi_i); requires homogeneous Neumann data.
std::vector<double> assemble_rhs(const Mesh& mesh, const ProblemSpec& spec,
                                 double t, const AssemblyOptions& opts = {});

// Same shared pattern.
SparseMatrix matrix_sum(const SparseMatrix& A, const SparseMatrix& B);

// Replaces Dirichlet rows by identity rows.
void apply_dirichlet_rows(SparseMatrix& A, const BoundaryClassification& bc);
// Sets rhs_i = u_D at Dirichlet nodes.
void apply_dirichlet_rhs(std::vector<double>& rhs,
                         const BoundaryClassification& bc);

struct OperatorSet {
    std::shared_ptr<const SparsityPattern> pattern;
    SparseMatrix M_C;
    LumpedMass M_L;
    SparseMatrix A_full, D_full, low_full;  // low_full = A_full + D_full
    // convective-only track (eps = 0, c = 0); present when requested
    SparseMatrix A_conv, D_conv, low_mc;  // low_mc = A_full + D_conv
    std::vector<double> F;
    bool has_conv_track = false;
};

OperatorSet build_operators(const Mesh& mesh, const ProblemSpec& spec, double t,
                            const AssemblyOptions& opts = {},
                            bool with_conv_track = false);

// Stiffness copy with a_ij zeroed for non-Dirichlet i, Dirichlet j, and the
// artificial diffusion built from it. This is the limiter's matrix view: it
// suppresses antidiffusive fluxes across the Dirichlet boundary. The solved
// system keeps the standard low-order operator.
struct LpOperators {
    SparseMatrix A, D;
};
LpOperators build_lp_operators(const SparseMatrix& A_full,
                               const BoundaryClassification& bc);

}  // namespace afc
