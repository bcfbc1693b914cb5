#pragma once

#include <vector>

#include "afc/assembly.hpp"
#include "afc/mesh.hpp"
#include "afc/problems.hpp"
#include "afc/sparse.hpp"

namespace afc {

// Stencil extrema over the matrix stencil N_i (node i and its neighbors).
struct LocalBounds {
    std::vector<double> umin, umax;
};

// Per-node patch constants of the linearity-preserving limiter.
struct PatchConstant {
    std::vector<double> gamma;
    std::vector<double> q;  // q_i = -gamma_i * sum_{j != i} d_ij
};

double minmod(double a, double b);

LocalBounds compute_local_bounds(const double* u, const SparsityPattern& pat);

// r_ij <- minmod(r_ij, L d_ij (u_j - u_i)) on every edge.
void prelimit_minmod(EdgeField& r, const double* u, const SparseMatrix& D,
                     double L = 2.0);

// Correction factors from flux sums P, predictor increments Q and bounds R.
// Dirichlet rows and vanishing P give R = 1.
void zalesak(const EdgeField& r, const double* u_tilde, const LumpedMass& m,
             double dt, const BoundaryClassification& bc, EdgeField& alpha);

// Limited fluxes r* from the bar-state bounds; edges with d_ij = 0 get r*=0.
void mc_limit(const EdgeField& r, const double* u, const LocalBounds& bounds,
              const SparseMatrix& A_conv, const SparseMatrix& D_conv,
              EdgeField& r_star);

// Upwind-sum limiter; alpha is symmetric by construction.
void mu_limit(const EdgeField& r_ss, const SparseMatrix& A,
              const BoundaryClassification& bc, EdgeField& alpha);

// Linearity-preserving limiter for P1 meshes.
void lp_limit(const EdgeField& r_ss, const double* u, const LocalBounds& bounds,
              const PatchConstant& pc, const BoundaryClassification& bc,
              EdgeField& alpha);

// Minimal per-node constant gamma_i such that the limiter bounds dominate the
// flux sums for every affine field and every admissible artificial diffusion;
// computed by enumerating the vertices of the patch polytope
// {g : g.(x_j - x_i) <= 1 for all neighbors j}. P1 meshes only.
PatchConstant compute_gamma(const Mesh& mesh, const SparseMatrix& D);

// F*_i = sum_j alpha_ij r_ij on non-Dirichlet rows (Dirichlet rows get 0).
void assemble_correction(const EdgeField& alpha, const EdgeField& r,
                         const BoundaryClassification& bc, double* f_star);
// Same with premultiplied limited fluxes r*.
void assemble_correction(const EdgeField& r_star,
                         const BoundaryClassification& bc, double* f_star);

}  // namespace afc
