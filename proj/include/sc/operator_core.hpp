#pragma once

#include <optional>

#include "sc/types.hpp"

namespace sc {

/// Eigenvalues of a dense (generally non-normal) operator. Each entry is one
/// eigenvalue as returned by the dense solver; algebraic multiplicities show
/// up as repeated entries, so the list always has `dim` members.
struct Spectrum {
    std::vector<Complex> eigenvalues;
    bool is_reliable = true;  // false when the eigenvector basis is badly conditioned
};

void check_operator(const DenseOperator& M);

/// Spectral norm (largest singular value). Jacobi SVD up to dim 128,
/// divide-and-conquer SVD above that. Accepts rectangular inputs.
double op_norm(const DenseOperator& M);

/// (M - zI)^{-1} by pivoted direct solve. Throws SingularShift when the
/// solve's reciprocal condition estimate falls below 1e-13.
DenseOperator resolvent(const DenseOperator& M, Complex z);

Spectrum spectrum(const DenseOperator& M);

/// Distance from the eigenvalue cluster at lambda0 (everything within
/// cluster_tol of it) to the rest of the spectrum. +inf when the cluster is
/// the whole spectrum.
double spectral_gap_at(const DenseOperator& M, Complex lambda0, double cluster_tol);
double spectral_gap_at(const DenseOperator& M, const Spectrum& spec, Complex lambda0,
                       double cluster_tol);

/// Basis of the complement of span(D), orthogonal to D under the A-graph
/// inner product <x,y> + <Ax,Ay>.
DenseOperator graph_norm_complement(const DenseOperator& A, const DenseOperator& D);

/// Scale-invariant default clustering tolerance, 1e-8 * ||M||.
double default_cluster_tol(const DenseOperator& M);

}  // namespace sc
