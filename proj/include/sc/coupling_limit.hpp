#pragma once

#include <functional>
#include <optional>

#include "sc/fit.hpp"
#include "sc/riesz.hpp"

namespace sc {

/// Compression of A onto ran(P): coordinates of P*A*P in an orthonormal
/// basis of ran(P), plus the embedding of its resolvent back into the full
/// space, P (PAP - z)^{-1} P.
struct EffectiveOperator {
    DenseOperator basis_V;    // dim x r, orthonormal columns spanning ran(P)
    DenseOperator compressed; // r x r
    DenseOperator projector;  // the P the compression was built from

    DenseOperator embed_resolvent(Complex z) const;
};

EffectiveOperator effective_operator(const DenseOperator& A, const RieszProjection& rp);

enum class CurveMode { norm, strong };

struct ConvergenceReport {
    Complex z;
    std::vector<double> betas;
    std::vector<double> errors;
    std::vector<bool> valid;  // false where the shifted solve was singular
    double fitted_slope = 0.0;
    double fitted_intercept = 0.0;
    double sup_beta_times_error = 0.0;
    CurveMode mode = CurveMode::norm;
};

ConvergenceReport resolvent_error_curve(const DenseOperator& A, const DenseOperator& B,
                                        const RieszProjection& rp, Complex z,
                                        const std::vector<double>& betas);

ConvergenceReport strong_error_curve(const DenseOperator& A, const DenseOperator& B,
                                     const RieszProjection& rp, Complex z, const Vector& psi,
                                     const std::vector<double>& betas);

FitResult fit_rate(const ConvergenceReport& report);

/// Fill fitted_slope / fitted_intercept / sup_beta_times_error from the
/// valid samples of a report.
void finalize_convergence_report(ConvergenceReport& report);

/// Feasibility report for the lower bound
///   -gamma ||Q phi||^2 <= <A phi, B phi> + <B phi, A phi>,
/// together with its adjoint twin. gamma_star is the smallest feasible gamma
/// (max over the two conditions), +inf if no gamma in range works.
struct AnticommutatorReport {
    double gamma_star = 0.0;
    std::optional<Vector> infeasible_direction;
    DenseOperator hermitianized_form;  // A^H B + B^H A
};

AnticommutatorReport anticommutator_lower_bound_check(const DenseOperator& A,
                                                      const DenseOperator& B,
                                                      const RieszProjection& rp);

struct UniformBoundScan {
    std::vector<double> deltas;
    std::vector<double> left_norms;   // ||Q (B + d(A-z))^{-1}||
    std::vector<double> right_norms;  // ||(B + d(A-z))^{-1} Q||
    std::vector<bool> valid;
    double max_norm = 0.0;
    bool bounded = false;  // last decade of samples varies by < 10%
};

UniformBoundScan uniform_resolvent_bound_scan(const DenseOperator& A, const DenseOperator& B,
                                              const RieszProjection& rp, Complex z,
                                              const std::vector<double>& deltas);

/// Empirical constant bounding ||R_b - R_b'|| * b*b' / |b - b'| over the
/// supplied beta pairs (the second-resolvent-formula expression).
double cauchy_net_check(const DenseOperator& A, const DenseOperator& B, const RieszProjection& rp,
                        Complex z, const std::vector<std::pair<double, double>>& beta_pairs);

/// Residual of the first resolvent identity for the beta -> inf surrogates
/// T_z ~ (A + beta*B - z)^{-1} at a large fixed beta.
double pseudo_resolvent_check(const DenseOperator& A, const DenseOperator& B,
                              const RieszProjection& rp, Complex z, Complex y, double beta_large);

/// 2x2 block form of A + beta*B - z over D = ran(P) and its graph-norm
/// complement, with R = A11^{-1} and the Schur complement S.
struct BlockDecomposition {
    DenseOperator A11, A12, A21, A22;
    DenseOperator B22;  // Q B Q block; A22 = (QA - zQ) block + beta * B22
    DenseOperator R;    // A11^{-1}
    DenseOperator S;    // A22 - A21 R A12
    DenseOperator basis_D, basis_Dperp;       // column (domain) bases
    DenseOperator row_basis_P, row_basis_Q;   // orthonormal bases of ran(P), ran(Q)
    DenseOperator projector;                  // P
    Complex z;
    double beta = 0.0;
};

BlockDecomposition block_decompose(const DenseOperator& A, const DenseOperator& B,
                                   const RieszProjection& rp, Complex z, double beta);

/// Candidate inverse of A + beta*B - z assembled from R and S^{-1} and
/// mapped back to the full space.
DenseOperator schur_inverse(const BlockDecomposition& bd);

/// S^{-1} via the 1/beta-leading Neumann series; returns the approximation
/// in block coordinates and the number of series terms used.
std::pair<DenseOperator, int> neumann_s_inverse(const BlockDecomposition& bd, int max_terms = 64);

}  // namespace sc
