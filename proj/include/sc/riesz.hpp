#pragma once

#include "sc/operator_core.hpp"
#include "sc/types.hpp"

namespace sc {

/// Spectral projector at an isolated eigenvalue, obtained by trapezoidal
/// quadrature of the resolvent around a circular contour, together with the
/// diagnostics used by the hypothesis checkers downstream.
struct RieszProjection {
    DenseOperator P;
    DenseOperator Q;  // I - P
    Complex center;
    double radius = 0.0;
    int nodes = 0;
    double residual_idempotent = 0.0;  // ||P^2 - P||
    double residual_commute = 0.0;     // max over contour samples of ||P R(z) - R(z) P||
    double quasinilpotent_norm = 0.0;  // ||P B||
    double gap = 0.0;                  // spectral gap at the center
    double source_norm = 0.0;          // ||B||
};

struct RieszOptions {
    double tol = 1e-10;
    double cluster_tol = -1.0;  // negative: use 1e-8 * ||B||
    double radius_fraction = 0.5;
    int initial_nodes = 32;
    int max_nodes = 1 << 14;
};

RieszProjection riesz_projector(const DenseOperator& B, Complex lambda0,
                                const RieszOptions& opts = {});

bool quasinilpotent_vanishes(const RieszProjection& rp, double tol = 1e-10);

bool projector_is_orthogonal(const RieszProjection& rp, double tol = 1e-10);

/// Per-beta samples of the distance between the scaled resolvent
/// (beta*B - z)^{-1} and its candidate limit -P/z, plus the raw resolvent
/// norms used to detect divergence.
struct LimitCurve {
    Complex z;
    std::vector<double> betas;
    std::vector<double> deviation;       // ||(bB - z)^{-1} + P/z||
    std::vector<double> resolvent_norm;  // ||(bB - z)^{-1}||
    double sup_beta_times_deviation = 0.0;
    bool convergent = false;           // quasi-nilpotent part vanishes
    double divergence_slope = 0.0;     // log-log slope of resolvent_norm when it does not
};

LimitCurve scaled_resolvent_limit_check(const DenseOperator& B, const RieszProjection& rp,
                                        Complex z, const std::vector<double>& betas);

}  // namespace sc
