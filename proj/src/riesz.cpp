#include "sc/riesz.hpp"

#include <cmath>
#include <numbers>

#include "sc/fit.hpp"

namespace sc {

namespace {

// Pairwise reduction keeps the summation order fixed and well conditioned
// regardless of how the node evaluations were scheduled.
DenseOperator pairwise_sum(std::vector<DenseOperator>& terms) {
    std::size_t count = terms.size();
    while (count > 1) {
        const std::size_t half = count / 2;
        for (std::size_t i = 0; i < half; ++i) terms[i] = terms[2 * i] + terms[2 * i + 1];
        if (count % 2 == 1) {
            terms[half] = terms[count - 1];
            count = half + 1;
        } else {
            count = half;
        }
    }
    return terms[0];
}

// (1/2pi i) oint (B - z)^{-1} dz on the circle center+r*e^{it}, trapezoid
// with n equispaced nodes.
DenseOperator contour_trapezoid(const DenseOperator& B, Complex center, double r, int n) {
    std::vector<DenseOperator> terms;
    terms.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / n;
        const Complex w = r * std::exp(Complex(0.0, theta));
        // (1/2pi i) oint (z - B)^{-1} dz = -(1/2pi i) oint (B - z)^{-1} dz.
        terms.push_back(-w * resolvent(B, center + w));
    }
    DenseOperator sum = pairwise_sum(terms);
    return sum / static_cast<double>(n);
}

}  // namespace

RieszProjection riesz_projector(const DenseOperator& B, Complex lambda0, const RieszOptions& opts) {
    check_operator(B);
    const double norm_b = op_norm(B);
    const double cluster_tol = opts.cluster_tol >= 0.0 ? opts.cluster_tol : 1e-8 * norm_b;
    const double gap = spectral_gap_at(B, lambda0, cluster_tol);
    if (!(gap > 10.0 * cluster_tol))
        throw NotIsolated("spectral gap at the requested center is below 10x the cluster tolerance");

    // An infinite gap means the whole spectrum sits in the cluster; any
    // contour enclosing it works, so fall back to a radius beyond ||B||.
    const double radius = std::isfinite(gap)
                              ? opts.radius_fraction * gap
                              : 2.0 * (norm_b + std::abs(lambda0) + 1.0);
    int n = opts.initial_nodes;
    DenseOperator P = contour_trapezoid(B, lambda0, radius, n);
    while (true) {
        const DenseOperator refined = contour_trapezoid(B, lambda0, radius, 2 * n);
        const double diff = op_norm(refined - P);
        P = refined;
        n *= 2;
        if (diff <= opts.tol) break;
        if (n >= opts.max_nodes)
            throw QuadratureStall("node limit reached before quadrature tolerance");
    }

    RieszProjection rp;
    rp.P = P;
    rp.Q = DenseOperator::Identity(B.rows(), B.cols()) - P;
    rp.center = lambda0;
    rp.radius = radius;
    rp.nodes = n;
    rp.gap = gap;
    rp.source_norm = norm_b;
    rp.residual_idempotent = op_norm(P * P - P);
    rp.quasinilpotent_norm = op_norm(P * B);
    double commute = 0.0;
    for (int j = 0; j < 8; ++j) {
        const double theta = 2.0 * std::numbers::pi * (j + 0.5) / 8.0;
        const Complex z = lambda0 + radius * std::exp(Complex(0.0, theta));
        const DenseOperator R = resolvent(B, z);
        commute = std::max(commute, op_norm(P * R - R * P));
    }
    rp.residual_commute = commute;
    return rp;
}

bool quasinilpotent_vanishes(const RieszProjection& rp, double tol) {
    return rp.quasinilpotent_norm <= tol * rp.source_norm;
}

bool projector_is_orthogonal(const RieszProjection& rp, double tol) {
    const double norm_p = op_norm(rp.P);
    return op_norm(rp.P - DenseOperator(rp.P.adjoint())) <= tol * norm_p;
}

LimitCurve scaled_resolvent_limit_check(const DenseOperator& B, const RieszProjection& rp,
                                        Complex z, const std::vector<double>& betas) {
    if (z == Complex(0.0, 0.0)) throw NumericalError("z must be nonzero");
    for (std::size_t i = 1; i < betas.size(); ++i)
        if (!(betas[i] > betas[i - 1])) throw NumericalError("betas must be strictly increasing");
    if (!betas.empty() && rp.gap > 0.0 && betas.front() < 2.0 * std::abs(z) / rp.gap)
        throw NumericalError("smallest beta must be at least 2|z|/gap");

    LimitCurve curve;
    curve.z = z;
    curve.betas = betas;
    const DenseOperator limit = rp.P / (-z);
    for (double beta : betas) {
        DenseOperator R;
        try {
            R = resolvent(DenseOperator(beta * B), z);
        } catch (const SingularShift&) {
            throw ShiftInSpectrum("beta*B - z is singular at beta = " + std::to_string(beta));
        }
        const double d = op_norm(R - limit);
        curve.deviation.push_back(d);
        curve.resolvent_norm.push_back(op_norm(R));
        curve.sup_beta_times_deviation = std::max(curve.sup_beta_times_deviation, beta * d);
    }
    const bool bp_zero = op_norm(B * rp.P) <= 1e-10 * rp.source_norm;
    curve.convergent = quasinilpotent_vanishes(rp) && bp_zero;
    if (!bp_zero && betas.size() >= 4) {
        curve.divergence_slope = loglog_fit(curve.betas, curve.resolvent_norm).slope;
    }
    return curve;
}

}  // namespace sc
