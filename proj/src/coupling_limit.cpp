#include "sc/coupling_limit.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace sc {

namespace {

constexpr double kRcondTol = 1e-13;

// Orthonormal basis of the range of a projector: left singular vectors with
// singular value above 1/2 (an idempotent has singular values in {0} u [1, inf)).
DenseOperator projector_range_basis(const DenseOperator& P, bool check_ambiguous = true) {
    // Singular values decide the rank; the divide-and-conquer SVD used for
    // large inputs can leave its singular subspaces several digits short, so
    // the basis is refined afterwards by one application of P (the range of
    // an idempotent matrix is exactly its column space).
    Eigen::VectorXd sv;
    DenseOperator U;
    if (P.rows() <= 128) {
        Eigen::JacobiSVD<DenseOperator> svd(P, Eigen::ComputeThinU);
        sv = svd.singularValues();
        U = svd.matrixU();
    } else {
        Eigen::BDCSVD<DenseOperator> svd(P, Eigen::ComputeThinU);
        sv = svd.singularValues();
        U = svd.matrixU();
    }
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (check_ambiguous && sv(i) > 0.2 && sv(i) < 0.8)
            throw RankCollapse("numerical rank of the projector is ambiguous");
        if (sv(i) > 0.5) ++r;
    }
    if (r == 0) return U.leftCols(0);
    const DenseOperator refined = P * U.leftCols(r);
    Eigen::HouseholderQR<DenseOperator> qr(refined);
    return qr.householderQ() * DenseOperator::Identity(P.rows(), r);
}

DenseOperator inverse_checked(const DenseOperator& M, const char* what) {
    Eigen::PartialPivLU<DenseOperator> lu(M);
    if (lu.rcond() < kRcondTol) throw SchurSingular(std::string(what) + " is numerically singular");
    return lu.solve(DenseOperator::Identity(M.rows(), M.cols()));
}

double lambda_min_hermitian(const DenseOperator& H) {
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(H, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

}  // namespace

void finalize_convergence_report(ConvergenceReport& rep) {
    rep.sup_beta_times_error = 0.0;
    std::vector<double> bs, es;
    for (std::size_t i = 0; i < rep.betas.size(); ++i) {
        if (!rep.valid[i]) continue;
        bs.push_back(rep.betas[i]);
        es.push_back(rep.errors[i]);
        rep.sup_beta_times_error = std::max(rep.sup_beta_times_error, rep.betas[i] * rep.errors[i]);
    }
    try {
        const FitResult f = loglog_fit(bs, es);
        rep.fitted_slope = f.slope;
        rep.fitted_intercept = f.intercept;
    } catch (const TooFewPoints&) {
        rep.fitted_slope = std::numeric_limits<double>::quiet_NaN();
        rep.fitted_intercept = std::numeric_limits<double>::quiet_NaN();
    }
}

DenseOperator EffectiveOperator::embed_resolvent(Complex z) const {
    const Eigen::Index r = compressed.rows();
    Eigen::PartialPivLU<DenseOperator> lu(compressed - z * DenseOperator::Identity(r, r));
    if (lu.rcond() < kRcondTol)
        throw EffectiveSingular("z is in the spectrum of the compressed operator");
    const DenseOperator inv = lu.solve(DenseOperator::Identity(r, r));
    return projector * (basis_V * inv * basis_V.adjoint()) * projector;
}

EffectiveOperator effective_operator(const DenseOperator& A, const RieszProjection& rp) {
    check_operator(A);
    EffectiveOperator eff;
    eff.basis_V = projector_range_basis(rp.P);
    eff.projector = rp.P;
    const DenseOperator pap = rp.P * A * rp.P;
    // Columns of P A P V lie in ran(P) = span(V), so coordinates are V^H (.).
    eff.compressed = eff.basis_V.adjoint() * (pap * eff.basis_V);
    return eff;
}

ConvergenceReport resolvent_error_curve(const DenseOperator& A, const DenseOperator& B,
                                        const RieszProjection& rp, Complex z,
                                        const std::vector<double>& betas) {
    const EffectiveOperator eff = effective_operator(A, rp);
    const DenseOperator limit = eff.embed_resolvent(z);  // throws EffectiveSingular
    ConvergenceReport rep;
    rep.z = z;
    rep.betas = betas;
    rep.mode = CurveMode::norm;
    for (double beta : betas) {
        try {
            const DenseOperator R = resolvent(DenseOperator(A + beta * B), z);
            rep.errors.push_back(op_norm(R - limit));
            rep.valid.push_back(true);
        } catch (const SingularShift&) {
            rep.errors.push_back(std::numeric_limits<double>::quiet_NaN());
            rep.valid.push_back(false);
        }
    }
    finalize_convergence_report(rep);
    return rep;
}

ConvergenceReport strong_error_curve(const DenseOperator& A, const DenseOperator& B,
                                     const RieszProjection& rp, Complex z, const Vector& psi,
                                     const std::vector<double>& betas) {
    const double na = op_norm(A), nb = op_norm(B);
    if (op_norm(DenseOperator(A - A.adjoint())) > 1e-12 * std::max(na, 1.0) ||
        op_norm(DenseOperator(B - B.adjoint())) > 1e-12 * std::max(nb, 1.0))
        throw NotSelfAdjoint("strong-mode curves require self-adjoint A and B");
    if (z.imag() == 0.0) throw NotSelfAdjoint("strong-mode curves require Im(z) != 0");

    const EffectiveOperator eff = effective_operator(A, rp);
    const Vector limit_psi = eff.embed_resolvent(z) * psi;
    ConvergenceReport rep;
    rep.z = z;
    rep.betas = betas;
    rep.mode = CurveMode::strong;
    for (double beta : betas) {
        try {
            const DenseOperator R = resolvent(DenseOperator(A + beta * B), z);
            rep.errors.push_back((R * psi - limit_psi).norm());
            rep.valid.push_back(true);
        } catch (const SingularShift&) {
            rep.errors.push_back(std::numeric_limits<double>::quiet_NaN());
            rep.valid.push_back(false);
        }
    }
    finalize_convergence_report(rep);
    return rep;
}

FitResult fit_rate(const ConvergenceReport& report) {
    std::vector<double> bs, es;
    for (std::size_t i = 0; i < report.betas.size(); ++i) {
        if (i < report.valid.size() && !report.valid[i]) continue;
        bs.push_back(report.betas[i]);
        es.push_back(report.errors[i]);
    }
    return loglog_fit(bs, es);
}

AnticommutatorReport anticommutator_lower_bound_check(const DenseOperator& A,
                                                      const DenseOperator& B,
                                                      const RieszProjection& rp) {
    if (!projector_is_orthogonal(rp, 1e-8))
        throw NonOrthogonalProjector("anticommutator bound requires an orthogonal Riesz projector");

    const DenseOperator V = projector_range_basis(rp.P);
    const DenseOperator QQ = rp.Q.adjoint() * rp.Q;

    AnticommutatorReport rep;
    rep.hermitianized_form = A.adjoint() * B + B.adjoint() * A;
    rep.gamma_star = 0.0;

    const DenseOperator pairs[2][2] = {{A, B}, {A.adjoint(), B.adjoint()}};
    for (const auto& pair : pairs) {
        const DenseOperator H = pair[0].adjoint() * pair[1] + pair[1].adjoint() * pair[0];
        const double nh = op_norm(H);
        const double slack = 1e-10 * nh;

        // On ran(P) the gamma term vanishes, so a negative eigenvalue of the
        // restriction is an outright infeasibility witness.
        Eigen::SelfAdjointEigenSolver<DenseOperator> es_p(DenseOperator(V.adjoint() * H * V));
        if (es_p.eigenvalues()(0) < -slack) {
            rep.gamma_star = std::numeric_limits<double>::infinity();
            rep.infeasible_direction = Vector(V * es_p.eigenvectors().col(0));
            return rep;
        }

        const auto feasible = [&](double gamma) {
            return lambda_min_hermitian(DenseOperator(H + gamma * QQ)) >= -slack;
        };
        if (feasible(0.0)) continue;
        double lo = 0.0, hi = 1e3 * nh;
        if (!feasible(hi)) {
            rep.gamma_star = std::numeric_limits<double>::infinity();
            return rep;
        }
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (feasible(mid) ? hi : lo) = mid;
        }
        rep.gamma_star = std::max(rep.gamma_star, hi);
    }
    return rep;
}

UniformBoundScan uniform_resolvent_bound_scan(const DenseOperator& A, const DenseOperator& B,
                                              const RieszProjection& rp, Complex z,
                                              const std::vector<double>& deltas) {
    UniformBoundScan scan;
    scan.deltas = deltas;
    const Eigen::Index n = B.rows();
    for (double delta : deltas) {
        const DenseOperator M = B + delta * (A - z * DenseOperator::Identity(n, n));
        Eigen::PartialPivLU<DenseOperator> lu(M);
        if (lu.rcond() < kRcondTol) {
            scan.left_norms.push_back(std::numeric_limits<double>::quiet_NaN());
            scan.right_norms.push_back(std::numeric_limits<double>::quiet_NaN());
            scan.valid.push_back(false);
            continue;
        }
        const DenseOperator Minv = lu.solve(DenseOperator::Identity(n, n));
        const double l = op_norm(DenseOperator(rp.Q * Minv));
        const double r = op_norm(DenseOperator(Minv * rp.Q));
        scan.left_norms.push_back(l);
        scan.right_norms.push_back(r);
        scan.valid.push_back(true);
        scan.max_norm = std::max({scan.max_norm, l, r});
    }
    // Boundedness heuristic: within the last sampled decade the combined norm
    // stays inside a 10% band.
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < deltas.size(); ++i)
        if (scan.valid[i]) dmin = std::min(dmin, deltas[i]);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!scan.valid[i] || deltas[i] > 10.0 * dmin) continue;
        const double m = std::max(scan.left_norms[i], scan.right_norms[i]);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    scan.bounded = std::isfinite(lo) && hi <= 1.1 * lo;
    return scan;
}

double cauchy_net_check(const DenseOperator& A, const DenseOperator& B, const RieszProjection& rp,
                        Complex z, const std::vector<std::pair<double, double>>& beta_pairs) {
    (void)rp;
    double worst = 0.0;
    for (const auto& [b1, b2] : beta_pairs) {
        if (b1 == b2) continue;
        const DenseOperator R1 = resolvent(DenseOperator(A + b1 * B), z);
        const DenseOperator R2 = resolvent(DenseOperator(A + b2 * B), z);
        worst = std::max(worst, op_norm(R1 - R2) * b1 * b2 / std::abs(b1 - b2));
    }
    return worst;
}

double pseudo_resolvent_check(const DenseOperator& A, const DenseOperator& B,
                              const RieszProjection& rp, Complex z, Complex y, double beta_large) {
    (void)rp;
    if (z == y) throw NumericalError("pseudo-resolvent check needs two distinct shifts");
    const DenseOperator M = A + beta_large * B;
    const DenseOperator Tz = resolvent(M, z);
    const DenseOperator Ty = resolvent(M, y);
    return op_norm(DenseOperator(Tz - Ty - (z - y) * Tz * Ty));
}

BlockDecomposition block_decompose(const DenseOperator& A, const DenseOperator& B,
                                   const RieszProjection& rp, Complex z, double beta) {
    check_operator(A);
    const Eigen::Index n = A.rows();
    const DenseOperator I = DenseOperator::Identity(n, n);

    BlockDecomposition bd;
    bd.z = z;
    bd.beta = beta;
    bd.projector = rp.P;
    bd.basis_D = projector_range_basis(rp.P);
    bd.basis_Dperp = graph_norm_complement(A, bd.basis_D);
    bd.row_basis_P = bd.basis_D;
    bd.row_basis_Q = projector_range_basis(rp.Q);

    const DenseOperator rowP = bd.row_basis_P.adjoint() * rp.P;
    const DenseOperator rowQ = bd.row_basis_Q.adjoint() * rp.Q;

    // Block structure: the perturbation enters only the (2,2) block
    // (B annihilates ran(P) from both sides when the quasi-nilpotent part
    // vanishes), and the (2,1) block carries no shift because Q kills ran(P).
    bd.A11 = rowP * (A - z * I) * bd.basis_D;
    bd.A12 = rowP * (A - z * I) * bd.basis_Dperp;
    bd.A21 = rowQ * A * bd.basis_D;
    bd.B22 = rowQ * B * bd.basis_Dperp;
    bd.A22 = rowQ * (A - z * I) * bd.basis_Dperp + beta * bd.B22;

    Eigen::PartialPivLU<DenseOperator> lu11(bd.A11);
    if (lu11.rcond() < kRcondTol)
        throw EffectiveSingular("P A P - z is singular on ran(P)");
    bd.R = lu11.solve(DenseOperator::Identity(bd.A11.rows(), bd.A11.cols()));
    bd.S = bd.A22 - bd.A21 * bd.R * bd.A12;

    Eigen::PartialPivLU<DenseOperator> luS(bd.S);
    if (luS.rcond() < kRcondTol)
        throw SchurSingular("Schur complement is numerically singular (beta too small)");
    return bd;
}

DenseOperator schur_inverse(const BlockDecomposition& bd) {
    const DenseOperator Sinv = inverse_checked(bd.S, "Schur complement");
    const DenseOperator T11 = bd.R + bd.R * bd.A12 * Sinv * bd.A21 * bd.R;
    const DenseOperator T12 = -bd.R * bd.A12 * Sinv;
    const DenseOperator T21 = -Sinv * bd.A21 * bd.R;
    const DenseOperator& T22 = Sinv;

    const DenseOperator rowP = bd.row_basis_P.adjoint() * bd.projector;
    const DenseOperator rowQ =
        bd.row_basis_Q.adjoint() *
        (DenseOperator::Identity(bd.projector.rows(), bd.projector.cols()) - bd.projector);
    return bd.basis_D * (T11 * rowP + T12 * rowQ) + bd.basis_Dperp * (T21 * rowP + T22 * rowQ);
}

std::pair<DenseOperator, int> neumann_s_inverse(const BlockDecomposition& bd, int max_terms) {
    // S = beta * B22 + K with K independent of beta, so
    //   S^{-1} = (1/beta) sum_k (-B22^{-1} K / beta)^k B22^{-1}.
    const double beta = bd.beta;
    const DenseOperator K = bd.S - beta * bd.B22;
    const Eigen::Index m = bd.S.rows();

    Eigen::PartialPivLU<DenseOperator> lu(bd.B22);
    if (lu.rcond() < kRcondTol)
        throw SchurSingular("Q B Q block is numerically singular");
    const DenseOperator B22inv = lu.solve(DenseOperator::Identity(m, m));
    const DenseOperator iterate = -(B22inv * K) / beta;
    if (op_norm(iterate) >= 1.0)
        throw SeriesDiverges("first Neumann term has norm >= 1 (beta too small)");

    DenseOperator term = B22inv / beta;
    DenseOperator sum = term;
    int used = 1;
    for (int k = 1; k < max_terms; ++k) {
        term = iterate * term;
        sum += term;
        ++used;
        if (op_norm(term) < 1e-14 * op_norm(sum)) break;
    }
    return {sum, used};
}

}  // namespace sc
