#include "sc/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace sc {

namespace {

constexpr double kRcondTol = 1e-13;
constexpr int kFullSvdMaxDim = 128;

}  // namespace

void check_operator(const DenseOperator& M) {
    if (M.rows() != M.cols() || M.rows() < 1)
        throw NumericalError("operator must be square with dim >= 1");
    if (!M.allFinite()) throw NumericalError("operator has non-finite entries");
}

double op_norm(const DenseOperator& M) {
    if (M.rows() < 1 || M.cols() < 1)
        throw NumericalError("matrix must be nonempty");
    if (!M.allFinite()) throw NumericalError("operator has non-finite entries");
    if (std::max(M.rows(), M.cols()) <= kFullSvdMaxDim) {
        return Eigen::JacobiSVD<DenseOperator>(M).singularValues()(0);
    }
    // Divide-and-conquer SVD for large inputs: same accuracy class, far
    // cheaper than the Jacobi sweep.
    return Eigen::BDCSVD<DenseOperator>(M).singularValues()(0);
}

DenseOperator resolvent(const DenseOperator& M, Complex z) {
    check_operator(M);
    const Eigen::Index n = M.rows();
    DenseOperator shifted = M - z * DenseOperator::Identity(n, n);
    Eigen::PartialPivLU<DenseOperator> lu(shifted);
    if (lu.rcond() < kRcondTol) {
        const Spectrum spec = spectrum(M);
        Complex nearest = spec.eigenvalues.front();
        for (const Complex& ev : spec.eigenvalues)
            if (std::abs(ev - z) < std::abs(nearest - z)) nearest = ev;
        throw SingularShift(z, nearest);
    }
    return lu.solve(DenseOperator::Identity(n, n));
}

Spectrum spectrum(const DenseOperator& M) {
    check_operator(M);
    Eigen::ComplexEigenSolver<DenseOperator> es(M, /*computeEigenvectors=*/true);
    Spectrum s;
    s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + M.rows());
    // Eigenvector condition estimate: sigma_max / sigma_min of the basis.
    Eigen::JacobiSVD<DenseOperator> svd(es.eigenvectors());
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    s.is_reliable = smin > 0.0 && sv(0) / smin <= 1e8;
    return s;
}

double spectral_gap_at(const DenseOperator& M, const Spectrum& spec, Complex lambda0,
                       double cluster_tol) {
    bool found = false;
    double gap = std::numeric_limits<double>::infinity();
    for (const Complex& ev : spec.eigenvalues) {
        const double d = std::abs(ev - lambda0);
        if (d <= cluster_tol) {
            found = true;
        } else {
            gap = std::min(gap, d);
        }
    }
    if (!found)
        throw NoEigenvalueNear("no eigenvalue within cluster_tol of the requested center");
    (void)M;
    return gap;
}

double spectral_gap_at(const DenseOperator& M, Complex lambda0, double cluster_tol) {
    return spectral_gap_at(M, spectrum(M), lambda0, cluster_tol);
}

DenseOperator graph_norm_complement(const DenseOperator& A, const DenseOperator& D) {
    check_operator(A);
    const Eigen::Index n = A.rows();
    if (D.rows() != n) throw NumericalError("basis row count must match operator dimension");
    const Eigen::Index r = D.cols();
    Eigen::JacobiSVD<DenseOperator> dsvd(D);
    if (r == 0 || dsvd.rank() < r) throw RankDeficient("columns of D are not independent");

    // y is graph-orthogonal to span(D) iff y is orthogonal to the columns of
    // (I + A^H A) D; a full Householder QR of that n x r matrix hands back
    // the orthonormal complement in its trailing columns.
    const DenseOperator gram_cols = D + A.adjoint() * (A * D);
    Eigen::HouseholderQR<DenseOperator> qr(gram_cols);
    const DenseOperator full_q = qr.householderQ() * DenseOperator::Identity(n, n);
    return full_q.rightCols(n - r);
}

double default_cluster_tol(const DenseOperator& M) { return 1e-8 * op_norm(M); }

}  // namespace sc
