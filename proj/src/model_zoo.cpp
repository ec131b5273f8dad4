#include "sc/model_zoo.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sc/operator_core.hpp"

namespace sc {

namespace {

const Complex kI(0.0, 1.0);

// Periodic central difference, antisymmetric so that -i*D is Hermitian.
DenseOperator central_difference(int n, double h) {
    DenseOperator D = DenseOperator::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        D(j, (j + 1) % n) += 1.0 / (2.0 * h);
        D(j, (j + n - 1) % n) -= 1.0 / (2.0 * h);
    }
    return D;
}

// Periodic forward difference psi_{j+1} - psi_j.
DenseOperator forward_difference(int n) {
    DenseOperator F = -DenseOperator::Identity(n, n);
    for (int j = 0; j < n; ++j) F(j, (j + 1) % n) += 1.0;
    return F;
}

void verify_self_adjoint_tag(const ModelInstance& inst) {
    if (!inst.hypothesis_tags.count(HypothesisTag::self_adjoint)) return;
    const double na = op_norm(inst.A), nb = op_norm(inst.B);
    if (op_norm(DenseOperator(inst.A - inst.A.adjoint())) > 1e-12 * std::max(na, 1.0) ||
        op_norm(DenseOperator(inst.B - inst.B.adjoint())) > 1e-12 * std::max(nb, 1.0))
        throw NumericalError("generator bug: self_adjoint tag asserted on a non-Hermitian pair");
}

}  // namespace

std::string to_string(HypothesisTag tag) {
    switch (tag) {
        case HypothesisTag::self_adjoint: return "self_adjoint";
        case HypothesisTag::orthogonal_P: return "orthogonal_P";
        case HypothesisTag::quasinilpotent_zero: return "quasinilpotent_zero";
        case HypothesisTag::kirchhoff: return "kirchhoff";
        case HypothesisTag::rel_bounded: return "rel_bounded";
    }
    return "?";
}

ModelInstance nilpotent_counterexample() {
    ModelInstance inst;
    inst.A = DenseOperator::Identity(2, 2);
    inst.B = DenseOperator::Zero(2, 2);
    inst.B(0, 1) = 1.0;
    inst.description = "2x2 nilpotent perturbation of the identity; resolvent norm grows like beta";
    return inst;
}

ModelInstance dirac_weak_1d(int n, double L, double m, const std::vector<double>& w03) {
    if (n < 8) throw BadGrid("dirac_weak_1d needs at least 8 sites");
    if (!(m > 0.0)) throw BadGrid("mass must be positive");
    if (static_cast<int>(w03.size()) != n) throw BadGrid("w03 must supply one sample per site");

    const double h = L / n;
    const DenseOperator D = central_difference(n, h);
    const DenseOperator In = DenseOperator::Identity(n, n);
    const SpinorLayout layout{n};
    const int dim = layout.dim();

    // Component blocks in order L1, L2, R1, R2.
    DenseOperator A = DenseOperator::Zero(dim, dim);
    A.block(0, 0, n, n) = -kI * D;
    A.block(n, n, n, n) = -kI * D;
    A.block(2 * n, 2 * n, n, n) = kI * D;
    A.block(3 * n, 3 * n, n, n) = kI * D;
    A.block(0, 2 * n, n, n) = m * In;
    A.block(n, 3 * n, n, n) = m * In;
    A.block(2 * n, 0, n, n) = m * In;
    A.block(3 * n, n, n, n) = m * In;

    // B = (W_0^3 / 2) tau^3 on the left-chiral doublet, zero on the right.
    DenseOperator B = DenseOperator::Zero(dim, dim);
    for (int j = 0; j < n; ++j) {
        B(layout.index(0, j), layout.index(0, j)) = 0.5 * w03[j];
        B(layout.index(1, j), layout.index(1, j)) = -0.5 * w03[j];
    }

    ModelInstance inst;
    inst.A = A;
    inst.B = B;
    inst.description = "1+1-d Dirac doublet, W_0^3 background on the left-chiral components";
    inst.hypothesis_tags = {HypothesisTag::self_adjoint, HypothesisTag::orthogonal_P,
                            HypothesisTag::quasinilpotent_zero};

    const bool w_nonvanishing =
        std::all_of(w03.begin(), w03.end(), [](double w) { return w != 0.0; });
    if (w_nonvanishing) {
        DenseOperator limit = DenseOperator::Zero(dim, dim);
        limit.block(2 * n, 2 * n, n, n) = kI * D;
        limit.block(3 * n, 3 * n, n, n) = kI * D;
        inst.expected_limit = limit;
    }
    verify_self_adjoint_tag(inst);
    return inst;
}

ModelInstance lattice_dirac_forward(int n, const std::vector<double>& v) {
    if (n < 4) throw BadGrid("lattice_dirac_forward needs at least 4 sites");
    if (static_cast<int>(v.size()) != n) throw BadGrid("potential must supply one sample per site");
    const bool all_zero = std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
    const bool has_zero = std::any_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
    if (!has_zero) throw EmptyKernel("trapping potential has no zero sites");

    const DenseOperator F = forward_difference(n);
    const int dim = 2 * n;
    DenseOperator A = DenseOperator::Zero(dim, dim);
    A.block(0, n, n, n) = -kI * F;  // sigma_x swaps the spin components
    A.block(n, 0, n, n) = -kI * F;

    DenseOperator B = DenseOperator::Zero(dim, dim);
    for (int j = 0; j < n; ++j) {
        B(j, j) = v[j];
        B(n + j, n + j) = v[j];
    }

    ModelInstance inst;
    inst.A = A;
    inst.B = B;
    inst.description = "forward-difference lattice Dirac with a trapping potential";
    inst.hypothesis_tags = {HypothesisTag::orthogonal_P, HypothesisTag::quasinilpotent_zero};

    if (!all_zero) {
        DenseOperator P = DenseOperator::Zero(dim, dim);
        for (int j = 0; j < n; ++j)
            if (v[j] == 0.0) {
                P(j, j) = 1.0;
                P(n + j, n + j) = 1.0;
            }
        inst.expected_limit = P * A * P;
    }
    return inst;
}

ModelInstance doublet_momentum_model(int n, double L, double m, double k) {
    if (n < 8) throw BadGrid("doublet_momentum_model needs at least 8 sites");
    if (!(m > 0.0)) throw BadGrid("mass must be positive");

    const double h = L / n;
    const DenseOperator D = central_difference(n, h);
    const DenseOperator In = DenseOperator::Identity(n, n);
    const int dim = 4 * n;

    // Single fermion block: -i sigma_x d/dx + m sigma_z, spin-major.
    DenseOperator K = DenseOperator::Zero(2 * n, 2 * n);
    K.block(0, 0, n, n) = m * In;
    K.block(n, n, n, n) = -m * In;
    K.block(0, n, n, n) = -kI * D;
    K.block(n, 0, n, n) = -kI * D;

    DenseOperator A = DenseOperator::Zero(dim, dim);
    A.block(0, 0, 2 * n, 2 * n) = K;
    A.block(2 * n, 2 * n, 2 * n, 2 * n) = K;

    // B = sigma_y on the first fermion only.
    DenseOperator B = DenseOperator::Zero(dim, dim);
    B.block(0, n, n, n) = -kI * In;
    B.block(n, 0, n, n) = kI * In;

    ModelInstance inst;
    inst.A = A;
    inst.B = B;
    inst.description = "doublet at transverse momentum placeholder k = " + std::to_string(k) +
                       "; B boosts the first fermion only";
    inst.hypothesis_tags = {HypothesisTag::self_adjoint, HypothesisTag::orthogonal_P,
                            HypothesisTag::quasinilpotent_zero};

    DenseOperator limit = DenseOperator::Zero(dim, dim);
    limit.block(2 * n, 2 * n, 2 * n, 2 * n) = K;
    inst.expected_limit = limit;
    verify_self_adjoint_tag(inst);
    return inst;
}

ModelInstance finite_rank_perturbation(int dim, int rank, std::uint64_t seed) {
    if (rank < 1 || rank >= dim) throw NumericalError("need 1 <= rank < dim");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto draw = [&]() { return Complex(gauss(rng), gauss(rng)) / std::sqrt(2.0); };

    DenseOperator G(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) G(i, j) = draw();
    DenseOperator A = 0.5 * (G + G.adjoint());

    DenseOperator X(dim, rank);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < rank; ++j) X(i, j) = draw();
    Eigen::HouseholderQR<DenseOperator> qr(X);
    const DenseOperator V =
        qr.householderQ() * DenseOperator::Identity(dim, rank);

    std::uniform_real_distribution<double> mag(0.5, 1.5);
    std::bernoulli_distribution sign(0.5);
    Eigen::VectorXd lambda(rank);
    for (int j = 0; j < rank; ++j) lambda(j) = (sign(rng) ? 1.0 : -1.0) * mag(rng);
    DenseOperator B = V * lambda.cast<Complex>().asDiagonal() * V.adjoint();
    B = 0.5 * (B + B.adjoint());

    ModelInstance inst;
    inst.A = A;
    inst.B = B;
    inst.description = "random Hermitian pair, rank-" + std::to_string(rank) +
                       " perturbation, seed " + std::to_string(seed);
    inst.hypothesis_tags = {HypothesisTag::self_adjoint, HypothesisTag::orthogonal_P,
                            HypothesisTag::quasinilpotent_zero};

    const DenseOperator P = DenseOperator::Identity(dim, dim) - V * V.adjoint();
    inst.expected_limit = P * A * P;
    verify_self_adjoint_tag(inst);
    return inst;
}

ModelInstance near_degenerate_b(double gap) {
    if (!(gap > 0.0) || !(gap < 1.0)) throw NumericalError("need 0 < gap < 1");
    DenseOperator B = DenseOperator::Zero(4, 4);
    B(1, 1) = gap;
    B(2, 2) = 2.0 * gap;
    B(3, 3) = 1.0;

    DenseOperator A(4, 4);
    A << Complex(2.0, 0.0), Complex(1.0, 0.0), Complex(0.0, 0.0), Complex(0.0, 1.0),
        Complex(1.0, 0.0), Complex(0.0, 0.0), Complex(1.0, 0.0), Complex(0.0, 0.0),
        Complex(0.0, 0.0), Complex(1.0, 0.0), Complex(-1.0, 0.0), Complex(1.0, 0.0),
        Complex(0.0, -1.0), Complex(0.0, 0.0), Complex(1.0, 0.0), Complex(1.0, 0.0);

    ModelInstance inst;
    inst.A = A;
    inst.B = B;
    inst.description = "near-degenerate B = diag(0, g, 2g, 1) with g = " + std::to_string(gap);
    inst.hypothesis_tags = {HypothesisTag::self_adjoint, HypothesisTag::orthogonal_P,
                            HypothesisTag::quasinilpotent_zero};
    verify_self_adjoint_tag(inst);
    return inst;
}

}  // namespace sc
