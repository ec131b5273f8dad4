#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sc/riesz.hpp"

using namespace sc;

namespace {

std::vector<double> beta_grid(double lo_exp, double hi_exp, int per_decade) {
    std::vector<double> out;
    const int steps = static_cast<int>(std::llround((hi_exp - lo_exp) * per_decade));
    for (int j = 0; j <= steps; ++j)
        out.push_back(std::pow(10.0, lo_exp + static_cast<double>(j) / per_decade));
    return out;
}

}  // namespace

TEST_CASE("projector of diag(0,0,3) at 0 is diag(1,1,0)") {
    DenseOperator B = DenseOperator::Zero(3, 3);
    B(2, 2) = 3.0;
    const RieszProjection rp = riesz_projector(B, Complex(0.0, 0.0));
    DenseOperator expected = DenseOperator::Identity(3, 3);
    expected(2, 2) = 0.0;
    CHECK(op_norm(DenseOperator(rp.P - expected)) < 1e-10);
    CHECK(rp.residual_idempotent < 1e-10);
    CHECK(projector_is_orthogonal(rp));
    CHECK(quasinilpotent_vanishes(rp));
}

TEST_CASE("oblique projector of a non-normal 2x2") {
    // B = [[0, 1], [0, 2]]: kernel span{e1}, eigenvector (1,2)/sqrt(5) at 2.
    DenseOperator B = DenseOperator::Zero(2, 2);
    B(0, 1) = 1.0;
    B(1, 1) = 2.0;
    const RieszProjection rp = riesz_projector(B, Complex(0.0, 0.0));
    DenseOperator expected = DenseOperator::Zero(2, 2);
    expected(0, 0) = 1.0;
    expected(0, 1) = -0.5;
    CHECK(op_norm(DenseOperator(rp.P - expected)) < 1e-10);
    CHECK_FALSE(projector_is_orthogonal(rp));
    CHECK(quasinilpotent_vanishes(rp));
}

TEST_CASE("whole-spectrum cluster yields the identity projector") {
    // sigma(B) = {0} for the nilpotent block, so P must be I.
    DenseOperator B = DenseOperator::Zero(2, 2);
    B(0, 1) = 1.0;
    const RieszProjection rp = riesz_projector(B, Complex(0.0, 0.0));
    CHECK(op_norm(DenseOperator(rp.P - DenseOperator::Identity(2, 2))) < 1e-9);
    // The quasi-nilpotent part P*B = B does not vanish here.
    CHECK_FALSE(quasinilpotent_vanishes(rp));
    CHECK(rp.quasinilpotent_norm == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("projector does not depend on the contour radius") {
    DenseOperator B = DenseOperator::Zero(3, 3);
    B(1, 1) = 1.0;
    B(2, 2) = 4.0;
    B(0, 1) = 0.3;  // make it non-normal
    RieszOptions a, b;
    a.radius_fraction = 0.3;
    b.radius_fraction = 0.7;
    const RieszProjection ra = riesz_projector(B, Complex(0.0, 0.0), a);
    const RieszProjection rb = riesz_projector(B, Complex(0.0, 0.0), b);
    CHECK(op_norm(DenseOperator(ra.P - rb.P)) < 1e-9);
}

TEST_CASE("quadrature converges fast: few node doublings suffice") {
    DenseOperator B = DenseOperator::Zero(4, 4);
    B(1, 1) = 1.0;
    B(2, 2) = 2.0;
    B(3, 3) = 3.0;
    const RieszProjection rp = riesz_projector(B, Complex(0.0, 0.0));
    CHECK(rp.nodes <= 512);
    CHECK(rp.residual_idempotent < 1e-12);
}

TEST_CASE("non-isolated center throws NotIsolated") {
    DenseOperator B = DenseOperator::Zero(2, 2);
    B(1, 1) = 5e-11;  // second eigenvalue inside 10x cluster_tol of 0
    RieszOptions opts;
    opts.cluster_tol = 1e-11;
    CHECK_THROWS_AS((void)riesz_projector(B, Complex(0.0, 0.0), opts), NotIsolated);
}

TEST_CASE("rank stability under a tiny perturbation") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    DenseOperator B = DenseOperator::Zero(5, 5);
    B(3, 3) = 2.0;
    B(4, 4) = 3.0;
    DenseOperator E(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) E(i, j) = Complex(g(rng), g(rng));
    E *= 1e-9 / op_norm(E);
    const RieszProjection r0 = riesz_projector(B, Complex(0.0, 0.0));
    const RieszProjection r1 = riesz_projector(DenseOperator(B + E), Complex(0.0, 0.0));
    CHECK(std::llround(r0.P.trace().real()) == 3);
    CHECK(std::llround(r1.P.trace().real()) == 3);
    CHECK(op_norm(DenseOperator(r0.P - r1.P)) < 1e-6);
}

TEST_CASE("scaled resolvent converges to -P/z with O(1/beta) rate") {
    DenseOperator B = DenseOperator::Zero(3, 3);
    B(1, 1) = 2.0;
    B(2, 2) = 5.0;
    const RieszProjection rp = riesz_projector(B, Complex(0.0, 0.0));
    const Complex z(0.0, 1.0);
    const auto betas = beta_grid(2.0, 5.0, 5);
    const LimitCurve curve = scaled_resolvent_limit_check(B, rp, z, betas);
    CHECK(curve.convergent);
    // Scalar oracle: deviation = max over nonzero eigenvalues lambda of
    // |1/(beta*lambda - z) + 0| with the P-part exact; here the dominant term
    // is 1/|beta*2 - i|.
    for (std::size_t i = 0; i < betas.size(); ++i) {
        const double oracle = std::abs(1.0 / (betas[i] * 2.0 - z));
        CHECK(curve.deviation[i] == doctest::Approx(oracle).epsilon(1e-8));
    }
    CHECK(curve.sup_beta_times_deviation < 1.0);
}

TEST_CASE("scaled resolvent diverges linearly for the nilpotent block") {
    DenseOperator B = DenseOperator::Zero(2, 2);
    B(0, 1) = 1.0;
    const RieszProjection rp = riesz_projector(B, Complex(0.0, 0.0));
    const Complex z(0.0, 1.0);
    const auto betas = beta_grid(2.0, 5.0, 5);
    const LimitCurve curve = scaled_resolvent_limit_check(B, rp, z, betas);
    CHECK_FALSE(curve.convergent);
    CHECK(curve.divergence_slope == doctest::Approx(1.0).epsilon(0.05));
    // Oracle: (beta*B - z)^{-1} = (-1/z) I - (beta/z^2) B, norm ~ beta for
    // z = i and large beta.
    const double beta = betas.back();
    CHECK(curve.resolvent_norm.back() ==
          doctest::Approx(op_norm(DenseOperator(-DenseOperator::Identity(2, 2) / z -
                                                (beta / (z * z)) * B)))
              .epsilon(1e-10));
}

TEST_CASE("scaled resolvent check validates its preconditions") {
    DenseOperator B = DenseOperator::Zero(2, 2);
    B(1, 1) = 1.0;
    const RieszProjection rp = riesz_projector(B, Complex(0.0, 0.0));
    const std::vector<double> betas = {100.0, 1000.0};
    CHECK_THROWS_AS((void)scaled_resolvent_limit_check(B, rp, Complex(0.0, 0.0), betas),
                    NumericalError);
    const std::vector<double> decreasing = {1000.0, 100.0};
    CHECK_THROWS_AS((void)scaled_resolvent_limit_check(B, rp, Complex(0.0, 1.0), decreasing),
                    NumericalError);
    // beta below the 2|z|/gap safety margin is rejected up front.
    const std::vector<double> too_small = {1.0, 10.0, 100.0};
    CHECK_THROWS_AS((void)scaled_resolvent_limit_check(B, rp, Complex(10.0, 0.0), too_small),
                    NumericalError);
}
