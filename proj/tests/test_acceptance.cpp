// Acceptance suite: each test case exercises one release criterion and
// prints a single PASS/FAIL line for it.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "sc/cli.hpp"
#include "sc/coupling_limit.hpp"
#include "sc/graph_reduction.hpp"
#include "sc/model_zoo.hpp"

using namespace sc;

namespace {

void report_line(int index, const char* name, bool pass) {
    std::printf("[criterion %2d] %-38s %s\n", index, name, pass ? "PASS" : "FAIL");
    CHECK(pass);
}

std::vector<double> beta_grid(double lo_exp, double hi_exp, int per_decade) {
    std::vector<double> out;
    const int steps = static_cast<int>(std::llround((hi_exp - lo_exp) * per_decade));
    for (int j = 0; j <= steps; ++j)
        out.push_back(std::pow(10.0, lo_exp + static_cast<double>(j) / per_decade));
    return out;
}

DenseOperator random_complex(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    DenseOperator M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = Complex(g(rng), g(rng));
    return M;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("criterion 1: nilpotent counterexample closed form") {
    const ModelInstance inst = nilpotent_counterexample();
    bool pass = true;

    for (Complex z : {Complex(0.0, 0.0), Complex(2.0, 0.0), Complex(0.5, 0.5)}) {
        for (double beta : {1.0, 10.0, 1e3}) {
            const DenseOperator R = resolvent(DenseOperator(inst.A + beta * inst.B), z);
            const Complex d = 1.0 / ((1.0 - z) * (1.0 - z));
            DenseOperator expected(2, 2);
            expected << d * (1.0 - z), d * (-beta), Complex(0.0), d * (1.0 - z);
            pass = pass && (R - expected).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, beta);
        }
    }

    const auto betas = beta_grid(1.0, 4.0, 5);
    std::vector<double> norms;
    for (double beta : betas)
        norms.push_back(op_norm(resolvent(DenseOperator(inst.A + beta * inst.B),
                                          Complex(0.0, 0.0))));
    const double slope = loglog_fit(betas, norms).slope;
    pass = pass && std::abs(slope - 1.0) <= 0.05;
    report_line(1, "nilpotent closed form + growth slope", pass);
}

TEST_CASE("criterion 2: 3-node graph projector and compression") {
    DirectedGraph g;
    g.add_node("1", 1.0);
    g.add_node("2", 1.0);
    g.add_node("3", 1.0);
    g.add_edge("1", "2", 1.0);
    g.add_edge("2", "1", 1.0);
    g.add_edge("2", "3", 2.0);
    g.add_edge("3", "2", 1.0);

    const RieszProjection rp = cluster_projector(g, {"2", "3"});
    DenseOperator p_expected = DenseOperator::Zero(3, 3);
    p_expected(0, 0) = 1.0;
    p_expected(1, 1) = 1.0 / 3.0;
    p_expected(1, 2) = 2.0 / 3.0;
    p_expected(2, 1) = 1.0 / 3.0;
    p_expected(2, 2) = 2.0 / 3.0;
    bool pass = op_norm(DenseOperator(rp.P - p_expected)) < 1e-8;

    const DenseOperator La = laplacian(g);
    DenseOperator C(3, 2);
    C << 1.0, 0.0, 0.0, 1.0, 0.0, 1.0;
    const DenseOperator X =
        C.colPivHouseholderQr().solve(DenseOperator(rp.P * La * rp.P * C));
    DenseOperator x_expected(2, 2);
    x_expected << 1.0, -1.0, -1.0 / 3.0, 1.0 / 3.0;
    pass = pass && op_norm(DenseOperator(X - x_expected)) < 1e-8;
    report_line(2, "3-node projector + compression", pass);
}

TEST_CASE("criterion 3: 1/beta rate law (doublet + Kirchhoff graphs)") {
    const auto betas = beta_grid(2.0, 5.0, 5);
    const auto band_ok = [&](const ConvergenceReport& rep) {
        double lo = 1e300, hi = 0.0;
        for (std::size_t i = 0; i < rep.betas.size(); ++i) {
            if (!rep.valid[i] || rep.betas[i] < betas.back() / 10.0) continue;
            lo = std::min(lo, rep.betas[i] * rep.errors[i]);
            hi = std::max(hi, rep.betas[i] * rep.errors[i]);
        }
        return rep.fitted_slope >= -1.2 && rep.fitted_slope <= -0.8 && hi <= 10.0 * lo;
    };

    bool pass = true;
    {
        const ModelInstance inst = doublet_momentum_model(128, 2.0 * std::numbers::pi, 1.0);
        const RieszProjection rp = riesz_projector(inst.B, Complex(0.0, 0.0));
        pass = band_ok(resolvent_error_curve(inst.A, inst.B, rp, Complex(0.0, 2.0), betas));
    }
    for (std::uint64_t seed = 1; seed <= 3 && pass; ++seed) {
        // Random symmetric-weight graph, cluster = first 3 nodes.
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.5, 2.0);
        DirectedGraph g;
        const int n = 10;
        for (int i = 0; i < n; ++i) g.add_node("v" + std::to_string(i), 1.0);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                if (j != i + 1 && (rng() & 1u)) continue;
                const double w = u(rng);
                g.add_edge(g.node_ids[i], g.node_ids[j], w);
                g.add_edge(g.node_ids[j], g.node_ids[i], w);
            }
        const std::set<std::string> W = {"v0", "v1", "v2"};
        const DenseOperator Lb = cluster_laplacian(g, W);
        const DenseOperator La = laplacian(g) - Lb;
        const RieszProjection rp = cluster_projector(g, W);
        pass = pass && band_ok(resolvent_error_curve(La, Lb, rp, Complex(-1.0, 0.0), betas));
    }
    report_line(3, "rate law slope + flat beta*e band", pass);
}

TEST_CASE("criterion 4: scaled-resolvent lemma across the zoo") {
    const Complex z(0.0, 2.0);
    const auto betas = beta_grid(2.0, 5.0, 5);
    bool pass = true;

    std::vector<ModelInstance> tagged;
    tagged.push_back(dirac_weak_1d(16, 2.0 * std::numbers::pi, 1.0,
                                   std::vector<double>(16, 1.0)));
    {
        std::vector<double> v(12, 0.0);
        for (int j = 4; j < 12; ++j) v[static_cast<std::size_t>(j)] = j - 3.0;
        tagged.push_back(lattice_dirac_forward(12, v));
    }
    tagged.push_back(doublet_momentum_model(8, 2.0 * std::numbers::pi, 1.0));
    tagged.push_back(finite_rank_perturbation(8, 3, 11));
    tagged.push_back(near_degenerate_b(0.5));

    for (const ModelInstance& inst : tagged) {
        REQUIRE(inst.hypothesis_tags.count(HypothesisTag::quasinilpotent_zero) == 1);
        const RieszProjection rp = riesz_projector(inst.B, Complex(0.0, 0.0));
        const LimitCurve curve = scaled_resolvent_limit_check(inst.B, rp, z, betas);
        bool ok = curve.convergent && std::isfinite(curve.sup_beta_times_deviation);
        // Factor-10 band of beta*deviation over the final two decades.
        double lo = 1e300, hi = 0.0;
        for (std::size_t i = 0; i < betas.size(); ++i) {
            if (betas[i] < betas.back() / 100.0) continue;
            lo = std::min(lo, betas[i] * curve.deviation[i]);
            hi = std::max(hi, betas[i] * curve.deviation[i]);
        }
        ok = ok && hi <= 10.0 * lo;
        pass = pass && ok;
    }

    {
        const ModelInstance nil = nilpotent_counterexample();
        const RieszProjection rp = riesz_projector(nil.B, Complex(0.0, 0.0));
        const LimitCurve curve = scaled_resolvent_limit_check(nil.B, rp, z, betas);
        std::vector<double> bd;
        for (std::size_t i = 0; i < betas.size(); ++i) bd.push_back(betas[i] * curve.deviation[i]);
        pass = pass && !curve.convergent && loglog_fit(betas, bd).slope >= 0.9;
    }
    report_line(4, "scaled-resolvent lemma + counterexample", pass);
}

TEST_CASE("criterion 5: Schur inverse against the direct oracle") {
    bool pass = true;
    int neumann_checked = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        std::mt19937_64 rng(1000 + seed);
        const int dim = 8 + static_cast<int>(rng() % 9);  // 8..16
        const int rank = 2 + static_cast<int>(rng() % 3);
        const ModelInstance inst = finite_rank_perturbation(dim, rank, 5000 + seed);
        const RieszProjection rp = riesz_projector(inst.B, Complex(0.0, 0.0));
        const Complex z(0.0, 2.0);
        const double beta = 1e4;

        const BlockDecomposition bd = block_decompose(inst.A, inst.B, rp, z, beta);
        const DenseOperator T = schur_inverse(bd);
        const DenseOperator M =
            inst.A + beta * inst.B - z * DenseOperator::Identity(dim, dim);
        const DenseOperator R = resolvent(DenseOperator(inst.A + beta * inst.B), z);
        bool ok = op_norm(DenseOperator(T * M - DenseOperator::Identity(dim, dim))) <= 1e-8 &&
                  op_norm(DenseOperator(M * T - DenseOperator::Identity(dim, dim))) <= 1e-8 &&
                  op_norm(DenseOperator(T - R)) <= 1e-8 * op_norm(T);

        // Neumann whenever the first iterate is safely inside the disk.
        const DenseOperator B22inv = bd.B22.partialPivLu().solve(
            DenseOperator::Identity(bd.B22.rows(), bd.B22.cols()));
        if (op_norm(DenseOperator(B22inv * (bd.S - beta * bd.B22))) / beta < 0.5) {
            const auto [sinv, terms] = neumann_s_inverse(bd);
            const DenseOperator direct =
                bd.S.partialPivLu().solve(DenseOperator::Identity(bd.S.rows(), bd.S.cols()));
            ok = ok && op_norm(DenseOperator(sinv - direct)) <= 1e-10;
            ++neumann_checked;
        }
        pass = pass && ok;
    }
    pass = pass && neumann_checked > 0;
    report_line(5, "Schur + Neumann inverse oracle (50 seeds)", pass);
}

TEST_CASE("criterion 6: pseudo-resolvent identity at beta = 1e6") {
    const ModelInstance inst = doublet_momentum_model(16, 2.0 * std::numbers::pi, 1.0);
    const RieszProjection rp = riesz_projector(inst.B, Complex(0.0, 0.0));
    const double res =
        pseudo_resolvent_check(inst.A, inst.B, rp, Complex(0.0, 2.0), Complex(0.0, 3.0), 1e6);
    report_line(6, "pseudo-resolvent residual <= 1e-4", res <= 1e-4);
}

TEST_CASE("criterion 7: anticommutator hypothesis + bisection oracle") {
    bool pass = true;
    {
        const ModelInstance inst = doublet_momentum_model(8, 2.0 * std::numbers::pi, 1.0);
        const RieszProjection rp = riesz_projector(inst.B, Complex(0.0, 0.0));
        const AnticommutatorReport rep = anticommutator_lower_bound_check(inst.A, inst.B, rp);
        pass = rep.gamma_star == 0.0 &&
               op_norm(rep.hermitianized_form) <= 1e-12 * op_norm(inst.A) * op_norm(inst.B);
    }

    // 20 random commuting 8-dimensional pairs with a forced negative product,
    // so gamma_star is strictly positive and the grid oracle meaningful.
    for (std::uint64_t seed = 1; seed <= 20 && pass; ++seed) {
        std::mt19937_64 rng(33 * seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> mag(0.5, 1.5);
        const int dim = 8, zero = 3;
        Eigen::HouseholderQR<DenseOperator> qr(random_complex(dim, rng));
        const DenseOperator V = qr.householderQ() * DenseOperator::Identity(dim, dim);
        Eigen::VectorXd a(dim), b(dim);
        for (int i = 0; i < dim; ++i) {
            a(i) = gauss(rng);
            b(i) = i < zero ? 0.0 : mag(rng);
        }
        a(zero) = -std::abs(a(zero)) - 0.5;  // force a negative a*b product
        const DenseOperator A0 = V * a.cast<Complex>().asDiagonal() * V.adjoint();
        const DenseOperator B0 = V * b.cast<Complex>().asDiagonal() * V.adjoint();
        const DenseOperator A = 0.5 * (A0 + A0.adjoint());
        const DenseOperator B = 0.5 * (B0 + B0.adjoint());
        const RieszProjection rp = riesz_projector(B, Complex(0.0, 0.0));
        const AnticommutatorReport rep = anticommutator_lower_bound_check(A, B, rp);
        REQUIRE(std::isfinite(rep.gamma_star));

        // Brute-force grid oracle, refined in four stages.
        const DenseOperator H = A.adjoint() * B + B.adjoint() * A;
        const DenseOperator QQ = rp.Q.adjoint() * rp.Q;
        const double slack = -1e-10 * op_norm(H);
        const auto feasible = [&](double gamma) {
            Eigen::SelfAdjointEigenSolver<DenseOperator> es(DenseOperator(H + gamma * QQ),
                                                            Eigen::EigenvaluesOnly);
            return es.eigenvalues().minCoeff() >= slack;
        };
        double lo = 0.0, hi = 1e3 * op_norm(H);
        for (int stage = 0; stage < 4; ++stage) {
            const double step = (hi - lo) / 1000.0;
            double first = hi;
            for (int k = 0; k <= 1000; ++k) {
                const double gamma = lo + k * step;
                if (feasible(gamma)) {
                    first = gamma;
                    break;
                }
            }
            hi = first;
            lo = std::max(0.0, first - step);
        }
        pass = std::abs(rep.gamma_star - hi) <= 1e-6 * std::max(hi, 1e-12);
    }
    report_line(7, "anticommutator gamma* oracle (20 seeds)", pass);
}

TEST_CASE("criterion 8: gap-crossover surrogate") {
    bool pass = true;
    const Complex z(0.0, 1.0);
    for (double g : {1e-2, 1e-3}) {
        const ModelInstance inst = near_degenerate_b(g);
        DenseOperator P0 = DenseOperator::Zero(4, 4);
        P0(0, 0) = 1.0;
        const auto deviation = [&](double beta) {
            return op_norm(DenseOperator(resolvent(DenseOperator(beta * inst.B), z) + P0 / z));
        };
        const auto oracle = [&](double beta) {
            double worst = 0.0;
            for (double lam : {g, 2.0 * g, 1.0})
                worst = std::max(worst, std::abs(1.0 / (beta * lam - z)));
            return worst;
        };
        for (double beta : {1.0, std::sqrt(1.0 / (2.0 * g)), 1.0 / (2.0 * g)}) {
            pass = pass && deviation(beta) > 0.5 &&
                   std::abs(deviation(beta) - oracle(beta)) <= 1e-10;
        }
        for (double beta : {1e3 / g, 1e4 / g}) {
            pass = pass && deviation(beta) < 0.1 &&
                   std::abs(deviation(beta) - oracle(beta)) <= 1e-10;
        }
    }
    report_line(8, "gap-crossover scalar formula", pass);
}

TEST_CASE("criterion 9: projector invariants on 200 seeded instances") {
    bool pass = true;
    for (std::uint64_t seed = 1; seed <= 200 && pass; ++seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(1.0, 3.0);
        const int dim = 6 + static_cast<int>(rng() % 5);  // 6..10
        const int mult = 1 + static_cast<int>(rng() % 3);

        // Block-diagonal seed: eigenvalue 0 with the planted multiplicity,
        // the rest kept at distance >= 1.
        DenseOperator D = DenseOperator::Zero(dim, dim);
        for (int i = mult; i < dim; ++i) {
            const double sign = (rng() & 1u) ? 1.0 : -1.0;
            D(i, i) = Complex(sign * u(rng), 0.3 * u(rng));
        }
        const DenseOperator T =
            DenseOperator::Identity(dim, dim) + 0.3 * random_complex(dim, rng);
        if (std::abs(T.partialPivLu().determinant()) < 1e-3) continue;
        const DenseOperator M = T * D * T.partialPivLu().inverse();

        RieszOptions narrow, wide;
        narrow.radius_fraction = 0.3;
        wide.radius_fraction = 0.6;
        const RieszProjection r1 = riesz_projector(M, Complex(0.0, 0.0), narrow);
        const RieszProjection r2 = riesz_projector(M, Complex(0.0, 0.0), wide);
        pass = r1.residual_idempotent <= 1e-9 &&
               std::llround(r1.P.trace().real()) == mult &&
               op_norm(DenseOperator(r1.P - r2.P)) <= 1e-8;
    }
    report_line(9, "projector invariants (200 seeds)", pass);
}

TEST_CASE("criterion 10: CLI determinism, byte-identical reports") {
    namespace fs = std::filesystem;
    cli::ExperimentConfig cfg = cli::parse_config_text(R"({
        "instance": {"generator": "finite_rank_perturbation",
                     "params": {"dim": 8, "rank": 3, "seed": 42}},
        "z_values": [{"re": 0.0, "im": 2.0}],
        "beta_grid": {"min_exponent": 2, "max_exponent": 4, "points_per_decade": 5},
        "checks": ["riesz", "rate", "schur", "cauchy"],
        "seed": 42
    })");
    const fs::path d1 = fs::temp_directory_path() / "sc_accept_det1";
    const fs::path d2 = fs::temp_directory_path() / "sc_accept_det2";
    fs::remove_all(d1);
    fs::remove_all(d2);
    cfg.output_dir = d1.string();
    const int rc1 = cli::run(cfg);
    cfg.output_dir = d2.string();
    const int rc2 = cli::run(cfg);
    const std::string rep1 = slurp(d1 / "report.json");
    const bool pass = rc1 == 0 && rc2 == 0 && !rep1.empty() && rep1 == slurp(d2 / "report.json");
    report_line(10, "deterministic report.json", pass);
}
