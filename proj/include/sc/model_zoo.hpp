#pragma once

#include <cstdint>
#include <optional>
#include <set>

#include "sc/types.hpp"

namespace sc {

enum class HypothesisTag {
    self_adjoint,
    orthogonal_P,
    quasinilpotent_zero,
    kirchhoff,
    rel_bounded,
};

std::string to_string(HypothesisTag tag);

struct ModelInstance {
    DenseOperator A;
    DenseOperator B;
    std::string description;
    std::optional<DenseOperator> expected_limit;  // compression of A where the source states it
    std::set<HypothesisTag> hypothesis_tags;
};

/// Component-major layout of a 1+1-d spinor doublet: four component blocks
/// of n_sites each, in the order psi_L^(1), psi_L^(2), psi_R^(1), psi_R^(2).
struct SpinorLayout {
    int n_sites = 0;
    static constexpr int components = 4;
    int dim() const { return components * n_sites; }
    int index(int component, int site) const { return component * n_sites + site; }
};

/// A = I, B = [[0,1],[0,0]]: the 2x2 pair whose resolvent norm grows
/// linearly in beta.
ModelInstance nilpotent_counterexample();

/// 1+1-d Dirac doublet with a W_0^3 background coupling only the left-chiral
/// components. Central differences on a periodic grid of n sites, spacing L/n.
ModelInstance dirac_weak_1d(int n, double L, double m, const std::vector<double>& w03);

/// Forward-difference lattice Dirac H0 (normal, non-Hermitian) plus a real
/// trapping potential as B. Layout: spin-major, two blocks of n sites.
ModelInstance lattice_dirac_forward(int n, const std::vector<double>& v);

/// Two decoupled 1+1-d Dirac fermions with B = sigma_y acting on the first
/// fermion only. Layout: fermion-major, each fermion spin-major over n sites.
ModelInstance doublet_momentum_model(int n, double L, double m, double k = 0.0);

/// Random Hermitian A with a rank-deficient Hermitian B; seeded and
/// bit-reproducible.
ModelInstance finite_rank_perturbation(int dim, int rank, std::uint64_t seed);

/// B = diag(0, gap, 2 gap, 1) with a fixed Hermitian A: surrogate for the
/// loss of norm convergence as the gap closes.
ModelInstance near_degenerate_b(double gap);

}  // namespace sc
