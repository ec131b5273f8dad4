#pragma once

#include <map>
#include <set>
#include <string>

#include "sc/coupling_limit.hpp"
#include "sc/riesz.hpp"

namespace sc {

/// Mass-weighted directed weighted graph. Node ordering is the insertion
/// (file) order and fixes the Laplacian's standard basis.
struct DirectedGraph {
    std::vector<std::string> node_ids;
    std::vector<double> mass;                            // per node, positive
    std::map<std::pair<int, int>, double> edge_weights;  // (src,dst) -> a >= 0

    int index_of(const std::string& id) const;
    int size() const { return static_cast<int>(node_ids.size()); }
    void add_node(const std::string& id, double m);
    void add_edge(const std::string& src, const std::string& dst, double weight);
    void validate() const;
};

DirectedGraph parse_graph_file(const std::string& path);

/// [L f](x) = (1/m(x)) sum_y a(x,y) (f(x) - f(y)) in the standard node basis.
DenseOperator laplacian(const DirectedGraph& g);

/// Per-node |out-degree - in-degree|; all zeros iff the Kirchhoff assumption
/// holds.
std::map<std::string, double> kirchhoff_deficit(const DirectedGraph& g);

/// Riesz projector at 0 of the cluster subgraph Laplacian L_b (weights
/// restricted to W, extended by zero). Oblique when the W weights are not
/// symmetric.
RieszProjection cluster_projector(const DirectedGraph& g, const std::set<std::string>& cluster);

/// Laplacian of the W-subgraph alone (weights between W nodes only).
DenseOperator cluster_laplacian(const DirectedGraph& g, const std::set<std::string>& cluster);

enum class SupernodeConvention {
    mass_weighted,  // supernode value = (1/m(w)) sum_W m(x) f(x)
    plain_mean      // supernode value = (1/m(w)) sum_W f(x)
};

struct ReducedGraph {
    DirectedGraph graph;        // on (V \ W) u {w}
    std::string supernode;      // id of w
    DenseOperator embedding;    // n x n_red: functions on the reduced graph into ran(P)
    DenseOperator compression;  // n_red x n: adjoint of the embedding w.r.t. the mass inner products
};

ReducedGraph reduce_graph(const DirectedGraph& g, const std::set<std::string>& cluster,
                          SupernodeConvention convention = SupernodeConvention::mass_weighted);

struct ReductionReport {
    ConvergenceReport curve;
    double identification_residual = 0.0;  // ||P L_a P - J L_red J*||
    double kirchhoff_deficit_w = 0.0;      // max deficit of the W-subgraph
    bool kirchhoff_ok = false;
};

/// Checks that the reduced-graph Laplacian reproduces the compression P L_a P
/// and that the resolvent error decays like 1/beta.
ReductionReport verify_reduction(const DirectedGraph& g, const std::set<std::string>& cluster,
                                 Complex z, const std::vector<double>& betas);

}  // namespace sc
