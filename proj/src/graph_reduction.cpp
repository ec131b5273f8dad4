#include "sc/graph_reduction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace sc {

int DirectedGraph::index_of(const std::string& id) const {
    const auto it = std::find(node_ids.begin(), node_ids.end(), id);
    if (it == node_ids.end()) throw NumericalError("unknown node id: " + id);
    return static_cast<int>(it - node_ids.begin());
}

void DirectedGraph::add_node(const std::string& id, double m) {
    if (std::find(node_ids.begin(), node_ids.end(), id) != node_ids.end())
        throw NumericalError("duplicate node id: " + id);
    if (!(m > 0.0)) throw NumericalError("node mass must be positive: " + id);
    node_ids.push_back(id);
    mass.push_back(m);
}

void DirectedGraph::add_edge(const std::string& src, const std::string& dst, double weight) {
    if (weight < 0.0) throw NumericalError("edge weight must be nonnegative");
    const auto key = std::make_pair(index_of(src), index_of(dst));
    if (edge_weights.count(key)) throw NumericalError("duplicate edge " + src + " -> " + dst);
    edge_weights[key] = weight;
}

void DirectedGraph::validate() const {
    if (node_ids.empty()) throw NumericalError("graph has no nodes");
    for (double m : mass)
        if (!(m > 0.0)) throw NumericalError("node mass must be positive");
}

DirectedGraph parse_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NumericalError("cannot open graph file: " + path);
    DirectedGraph g;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string kind;
        if (!(ss >> kind)) continue;
        if (kind == "node") {
            std::string id;
            double m;
            if (!(ss >> id >> m))
                throw NumericalError("malformed node record at line " + std::to_string(lineno));
            g.add_node(id, m);
        } else if (kind == "edge") {
            std::string src, dst;
            double w;
            if (!(ss >> src >> dst >> w))
                throw NumericalError("malformed edge record at line " + std::to_string(lineno));
            g.add_edge(src, dst, w);
        } else {
            throw NumericalError("unknown record '" + kind + "' at line " + std::to_string(lineno));
        }
    }
    g.validate();
    return g;
}

DenseOperator laplacian(const DirectedGraph& g) {
    g.validate();
    const int n = g.size();
    DenseOperator L = DenseOperator::Zero(n, n);
    for (const auto& [key, w] : g.edge_weights) {
        const auto [x, y] = key;
        if (x == y) continue;  // self loops do not enter the Laplacian
        L(x, x) += w / g.mass[x];
        L(x, y) -= w / g.mass[x];
    }
    return L;
}

std::map<std::string, double> kirchhoff_deficit(const DirectedGraph& g) {
    std::map<std::string, double> deficit;
    const int n = g.size();
    std::vector<double> out(n, 0.0), in(n, 0.0);
    for (const auto& [key, w] : g.edge_weights) {
        out[key.first] += w;
        in[key.second] += w;
    }
    for (int i = 0; i < n; ++i) deficit[g.node_ids[i]] = std::abs(out[i] - in[i]);
    return deficit;
}

DenseOperator cluster_laplacian(const DirectedGraph& g, const std::set<std::string>& cluster) {
    const int n = g.size();
    std::vector<bool> in_w(n, false);
    for (const auto& id : cluster) in_w[g.index_of(id)] = true;
    DenseOperator L = DenseOperator::Zero(n, n);
    for (const auto& [key, w] : g.edge_weights) {
        const auto [x, y] = key;
        if (x == y || !in_w[x] || !in_w[y]) continue;
        L(x, x) += w / g.mass[x];
        L(x, y) -= w / g.mass[x];
    }
    return L;
}

RieszProjection cluster_projector(const DirectedGraph& g, const std::set<std::string>& cluster) {
    if (cluster.empty() || static_cast<int>(cluster.size()) >= g.size())
        throw NumericalError("cluster must be a nonempty proper subset of the nodes");
    const DenseOperator Lb = cluster_laplacian(g, cluster);
    const int n = g.size();

    // Expected kernel: indicators outside W plus the constants on W. Anything
    // beyond that means the W-subgraph splits into several zero-clusters.
    const Spectrum spec = spectrum(Lb);
    const double tol = std::max(default_cluster_tol(Lb), 1e-12);
    int zero_count = 0;
    for (const Complex& ev : spec.eigenvalues)
        if (std::abs(ev) <= tol) ++zero_count;
    const int expected = n - static_cast<int>(cluster.size()) + 1;
    if (zero_count > expected)
        throw ClusterDisconnected("0-eigenvalue multiplicity of the W-subgraph exceeds 1");

    return riesz_projector(Lb, Complex(0.0, 0.0));
}

ReducedGraph reduce_graph(const DirectedGraph& g, const std::set<std::string>& cluster,
                          SupernodeConvention convention) {
    if (cluster.empty() || static_cast<int>(cluster.size()) > g.size())
        throw NumericalError("cluster must be a nonempty subset of the nodes");
    const int n = g.size();
    std::vector<bool> in_w(n, false);
    for (const auto& id : cluster) in_w[g.index_of(id)] = true;

    if (cluster.size() == 1) {
        ReducedGraph rg;
        rg.graph = g;
        rg.supernode = *cluster.begin();
        rg.embedding = DenseOperator::Identity(n, n);
        rg.compression = DenseOperator::Identity(n, n);
        return rg;
    }
    if (static_cast<int>(cluster.size()) == n)
        throw NumericalError("cluster must be a proper subset of the nodes");

    ReducedGraph rg;
    rg.supernode = "w";
    while (std::find(g.node_ids.begin(), g.node_ids.end(), rg.supernode) != g.node_ids.end())
        rg.supernode += "_";

    // Reduced node order: original order with the W block replaced by the
    // supernode at the position of the first W node.
    std::vector<int> red_of(n, -1);
    int w_index = -1;
    double w_mass = 0.0;
    for (int i = 0; i < n; ++i) {
        if (in_w[i]) {
            w_mass += g.mass[i];
            if (w_index < 0) {
                w_index = rg.graph.size();
                rg.graph.add_node(rg.supernode, 1.0);  // mass patched below
            }
            red_of[i] = w_index;
        } else {
            red_of[i] = rg.graph.size();
            rg.graph.add_node(g.node_ids[i], g.mass[i]);
        }
    }
    rg.graph.mass[w_index] = w_mass;

    for (const auto& [key, w] : g.edge_weights) {
        const int rx = red_of[key.first], ry = red_of[key.second];
        if (rx == ry) continue;  // intra-cluster weights collapse away
        rg.graph.edge_weights[{rx, ry}] += w;
    }

    const int nr = rg.graph.size();
    rg.embedding = DenseOperator::Zero(n, nr);
    for (int i = 0; i < n; ++i) rg.embedding(i, red_of[i]) = 1.0;

    rg.compression = DenseOperator::Zero(nr, n);
    for (int i = 0; i < n; ++i) {
        if (!in_w[i]) {
            rg.compression(red_of[i], i) = 1.0;
        } else if (convention == SupernodeConvention::mass_weighted) {
            rg.compression(w_index, i) = g.mass[i] / w_mass;
        } else {
            rg.compression(w_index, i) = 1.0 / w_mass;
        }
    }
    return rg;
}

ReductionReport verify_reduction(const DirectedGraph& g, const std::set<std::string>& cluster,
                                 Complex z, const std::vector<double>& betas) {
    const RieszProjection rp = cluster_projector(g, cluster);
    const ReducedGraph red = reduce_graph(g, cluster);
    const DenseOperator La = laplacian(g);
    const DenseOperator Lb = cluster_laplacian(g, cluster);
    const DenseOperator Lred = laplacian(red.graph);
    const DenseOperator& J = red.embedding;
    const DenseOperator& Js = red.compression;

    ReductionReport rep;
    rep.identification_residual = op_norm(DenseOperator(rp.P * La * rp.P - J * Lred * Js));

    double deficit = 0.0;
    std::vector<bool> in_w(g.size(), false);
    for (const auto& id : cluster) in_w[g.index_of(id)] = true;
    std::vector<double> out(g.size(), 0.0), in(g.size(), 0.0);
    for (const auto& [key, w] : g.edge_weights) {
        if (!in_w[key.first] || !in_w[key.second]) continue;
        out[key.first] += w;
        in[key.second] += w;
    }
    for (int i = 0; i < g.size(); ++i)
        if (in_w[i]) deficit = std::max(deficit, std::abs(out[i] - in[i]));
    rep.kirchhoff_deficit_w = deficit;
    rep.kirchhoff_ok = deficit <= 1e-12 * std::max(op_norm(Lb), 1.0);

    rep.curve.z = z;
    rep.curve.betas = betas;
    rep.curve.mode = CurveMode::norm;
    const DenseOperator limit = J * resolvent(Lred, z) * Js;
    for (double beta : betas) {
        try {
            const DenseOperator R = resolvent(DenseOperator(La + beta * Lb), z);
            rep.curve.errors.push_back(op_norm(DenseOperator(R - limit)));
            rep.curve.valid.push_back(true);
        } catch (const SingularShift&) {
            rep.curve.errors.push_back(std::numeric_limits<double>::quiet_NaN());
            rep.curve.valid.push_back(false);
        }
    }
    finalize_convergence_report(rep.curve);
    return rep;
}

}  // namespace sc
