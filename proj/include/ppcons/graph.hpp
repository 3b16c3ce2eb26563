#pragma once

// Undirected graphs with a fixed edge orientation, their incidence algebra,
// and the plug-and-play composition of two graphs.

#include "ppcons/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ppcons {

using NodeId = int;

/// An oriented edge: `plus` is the "+" end, `minus` the "-" end.
struct Edge {
    NodeId plus;
    NodeId minus;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Orientation-free key of an undirected edge, smaller label first.
using EdgeKey = std::pair<NodeId, NodeId>;

[[nodiscard]] inline EdgeKey edge_key(NodeId i, NodeId j) noexcept {
    return i < j ? EdgeKey{i, j} : EdgeKey{j, i};
}

[[nodiscard]] inline std::string edge_name(NodeId i, NodeId j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

class Graph {
public:
    Graph() = default;

    /// Intra-network construction: the smaller label of each edge is the "+" end.
    Graph(std::vector<NodeId> nodes, const std::vector<std::pair<NodeId, NodeId>>& edges)
        : nodes_(std::move(nodes)) {
        edges_.reserve(edges.size());
        for (const auto& [i, j] : edges) {
            edges_.push_back(i < j ? Edge{i, j} : Edge{j, i});
        }
        build();
    }

    /// Keeps the given orientation and column order verbatim.
    [[nodiscard]] static Graph from_oriented(std::vector<NodeId> nodes, std::vector<Edge> edges) {
        Graph g;
        g.nodes_ = std::move(nodes);
        g.edges_ = std::move(edges);
        g.build();
        return g;
    }

    [[nodiscard]] const std::vector<NodeId>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }
    [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }

    [[nodiscard]] bool has_node(NodeId id) const { return index_.contains(id); }

    /// Row of `id` in the incidence matrix.
    [[nodiscard]] std::size_t index_of(NodeId id) const {
        auto it = index_.find(id);
        if (it == index_.end()) {
            throw ValidationError("unknown node " + std::to_string(id));
        }
        return it->second;
    }

    [[nodiscard]] std::optional<std::size_t> find_edge(NodeId i, NodeId j) const {
        auto it = edge_index_.find(edge_key(i, j));
        if (it == edge_index_.end()) return std::nullopt;
        return it->second;
    }

    [[nodiscard]] bool adjacent(NodeId i, NodeId j) const { return find_edge(i, j).has_value(); }

    /// Column indices of the edges incident to `id` (positive and negative ends).
    [[nodiscard]] const std::vector<std::size_t>& incident_edges(NodeId id) const {
        return incident_[index_of(id)];
    }

    [[nodiscard]] std::size_t degree(NodeId id) const { return incident_edges(id).size(); }

    [[nodiscard]] std::vector<NodeId> neighbors(NodeId id) const {
        std::vector<NodeId> out;
        for (std::size_t k : incident_edges(id)) {
            const Edge& e = edges_[k];
            out.push_back(e.plus == id ? e.minus : e.plus);
        }
        return out;
    }

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
    }

private:
    void build() {
        index_.clear();
        edge_index_.clear();
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (!index_.emplace(nodes_[i], i).second) {
                throw ValidationError("duplicate node label " + std::to_string(nodes_[i]));
            }
        }
        incident_.assign(nodes_.size(), {});
        for (std::size_t k = 0; k < edges_.size(); ++k) {
            const Edge& e = edges_[k];
            if (e.plus == e.minus) {
                throw ValidationError("self-loop at node " + std::to_string(e.plus));
            }
            auto ip = index_.find(e.plus);
            auto im = index_.find(e.minus);
            if (ip == index_.end() || im == index_.end()) {
                throw ValidationError("edge " + edge_name(e.plus, e.minus) + " references an unknown node");
            }
            if (!edge_index_.emplace(edge_key(e.plus, e.minus), k).second) {
                throw ValidationError("duplicate edge " + edge_name(e.plus, e.minus));
            }
            incident_[ip->second].push_back(k);
            incident_[im->second].push_back(k);
        }
    }

    std::vector<NodeId> nodes_;
    std::vector<Edge> edges_;
    std::map<NodeId, std::size_t> index_;
    std::map<EdgeKey, std::size_t> edge_index_;
    std::vector<std::vector<std::size_t>> incident_;
};

/// Node-by-edge incidence matrix with entries in {-1, 0, +1}.
[[nodiscard]] inline Eigen::MatrixXi incidence(const Graph& g) {
    Eigen::MatrixXi d = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(g.node_count()),
                                              static_cast<Eigen::Index>(g.edge_count()));
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edges()[k];
        const auto col = static_cast<Eigen::Index>(k);
        d(static_cast<Eigen::Index>(g.index_of(e.plus)), col) = 1;
        d(static_cast<Eigen::Index>(g.index_of(e.minus)), col) = -1;
    }
    return d;
}

[[nodiscard]] inline std::vector<std::vector<NodeId>> connected_component_nodes(const Graph& g) {
    const std::size_t n = g.node_count();
    std::vector<int> label(n, -1);
    std::vector<std::vector<NodeId>> comps;
    for (std::size_t start = 0; start < n; ++start) {
        if (label[start] >= 0) continue;
        const int c = static_cast<int>(comps.size());
        comps.emplace_back();
        std::vector<std::size_t> stack{start};
        label[start] = c;
        while (!stack.empty()) {
            std::size_t u = stack.back();
            stack.pop_back();
            for (NodeId v : g.neighbors(g.nodes()[u])) {
                std::size_t vi = g.index_of(v);
                if (label[vi] < 0) {
                    label[vi] = c;
                    stack.push_back(vi);
                }
            }
        }
    }
    // members in the graph's own node order
    for (auto& comp : comps) comp.clear();
    for (std::size_t i = 0; i < n; ++i) comps[static_cast<std::size_t>(label[i])].push_back(g.nodes()[i]);
    return comps;
}

[[nodiscard]] inline bool is_connected(const Graph& g) {
    return g.node_count() > 0 && connected_component_nodes(g).size() == 1;
}

/// Subgraph on `keep`, preserving node order, edge order and orientation.
[[nodiscard]] inline Graph induced_subgraph(const Graph& g, const std::vector<NodeId>& keep) {
    std::set<NodeId> members(keep.begin(), keep.end());
    std::vector<NodeId> nodes;
    for (NodeId id : g.nodes()) {
        if (members.contains(id)) nodes.push_back(id);
    }
    std::vector<Edge> edges;
    for (const Edge& e : g.edges()) {
        if (members.contains(e.plus) && members.contains(e.minus)) edges.push_back(e);
    }
    return Graph::from_oriented(std::move(nodes), std::move(edges));
}

[[nodiscard]] inline std::vector<Graph> connected_components(const Graph& g) {
    std::vector<Graph> out;
    for (const auto& comp : connected_component_nodes(g)) out.push_back(induced_subgraph(g, comp));
    return out;
}

/// Block-diagonal union: `a` first, then `b`.
[[nodiscard]] inline Graph disjoint_union(const Graph& a, const Graph& b) {
    std::vector<NodeId> nodes = a.nodes();
    nodes.insert(nodes.end(), b.nodes().begin(), b.nodes().end());
    std::vector<Edge> edges = a.edges();
    edges.insert(edges.end(), b.edges().begin(), b.edges().end());
    return Graph::from_oriented(std::move(nodes), std::move(edges));
}

/// Either a single new node joining `base` through one edge, or a second
/// network joining `base` through a set of boundary edges.
struct PlugPlan {
    Graph base;
    std::variant<NodeId, Graph> added;
    /// (base-side node, added-side node)
    std::vector<std::pair<NodeId, NodeId>> boundary;

    [[nodiscard]] bool is_single_node() const noexcept { return std::holds_alternative<NodeId>(added); }

    [[nodiscard]] const Graph& added_graph() const { return std::get<Graph>(added); }

    [[nodiscard]] bool added_has(NodeId id) const {
        if (is_single_node()) return std::get<NodeId>(added) == id;
        return added_graph().has_node(id);
    }
};

/// Checks a plan and orders each boundary pair as (base side, added side).
[[nodiscard]] inline PlugPlan make_plug_plan(Graph base, std::variant<NodeId, Graph> added,
                                             std::vector<std::pair<NodeId, NodeId>> boundary) {
    PlugPlan plan{std::move(base), std::move(added), std::move(boundary)};
    const auto added_nodes = plan.is_single_node() ? std::vector<NodeId>{std::get<NodeId>(plan.added)}
                                                   : plan.added_graph().nodes();
    for (NodeId id : added_nodes) {
        if (plan.base.has_node(id)) {
            throw ValidationError("node label " + std::to_string(id) + " appears in both parts of the plug plan");
        }
    }
    std::set<EdgeKey> seen;
    for (auto& [p, q] : plan.boundary) {
        if (plan.added_has(p) && plan.base.has_node(q)) std::swap(p, q);
        if (!plan.base.has_node(p) || !plan.added_has(q)) {
            throw ValidationError("boundary edge " + edge_name(p, q) + " does not join the two parts");
        }
        if (!seen.insert(edge_key(p, q)).second) {
            throw ValidationError("duplicate boundary edge " + edge_name(p, q));
        }
    }
    if (plan.is_single_node() && plan.boundary.size() != 1) {
        throw ValidationError("a single-node plug requires exactly one boundary edge, got " +
                              std::to_string(plan.boundary.size()));
    }
    return plan;
}

/// Indices (r, s) of the first pair of boundary edges whose base-side or
/// added-side ends are adjacent, if any.
[[nodiscard]] inline std::optional<std::pair<std::size_t, std::size_t>> find_assumption_1_violation(
    const PlugPlan& plan) {
    if (plan.is_single_node()) {
        throw ValidationError("the boundary non-adjacency check applies to network plug plans only");
    }
    const Graph& added = plan.added_graph();
    for (const auto& [p, q] : plan.boundary) {
        if (!plan.base.has_node(p) || !added.has_node(q)) {
            throw ValidationError("boundary edge " + edge_name(p, q) + " references an unknown node");
        }
    }
    for (std::size_t r = 0; r < plan.boundary.size(); ++r) {
        for (std::size_t s = r + 1; s < plan.boundary.size(); ++s) {
            const auto& [ir, jr] = plan.boundary[r];
            const auto& [is, js] = plan.boundary[s];
            if (plan.base.adjacent(ir, is) || added.adjacent(jr, js)) return std::pair{r, s};
        }
    }
    return std::nullopt;
}

[[nodiscard]] inline bool check_assumption_1(const PlugPlan& plan) {
    return !find_assumption_1_violation(plan).has_value();
}

/// Augmented graph: base columns first, then the added network's columns,
/// then the boundary edges. A joining single node is the "+" end of its
/// edge; for network plugs the base-side node is the "+" end.
[[nodiscard]] inline Graph compose(const PlugPlan& plan) {
    std::vector<NodeId> nodes = plan.base.nodes();
    std::vector<Edge> edges = plan.base.edges();
    if (plan.is_single_node()) {
        nodes.push_back(std::get<NodeId>(plan.added));
        const auto& [c, joining] = plan.boundary.at(0);
        edges.push_back(Edge{joining, c});
    } else {
        const Graph& added = plan.added_graph();
        nodes.insert(nodes.end(), added.nodes().begin(), added.nodes().end());
        edges.insert(edges.end(), added.edges().begin(), added.edges().end());
        for (const auto& [p, q] : plan.boundary) edges.push_back(Edge{p, q});
    }
    return Graph::from_oriented(std::move(nodes), std::move(edges));
}

}  // namespace ppcons
