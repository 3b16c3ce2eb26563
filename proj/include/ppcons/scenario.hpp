#pragma once

// In-memory experiment description: nodes, initial networks, couplings,
// plug events, noise and solver settings.

#include "ppcons/certificates.hpp"
#include "ppcons/coupling.hpp"
#include "ppcons/error.hpp"
#include "ppcons/graph.hpp"
#include "ppcons/lti.hpp"
#include "ppcons/passivity.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace ppcons {

enum class NoiseKind {
    held,            ///< N(0, scale^2) sample held constant over each step
    sqrt_dt_scaled,  ///< held sample with std scale / sqrt(dt) (Euler-Maruyama style)
};

struct NoiseConfig {
    double scale = 0.0;
    std::uint64_t seed = 0;
    NoiseKind kind = NoiseKind::held;

    friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

struct SolverConfig {
    double dt = 1e-3;
    double t_end = 10.0;
    std::size_t sample_stride = 1;

    friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct NodeSpec {
    NodeId id = 0;
    std::optional<TransferFunction> dynamics;
    std::optional<double> nu;  ///< declared IFP index
    double delta = 0.0;
    double y0 = 0.0;
    std::optional<std::vector<double>> x0;

    friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

struct NetworkSpec {
    std::string name;
    Graph graph;

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

struct PlugEvent {
    double time = 0.0;
    std::vector<std::pair<NodeId, NodeId>> boundary;

    friend bool operator==(const PlugEvent&, const PlugEvent&) = default;
};

struct Scenario {
    std::vector<NodeSpec> nodes;
    std::vector<NetworkSpec> networks;
    std::map<EdgeKey, SectorCoupling> couplings;
    std::vector<PlugEvent> plugs;
    NoiseConfig noise;
    SolverConfig solver;
    std::optional<std::string> output_dir;

    [[nodiscard]] const NodeSpec& node(NodeId id) const {
        for (const auto& n : nodes) {
            if (n.id == id) return n;
        }
        throw ValidationError("unknown node " + std::to_string(id));
    }

    [[nodiscard]] std::vector<NodeId> node_ids() const {
        std::vector<NodeId> ids;
        for (const auto& n : nodes) ids.push_back(n.id);
        return ids;
    }

    [[nodiscard]] const SectorCoupling& coupling(NodeId i, NodeId j) const {
        auto it = couplings.find(edge_key(i, j));
        if (it == couplings.end()) throw ValidationError("no coupling declared for edge " + edge_name(i, j));
        return it->second;
    }

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Union of the initial networks, in declaration order.
[[nodiscard]] inline Graph initial_graph(const Scenario& sc) {
    Graph g;
    for (const auto& net : sc.networks) g = disjoint_union(g, net.graph);
    return g;
}

/// Step index of time `t` on the solver grid; throws when `t` is off-grid.
[[nodiscard]] inline std::size_t grid_step(double t, double dt, const std::string& what) {
    const double k = t / dt;
    const double r = std::round(k);
    if (std::abs(k - r) > 1e-9 * std::max(1.0, r)) {
        throw ValidationError(what + " (" + std::to_string(t) + ") is not a multiple of dt");
    }
    return static_cast<std::size_t>(r);
}

/// Plug plan of `ev` against the current network. The base is the component
/// holding the first boundary pair's active end; the added part is either a
/// not-yet-active node (single-node plug) or another component.
[[nodiscard]] inline PlugPlan plan_for_event(const Graph& active, const PlugEvent& ev) {
    if (ev.boundary.empty()) throw ValidationError("plug event without boundary edges");
    const auto comps = connected_components(active);
    auto comp_of = [&](NodeId id) -> std::optional<std::size_t> {
        for (std::size_t c = 0; c < comps.size(); ++c) {
            if (comps[c].has_node(id)) return c;
        }
        return std::nullopt;
    };
    const auto& [a, b] = ev.boundary.front();
    auto ca = comp_of(a);
    auto cb = comp_of(b);
    if (!ca && !cb) {
        throw ValidationError("plug edge " + edge_name(a, b) + " does not touch the active network");
    }
    const std::size_t base = ca ? *ca : *cb;
    const NodeId other = ca ? b : a;
    auto co = comp_of(other);
    if (!co) {
        return make_plug_plan(comps[base], other, ev.boundary);
    }
    if (*co == base) {
        throw ValidationError("plug edge " + edge_name(a, b) + " lies inside one network");
    }
    return make_plug_plan(comps[base], comps[*co], ev.boundary);
}

/// Network after applying `plan`: untouched components first, then the
/// composed part.
[[nodiscard]] inline Graph apply_plan(const Graph& active, const PlugPlan& plan) {
    Graph out;
    for (const auto& comp : connected_components(active)) {
        const bool involved = comp.has_node(plan.base.nodes().front()) ||
                              (!plan.is_single_node() && comp.has_node(plan.added_graph().nodes().front()));
        if (!involved) out = disjoint_union(out, comp);
    }
    return disjoint_union(out, compose(plan));
}

inline void validate(const Scenario& sc) {
    if (sc.nodes.empty()) throw ValidationError("scenario declares no nodes");
    std::set<NodeId> ids;
    for (const auto& n : sc.nodes) {
        if (!ids.insert(n.id).second) throw ValidationError("duplicate node id " + std::to_string(n.id));
        if (n.nu && !std::isfinite(*n.nu)) throw ValidationError("node " + std::to_string(n.id) + ": nu must be finite");
    }
    if (!(sc.solver.dt > 0.0) || !(sc.solver.t_end > 0.0) || sc.solver.sample_stride == 0) {
        throw ValidationError("solver needs dt > 0, t_end > 0 and sample_stride >= 1");
    }
    if (!(sc.noise.scale >= 0.0)) throw ValidationError("noise scale must be >= 0");

    std::set<NodeId> placed;
    std::set<EdgeKey> edges;
    for (const auto& net : sc.networks) {
        for (NodeId id : net.graph.nodes()) {
            if (!ids.contains(id)) throw ValidationError("network '" + net.name + "' uses undeclared node " + std::to_string(id));
            if (!placed.insert(id).second) {
                throw ValidationError("node " + std::to_string(id) + " belongs to more than one network");
            }
        }
        for (const Edge& e : net.graph.edges()) edges.insert(edge_key(e.plus, e.minus));
    }

    Graph active = initial_graph(sc);
    double last = -1.0;
    for (const auto& ev : sc.plugs) {
        if (!(ev.time > last) || ev.time < 0.0 || ev.time > sc.solver.t_end) {
            throw ValidationError("plug event times must be strictly increasing within [0, t_end]");
        }
        last = ev.time;
        (void)grid_step(ev.time, sc.solver.dt, "plug time");
        for (const auto& [p, q] : ev.boundary) {
            if (!ids.contains(p) || !ids.contains(q)) {
                throw ValidationError("plug edge " + edge_name(p, q) + " references an undeclared node");
            }
        }
        const PlugPlan plan = plan_for_event(active, ev);
        if (plan.is_single_node()) placed.insert(std::get<NodeId>(plan.added));
        for (const auto& [p, q] : plan.boundary) edges.insert(edge_key(p, q));
        active = apply_plan(active, plan);
    }
    for (NodeId id : ids) {
        if (!placed.contains(id)) {
            throw ValidationError("node " + std::to_string(id) + " is in no network and joins through no plug event");
        }
    }
    for (const auto& key : edges) {
        if (!sc.couplings.contains(key)) throw ValidationError("no coupling declared for edge " + edge_name(key.first, key.second));
    }
    for (const auto& [key, c] : sc.couplings) {
        if (!edges.contains(key)) {
            throw ValidationError("coupling declared for edge " + edge_name(key.first, key.second) + " which never exists");
        }
        if (!(c.alpha_lower > 0.0) || !(c.alpha_upper >= c.alpha_lower) || !std::isfinite(c.alpha_upper)) {
            throw ValidationError("edge " + edge_name(key.first, key.second) +
                                  ": sector bounds need 0 < alpha_lower <= alpha_upper < inf");
        }
    }
}

/// Declared nu where present; otherwise the frequency-sweep estimate of the
/// node's dynamics.
[[nodiscard]] inline NetworkParameters network_parameters(const Scenario& sc) {
    NetworkParameters par;
    for (const auto& n : sc.nodes) {
        if (n.nu) {
            par.nu[n.id] = *n.nu;
        } else if (n.dynamics) {
            par.nu[n.id] = estimate_ifp_index(realize(*n.dynamics)).index.nu;
        } else {
            throw ValidationError("node " + std::to_string(n.id) + " has neither a declared nu nor dynamics");
        }
    }
    for (const auto& [key, c] : sc.couplings) par.alpha_upper[key] = c.alpha_upper;
    return par;
}

}  // namespace ppcons
