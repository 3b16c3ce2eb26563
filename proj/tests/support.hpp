#pragma once

// Scenario builders shared by the test programs.

#include "ppcons/coupling.hpp"
#include "ppcons/scenario.hpp"

#include <optional>
#include <random>
#include <vector>

namespace ppcons::testing {

inline NodeSpec node(NodeId id, Polynomial num, Polynomial den, double y0, std::optional<double> nu = std::nullopt) {
    NodeSpec n;
    n.id = id;
    n.dynamics = TransferFunction{std::move(num), std::move(den)};
    n.y0 = y0;
    n.nu = nu;
    return n;
}

inline NodeSpec integrator(NodeId id, double y0) { return node(id, {1.0}, {1.0, 0.0}, y0); }

/// One network, one coupling kind and gain on every edge, no plug events.
inline Scenario single_network(const Graph& g, std::vector<NodeSpec> nodes, CouplingKind kind, double gain,
                               double dt, double t_end, std::size_t stride = 1) {
    Scenario sc;
    sc.nodes = std::move(nodes);
    sc.networks.push_back({"net", g});
    for (const Edge& e : g.edges()) sc.couplings[edge_key(e.plus, e.minus)] = make_coupling(kind, gain);
    sc.solver = {dt, t_end, stride};
    return sc;
}

/// (s + z) / (s (s + p)) with z >= p: an integrating node with a passivity
/// shortage (p - z) / p^2 <= 0.
inline NodeSpec lead_lag_node(std::mt19937_64& rng, NodeId id, double y0) {
    std::uniform_real_distribution<double> pole(0.4, 2.0);
    std::uniform_real_distribution<double> extra(0.0, 0.3);
    std::uniform_real_distribution<double> gain(0.5, 2.0);
    const double p = pole(rng);
    const double z = p + extra(rng);
    const double k = gain(rng);
    return node(id, {k, k * z}, {1.0, p, 0.0}, y0);
}

}  // namespace ppcons::testing
