#pragma once

// Bundled two-network example: networks {1..4} and {5..7} of integrating
// IFP systems with saturated-sine couplings, joined at t = 15 s through the
// boundary edges (1,5) and (4,7).

#include "ppcons/coupling.hpp"
#include "ppcons/graph.hpp"
#include "ppcons/lti.hpp"
#include "ppcons/scenario.hpp"

#include <initializer_list>
#include <utility>

namespace ppcons {

[[nodiscard]] inline Scenario two_network_example() {
    auto factors = [](std::initializer_list<Polynomial> fs) {
        Polynomial p{1.0};
        for (const auto& f : fs) p = poly_mul(p, f);
        return p;
    };
    const Polynomial s{1.0, 0.0};
    auto lin = [](double a) { return Polynomial{1.0, a}; };

    struct Row {
        NodeId id;
        TransferFunction tf;
        double nu;
        double y0;
    };
    const Row rows[] = {
        {1, {lin(1.0), factors({s, lin(0.7)})}, -0.45, -0.25},
        {2, {lin(0.9), factors({s, lin(0.65)})}, -0.60, -0.55},
        {3, {lin(0.5), factors({s, lin(0.4)})}, -0.63, -1.25},
        {4, {factors({lin(1.5), lin(2.0)}), factors({s, lin(1.0), lin(1.8)})}, -0.65, -0.4},
        {5, {factors({lin(0.5), lin(0.7)}), factors({s, lin(0.45), lin(0.65)})}, -0.40, -0.0875},
        {6, {factors({lin(1.0), lin(1.4)}), factors({s, lin(0.8), lin(1.2)})}, -0.54, 0.2},
        {7, {factors({lin(1.7), lin(1.8)}), factors({s, lin(1.2), lin(1.6)})}, -0.51, 1.36},
    };

    Scenario sc;
    for (const auto& r : rows) {
        NodeSpec n;
        n.id = r.id;
        n.dynamics = r.tf;
        n.nu = r.nu;
        n.y0 = r.y0;
        sc.nodes.push_back(std::move(n));
    }
    sc.networks.push_back({"G1", Graph({1, 2, 3, 4}, {{1, 2}, {2, 3}, {2, 4}, {3, 4}})});
    sc.networks.push_back({"G2", Graph({5, 6, 7}, {{5, 6}, {6, 7}})});

    const std::pair<EdgeKey, double> gains[] = {
        {{1, 2}, 0.40}, {{2, 3}, 0.32}, {{2, 4}, 0.30}, {{3, 4}, 0.35},
        {{5, 6}, 0.60}, {{6, 7}, 0.55}, {{1, 5}, 0.37}, {{4, 7}, 0.16},
    };
    for (const auto& [key, a] : gains) sc.couplings[key] = make_coupling(CouplingKind::saturated_sine, a);

    sc.plugs.push_back({15.0, {{1, 5}, {4, 7}}});
    sc.noise = {0.5, 7, NoiseKind::held};
    sc.solver = {1e-3, 30.0, 10};
    return sc;
}

}  // namespace ppcons
