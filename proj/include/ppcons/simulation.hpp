#pragma once

// Fixed-step RK4 simulation of LTI nodes coupled through
//   U = -D Phi(D^T (Y + W))
// with seeded measurement noise and scheduled plug events.

#include "ppcons/coupling.hpp"
#include "ppcons/error.hpp"
#include "ppcons/graph.hpp"
#include "ppcons/lti.hpp"
#include "ppcons/scenario.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace ppcons {

/// Standard normal sample that depends only on (seed, node, step).
[[nodiscard]] inline double standard_normal(std::uint64_t seed, NodeId node, std::uint64_t step) {
    auto mix = [](std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(seed);
    h = mix(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(node)));
    h = mix(h ^ step);
    const std::uint64_t h2 = mix(h);
    // 53-bit uniforms in (0, 1]
    const double u1 = (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

[[nodiscard]] inline double noise_sample(const NoiseConfig& cfg, double dt, NodeId node, std::uint64_t step) {
    if (cfg.scale == 0.0) return 0.0;
    const double std_dev = cfg.kind == NoiseKind::held ? cfg.scale : cfg.scale / std::sqrt(dt);
    return std_dev * standard_normal(cfg.seed, node, step);
}

/// Nodes (in graph order) with their realizations, and one coupling per edge
/// column. Frozen nodes keep their state and are excluded from the network.
class NetworkModel {
public:
    NetworkModel(Graph graph, std::vector<LtiSystem> systems, std::vector<SectorCoupling> couplings,
                 std::vector<bool> frozen = {})
        : graph_(std::move(graph)), systems_(std::move(systems)), couplings_(std::move(couplings)),
          frozen_(std::move(frozen)) {
        if (systems_.size() != graph_.node_count() || couplings_.size() != graph_.edge_count()) {
            throw ValidationError("network model: one system per node and one coupling per edge required");
        }
        if (frozen_.empty()) frozen_.assign(systems_.size(), false);
        Eigen::Index off = 0;
        for (std::size_t i = 0; i < systems_.size(); ++i) {
            if (systems_[i].D() != 0.0) {
                throw UnsupportedSystem("node " + std::to_string(graph_.nodes()[i]) +
                                        " has direct feedthrough; simulation needs strictly proper dynamics");
            }
            offsets_.push_back(off);
            off += systems_[i].order();
        }
        state_size_ = off;
        for (const Edge& e : graph_.edges()) {
            ends_.emplace_back(graph_.index_of(e.plus), graph_.index_of(e.minus));
        }
    }

    [[nodiscard]] const Graph& graph() const noexcept { return graph_; }
    [[nodiscard]] Eigen::Index state_size() const noexcept { return state_size_; }
    [[nodiscard]] Eigen::Index offset(std::size_t node_index) const { return offsets_.at(node_index); }
    [[nodiscard]] const LtiSystem& system(std::size_t node_index) const { return systems_.at(node_index); }

    [[nodiscard]] Eigen::VectorXd outputs(const Eigen::VectorXd& x) const {
        Eigen::VectorXd y(static_cast<Eigen::Index>(systems_.size()));
        for (std::size_t i = 0; i < systems_.size(); ++i) {
            const auto& s = systems_[i];
            y(static_cast<Eigen::Index>(i)) = s.order() == 0 ? 0.0 : s.C().dot(x.segment(offsets_[i], s.order()));
        }
        return y;
    }

    /// u = -D Phi(D^T (y + w))
    [[nodiscard]] Eigen::VectorXd inputs(const Eigen::VectorXd& y, const Eigen::VectorXd& w) const {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(y.size());
        for (std::size_t k = 0; k < ends_.size(); ++k) {
            const auto [i, j] = ends_[k];
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            const double v = evaluate_coupling(couplings_[k], y(ii) + w(ii) - y(jj) - w(jj));
            u(ii) -= v;
            u(jj) += v;
        }
        return u;
    }

    [[nodiscard]] Eigen::VectorXd derivative(const Eigen::VectorXd& x, const Eigen::VectorXd& w) const {
        const Eigen::VectorXd u = inputs(outputs(x), w);
        Eigen::VectorXd dx = Eigen::VectorXd::Zero(state_size_);
        for (std::size_t i = 0; i < systems_.size(); ++i) {
            if (frozen_[i]) continue;
            const auto& s = systems_[i];
            const Eigen::Index n = s.order();
            if (n == 0) continue;
            dx.segment(offsets_[i], n) = s.A() * x.segment(offsets_[i], n) + s.B() * u(static_cast<Eigen::Index>(i));
        }
        return dx;
    }

private:
    Graph graph_;
    std::vector<LtiSystem> systems_;
    std::vector<SectorCoupling> couplings_;
    std::vector<bool> frozen_;
    std::vector<Eigen::Index> offsets_;
    std::vector<std::pair<std::size_t, std::size_t>> ends_;
    Eigen::Index state_size_ = 0;
};

struct StepResult {
    Eigen::VectorXd state;
    Eigen::VectorXd outputs;
};

/// One RK4 step with the noise held over all stages. `t` only labels errors.
[[nodiscard]] inline StepResult step(const NetworkModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                                     double dt, double t = 0.0) {
    const Eigen::VectorXd k1 = model.derivative(x, w);
    const Eigen::VectorXd k2 = model.derivative(x + 0.5 * dt * k1, w);
    const Eigen::VectorXd k3 = model.derivative(x + 0.5 * dt * k2, w);
    const Eigen::VectorXd k4 = model.derivative(x + dt * k3, w);
    StepResult r;
    r.state = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!r.state.allFinite()) {
        throw DivergenceError("state diverged at t = " + std::to_string(t + dt), t + dt);
    }
    r.outputs = model.outputs(r.state);
    return r;
}

/// Minimum-norm x with C x = y0.
[[nodiscard]] inline Eigen::VectorXd initial_state_for_output(const LtiSystem& sys, double y0) {
    const Eigen::Index n = sys.order();
    if (n == 0) return Eigen::VectorXd();
    const double cc = sys.C().squaredNorm();
    if (cc == 0.0) {
        if (y0 != 0.0) throw ValidationError("output map is zero; cannot reach the declared initial output");
        return Eigen::VectorXd::Zero(n);
    }
    return sys.C().transpose() * (y0 / cc);
}

struct TrajectoryRecord {
    std::vector<NodeId> node_ids;
    std::vector<double> times;
    Eigen::MatrixXd y;  ///< samples x nodes
    Eigen::MatrixXd u;
    Eigen::MatrixXd w;
    std::vector<int> phase;  ///< active network index per sample
    std::vector<Graph> phase_graphs;
    std::vector<double> event_times;

    [[nodiscard]] std::size_t column_of(NodeId id) const {
        for (std::size_t c = 0; c < node_ids.size(); ++c) {
            if (node_ids[c] == id) return c;
        }
        throw ValidationError("trajectory has no column for node " + std::to_string(id));
    }
};

namespace detail {

inline NetworkModel build_model(const Scenario& sc, const std::vector<LtiSystem>& systems, const Graph& active) {
    Graph full = Graph::from_oriented(sc.node_ids(), active.edges());
    std::vector<SectorCoupling> couplings;
    for (const Edge& e : full.edges()) couplings.push_back(sc.coupling(e.plus, e.minus));
    std::vector<bool> frozen;
    for (NodeId id : full.nodes()) frozen.push_back(!active.has_node(id));
    return NetworkModel(std::move(full), systems, std::move(couplings), std::move(frozen));
}

}  // namespace detail

[[nodiscard]] inline TrajectoryRecord run(const Scenario& sc) {
    validate(sc);
    const auto ids = sc.node_ids();
    std::vector<LtiSystem> systems;
    for (const auto& n : sc.nodes) {
        if (!n.dynamics) throw ValidationError("node " + std::to_string(n.id) + " has no dynamics; cannot simulate");
        systems.push_back(realize(*n.dynamics));
    }

    Graph active = initial_graph(sc);
    NetworkModel model = detail::build_model(sc, systems, active);

    Eigen::VectorXd x(model.state_size());
    for (std::size_t i = 0; i < sc.nodes.size(); ++i) {
        const auto& n = sc.nodes[i];
        const Eigen::Index order = systems[i].order();
        Eigen::VectorXd xi;
        if (n.x0) {
            if (static_cast<Eigen::Index>(n.x0->size()) != order) {
                throw ValidationError("node " + std::to_string(n.id) + ": x0 has the wrong dimension");
            }
            xi = Eigen::Map<const Eigen::VectorXd>(n.x0->data(), order);
        } else {
            xi = initial_state_for_output(systems[i], n.y0);
        }
        if (order > 0) x.segment(model.offset(i), order) = xi;
    }

    const double dt = sc.solver.dt;
    const std::size_t steps = grid_step(sc.solver.t_end, dt, "t_end");
    std::vector<std::size_t> event_steps;
    for (const auto& ev : sc.plugs) event_steps.push_back(grid_step(ev.time, dt, "plug time"));

    TrajectoryRecord rec;
    rec.node_ids = ids;
    rec.phase_graphs.push_back(model.graph());
    const std::size_t stride = sc.solver.sample_stride;
    const std::size_t n_samples = steps / stride + 1 + (steps % stride != 0 ? 1 : 0);
    const auto n_nodes = static_cast<Eigen::Index>(ids.size());
    rec.y.resize(static_cast<Eigen::Index>(n_samples), n_nodes);
    rec.u.resize(static_cast<Eigen::Index>(n_samples), n_nodes);
    rec.w.resize(static_cast<Eigen::Index>(n_samples), n_nodes);

    std::size_t next_event = 0;
    Eigen::Index row = 0;
    Eigen::VectorXd w(n_nodes);
    for (std::size_t k = 0;; ++k) {
        while (next_event < event_steps.size() && event_steps[next_event] == k) {
            active = apply_plan(active, plan_for_event(active, sc.plugs[next_event]));
            model = detail::build_model(sc, systems, active);
            rec.phase_graphs.push_back(model.graph());
            rec.event_times.push_back(sc.plugs[next_event].time);
            ++next_event;
        }
        for (Eigen::Index c = 0; c < n_nodes; ++c) w(c) = noise_sample(sc.noise, dt, ids[static_cast<std::size_t>(c)], k);
        const double t = static_cast<double>(k) * dt;
        if (k % stride == 0 || k == steps) {
            const Eigen::VectorXd y = model.outputs(x);
            rec.times.push_back(t);
            rec.y.row(row) = y.transpose();
            rec.u.row(row) = model.inputs(y, w).transpose();
            rec.w.row(row) = w.transpose();
            rec.phase.push_back(static_cast<int>(rec.phase_graphs.size()) - 1);
            ++row;
        }
        if (k == steps) break;
        x = step(model, x, w, dt, t).state;
    }
    return rec;
}

}  // namespace ppcons
