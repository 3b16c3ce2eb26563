#include "ppcons/example.hpp"
#include "ppcons/metrics.hpp"
#include "ppcons/passivity.hpp"
#include "ppcons/simulation.hpp"

#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace ppcons;
using namespace ppcons::testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("free response of a first-order lag") {
    const NetworkModel model(Graph({1}, {}), {realize({1.0}, {1.0, 1.0})}, {});
    Eigen::VectorXd x(1);
    x << 1.0;
    const Eigen::VectorXd w = Eigen::VectorXd::Zero(1);
    for (double dt : {0.1, 0.05}) {
        const auto r = step(model, x, w, dt);
        CHECK_THAT(r.outputs(0), WithinAbs(std::exp(-dt), std::pow(dt, 5)));
    }
    CHECK(model.inputs(model.outputs(x), w)(0) == 0.0);
}

TEST_CASE("two coupled integrators match the exponential") {
    const double a = 0.7;
    auto sc = single_network(Graph({1, 2}, {{1, 2}}), {integrator(1, 1.0), integrator(2, -1.0)}, CouplingKind::linear,
                             a, 1e-3, 5.0);
    const auto traj = run(sc);
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const auto r = static_cast<Eigen::Index>(k);
        const double delta = traj.y(r, 0) - traj.y(r, 1);
        const double exact = 2.0 * std::exp(-2.0 * a * traj.times[k]);
        worst = std::max(worst, std::abs(delta - exact) / exact);
    }
    CHECK(worst < 1e-5);
    // the sum is conserved
    CHECK_THAT(traj.y(static_cast<Eigen::Index>(traj.times.size() - 1), 0) +
                   traj.y(static_cast<Eigen::Index>(traj.times.size() - 1), 1),
               WithinAbs(0.0, 1e-12));
}

TEST_CASE("identical nodes with identical states stay identical") {
    const auto h = node(1, {1.0, 1.0}, {1.0, 0.7, 0.0}, 0.3);
    auto h2 = h;
    h2.id = 2;
    auto sc = single_network(Graph({1, 2}, {{1, 2}}), {h, h2}, CouplingKind::saturated_sine, 0.4, 1e-3, 3.0, 10);
    const auto traj = run(sc);
    CHECK(traj.y.col(0) == traj.y.col(1));
    CHECK(traj.u.isZero(0.0));
}

TEST_CASE("a path of integrators reaches consensus") {
    auto sc = single_network(Graph({1, 2, 3}, {{1, 2}, {2, 3}}),
                             {integrator(1, 1.0), integrator(2, -2.0), integrator(3, 0.5)}, CouplingKind::linear, 0.5,
                             1e-2, 50.0, 100);
    const auto traj = run(sc);
    const auto d = disagreement(traj, sc.networks[0].graph);
    CHECK(d.back() < 1e-6);
    const auto last = static_cast<Eigen::Index>(traj.times.size() - 1);
    CHECK_THAT(traj.y(last, 0), WithinAbs(-0.5 / 3.0, 1e-6));
}

TEST_CASE("runs are deterministic") {
    auto sc = two_network_example();
    sc.solver.t_end = 16.0;
    const auto a = run(sc);
    const auto b = run(sc);
    CHECK(a.times == b.times);
    CHECK(a.y == b.y);
    CHECK(a.u == b.u);
    CHECK(a.w == b.w);
}

TEST_CASE("noise depends only on seed, node and step") {
    NoiseConfig cfg{0.5, 7, NoiseKind::held};
    CHECK(noise_sample(cfg, 1e-3, 3, 100) == noise_sample(cfg, 1e-3, 3, 100));
    CHECK(noise_sample(cfg, 1e-3, 3, 100) != noise_sample(cfg, 1e-3, 4, 100));
    CHECK(noise_sample(cfg, 1e-3, 3, 100) != noise_sample(cfg, 1e-3, 3, 101));
    CHECK(noise_sample(cfg, 1e-3, 3, 100) == noise_sample(cfg, 1e-2, 3, 100));
    CHECK(noise_sample({0.0, 7, NoiseKind::held}, 1e-3, 3, 100) == 0.0);

    NoiseConfig root{1.0, 7, NoiseKind::sqrt_dt_scaled};
    CHECK_THAT(noise_sample(root, 0.01, 3, 5), WithinRel(standard_normal(7, 3, 5) / 0.1, 1e-14));

    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
        const double z = standard_normal(42, 1, static_cast<std::uint64_t>(k));
        sum += z;
        sq += z * z;
    }
    CHECK_THAT(sum / n, WithinAbs(0.0, 0.01));
    CHECK_THAT(sq / n, WithinAbs(1.0, 0.01));
}

TEST_CASE("sample stride changes recorded density only") {
    auto sc = two_network_example();
    sc.solver.t_end = 16.0;
    sc.solver.sample_stride = 1;
    const auto dense = run(sc);
    sc.solver.sample_stride = 7;
    const auto sparse = run(sc);
    REQUIRE(sparse.times.back() == dense.times.back());
    for (std::size_t k = 0; k < sparse.times.size(); ++k) {
        const std::size_t step = k + 1 == sparse.times.size() ? dense.times.size() - 1 : 7 * k;
        CHECK(sparse.times[k] == dense.times[step]);
        CHECK(sparse.y.row(static_cast<Eigen::Index>(k)) == dense.y.row(static_cast<Eigen::Index>(step)));
        CHECK(sparse.w.row(static_cast<Eigen::Index>(k)) == dense.w.row(static_cast<Eigen::Index>(step)));
    }
}

TEST_CASE("zero noise scale gives zero noise columns") {
    auto sc = two_network_example();
    sc.solver.t_end = 16.0;
    sc.noise.scale = 0.0;
    CHECK(run(sc).w.isZero(0.0));
}

TEST_CASE("graph automorphisms permute trajectories") {
    // path 1-2-3 with equal end nodes; swapping 1 and 3 is an automorphism
    const Polynomial num{1.0, 1.5};
    const Polynomial den{1.0, 1.0, 0.0};
    const Graph path({1, 2, 3}, {{1, 2}, {2, 3}});
    auto a = single_network(path, {node(1, num, den, 0.8), node(2, {1.0, 0.9}, {1.0, 0.65, 0.0}, -0.2),
                                   node(3, num, den, -1.1)},
                            CouplingKind::linear, 0.6, 1e-3, 5.0, 10);
    auto b = single_network(path, {node(1, num, den, -1.1), node(2, {1.0, 0.9}, {1.0, 0.65, 0.0}, -0.2),
                                   node(3, num, den, 0.8)},
                            CouplingKind::linear, 0.6, 1e-3, 5.0, 10);
    const auto ta = run(a);
    const auto tb = run(b);
    CHECK(ta.y.col(0) == tb.y.col(2));
    CHECK(ta.y.col(2) == tb.y.col(0));
    CHECK(ta.y.col(1) == tb.y.col(1));
}

TEST_CASE("RK4 converges at fourth order") {
    auto sc = two_network_example();
    sc.plugs.clear();
    sc.networks = {{"all", Graph({1, 2, 3, 4, 5, 6, 7}, {{1, 2}, {2, 3}, {2, 4}, {3, 4}, {5, 6}, {6, 7}, {1, 5}, {4, 7}})}};
    for (auto& [key, c] : sc.couplings) c = make_coupling(CouplingKind::linear, c.gain);
    sc.noise.scale = 0.0;
    sc.solver.t_end = 4.0;
    sc.solver.sample_stride = 1'000'000;

    auto final_outputs = [&](double dt) {
        sc.solver.dt = dt;
        const auto t = run(sc);
        return Eigen::VectorXd(t.y.row(t.y.rows() - 1).transpose());
    };
    const auto y1 = final_outputs(0.04);
    const auto y2 = final_outputs(0.02);
    const auto y3 = final_outputs(0.01);
    const double ratio = (y1 - y2).norm() / (y2 - y3).norm();
    INFO("ratio = " << ratio);
    CHECK(ratio >= 8.0);
    CHECK(ratio <= 32.0);
}

TEST_CASE("plug events switch the network at their step") {
    auto sc = two_network_example();
    sc.solver.t_end = 16.0;
    const auto traj = run(sc);
    REQUIRE(traj.phase_graphs.size() == 2);
    CHECK(traj.phase_graphs[0].edge_count() == 6);
    CHECK(traj.phase_graphs[1].edge_count() == 8);
    CHECK(traj.event_times == std::vector<double>{15.0});
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        CHECK(traj.phase[k] == (traj.times[k] >= 15.0 - 1e-12 ? 1 : 0));
    }
}

TEST_CASE("late joiners keep their initial state until plugged in") {
    Scenario sc;
    sc.nodes = {integrator(1, 1.0), integrator(2, -1.0), integrator(3, 4.0)};
    sc.networks = {{"base", Graph({1, 2}, {{1, 2}})}};
    sc.couplings[{1, 2}] = make_coupling(CouplingKind::linear, 1.0);
    sc.couplings[{2, 3}] = make_coupling(CouplingKind::linear, 1.0);
    sc.plugs = {{1.0, {{2, 3}}}};
    sc.solver = {1e-3, 2.0, 100};
    const auto traj = run(sc);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (traj.times[k] < 1.0 - 1e-12) CHECK(traj.y(static_cast<Eigen::Index>(k), 2) == 4.0);
    }
    CHECK(traj.y(traj.y.rows() - 1, 2) < 4.0);
}

TEST_CASE("divergence is reported with its time") {
    auto sc = single_network(Graph({1, 2}, {{1, 2}}), {integrator(1, 1.0), integrator(2, -1.0)}, CouplingKind::linear,
                             1e6, 1.0, 1000.0);
    try {
        (void)run(sc);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.time() > 0.0);
        CHECK(e.time() <= 1000.0);
    }
}

TEST_CASE("feedthrough and missing dynamics are rejected") {
    CHECK_THROWS_AS(NetworkModel(Graph({1}, {}), {realize({1.0, 1.0}, {1.0, 2.0})}, {}), UnsupportedSystem);
    auto sc = single_network(Graph({1, 2}, {{1, 2}}), {integrator(1, 1.0), integrator(2, -1.0)}, CouplingKind::linear,
                             1.0, 1e-2, 1.0);
    sc.nodes[1].dynamics.reset();
    sc.nodes[1].nu = -0.1;
    CHECK_THROWS_AS(run(sc), ValidationError);
}

TEST_CASE("minimum-norm initial state reproduces the output") {
    for (const auto& n : two_network_example().nodes) {
        const auto sys = realize(*n.dynamics);
        const Eigen::VectorXd x0 = initial_state_for_output(sys, n.y0);
        CHECK_THAT(sys.C().dot(x0), WithinAbs(n.y0, 1e-14));
    }
}

TEST_CASE("passivity inequality along a certified zero-noise run") {
    // <U, Y>_T >= sum nu_i ||u_i||_T^2 + delta with one offset for all T
    auto sc = two_network_example();
    sc.plugs.clear();
    sc.nodes.resize(4);
    sc.networks.resize(1);
    for (auto it = sc.couplings.begin(); it != sc.couplings.end();) {
        it = it->first.second > 4 ? sc.couplings.erase(it) : std::next(it);
    }
    for (auto& [key, c] : sc.couplings) c = make_coupling(CouplingKind::linear, c.gain);
    sc.noise.scale = 0.0;
    sc.solver = {1e-3, 40.0, 1};

    std::vector<double> nu;
    for (auto& n : sc.nodes) {
        n.nu = estimate_ifp_index(realize(*n.dynamics)).index.nu;
        nu.push_back(*n.nu);
    }
    REQUIRE(certify_network(sc.networks[0].graph, network_parameters(sc)).verdict == Verdict::certified);

    const auto traj = run(sc);
    std::vector<double> gap(traj.times.size(), 0.0);
    double supply = 0.0;
    double bound = 0.0;
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
        const auto r0 = static_cast<Eigen::Index>(k - 1);
        const auto r1 = static_cast<Eigen::Index>(k);
        const double h = traj.times[k] - traj.times[k - 1];
        supply += 0.5 * h * (traj.u.row(r0).dot(traj.y.row(r0)) + traj.u.row(r1).dot(traj.y.row(r1)));
        for (Eigen::Index i = 0; i < 4; ++i) {
            bound += 0.5 * h * nu[static_cast<std::size_t>(i)] *
                     (traj.u(r0, i) * traj.u(r0, i) + traj.u(r1, i) * traj.u(r1, i));
        }
        gap[k] = supply - bound;
    }
    const std::size_t half = gap.size() / 2;
    const double delta_first = *std::min_element(gap.begin(), gap.begin() + static_cast<std::ptrdiff_t>(half));
    const double later = *std::min_element(gap.begin() + static_cast<std::ptrdiff_t>(half), gap.end());
    CHECK(std::isfinite(delta_first));
    CHECK(later >= delta_first - 1e-6);
}
