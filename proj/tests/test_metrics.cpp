#include "ppcons/metrics.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace ppcons;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> grid(double t_end, std::size_t n) {
    std::vector<double> t(n + 1);
    for (std::size_t k = 0; k <= n; ++k) t[k] = t_end * static_cast<double>(k) / static_cast<double>(n);
    return t;
}

TrajectoryRecord record(const std::vector<double>& times, Eigen::MatrixXd y, Eigen::MatrixXd w,
                        std::vector<NodeId> ids) {
    TrajectoryRecord r;
    r.times = times;
    r.node_ids = std::move(ids);
    r.u = Eigen::MatrixXd::Zero(y.rows(), y.cols());
    r.y = std::move(y);
    r.w = std::move(w);
    return r;
}

}  // namespace

TEST_CASE("truncated norms of simple signals") {
    const auto t = grid(4.0, 400);
    const auto n = static_cast<Eigen::Index>(t.size());
    CHECK_THAT(truncated_norm(t, Eigen::MatrixXd::Ones(n, 1), 4.0), WithinAbs(2.0, 1e-12));
    CHECK_THAT(truncated_norm(t, Eigen::MatrixXd::Ones(n, 2), 1.0), WithinAbs(std::sqrt(2.0), 1e-12));

    const auto s = grid(1.0, 1000);
    Eigen::MatrixXd ramp(static_cast<Eigen::Index>(s.size()), 1);
    for (std::size_t k = 0; k < s.size(); ++k) ramp(static_cast<Eigen::Index>(k), 0) = s[k];
    // trapezoid error for t^2 on [0,1] is h^2/6
    const double h = 1e-3;
    CHECK_THAT(truncated_norm(s, ramp, 1.0), WithinAbs(1.0 / std::sqrt(3.0), h * h));
    CHECK_THAT(truncated_norm(s, ramp, 1.0) * truncated_norm(s, ramp, 1.0), WithinAbs(1.0 / 3.0 + h * h / 6.0, 1e-12));
}

TEST_CASE("horizons between samples interpolate") {
    const std::vector<double> t{0.0, 1.0, 2.0};
    Eigen::MatrixXd x(3, 1);
    x << 1.0, 1.0, 1.0;
    CHECK_THAT(truncated_norm(t, x, 0.5), WithinAbs(std::sqrt(0.5), 1e-15));
    CHECK_THAT(truncated_norm(t, x, 1.5), WithinAbs(std::sqrt(1.5), 1e-15));
    CHECK(truncated_norm(t, x, 0.0) == 0.0);
    CHECK_THROWS_AS(truncated_norm(t, x, 2.5), ValidationError);
    CHECK_THROWS_AS(truncated_norm({}, Eigen::MatrixXd(0, 1), 1.0), ValidationError);
    CHECK_THROWS_AS(truncated_norm(t, Eigen::MatrixXd::Ones(2, 1), 1.0), ValidationError);
}

TEST_CASE("truncated norm is nondecreasing in the horizon") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    const auto t = grid(10.0, 500);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(t.size()), 3);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index c = 0; c < 3; ++c) x(r, c) = z(rng);
    }
    double prev = 0.0;
    for (int k = 0; k <= 1000; ++k) {
        const double v = truncated_norm(t, x, 10.0 * k / 1000.0);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("disagreement of simple outputs") {
    const std::vector<double> t{0.0, 1.0};
    const Graph g({1, 2}, {{1, 2}});
    Eigen::MatrixXd same(2, 2);
    same << 3.0, 3.0, -1.0, -1.0;
    CHECK(disagreement(record(t, same, Eigen::MatrixXd::Zero(2, 2), {1, 2}), g) == std::vector<double>{0.0, 0.0});

    Eigen::MatrixXd y(2, 2);
    y << 1.0, 0.0, 1.0, 0.0;
    CHECK(disagreement(record(t, y, Eigen::MatrixXd::Zero(2, 2), {1, 2}), g) == std::vector<double>{1.0, 1.0});

    // columns follow node ids, not graph order
    Eigen::MatrixXd swapped(2, 2);
    swapped << 0.0, 1.0, 0.0, 1.0;
    CHECK(disagreement(record(t, swapped, Eigen::MatrixXd::Zero(2, 2), {2, 1}), g) == std::vector<double>{1.0, 1.0});

    CHECK_THROWS_AS(disagreement(record(t, y, Eigen::MatrixXd::Zero(2, 2), {1, 3}), g), ValidationError);
    CHECK_THROWS_AS(disagreement(record(t, y, Eigen::MatrixXd::Zero(2, 2), {1}), g), ValidationError);
}

TEST_CASE("disagreement ignores a common offset") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z;
    const Graph g({1, 2, 3, 4}, {{1, 2}, {2, 3}, {3, 4}, {1, 4}, {1, 3}});
    const auto t = grid(1.0, 50);
    const auto rows = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd y(rows, 4);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < 4; ++c) y(r, c) = z(rng);
    }
    Eigen::MatrixXd shifted = y;
    for (Eigen::Index r = 0; r < rows; ++r) shifted.row(r).array() += 5.0 * std::sin(static_cast<double>(r));
    const auto a = disagreement(record(t, y, y * 0.0, {1, 2, 3, 4}), g);
    const auto b = disagreement(record(t, shifted, y * 0.0, {1, 2, 3, 4}), g);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK_THAT(b[k], WithinAbs(a[k], 1e-12));
}

TEST_CASE("gain fit on exact linear data") {
    std::vector<HorizonSample> s;
    for (double w : {0.5, 1.0, 2.0, 4.0, 7.5}) s.push_back({w, 2.0 * w + 1.0, w});
    const auto est = fit_io_gain(s);
    CHECK_THAT(est.rho_hat, WithinAbs(2.0, 1e-12));
    CHECK_THAT(est.sigma_hat, WithinAbs(1.0, 1e-12));
    CHECK(est.satisfied);
}

TEST_CASE("gain fit without noise is offset only") {
    std::vector<HorizonSample> s;
    for (double d : {0.5, 0.9, 1.1, 1.2, 1.2}) s.push_back({d, d, 0.0});
    const auto est = fit_io_gain(s);
    CHECK(est.rho_hat == 0.0);
    CHECK_THAT(est.sigma_hat, WithinAbs(1.2, 1e-15));
    CHECK(est.satisfied);
}

TEST_CASE("gain fit is feasible and nonnegative on random data") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<HorizonSample> s;
        const int n = std::uniform_int_distribution<int>(2, 30)(rng);
        for (int k = 0; k < n; ++k) s.push_back({static_cast<double>(k + 1), u(rng), u(rng)});
        const auto est = fit_io_gain(s);
        CHECK(est.rho_hat >= 0.0);
        CHECK(est.sigma_hat >= 0.0);
        CHECK(est.satisfied);
        for (const auto& x : est.samples) {
            CHECK(x.disagreement_norm <= est.rho_hat * x.noise_norm + est.sigma_hat + 1e-12);
        }
    }
}

TEST_CASE("gain fit scales with the signals") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double rho = u(rng), sigma = u(rng), c = u(rng);
        std::vector<HorizonSample> a, b;
        for (int k = 1; k <= 10; ++k) {
            const double w = u(rng);
            a.push_back({double(k), rho * w + sigma, w});
            b.push_back({double(k), c * (rho * w + sigma), c * w});
        }
        const auto ea = fit_io_gain(a);
        const auto eb = fit_io_gain(b);
        CHECK_THAT(eb.rho_hat, WithinRel(ea.rho_hat, 1e-9));
        CHECK_THAT(eb.sigma_hat, WithinRel(c * ea.sigma_hat, 1e-9));
    }
}

TEST_CASE("estimate from a synthetic trajectory") {
    // one edge; y difference 3 w difference + decaying transient
    const auto t = grid(10.0, 10000);
    const auto rows = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(rows, 2);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(rows, 2);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double tt = t[static_cast<std::size_t>(r)];
        w(r, 0) = std::sin(3.0 * tt);
        y(r, 0) = 3.0 * w(r, 0) + std::exp(-tt);
    }
    const auto est = estimate_io_gain(record(t, y, w, {1, 2}), Graph({1, 2}, {{1, 2}}),
                                      log_spaced_horizons(0.1, 10.0, 50));
    CHECK(est.samples.size() == 50);
    CHECK(est.samples.back().horizon == 10.0);
    CHECK(est.satisfied);
    CHECK(est.rho_hat > 2.0);
    CHECK(est.rho_hat < 4.0);
    for (const auto& s : est.samples) CHECK(s.disagreement_norm <= est.rho_hat * s.noise_norm + est.sigma_hat + 1e-12);
}

TEST_CASE("horizon grid") {
    const auto h = log_spaced_horizons(0.1, 30.0, 50);
    CHECK(h.size() == 50);
    CHECK_THAT(h.front(), WithinRel(0.1, 1e-12));
    CHECK(h.back() == 30.0);
    CHECK(std::is_sorted(h.begin(), h.end()));
    CHECK_THROWS_AS(log_spaced_horizons(0.0, 1.0, 5), ValidationError);
    CHECK_THROWS_AS(log_spaced_horizons(0.1, 1.0, 1), ValidationError);
    CHECK_THROWS_AS(fit_io_gain({{1.0, 1.0, 1.0}}), ValidationError);
}
