#pragma once

// Truncated L2 norms of sampled signals and an empirical (rho, sigma) pair
// for the consensus inequality ||D^T Y||_T <= rho ||D^T W||_T + sigma.

#include "ppcons/error.hpp"
#include "ppcons/graph.hpp"
#include "ppcons/simulation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace ppcons {

/// Running trapezoid integral of |x(t)|^2 over the sample grid.
[[nodiscard]] inline std::vector<double> cumulative_energy(const std::vector<double>& times,
                                                           const Eigen::MatrixXd& signal) {
    if (times.empty() || signal.rows() == 0) throw ValidationError("empty signal");
    if (static_cast<Eigen::Index>(times.size()) != signal.rows()) {
        throw ValidationError("signal has " + std::to_string(signal.rows()) + " samples but " +
                              std::to_string(times.size()) + " time stamps");
    }
    std::vector<double> acc(times.size(), 0.0);
    double prev = signal.row(0).squaredNorm();
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double cur = signal.row(static_cast<Eigen::Index>(k)).squaredNorm();
        acc[k] = acc[k - 1] + 0.5 * (times[k] - times[k - 1]) * (prev + cur);
        prev = cur;
    }
    return acc;
}

/// Energy on [t_0, T], interpolating the integrand linearly inside the last interval.
[[nodiscard]] inline double energy_at(const std::vector<double>& times, const Eigen::MatrixXd& signal,
                                      const std::vector<double>& cumulative, double horizon) {
    if (horizon > times.back() * (1.0 + 1e-12) + 1e-15) {
        throw ValidationError("horizon " + std::to_string(horizon) + " exceeds the recorded span");
    }
    if (horizon <= times.front()) return 0.0;
    auto it = std::upper_bound(times.begin(), times.end(), horizon);
    if (it == times.end()) return cumulative.back();
    const auto k = static_cast<std::size_t>(it - times.begin()) - 1;
    const double g0 = signal.row(static_cast<Eigen::Index>(k)).squaredNorm();
    const double g1 = signal.row(static_cast<Eigen::Index>(k + 1)).squaredNorm();
    const double h = horizon - times[k];
    const double gt = g0 + (g1 - g0) * h / (times[k + 1] - times[k]);
    return cumulative[k] + 0.5 * h * (g0 + gt);
}

/// ||x||_T by the trapezoid rule on the sample grid.
[[nodiscard]] inline double truncated_norm(const std::vector<double>& times, const Eigen::MatrixXd& signal,
                                           double horizon) {
    const auto cum = cumulative_energy(times, signal);
    return std::sqrt(energy_at(times, signal, cum, horizon));
}

/// D^T X per sample, for a samples x nodes matrix whose columns follow `node_ids`.
[[nodiscard]] inline Eigen::MatrixXd edge_differences(const Eigen::MatrixXd& samples,
                                                      const std::vector<NodeId>& node_ids, const Graph& g) {
    if (static_cast<Eigen::Index>(node_ids.size()) != samples.cols()) {
        throw ValidationError("trajectory columns do not match its node list");
    }
    auto column = [&](NodeId id) {
        for (std::size_t c = 0; c < node_ids.size(); ++c) {
            if (node_ids[c] == id) return static_cast<Eigen::Index>(c);
        }
        throw ValidationError("graph node " + std::to_string(id) + " has no trajectory column");
    };
    Eigen::MatrixXd out(samples.rows(), static_cast<Eigen::Index>(g.edge_count()));
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edges()[k];
        out.col(static_cast<Eigen::Index>(k)) = samples.col(column(e.plus)) - samples.col(column(e.minus));
    }
    return out;
}

/// |D^T Y(t)| per sample.
[[nodiscard]] inline std::vector<double> disagreement(const TrajectoryRecord& traj, const Graph& g) {
    const Eigen::MatrixXd diff = edge_differences(traj.y, traj.node_ids, g);
    std::vector<double> out(static_cast<std::size_t>(diff.rows()));
    for (Eigen::Index r = 0; r < diff.rows(); ++r) out[static_cast<std::size_t>(r)] = diff.row(r).norm();
    return out;
}

struct HorizonSample {
    double horizon;
    double disagreement_norm;  ///< ||D^T Y||_T
    double noise_norm;         ///< ||D^T W||_T
};

struct ConsensusEstimate {
    double rho_hat = 0.0;
    double sigma_hat = 0.0;
    std::vector<HorizonSample> samples;
    bool satisfied = false;
};

[[nodiscard]] inline std::vector<double> log_spaced_horizons(double t_min, double t_max, std::size_t count) {
    std::vector<double> out;
    if (count < 2 || !(t_min > 0.0) || !(t_max > t_min)) throw ValidationError("need >= 2 horizons over 0 < t_min < t_max");
    const double a = std::log10(t_min);
    const double b = std::log10(t_max);
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(std::pow(10.0, a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1)));
    }
    out.back() = t_max;
    return out;
}

/// Least-squares (rho, sigma) with both >= 0, then sigma raised to the
/// smallest value for which every sample satisfies the inequality.
[[nodiscard]] inline ConsensusEstimate fit_io_gain(std::vector<HorizonSample> samples) {
    if (samples.size() < 2) throw ValidationError("need at least two horizons");
    ConsensusEstimate est;
    const auto n = static_cast<double>(samples.size());
    double sa = 0, sb = 0, saa = 0, sab = 0;
    for (const auto& s : samples) {
        sa += s.noise_norm;
        sb += s.disagreement_norm;
        saa += s.noise_norm * s.noise_norm;
        sab += s.noise_norm * s.disagreement_norm;
    }
    const double det = n * saa - sa * sa;
    double rho = 0.0;
    double sigma = sb / n;
    if (saa > 0.0 && det > 1e-14 * n * saa) {
        rho = (n * sab - sa * sb) / det;
        sigma = (sb - rho * sa) / n;
        if (sigma < 0.0) {
            sigma = 0.0;
            rho = sab / saa;
        }
        if (rho < 0.0) {
            rho = 0.0;
            sigma = sb / n;
        }
    } else if (saa > 0.0) {
        // all noise norms equal: one-parameter fit through the origin
        rho = std::max(0.0, sab / saa);
        sigma = 0.0;
    }
    for (const auto& s : samples) sigma = std::max(sigma, s.disagreement_norm - rho * s.noise_norm);
    est.rho_hat = rho;
    est.sigma_hat = std::max(0.0, sigma);
    est.samples = std::move(samples);
    est.satisfied = std::isfinite(est.rho_hat) && std::isfinite(est.sigma_hat);
    return est;
}

[[nodiscard]] inline ConsensusEstimate estimate_io_gain(const TrajectoryRecord& traj, const Graph& g,
                                                        const std::vector<double>& horizons) {
    if (horizons.size() < 2) throw ValidationError("need at least two horizons");
    const Eigen::MatrixXd dy = edge_differences(traj.y, traj.node_ids, g);
    const Eigen::MatrixXd dw = edge_differences(traj.w, traj.node_ids, g);
    const auto cy = cumulative_energy(traj.times, dy);
    const auto cw = cumulative_energy(traj.times, dw);
    std::vector<HorizonSample> samples;
    for (double T : horizons) {
        samples.push_back({T, std::sqrt(energy_at(traj.times, dy, cy, T)), std::sqrt(energy_at(traj.times, dw, cw, T))});
    }
    return fit_io_gain(std::move(samples));
}

}  // namespace ppcons
