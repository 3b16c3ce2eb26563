#pragma once

// Static, odd, sector-bounded coupling maps phi_ij used on network edges.

#include "ppcons/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace ppcons {

enum class CouplingKind {
    linear,           ///< a x
    saturated_sine,   ///< a sin(x) for |x| < pi/2, a x otherwise (discontinuous at pi/2)
    continuous_sine,  ///< a sin(x) for |x| < pi/2, a sign(x)(1 + |x| - pi/2) otherwise
    tabulated,        ///< odd piecewise-linear through (0,0) and (x_k, y_k), x_k > 0
};

[[nodiscard]] inline std::string to_string(CouplingKind k) {
    switch (k) {
        case CouplingKind::linear: return "linear";
        case CouplingKind::saturated_sine: return "sat_sine";
        case CouplingKind::continuous_sine: return "sat_sine_continuous";
        case CouplingKind::tabulated: return "tabulated";
    }
    return "unknown";
}

[[nodiscard]] inline CouplingKind coupling_kind_from_string(const std::string& s) {
    if (s == "linear") return CouplingKind::linear;
    if (s == "sat_sine") return CouplingKind::saturated_sine;
    if (s == "sat_sine_continuous") return CouplingKind::continuous_sine;
    if (s == "tabulated") return CouplingKind::tabulated;
    throw ValidationError("unknown coupling kind '" + s + "'");
}

struct SectorCoupling {
    CouplingKind kind = CouplingKind::linear;
    double gain = 1.0;
    /// Breakpoints for tabulated maps, positive half-line only.
    std::vector<double> table_x;
    std::vector<double> table_y;
    double alpha_lower = 1.0;
    double alpha_upper = 1.0;

    friend bool operator==(const SectorCoupling&, const SectorCoupling&) = default;
};

[[nodiscard]] inline double evaluate_coupling(const SectorCoupling& c, double x) {
    constexpr double half_pi = std::numbers::pi / 2.0;
    switch (c.kind) {
        case CouplingKind::linear: return c.gain * x;
        case CouplingKind::saturated_sine: return std::abs(x) < half_pi ? c.gain * std::sin(x) : c.gain * x;
        case CouplingKind::continuous_sine:
            if (std::abs(x) < half_pi) return c.gain * std::sin(x);
            return std::copysign(c.gain * (1.0 + std::abs(x) - half_pi), x);
        case CouplingKind::tabulated: {
            const double ax = std::abs(x);
            const auto& xs = c.table_x;
            const auto& ys = c.table_y;
            double v;
            if (ax >= xs.back()) {
                v = ys.back() / xs.back() * ax;
            } else {
                auto it = std::upper_bound(xs.begin(), xs.end(), ax);
                const auto k = static_cast<std::size_t>(it - xs.begin());
                const double x0 = k == 0 ? 0.0 : xs[k - 1];
                const double y0 = k == 0 ? 0.0 : ys[k - 1];
                v = y0 + (ys[k] - y0) * (ax - x0) / (xs[k] - x0);
            }
            return x < 0.0 ? -v : v;
        }
    }
    return 0.0;
}

/// Analytic sector bounds of a coupling's map (tabulated: min/max slope
/// through the origin over the breakpoints).
inline void assign_default_bounds(SectorCoupling& c) {
    switch (c.kind) {
        case CouplingKind::linear:
            c.alpha_lower = c.alpha_upper = c.gain;
            break;
        case CouplingKind::saturated_sine:
        case CouplingKind::continuous_sine:
            c.alpha_lower = c.gain * 2.0 / std::numbers::pi;
            c.alpha_upper = c.gain;
            break;
        case CouplingKind::tabulated: {
            c.alpha_lower = c.alpha_upper = c.table_y.front() / c.table_x.front();
            for (std::size_t k = 0; k < c.table_x.size(); ++k) {
                const double r = c.table_y[k] / c.table_x[k];
                c.alpha_lower = std::min(c.alpha_lower, r);
                c.alpha_upper = std::max(c.alpha_upper, r);
            }
            break;
        }
    }
}

[[nodiscard]] inline SectorCoupling make_coupling(CouplingKind kind, double gain) {
    if (kind == CouplingKind::tabulated) throw ValidationError("tabulated couplings need breakpoints");
    if (!(gain > 0.0) || !std::isfinite(gain)) throw ValidationError("coupling gain must be positive and finite");
    SectorCoupling c;
    c.kind = kind;
    c.gain = gain;
    assign_default_bounds(c);
    return c;
}

[[nodiscard]] inline SectorCoupling make_tabulated_coupling(std::vector<double> xs, std::vector<double> ys) {
    if (xs.empty() || xs.size() != ys.size()) throw ValidationError("tabulated coupling needs matching x/y tables");
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (!(xs[k] > 0.0) || (k > 0 && !(xs[k] > xs[k - 1]))) {
            throw ValidationError("tabulated coupling x values must be positive and strictly increasing");
        }
    }
    SectorCoupling c;
    c.kind = CouplingKind::tabulated;
    c.gain = 1.0;
    c.table_x = std::move(xs);
    c.table_y = std::move(ys);
    assign_default_bounds(c);
    return c;
}

struct SectorCheck {
    double alpha_lower_observed = 0.0;
    double alpha_upper_observed = 0.0;
    bool odd_symmetry_ok = true;
    bool zero_at_origin = true;
    /// Observed ratios within the declared [alpha_lower, alpha_upper].
    bool within_declared = true;
};

/// Samples phi(x)/x on a symmetric grid (linear and log-spaced points in
/// (0, range], mirrored) and checks odd symmetry at each sample.
[[nodiscard]] inline SectorCheck verify_sector(const SectorCoupling& c, std::size_t samples = 4000,
                                               double range = 10.0) {
    if (samples < 2 || !(range > 0.0)) throw ValidationError("verify_sector needs samples >= 2 and range > 0");
    std::vector<double> xs;
    xs.reserve(2 * samples);
    for (std::size_t k = 1; k <= samples; ++k) xs.push_back(range * static_cast<double>(k) / static_cast<double>(samples));
    const double lmin = std::log10(range) - 6.0;
    const double lmax = std::log10(range);
    for (std::size_t k = 0; k < samples; ++k) {
        xs.push_back(std::pow(10.0, lmin + (lmax - lmin) * static_cast<double>(k) / static_cast<double>(samples - 1)));
    }

    SectorCheck out;
    out.alpha_lower_observed = std::numeric_limits<double>::infinity();
    out.alpha_upper_observed = -std::numeric_limits<double>::infinity();
    out.zero_at_origin = evaluate_coupling(c, 0.0) == 0.0;
    for (double x : xs) {
        const double fp = evaluate_coupling(c, x);
        const double fm = evaluate_coupling(c, -x);
        if (std::abs(fp + fm) > 1e-12 * std::max(1.0, std::abs(fp))) out.odd_symmetry_ok = false;
        for (double r : {fp / x, fm / -x}) {
            out.alpha_lower_observed = std::min(out.alpha_lower_observed, r);
            out.alpha_upper_observed = std::max(out.alpha_upper_observed, r);
        }
    }
    const double tol = 1e-12 * std::max(1.0, std::abs(c.alpha_upper));
    out.within_declared = out.alpha_lower_observed >= c.alpha_lower - tol &&
                          out.alpha_upper_observed <= c.alpha_upper + tol;
    return out;
}

}  // namespace ppcons
