#pragma once

// Input-feedforward passivity indices. For a SISO LTI system the tight
// index is inf over omega of Re H(j omega); we estimate it with a
// log-spaced sweep refined by golden-section search.

#include "ppcons/error.hpp"
#include "ppcons/lti.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace ppcons {

enum class IfpProvenance { declared, frequency_sweep };

struct IfpIndex {
    double nu = 0.0;
    double delta = 0.0;
    IfpProvenance provenance = IfpProvenance::declared;
};

struct SweepOptions {
    double omega_min = 1e-4;
    double omega_max = 1e4;
    std::size_t points = 2000;
    /// Width, in log10(omega), at which the golden-section refinement stops.
    double refine_tol = 1e-10;
};

struct IfpEstimate {
    IfpIndex index;
    /// Frequency at which the minimum was found; +inf when the infimum is the
    /// high-frequency limit D.
    double omega_at_min = 0.0;
};

/// Rejects systems outside the sweep's domain: open-RHP poles, non-zero
/// poles on the imaginary axis, or repeated poles at the origin (Re H is
/// then unbounded below near omega = 0).
inline void check_sweepable(const LtiSystem& sys) {
    constexpr double axis_tol = 1e-9;
    int origin = 0;
    for (const auto& p : sys.poles()) {
        const double scale = std::max(1.0, std::abs(p));
        if (p.real() > axis_tol * scale) {
            throw UnsupportedSystem("unstable system: pole at " + std::to_string(p.real()) + "+" +
                                    std::to_string(p.imag()) + "j");
        }
        if (std::abs(p.real()) <= axis_tol * scale) {
            if (std::abs(p.imag()) > axis_tol * scale) {
                throw UnsupportedSystem("purely imaginary pole at +-" + std::to_string(std::abs(p.imag())) +
                                        "j: frequency response is unbounded");
            }
            ++origin;
        }
    }
    if (origin > 1) throw UnsupportedSystem("repeated pole at the origin: Re H(j omega) is unbounded below");
}

[[nodiscard]] inline IfpEstimate estimate_ifp_index(const LtiSystem& sys, const SweepOptions& opt = {}) {
    check_sweepable(sys);
    if (opt.points < 3 || !(opt.omega_min > 0.0) || !(opt.omega_max > opt.omega_min)) {
        throw ValidationError("frequency grid needs >= 3 points over 0 < omega_min < omega_max");
    }
    auto re_at_log = [&](double lw) { return sys.response(std::pow(10.0, lw)).real(); };

    const double lo = std::log10(opt.omega_min);
    const double hi = std::log10(opt.omega_max);
    const double step = (hi - lo) / static_cast<double>(opt.points - 1);
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < opt.points; ++k) {
        const double v = re_at_log(lo + step * static_cast<double>(k));
        if (v < best_val) {
            best_val = v;
            best = k;
        }
    }

    double a = lo + step * static_cast<double>(best == 0 ? 0 : best - 1);
    double b = lo + step * static_cast<double>(best + 1 >= opt.points ? opt.points - 1 : best + 1);
    double best_log = lo + step * static_cast<double>(best);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = re_at_log(c);
    double fd = re_at_log(d);
    while (b - a > opt.refine_tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = re_at_log(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = re_at_log(d);
        }
    }
    for (auto [x, fx] : {std::pair{c, fc}, std::pair{d, fd}}) {
        if (fx < best_val) {
            best_val = fx;
            best_log = x;
        }
    }

    IfpEstimate est;
    est.index.provenance = IfpProvenance::frequency_sweep;
    est.omega_at_min = std::pow(10.0, best_log);
    // High-frequency limit: Re H(j inf) = D for a proper system.
    if (sys.D() <= best_val) {
        best_val = sys.D();
        est.omega_at_min = std::numeric_limits<double>::infinity();
    }
    est.index.nu = best_val;
    return est;
}

}  // namespace ppcons
