#pragma once

// JSON and plain-text renderings of certificate reports and consensus
// estimates.

#include "ppcons/certificates.hpp"
#include "ppcons/metrics.hpp"
#include "ppcons/scenario_io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>

namespace ppcons {

namespace detail {

/// JSON has no infinities; encode them as null.
inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline std::string fixed(double v, int prec = 4) {
    if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

}  // namespace detail

[[nodiscard]] inline json to_json(const CertificateReport& rep) {
    json edges = json::array();
    for (const auto& e : rep.edge_margins) {
        edges.push_back({{"edge", {e.i, e.j}}, {"r_i", e.r_i}, {"r_j", e.r_j}, {"margin", e.margin}});
    }
    json boundary = json::array();
    for (const auto& b : rep.boundary) {
        boundary.push_back({{"edge", {b.p, b.q}},
                            {"gamma_p", b.gamma_p ? json(*b.gamma_p) : json(nullptr)},
                            {"gamma_q", b.gamma_q ? json(*b.gamma_q) : json(nullptr)},
                            {"gamma_pq", detail::finite_or_null(b.gamma_pq)},
                            {"margin", b.margin}});
    }
    json j = {
        {"kind", to_string(rep.kind)},
        {"graph", to_json(rep.graph)},
        {"edge_margins", edges},
        {"boundary", boundary},
        {"s_weights", rep.s_weights},
        {"gershgorin_evaluated", rep.gershgorin_evaluated},
        {"gershgorin_margins", rep.gershgorin_margins},
        {"gershgorin_ok", rep.gershgorin_ok},
        {"gershgorin_strict_ok", rep.gershgorin_strict_ok},
        {"oracle_min_eigenvalue", detail::finite_or_null(rep.oracle_min_eigenvalue)},
        {"verdict", to_string(rep.verdict)},
        {"failing_edges", rep.failing},
        {"notes", rep.notes},
    };
    return j;
}

[[nodiscard]] inline std::string to_table(const CertificateReport& rep) {
    using detail::fixed;
    std::ostringstream out;
    out << "plug kind: " << to_string(rep.kind) << "\n";
    out << "edge        r_i  r_j   local margin\n";
    for (const auto& e : rep.edge_margins) {
        char line[128];
        std::snprintf(line, sizeof line, "%-10s  %3zu  %3zu   %s%s\n", edge_name(e.i, e.j).c_str(), e.r_i, e.r_j,
                      fixed(e.margin).c_str(), e.margin > 0 ? "" : "   FAIL");
        out << line;
    }
    if (!rep.boundary.empty()) {
        out << "boundary    gamma_p   gamma_q   gamma_pq  margin\n";
        for (const auto& b : rep.boundary) {
            char line[160];
            std::snprintf(line, sizeof line, "%-10s  %-8s  %-8s  %-8s  %s%s\n", edge_name(b.p, b.q).c_str(),
                          b.gamma_p ? fixed(*b.gamma_p).c_str() : "-", b.gamma_q ? fixed(*b.gamma_q).c_str() : "-",
                          fixed(b.gamma_pq).c_str(), fixed(b.margin).c_str(), b.margin > 0 ? "" : "   FAIL");
            out << line;
        }
    }
    if (rep.gershgorin_evaluated) {
        out << "weighted Gershgorin: " << (rep.gershgorin_ok ? "holds" : "fails")
            << (rep.gershgorin_strict_ok ? " (strict)" : " (non-strict only)") << "\n";
    }
    out << "min eigenvalue of D^T Psi D + Lambda: " << fixed(rep.oracle_min_eigenvalue, 6) << "\n";
    for (const auto& n : rep.notes) out << "note: " << n << "\n";
    out << "verdict: " << to_string(rep.verdict) << "\n";
    return out.str();
}

[[nodiscard]] inline json to_json(const ConsensusEstimate& est) {
    json samples = json::array();
    for (const auto& s : est.samples) {
        samples.push_back({{"T", s.horizon}, {"disagreement_norm", s.disagreement_norm}, {"noise_norm", s.noise_norm}});
    }
    return {{"rho_hat", est.rho_hat}, {"sigma_hat", est.sigma_hat}, {"satisfied", est.satisfied}, {"samples", samples}};
}

[[nodiscard]] inline std::string to_table(const ConsensusEstimate& est) {
    std::ostringstream out;
    out << "        T    ||D^T Y||_T   ||D^T W||_T\n";
    for (const auto& s : est.samples) {
        char line[128];
        std::snprintf(line, sizeof line, "%9.4f  %12.6f  %12.6f\n", s.horizon, s.disagreement_norm, s.noise_norm);
        out << line;
    }
    out << "rho_hat = " << detail::fixed(est.rho_hat, 6) << ", sigma_hat = " << detail::fixed(est.sigma_hat, 6)
        << (est.satisfied ? "" : " (fit failed)") << "\n";
    return out.str();
}

}  // namespace ppcons
