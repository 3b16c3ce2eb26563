#pragma once

// Positive-definiteness certificates for M = D^T Theta D + Sigma and the
// local interface conditions for plugging a node or a network into an
// existing network of IFP systems.
//
// For the network instantiation Theta = diag(nu_i) and Sigma = diag(1/abar_k);
// plug certificates weight boundary edges with gamma and all other edges with 1.

#include "ppcons/error.hpp"
#include "ppcons/graph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ppcons {

struct CertificateProblem {
    Graph graph;
    std::vector<double> theta;      ///< per node, graph node order
    std::vector<double> sigma;      ///< per edge, graph column order
    std::vector<double> s_weights;  ///< per edge, all > 0

    void validate() const {
        if (theta.size() != graph.node_count()) {
            throw ValidationError("theta has " + std::to_string(theta.size()) + " entries, graph has " +
                                  std::to_string(graph.node_count()) + " nodes");
        }
        if (sigma.size() != graph.edge_count() || s_weights.size() != graph.edge_count()) {
            throw ValidationError("sigma/s_weights must have one entry per edge (" +
                                  std::to_string(graph.edge_count()) + ")");
        }
        for (double s : s_weights) {
            if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("edge weights must be positive and finite");
        }
    }
};

struct GershgorinResult {
    /// s_k (theta_i + theta_j + sigma_k) minus the weighted off-diagonal row sum.
    std::vector<double> margins;
    bool strict_ok = false;     ///< every margin > tol
    bool nonstrict_ok = false;  ///< every margin >= -tol
};

[[nodiscard]] inline GershgorinResult gershgorin_pd_check(const CertificateProblem& prob, double tol = 1e-12) {
    prob.validate();
    const Graph& g = prob.graph;
    GershgorinResult out;
    out.margins.reserve(g.edge_count());
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edges()[k];
        const double ti = prob.theta[g.index_of(e.plus)];
        const double tj = prob.theta[g.index_of(e.minus)];
        double off = 0.0;
        for (std::size_t l : g.incident_edges(e.plus)) {
            if (l != k) off += prob.s_weights[l] * std::abs(ti);
        }
        for (std::size_t l : g.incident_edges(e.minus)) {
            if (l != k) off += prob.s_weights[l] * std::abs(tj);
        }
        out.margins.push_back(prob.s_weights[k] * (ti + tj + prob.sigma[k]) - off);
    }
    out.strict_ok = std::all_of(out.margins.begin(), out.margins.end(), [tol](double m) { return m > tol; });
    out.nonstrict_ok = std::all_of(out.margins.begin(), out.margins.end(), [tol](double m) { return m >= -tol; });
    return out;
}

[[nodiscard]] inline Eigen::MatrixXd certificate_matrix(const CertificateProblem& prob) {
    const Eigen::MatrixXd d = incidence(prob.graph).cast<double>();
    const Eigen::VectorXd theta = Eigen::Map<const Eigen::VectorXd>(prob.theta.data(),
                                                                     static_cast<Eigen::Index>(prob.theta.size()));
    const Eigen::VectorXd sigma = Eigen::Map<const Eigen::VectorXd>(prob.sigma.data(),
                                                                     static_cast<Eigen::Index>(prob.sigma.size()));
    Eigen::MatrixXd m = d.transpose() * theta.asDiagonal() * d;
    m.diagonal() += sigma;
    return m;
}

/// Smallest eigenvalue of D^T Theta D + Sigma (+inf for an edgeless graph).
[[nodiscard]] inline double pd_oracle(const CertificateProblem& prob) {
    if (prob.theta.size() != prob.graph.node_count() || prob.sigma.size() != prob.graph.edge_count()) {
        throw ValidationError("certificate problem dimensions do not match the graph");
    }
    if (prob.graph.edge_count() == 0) return std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(certificate_matrix(prob), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

/// 1/abar_ij + nu_i + nu_j - (r_i - 1)|nu_i| - (r_j - 1)|nu_j|
[[nodiscard]] inline double check_edge_condition(double nu_i, double nu_j, std::size_t r_i, std::size_t r_j,
                                                 double alpha_upper) {
    return 1.0 / alpha_upper + nu_i + nu_j - (static_cast<double>(r_i) - 1.0) * std::abs(nu_i) -
           (static_cast<double>(r_j) - 1.0) * std::abs(nu_j);
}

/// Passivity indices per node and upper sector bounds per undirected edge.
struct NetworkParameters {
    std::map<NodeId, double> nu;
    std::map<EdgeKey, double> alpha_upper;

    [[nodiscard]] double nu_of(NodeId i) const {
        auto it = nu.find(i);
        if (it == nu.end()) throw ValidationError("no passivity index for node " + std::to_string(i));
        return it->second;
    }

    [[nodiscard]] double alpha_of(NodeId i, NodeId j) const {
        auto it = alpha_upper.find(edge_key(i, j));
        if (it == alpha_upper.end()) throw ValidationError("no coupling bound for edge " + edge_name(i, j));
        if (!(it->second > 0.0)) throw ValidationError("upper sector bound of edge " + edge_name(i, j) + " must be > 0");
        return it->second;
    }
};

[[nodiscard]] inline double edge_condition_in(const Graph& g, NodeId i, NodeId j, const NetworkParameters& par) {
    return check_edge_condition(par.nu_of(i), par.nu_of(j), g.degree(i), g.degree(j), par.alpha_of(i, j));
}

/// min over neighbours j of c in `g` of edge_condition(c, j) / |nu_c|.
[[nodiscard]] inline double compute_gamma(NodeId c, const Graph& g, const NetworkParameters& par) {
    const double nu_c = par.nu_of(c);
    if (g.degree(c) == 0) {
        throw DegenerateInput("node " + std::to_string(c) +
                              " has no neighbours in its network; gamma is undefined (use the eigenvalue oracle)");
    }
    if (nu_c == 0.0) {
        throw DegenerateInput("node " + std::to_string(c) +
                              " has passivity index 0; gamma divides by |nu| (use the eigenvalue oracle)");
    }
    double gamma = std::numeric_limits<double>::infinity();
    for (NodeId j : g.neighbors(c)) gamma = std::min(gamma, edge_condition_in(g, c, j, par) / std::abs(nu_c));
    return gamma;
}

[[nodiscard]] inline CertificateProblem make_certificate_problem(const Graph& g, const NetworkParameters& par,
                                                                 std::vector<double> s_weights = {}) {
    CertificateProblem prob;
    prob.graph = g;
    for (NodeId id : g.nodes()) prob.theta.push_back(par.nu_of(id));
    for (const Edge& e : g.edges()) prob.sigma.push_back(1.0 / par.alpha_of(e.plus, e.minus));
    prob.s_weights = s_weights.empty() ? std::vector<double>(g.edge_count(), 1.0) : std::move(s_weights);
    return prob;
}

enum class Verdict { certified, gershgorin_failed_oracle_pd, not_pd };

[[nodiscard]] inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::certified: return "certified";
        case Verdict::gershgorin_failed_oracle_pd: return "gershgorin_failed_oracle_pd";
        case Verdict::not_pd: return "not_pd";
    }
    return "unknown";
}

enum class PlugKind { none, single_node, network };

[[nodiscard]] inline std::string to_string(PlugKind k) {
    switch (k) {
        case PlugKind::none: return "none";
        case PlugKind::single_node: return "single_node";
        case PlugKind::network: return "network";
    }
    return "unknown";
}

struct EdgeMargin {
    NodeId i;
    NodeId j;
    std::size_t r_i;
    std::size_t r_j;
    double margin;
};

struct BoundaryMargin {
    NodeId p;
    NodeId q;
    std::optional<double> gamma_p;  ///< absent when p has no intra-network edges
    std::optional<double> gamma_q;
    double gamma_pq = 0.0;
    double margin = 0.0;
};

struct CertificateOptions {
    /// Margins must exceed this to count as strictly positive.
    double strict_tol = 1e-12;
    bool oracle_only = false;
};

struct CertificateReport {
    PlugKind kind = PlugKind::none;
    Graph graph;  ///< the (augmented) graph the certificate is about
    std::vector<EdgeMargin> edge_margins;
    std::vector<BoundaryMargin> boundary;
    std::vector<double> s_weights;
    std::vector<double> gershgorin_margins;
    bool gershgorin_ok = false;
    bool gershgorin_strict_ok = false;
    bool gershgorin_evaluated = false;
    double oracle_min_eigenvalue = 0.0;
    Verdict verdict = Verdict::not_pd;
    std::vector<std::string> failing;  ///< names of edges whose local condition fails
    std::vector<std::string> notes;
};

namespace detail {

inline void finish_report(CertificateReport& rep, const NetworkParameters& par, const CertificateOptions& opt,
                          bool local_conditions_ok) {
    CertificateProblem prob = make_certificate_problem(rep.graph, par);
    rep.oracle_min_eigenvalue = pd_oracle(prob);
    const bool oracle_pd = rep.oracle_min_eigenvalue > opt.strict_tol;

    if (opt.oracle_only) {
        rep.notes.emplace_back("oracle-only mode: Gershgorin certificate skipped");
        rep.verdict = oracle_pd ? Verdict::certified : Verdict::not_pd;
        return;
    }

    const bool weights_ok = !rep.s_weights.empty() && std::all_of(rep.s_weights.begin(), rep.s_weights.end(),
                                                                   [](double s) { return s > 0.0 && std::isfinite(s); });
    if (weights_ok) {
        prob.s_weights = rep.s_weights;
        const auto g = gershgorin_pd_check(prob, opt.strict_tol);
        rep.gershgorin_margins = g.margins;
        rep.gershgorin_ok = g.nonstrict_ok;
        rep.gershgorin_strict_ok = g.strict_ok;
        rep.gershgorin_evaluated = true;
    } else if (rep.graph.edge_count() > 0) {
        rep.notes.emplace_back("non-positive gamma: no positive edge weighting, Gershgorin check not evaluated");
    }

    if (local_conditions_ok && oracle_pd) {
        rep.verdict = Verdict::certified;
    } else if (oracle_pd) {
        rep.verdict = Verdict::gershgorin_failed_oracle_pd;
        rep.notes.emplace_back("local interface conditions fail, but D^T Psi D + Lambda is positive definite");
    } else {
        rep.verdict = Verdict::not_pd;
        if (local_conditions_ok) {
            rep.notes.emplace_back("local conditions hold but the eigenvalue oracle reports M not positive definite");
        }
    }
}

inline bool collect_edge_margins(const Graph& g, const NetworkParameters& par, const CertificateOptions& opt,
                                 CertificateReport& rep) {
    bool ok = true;
    for (const Edge& e : g.edges()) {
        const double m = edge_condition_in(g, e.plus, e.minus, par);
        rep.edge_margins.push_back({e.plus, e.minus, g.degree(e.plus), g.degree(e.minus), m});
        if (!(m > opt.strict_tol)) {
            ok = false;
            rep.failing.push_back(edge_name(e.plus, e.minus));
        }
    }
    return ok;
}

}  // namespace detail

/// Per-edge conditions on a fixed network with unit edge weights.
[[nodiscard]] inline CertificateReport certify_network(const Graph& g, const NetworkParameters& par,
                                                       const CertificateOptions& opt = {}) {
    CertificateReport rep;
    rep.kind = PlugKind::none;
    rep.graph = g;
    const bool ok = detail::collect_edge_margins(g, par, opt, rep);
    rep.s_weights.assign(g.edge_count(), 1.0);
    detail::finish_report(rep, par, opt, ok);
    return rep;
}

[[nodiscard]] inline CertificateReport certify_single_node_plug(const PlugPlan& plan, const NetworkParameters& par,
                                                                const CertificateOptions& opt = {}) {
    if (!plan.is_single_node()) throw ValidationError("certify_single_node_plug needs a single-node plan");
    if (plan.boundary.size() != 1) throw ValidationError("a single-node plug requires exactly one boundary edge");
    if (!is_connected(plan.base)) throw DegenerateInput("the base network is not connected");

    CertificateReport rep;
    rep.kind = PlugKind::single_node;
    rep.graph = compose(plan);
    bool ok = detail::collect_edge_margins(plan.base, par, opt, rep);

    const auto& [c, joining] = plan.boundary.front();
    BoundaryMargin b{c, joining, std::nullopt, std::nullopt, 0.0, 0.0};
    bool have_gamma = false;
    try {
        b.gamma_p = compute_gamma(c, plan.base, par);
        b.gamma_pq = *b.gamma_p;
        have_gamma = true;
    } catch (const DegenerateInput& e) {
        if (!opt.oracle_only) throw;
        rep.notes.emplace_back(e.what());
    }
    if (have_gamma) {
        const double nu_c = par.nu_of(c);
        b.margin = b.gamma_pq * (1.0 / par.alpha_of(joining, c) + par.nu_of(joining) + nu_c) -
                   static_cast<double>(plan.base.degree(c)) * std::abs(nu_c);
        if (!(b.margin > opt.strict_tol)) {
            ok = false;
            rep.failing.push_back(edge_name(joining, c));
        }
        rep.s_weights.assign(plan.base.edge_count(), 1.0);
        rep.s_weights.push_back(b.gamma_pq);
    } else {
        ok = false;
    }
    rep.boundary.push_back(b);
    detail::finish_report(rep, par, opt, ok);
    return rep;
}

[[nodiscard]] inline CertificateReport certify_network_plug(const PlugPlan& plan, const NetworkParameters& par,
                                                            const CertificateOptions& opt = {}) {
    if (plan.is_single_node()) throw ValidationError("certify_network_plug needs a network plan");
    const Graph& g1 = plan.base;
    const Graph& g2 = plan.added_graph();

    if (!opt.oracle_only) {
        if (auto v = find_assumption_1_violation(plan)) {
            const auto& [ir, jr] = plan.boundary[v->first];
            const auto& [is, js] = plan.boundary[v->second];
            throw AssumptionViolation("boundary edges " + edge_name(ir, jr) + " and " + edge_name(is, js) +
                                      " have adjacent boundary nodes");
        }
        std::map<NodeId, std::size_t> uses;
        for (const auto& [p, q] : plan.boundary) {
            for (NodeId n : {p, q}) {
                if (++uses[n] > 1) {
                    throw AssumptionViolation("node " + std::to_string(n) +
                                              " carries more than one boundary edge; the weighting construction "
                                              "needs distinct boundary nodes");
                }
            }
        }
        if (!is_connected(g1) || !is_connected(g2)) throw DegenerateInput("both networks must be connected");
    }

    CertificateReport rep;
    rep.kind = PlugKind::network;
    rep.graph = compose(plan);
    bool ok = detail::collect_edge_margins(g1, par, opt, rep);
    ok = detail::collect_edge_margins(g2, par, opt, rep) && ok;
    rep.s_weights.assign(g1.edge_count() + g2.edge_count(), 1.0);

    bool all_gamma = true;
    for (const auto& [p, q] : plan.boundary) {
        BoundaryMargin b{p, q, std::nullopt, std::nullopt, 0.0, 0.0};
        try {
            if (g1.degree(p) == 0 && g2.degree(q) == 0) {
                throw DegenerateInput("boundary edge " + edge_name(p, q) +
                                      " joins two nodes without intra-network edges; gamma is undefined");
            }
            if (g1.degree(p) > 0) b.gamma_p = compute_gamma(p, g1, par);
            if (g2.degree(q) > 0) b.gamma_q = compute_gamma(q, g2, par);
        } catch (const DegenerateInput& e) {
            if (!opt.oracle_only) throw;
            rep.notes.emplace_back(e.what());
            all_gamma = false;
            rep.boundary.push_back(b);
            continue;
        }
        b.gamma_pq = std::min(b.gamma_p.value_or(std::numeric_limits<double>::infinity()),
                              b.gamma_q.value_or(std::numeric_limits<double>::infinity()));
        const double nu_p = par.nu_of(p);
        const double nu_q = par.nu_of(q);
        b.margin = b.gamma_pq * (1.0 / par.alpha_of(p, q) + nu_p + nu_q) -
                   static_cast<double>(g1.degree(p)) * std::abs(nu_p) -
                   static_cast<double>(g2.degree(q)) * std::abs(nu_q);
        if (!(b.margin > opt.strict_tol)) {
            ok = false;
            rep.failing.push_back(edge_name(p, q));
        }
        rep.s_weights.push_back(b.gamma_pq);
        rep.boundary.push_back(b);
    }
    if (!all_gamma) {
        ok = false;
        rep.s_weights.clear();
    }
    detail::finish_report(rep, par, opt, ok);
    return rep;
}

[[nodiscard]] inline CertificateReport certify_plug(const PlugPlan& plan, const NetworkParameters& par,
                                                    const CertificateOptions& opt = {}) {
    return plan.is_single_node() ? certify_single_node_plug(plan, par, opt) : certify_network_plug(plan, par, opt);
}

}  // namespace ppcons
