#pragma once

// Subcommand implementations behind the `ppcons` executable.
//
// Exit codes: 0 success / certified, 2 a condition failed (not certified,
// divergence, consensus fit failed), 3 rejected input (schema, degenerate
// certificate, boundary assumption), 1 anything else.

#include "ppcons/certificates.hpp"
#include "ppcons/error.hpp"
#include "ppcons/example.hpp"
#include "ppcons/metrics.hpp"
#include "ppcons/passivity.hpp"
#include "ppcons/report.hpp"
#include "ppcons/scenario.hpp"
#include "ppcons/scenario_io.hpp"
#include "ppcons/simulation.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace ppcons::cli {

enum ExitCode : int { ok = 0, internal_error = 1, condition_failed = 2, rejected_input = 3 };

inline constexpr const char* output_dir_env = "PPCONS_OUTPUT_DIR";

/// Maps library exceptions onto the exit-code contract.
inline int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const AssumptionViolation& e) {
        err << "error: boundary assumption violated: " << e.what() << "\n";
        return rejected_input;
    } catch (const DegenerateInput& e) {
        err << "error: degenerate input: " << e.what() << "\n";
        return rejected_input;
    } catch (const ValidationError& e) {
        err << "error: invalid input: " << e.what() << "\n";
        return rejected_input;
    } catch (const UnsupportedSystem& e) {
        err << "error: unsupported system: " << e.what() << "\n";
        return rejected_input;
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << "\n";
        return condition_failed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return internal_error;
    }
}

inline std::filesystem::path resolve_output_dir(const std::optional<std::string>& flag, const Scenario* sc) {
    if (flag) return *flag;
    if (sc && sc->output_dir) return *sc->output_dir;
    if (const char* env = std::getenv(output_dir_env); env && *env) return env;
    return ".";
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

struct CertifyArgs {
    std::string scenario;
    bool json = false;
    bool table = false;
    bool oracle_only = false;
    std::optional<std::string> out_file;
};

struct ScenarioCertificates {
    json document;
    std::vector<CertificateReport> reports;
    bool all_certified = true;
};

/// Certifies every plug event against the network active at its time, or
/// each initial network when the scenario has no plug events.
[[nodiscard]] inline ScenarioCertificates certify_scenario(const Scenario& sc, const CertificateOptions& opt) {
    ScenarioCertificates out;
    const NetworkParameters par = network_parameters(sc);

    json nodes = json::array();
    for (const auto& n : sc.nodes) {
        json j = {{"id", n.id}, {"nu_used", par.nu_of(n.id)}};
        j["nu_declared"] = n.nu ? json(*n.nu) : json(nullptr);
        if (n.dynamics) {
            const auto est = estimate_ifp_index(realize(*n.dynamics));
            j["nu_sweep"] = est.index.nu;
            j["omega_at_min"] = detail::finite_or_null(est.omega_at_min);
        }
        nodes.push_back(std::move(j));
    }

    if (sc.plugs.empty()) {
        for (const auto& net : sc.networks) out.reports.push_back(certify_network(net.graph, par, opt));
    } else {
        Graph active = initial_graph(sc);
        for (const auto& ev : sc.plugs) {
            const PlugPlan plan = plan_for_event(active, ev);
            out.reports.push_back(certify_plug(plan, par, opt));
            active = apply_plan(active, plan);
        }
    }
    json reports = json::array();
    for (const auto& r : out.reports) {
        reports.push_back(to_json(r));
        out.all_certified = out.all_certified && r.verdict == Verdict::certified;
    }
    out.document = {{"nodes", nodes}, {"certificates", reports}, {"certified", out.all_certified}};
    return out;
}

inline int cmd_certify(const CertifyArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Scenario sc = parse_scenario(args.scenario);
        CertificateOptions opt;
        opt.oracle_only = args.oracle_only;
        const auto result = certify_scenario(sc, opt);
        if (args.json) out << result.document.dump(2) << "\n";
        if (args.table || !args.json) {
            out << "node  nu used    nu sweep\n";
            for (const auto& n : result.document["nodes"]) {
                char line[96];
                const std::string sweep = n.contains("nu_sweep") ? detail::fixed(n["nu_sweep"].get<double>()) : "-";
                std::snprintf(line, sizeof line, "%4d  %8s  %10s\n", n["id"].get<int>(),
                              detail::fixed(n["nu_used"].get<double>()).c_str(), sweep.c_str());
                out << line;
            }
            for (const auto& r : result.reports) out << "\n" << to_table(r);
        }
        if (args.out_file) write_file(*args.out_file, result.document.dump(2) + "\n");
        for (const auto& r : result.reports) {
            if (r.verdict != Verdict::certified && !r.failing.empty()) {
                err << "not certified: local condition fails on";
                for (const auto& e : r.failing) err << " " << e;
                err << "\n";
            }
        }
        return result.all_certified ? ok : condition_failed;
    });
}

struct SimulateArgs {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::optional<double> noise_scale;
    std::optional<std::string> out_dir;
    /// Number of consecutive seeds to run concurrently; 1 = single run.
    std::size_t sweep = 1;
};

/// Runs the scenario and returns (csv, metadata json) text.
[[nodiscard]] inline std::pair<std::string, std::string> simulate_to_text(const Scenario& sc) {
    const TrajectoryRecord traj = run(sc);
    std::ostringstream csv;
    write_trajectory_csv(traj, csv);
    return {csv.str(), trajectory_metadata(sc, traj).dump(2) + "\n"};
}

inline int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        Scenario sc = parse_scenario(args.scenario);
        if (args.seed) sc.noise.seed = *args.seed;
        if (args.noise_scale) {
            if (!(*args.noise_scale >= 0.0)) throw ValidationError("noise scale must be >= 0");
            sc.noise.scale = *args.noise_scale;
        }
        const auto dir = resolve_output_dir(args.out_dir, &sc);
        if (args.sweep <= 1) {
            const auto [csv, meta] = simulate_to_text(sc);
            write_file(dir / "trajectory.csv", csv);
            write_file(dir / "trajectory.json", meta);
            out << "wrote " << (dir / "trajectory.csv").string() << " and " << (dir / "trajectory.json").string() << "\n";
            return ok;
        }
        std::vector<std::future<std::pair<std::string, std::string>>> jobs;
        for (std::size_t k = 0; k < args.sweep; ++k) {
            Scenario run_sc = sc;
            run_sc.noise.seed = sc.noise.seed + k;
            jobs.push_back(std::async(std::launch::async, [run_sc] { return simulate_to_text(run_sc); }));
        }
        for (std::size_t k = 0; k < jobs.size(); ++k) {
            const auto [csv, meta] = jobs[k].get();
            const std::string stem = "trajectory_seed" + std::to_string(sc.noise.seed + k);
            write_file(dir / (stem + ".csv"), csv);
            write_file(dir / (stem + ".json"), meta);
            out << "wrote " << (dir / (stem + ".csv")).string() << "\n";
        }
        return ok;
    });
}

struct ReportArgs {
    std::string scenario;
    std::string trajectory;
    std::optional<std::string> out_dir;
    std::size_t horizons = 50;
};

/// Network in force after every plug event.
[[nodiscard]] inline Graph final_graph(const Scenario& sc) {
    Graph active = initial_graph(sc);
    for (const auto& ev : sc.plugs) active = apply_plan(active, plan_for_event(active, ev));
    return active;
}

inline int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Scenario sc = parse_scenario(args.scenario);
        std::ifstream in(args.trajectory);
        if (!in) throw ValidationError("cannot open trajectory file '" + args.trajectory + "'");
        const TrajectoryRecord traj = read_trajectory_csv(in);
        if (traj.times.size() < 2) throw ValidationError("trajectory needs at least two samples");
        const Graph g = final_graph(sc);

        const double t_end = traj.times.back();
        const double t_min = std::min(0.1, t_end / 2.0);
        const auto est = estimate_io_gain(traj, g, log_spaced_horizons(t_min, t_end, args.horizons));

        json doc = to_json(est);
        // Analytic gain 1/(kappa * alpha_lower) + 1 from the final network; informational only.
        const NetworkParameters par = network_parameters(sc);
        const double kappa = pd_oracle(make_certificate_problem(g, par));
        double alpha_lower = std::numeric_limits<double>::infinity();
        for (const Edge& e : g.edges()) alpha_lower = std::min(alpha_lower, sc.coupling(e.plus, e.minus).alpha_lower);
        doc["kappa"] = detail::finite_or_null(kappa);
        doc["analytic_rho_bound"] =
            kappa > 0.0 && std::isfinite(kappa) ? json(1.0 / (kappa * alpha_lower) + 1.0) : json(nullptr);

        const auto dir = resolve_output_dir(args.out_dir, &sc);
        write_file(dir / "consensus_estimate.json", doc.dump(2) + "\n");
        std::ostringstream dis;
        dis << "# t disagreement\n";
        const auto d = disagreement(traj, g);
        for (std::size_t k = 0; k < d.size(); ++k) {
            detail::put_number(dis, traj.times[k]);
            dis << ' ';
            detail::put_number(dis, d[k]);
            dis << '\n';
        }
        write_file(dir / "disagreement.dat", dis.str());

        out << to_table(est);
        if (doc["analytic_rho_bound"].is_number()) {
            out << "analytic rho bound (kappa = " << detail::fixed(kappa, 6)
                << "): " << detail::fixed(doc["analytic_rho_bound"].get<double>(), 6) << " (informational)\n";
        }
        out << "wrote " << (dir / "consensus_estimate.json").string() << " and " << (dir / "disagreement.dat").string()
            << "\n";
        return est.satisfied ? ok : condition_failed;
    });
}

inline int cmd_example(const std::optional<std::string>& out_file, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const std::string text = scenario_to_json(two_network_example()).dump(2) + "\n";
        if (out_file) {
            write_file(*out_file, text);
            out << "wrote " << *out_file << "\n";
        } else {
            out << text;
        }
        return ok;
    });
}

}  // namespace ppcons::cli
