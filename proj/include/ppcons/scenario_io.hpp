#pragma once

// Scenario files (JSON, version "1", unknown keys rejected) and trajectory
// CSV files.
//
// CSV layout, one row per sample:
//   t, y_<id>..., u_<id>..., w_<id>...
// with node columns in scenario declaration order and values printed with
// 17 significant digits.

#include "ppcons/coupling.hpp"
#include "ppcons/error.hpp"
#include "ppcons/graph.hpp"
#include "ppcons/lti.hpp"
#include "ppcons/scenario.hpp"
#include "ppcons/simulation.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace ppcons {

using json = nlohmann::json;

inline constexpr const char* scenario_version = "1";

namespace detail {

inline void require_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed,
                         std::initializer_list<const char*> required = {}) {
    if (!obj.is_object()) throw ValidationError(path + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (!ok.contains(key)) throw ValidationError(path + ": unknown key '" + key + "'");
    }
    for (const char* key : required) {
        if (!obj.contains(key)) throw ValidationError(path + ": missing required key '" + std::string(key) + "'");
    }
}

template <class T>
T get_as(const json& j, const std::string& path) {
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

inline double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ValidationError(path + ": expected a number");
    return j.get<double>();
}

inline std::vector<double> get_numbers(const json& j, const std::string& path) {
    if (!j.is_array()) throw ValidationError(path + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(get_number(j[k], path + "[" + std::to_string(k) + "]"));
    return out;
}

inline NodeId get_node_id(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ValidationError(path + ": expected an integer node id");
    return j.get<NodeId>();
}

inline std::pair<NodeId, NodeId> get_pair(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) throw ValidationError(path + ": expected a [i, j] pair");
    return {get_node_id(j[0], path + "[0]"), get_node_id(j[1], path + "[1]")};
}

inline std::vector<std::pair<NodeId, NodeId>> get_pairs(const json& j, const std::string& path) {
    if (!j.is_array()) throw ValidationError(path + ": expected an array of [i, j] pairs");
    std::vector<std::pair<NodeId, NodeId>> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(get_pair(j[k], path + "[" + std::to_string(k) + "]"));
    return out;
}

inline std::string noise_kind_name(NoiseKind k) { return k == NoiseKind::held ? "held" : "sqrt_dt"; }

}  // namespace detail

/// Builds and validates a scenario from its JSON form. Every coupling is
/// sampled and must stay inside its declared sector.
[[nodiscard]] inline Scenario scenario_from_json(const json& root) {
    using namespace detail;
    require_keys(root, "$", {"version", "nodes", "networks", "couplings", "plugs", "noise", "solver", "output"},
                 {"version", "nodes", "networks"});
    if (!root["version"].is_string() || root["version"].get<std::string>() != scenario_version) {
        throw ValidationError("$.version: expected \"" + std::string(scenario_version) + "\"");
    }

    Scenario sc;
    const json& nodes = root["nodes"];
    if (!nodes.is_array() || nodes.empty()) throw ValidationError("$.nodes: expected a non-empty array");
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const std::string path = "$.nodes[" + std::to_string(k) + "]";
        const json& n = nodes[k];
        require_keys(n, path, {"id", "dynamics", "nu", "delta", "y0", "x0"}, {"id"});
        NodeSpec spec;
        spec.id = get_node_id(n["id"], path + ".id");
        if (n.contains("dynamics")) {
            require_keys(n["dynamics"], path + ".dynamics", {"num", "den"}, {"num", "den"});
            TransferFunction tf{get_numbers(n["dynamics"]["num"], path + ".dynamics.num"),
                                get_numbers(n["dynamics"]["den"], path + ".dynamics.den")};
            try {
                (void)realize(tf);
            } catch (const Error& e) {
                throw ValidationError(path + ".dynamics: " + e.what());
            }
            spec.dynamics = std::move(tf);
        }
        if (n.contains("nu")) spec.nu = get_number(n["nu"], path + ".nu");
        if (n.contains("delta")) spec.delta = get_number(n["delta"], path + ".delta");
        if (n.contains("y0")) spec.y0 = get_number(n["y0"], path + ".y0");
        if (n.contains("x0")) spec.x0 = get_numbers(n["x0"], path + ".x0");
        sc.nodes.push_back(std::move(spec));
    }

    const json& nets = root["networks"];
    if (!nets.is_array()) throw ValidationError("$.networks: expected an array");
    for (std::size_t k = 0; k < nets.size(); ++k) {
        const std::string path = "$.networks[" + std::to_string(k) + "]";
        const json& n = nets[k];
        require_keys(n, path, {"name", "nodes", "edges"}, {"nodes", "edges"});
        NetworkSpec spec;
        spec.name = n.contains("name") ? get_as<std::string>(n["name"], path + ".name") : "G" + std::to_string(k + 1);
        std::vector<NodeId> ids;
        if (!n["nodes"].is_array()) throw ValidationError(path + ".nodes: expected an array");
        for (std::size_t i = 0; i < n["nodes"].size(); ++i) {
            ids.push_back(get_node_id(n["nodes"][i], path + ".nodes[" + std::to_string(i) + "]"));
        }
        try {
            spec.graph = Graph(std::move(ids), get_pairs(n["edges"], path + ".edges"));
        } catch (const ValidationError& e) {
            throw ValidationError(path + ": " + e.what());
        }
        sc.networks.push_back(std::move(spec));
    }

    if (root.contains("couplings")) {
        const json& cs = root["couplings"];
        if (!cs.is_array()) throw ValidationError("$.couplings: expected an array");
        for (std::size_t k = 0; k < cs.size(); ++k) {
            const std::string path = "$.couplings[" + std::to_string(k) + "]";
            const json& c = cs[k];
            require_keys(c, path, {"edge", "kind", "a", "x", "y", "alpha_lower", "alpha_upper"}, {"edge", "kind"});
            const auto [i, j] = get_pair(c["edge"], path + ".edge");
            SectorCoupling cp;
            try {
                const CouplingKind kind = coupling_kind_from_string(get_as<std::string>(c["kind"], path + ".kind"));
                if (kind == CouplingKind::tabulated) {
                    if (!c.contains("x") || !c.contains("y")) throw ValidationError("tabulated coupling needs x and y");
                    cp = make_tabulated_coupling(get_numbers(c["x"], path + ".x"), get_numbers(c["y"], path + ".y"));
                } else {
                    if (!c.contains("a")) throw ValidationError("missing gain 'a'");
                    cp = make_coupling(kind, get_number(c["a"], path + ".a"));
                }
            } catch (const ValidationError& e) {
                throw ValidationError(path + ": " + e.what());
            }
            if (c.contains("alpha_lower")) cp.alpha_lower = get_number(c["alpha_lower"], path + ".alpha_lower");
            if (c.contains("alpha_upper")) cp.alpha_upper = get_number(c["alpha_upper"], path + ".alpha_upper");
            const SectorCheck check = verify_sector(cp, 4000, 100.0);
            if (!check.within_declared || !check.odd_symmetry_ok || !check.zero_at_origin) {
                std::ostringstream msg;
                msg << path << ": coupling on edge " << edge_name(i, j) << " violates its declared sector [" << cp.alpha_lower
                    << ", " << cp.alpha_upper << "]: observed [" << check.alpha_lower_observed << ", "
                    << check.alpha_upper_observed << "]" << (check.odd_symmetry_ok ? "" : ", not odd");
                throw ValidationError(msg.str());
            }
            if (!sc.couplings.emplace(edge_key(i, j), cp).second) {
                throw ValidationError(path + ": duplicate coupling for edge " + edge_name(i, j));
            }
        }
    }

    if (root.contains("plugs")) {
        const json& ps = root["plugs"];
        if (!ps.is_array()) throw ValidationError("$.plugs: expected an array");
        for (std::size_t k = 0; k < ps.size(); ++k) {
            const std::string path = "$.plugs[" + std::to_string(k) + "]";
            require_keys(ps[k], path, {"time", "boundary"}, {"time", "boundary"});
            sc.plugs.push_back({get_number(ps[k]["time"], path + ".time"), get_pairs(ps[k]["boundary"], path + ".boundary")});
        }
    }

    if (root.contains("noise")) {
        const json& n = root["noise"];
        require_keys(n, "$.noise", {"scale", "seed", "kind"});
        if (n.contains("scale")) sc.noise.scale = get_number(n["scale"], "$.noise.scale");
        if (n.contains("seed")) {
            if (!n["seed"].is_number_integer() || n["seed"].get<std::int64_t>() < 0) {
                throw ValidationError("$.noise.seed: expected a non-negative integer");
            }
            sc.noise.seed = n["seed"].get<std::uint64_t>();
        }
        if (n.contains("kind")) {
            const auto kind = get_as<std::string>(n["kind"], "$.noise.kind");
            if (kind == "held") {
                sc.noise.kind = NoiseKind::held;
            } else if (kind == "sqrt_dt") {
                sc.noise.kind = NoiseKind::sqrt_dt_scaled;
            } else {
                throw ValidationError("$.noise.kind: expected \"held\" or \"sqrt_dt\"");
            }
        }
    }

    if (root.contains("solver")) {
        const json& s = root["solver"];
        require_keys(s, "$.solver", {"dt", "t_end", "sample_stride"});
        if (s.contains("dt")) sc.solver.dt = get_number(s["dt"], "$.solver.dt");
        if (s.contains("t_end")) sc.solver.t_end = get_number(s["t_end"], "$.solver.t_end");
        if (s.contains("sample_stride")) {
            if (!s["sample_stride"].is_number_integer() || s["sample_stride"].get<std::int64_t>() < 1) {
                throw ValidationError("$.solver.sample_stride: expected a positive integer");
            }
            sc.solver.sample_stride = s["sample_stride"].get<std::size_t>();
        }
    }

    if (root.contains("output")) {
        require_keys(root["output"], "$.output", {"dir"});
        if (root["output"].contains("dir")) sc.output_dir = get_as<std::string>(root["output"]["dir"], "$.output.dir");
    }

    validate(sc);
    return sc;
}

[[nodiscard]] inline Scenario parse_scenario_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("scenario is not valid JSON: ") + e.what());
    }
    return scenario_from_json(root);
}

[[nodiscard]] inline Scenario parse_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario_text(buf.str());
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

[[nodiscard]] inline json to_json(const Graph& g) {
    json edges = json::array();
    for (const Edge& e : g.edges()) edges.push_back({e.plus, e.minus});
    return {{"nodes", g.nodes()}, {"edges", edges}};
}

[[nodiscard]] inline json scenario_to_json(const Scenario& sc) {
    json nodes = json::array();
    for (const auto& n : sc.nodes) {
        json j = {{"id", n.id}};
        if (n.dynamics) j["dynamics"] = {{"num", n.dynamics->num}, {"den", n.dynamics->den}};
        if (n.nu) j["nu"] = *n.nu;
        if (n.delta != 0.0) j["delta"] = n.delta;
        j["y0"] = n.y0;
        if (n.x0) j["x0"] = *n.x0;
        nodes.push_back(std::move(j));
    }
    json nets = json::array();
    for (const auto& net : sc.networks) {
        json j = to_json(net.graph);
        j["name"] = net.name;
        nets.push_back(std::move(j));
    }
    json couplings = json::array();
    for (const auto& [key, c] : sc.couplings) {
        json j = {{"edge", {key.first, key.second}}, {"kind", to_string(c.kind)}};
        if (c.kind == CouplingKind::tabulated) {
            j["x"] = c.table_x;
            j["y"] = c.table_y;
        } else {
            j["a"] = c.gain;
        }
        j["alpha_lower"] = c.alpha_lower;
        j["alpha_upper"] = c.alpha_upper;
        couplings.push_back(std::move(j));
    }
    json plugs = json::array();
    for (const auto& p : sc.plugs) {
        json b = json::array();
        for (const auto& [i, j] : p.boundary) b.push_back({i, j});
        plugs.push_back({{"time", p.time}, {"boundary", b}});
    }
    json root = {
        {"version", scenario_version},
        {"nodes", nodes},
        {"networks", nets},
        {"couplings", couplings},
        {"plugs", plugs},
        {"noise", {{"scale", sc.noise.scale}, {"seed", sc.noise.seed}, {"kind", detail::noise_kind_name(sc.noise.kind)}}},
        {"solver", {{"dt", sc.solver.dt}, {"t_end", sc.solver.t_end}, {"sample_stride", sc.solver.sample_stride}}},
    };
    if (sc.output_dir) root["output"] = {{"dir", *sc.output_dir}};
    return root;
}

namespace detail {

inline void put_number(std::ostream& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

}  // namespace detail

inline void write_trajectory_csv(const TrajectoryRecord& traj, std::ostream& out) {
    out << "t";
    for (const char* prefix : {"y_", "u_", "w_"}) {
        for (NodeId id : traj.node_ids) out << ',' << prefix << id;
    }
    out << '\n';
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
        const auto row = static_cast<Eigen::Index>(r);
        detail::put_number(out, traj.times[r]);
        for (const Eigen::MatrixXd* m : {&traj.y, &traj.u, &traj.w}) {
            for (Eigen::Index c = 0; c < m->cols(); ++c) {
                out << ',';
                detail::put_number(out, (*m)(row, c));
            }
        }
        out << '\n';
    }
}

[[nodiscard]] inline TrajectoryRecord read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("trajectory CSV is empty");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header.empty() || header[0] != "t" || (header.size() - 1) % 3 != 0) {
        throw ValidationError("trajectory CSV header must be t, y_*, u_*, w_*");
    }
    const std::size_t n = (header.size() - 1) / 3;
    TrajectoryRecord traj;
    for (std::size_t c = 0; c < n; ++c) {
        const std::string& h = header[1 + c];
        if (h.rfind("y_", 0) != 0) throw ValidationError("trajectory CSV: unexpected column '" + h + "'");
        traj.node_ids.push_back(std::stoi(h.substr(2)));
        for (std::size_t block = 1; block < 3; ++block) {
            const std::string expect = std::string(block == 1 ? "u_" : "w_") + h.substr(2);
            if (header[1 + block * n + c] != expect) throw ValidationError("trajectory CSV: expected column '" + expect + "'");
        }
    }
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ValidationError("trajectory CSV line " + std::to_string(line_no) + ": bad number '" + cell + "'");
            }
        }
        if (vals.size() != header.size()) {
            throw ValidationError("trajectory CSV line " + std::to_string(line_no) + ": wrong number of columns");
        }
        rows.push_back(std::move(vals));
    }
    const auto nr = static_cast<Eigen::Index>(rows.size());
    const auto nc = static_cast<Eigen::Index>(n);
    traj.y.resize(nr, nc);
    traj.u.resize(nr, nc);
    traj.w.resize(nr, nc);
    for (Eigen::Index r = 0; r < nr; ++r) {
        const auto& v = rows[static_cast<std::size_t>(r)];
        traj.times.push_back(v[0]);
        for (Eigen::Index c = 0; c < nc; ++c) {
            traj.y(r, c) = v[static_cast<std::size_t>(1 + c)];
            traj.u(r, c) = v[static_cast<std::size_t>(1 + nc + c)];
            traj.w(r, c) = v[static_cast<std::size_t>(1 + 2 * nc + c)];
        }
    }
    return traj;
}

[[nodiscard]] inline json trajectory_metadata(const Scenario& sc, const TrajectoryRecord& traj) {
    json phases = json::array();
    for (std::size_t k = 0; k < traj.phase_graphs.size(); ++k) {
        json ph = to_json(traj.phase_graphs[k]);
        ph["start_time"] = k == 0 ? 0.0 : traj.event_times[k - 1];
        phases.push_back(std::move(ph));
    }
    return {
        {"seed", sc.noise.seed},
        {"noise_scale", sc.noise.scale},
        {"noise_kind", detail::noise_kind_name(sc.noise.kind)},
        {"dt", sc.solver.dt},
        {"t_end", sc.solver.t_end},
        {"sample_stride", sc.solver.sample_stride},
        {"samples", traj.times.size()},
        {"node_ids", traj.node_ids},
        {"event_times", traj.event_times},
        {"phases", phases},
        {"csv_columns", "t, y_<id>..., u_<id>..., w_<id>... (node order as node_ids)"},
    };
}

}  // namespace ppcons
