#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "relest/noisegen.hpp"
#include "relest/result.hpp"
#include "relest/simnet.hpp"

namespace relest {

using json = nlohmann::json;

/// {"n_nodes": N, "edges": [[from, to], ...]}; edge [v, u] measures
/// x[u] - x[v], node ids 0-based.
inline json graph_to_json(const Graph& g) {
    json edges = json::array();
    for (const Edge& e : g.edges()) edges.push_back({e.from, e.to});
    return json{{"n_nodes", g.n_nodes()}, {"edges", std::move(edges)}};
}

inline Graph graph_from_json(const json& j) {
    if (!j.contains("n_nodes") || !j.contains("edges"))
        throw std::invalid_argument("graph json: need n_nodes and edges");
    std::vector<Edge> edges;
    for (const auto& pair : j.at("edges")) {
        if (!pair.is_array() || pair.size() != 2)
            throw std::invalid_argument("graph json: each edge must be [from,to]");
        edges.push_back(Edge{pair.at(0).get<int>(), pair.at(1).get<int>()});
    }
    return Graph(j.at("n_nodes").get<int>(), std::move(edges));
}

inline json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

inline Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(arr.size());
    Eigen::Index i = 0;
    for (const auto& x : arr) v(i++) = x.get<double>();
    return v;
}

inline json measurement_set_to_json(const MeasurementSet& ms) {
    json j;
    j["graph"] = graph_to_json(ms.graph);
    j["b"] = vector_to_json(ms.b);
    if (ms.x_true) j["x_true"] = vector_to_json(*ms.x_true);
    if (ms.z_true) {
        json z = json::array();
        for (Eigen::Index e = 0; e < ms.z_true->size(); ++e)
            z.push_back((*ms.z_true)(e));
        j["z_true"] = std::move(z);
    }
    if (std::holds_alternative<MixtureNoise>(ms.noise)) {
        const auto& n = std::get<MixtureNoise>(ms.noise);
        j["noise"] = {{"model", "mixture"},
                      {"alpha", n.alpha},
                      {"beta", n.beta},
                      {"p", n.p}};
    } else if (std::holds_alternative<MismatchNoise>(ms.noise)) {
        const auto& n = std::get<MismatchNoise>(ms.noise);
        j["noise"] = {{"model", "mismatch"},
                      {"alpha", n.alpha},
                      {"p", n.p},
                      {"delta", n.delta}};
    }
    j["seed"] = ms.seed;
    return j;
}

inline MeasurementSet measurement_set_from_json(const json& j) {
    MeasurementSet ms{graph_from_json(j.at("graph")),
                      vector_from_json(j.at("b")),
                      std::nullopt,
                      std::nullopt,
                      std::monostate{},
                      j.value("seed", std::uint64_t{0})};
    if (ms.b.size() != ms.graph.n_edges())
        throw std::invalid_argument("measurement json: |b| != |E|");
    if (j.contains("x_true")) ms.x_true = vector_from_json(j.at("x_true"));
    if (j.contains("z_true")) {
        Eigen::VectorXi z(j.at("z_true").size());
        Eigen::Index e = 0;
        for (const auto& v : j.at("z_true")) z(e++) = v.get<int>();
        ms.z_true = std::move(z);
    }
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        const std::string model = n.at("model").get<std::string>();
        if (model == "mixture")
            ms.noise = MixtureNoise(n.at("alpha").get<double>(),
                                    n.at("beta").get<double>(),
                                    n.at("p").get<double>());
        else if (model == "mismatch")
            ms.noise = MismatchNoise(n.at("alpha").get<double>(),
                                     n.at("p").get<double>(),
                                     n.value("delta", 2.0));
        else
            throw std::invalid_argument("measurement json: unknown noise model '" +
                                        model + "'");
    }
    return ms;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& err) {
        throw std::runtime_error(path + ": " + err.what());
    }
    return j;
}

inline void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

/// %.17g formatting so CSV values replay exactly.
inline std::string csv_double(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_message_log(const std::string& path,
                              const std::vector<RoundMessage>& log) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const RoundMessage& msg : log) {
        json j{{"round", msg.round},
               {"sender", msg.sender},
               {"receiver", msg.receiver},
               {"edge", msg.edge},
               {"payload", msg.payload}};
        out << j.dump() << "\n";
    }
}

/// Iteration trace CSV with the fixed column order used repo-wide.
inline void write_trace_csv(const std::string& path,
                            const std::vector<IterationRecord>& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "iter,objective,step_norm,alpha_hat,beta_hat,epsilon,kappa,nqe\n";
    for (const IterationRecord& r : trace) {
        out << r.iter << ',' << csv_double(r.objective) << ','
            << csv_double(r.step_norm) << ',' << csv_double(r.alpha) << ','
            << csv_double(r.beta) << ',' << csv_double(r.epsilon) << ','
            << r.kappa << ',' << csv_double(r.nqe) << "\n";
    }
}

}  // namespace relest
