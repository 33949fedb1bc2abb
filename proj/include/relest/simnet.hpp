#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "relest/em.hpp"
#include "relest/graph.hpp"
#include "relest/objectives.hpp"
#include "relest/result.hpp"

namespace relest {

/// One x-value transmission between graph-adjacent nodes.
struct RoundMessage {
    int round = 0;
    int sender = 0;
    int receiver = 0;
    int edge = 0;
    double payload = 0.0;
};

/// Everything one node can see: its own state component plus, per
/// incident edge, the measurement, its orientation sign, the locally
/// recomputed weight/label, and the neighbor's last transmitted value.
struct NodeState {
    struct IncidentEdge {
        int edge = 0;
        int neighbor = 0;
        double sign = 1.0;  // +1 if this node is the edge head ("to")
        double b = 0.0;
        double w = 0.0;
        double pi = 0.0;
        double neighbor_x = 0.0;
    };
    int id = 0;
    double x = 0.0;
    std::vector<IncidentEdge> incident;
};

struct SimRun {
    EstimateResult result;
    std::vector<NodeState> nodes;
    bool logged = false;
    std::vector<RoundMessage> messages;

    const std::vector<RoundMessage>& message_log() const {
        if (!logged)
            throw std::logic_error("message_log: logging was disabled for this run");
        return messages;
    }
};

/// Synchronous node-level execution of distributed LS-EM. Each round every
/// node sends its current value to its neighbors (2|E| messages), locally
/// recomputes the incident labels and weights, and applies the gradient
/// step to its own component. Produces the same iterate sequence as the
/// matrix-form dist_ls_em; incident sums run in edge-index order so the
/// two agree bit for bit. The stopping rule is evaluated by this harness
/// from a global snapshot, not by the nodes.
inline SimRun run_rounds(const Graph& g, const Eigen::VectorXd& b,
                         DistEmConfig config, int rounds = -1,
                         bool log_messages = true,
                         const Eigen::VectorXd* x_true = nullptr) {
    const int n = g.n_nodes();
    const int m = g.n_edges();
    if (b.size() != m) throw std::invalid_argument("run_rounds: |b| != |E|");
    if (!(config.alpha > 0.0 && config.alpha < config.beta))
        throw std::invalid_argument("run_rounds: need 0 < alpha < beta");
    if (!(config.p > 0.0 && config.p < 0.5))
        throw std::invalid_argument("run_rounds: p must be in (0, 1/2)");
    const Eigen::MatrixXd a = incidence_matrix(g);
    const double bound = dist_em_tau_bound(a, config.alpha);
    if (config.tau < 0.0) config.tau = 0.9 * bound;
    if (!(config.tau > 0.0 && config.tau < bound))
        throw std::invalid_argument(
            "run_rounds: tau violates the convergence bound tau < alpha^2/||A||^2");

    SimRun run;
    run.logged = log_messages;
    run.nodes.resize(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) run.nodes[static_cast<size_t>(v)].id = v;
    for (int e = 0; e < m; ++e) {
        const Edge& ed = g.edge(e);
        run.nodes[static_cast<size_t>(ed.to)].incident.push_back(
            NodeState::IncidentEdge{e, ed.from, 1.0, b(e), 0.0, 0.0, 0.0});
        run.nodes[static_cast<size_t>(ed.from)].incident.push_back(
            NodeState::IncidentEdge{e, ed.to, -1.0, b(e), 0.0, 0.0, 0.0});
    }
    // incident lists already sorted by edge id (built in edge order)

    const int horizon = rounds > 0 ? rounds : config.max_iter;
    EstimateResult& res = run.result;
    res.converged = false;

    Eigen::VectorXd snapshot = Eigen::VectorXd::Zero(n);
    for (int round = 0; round < horizon; ++round) {
        // exchange: every node transmits its value across each incident edge
        for (auto& node : run.nodes) {
            for (const auto& inc : node.incident) {
                if (log_messages)
                    run.messages.push_back(RoundMessage{round, node.id,
                                                        inc.neighbor, inc.edge,
                                                        node.x});
                auto& nbr = run.nodes[static_cast<size_t>(inc.neighbor)];
                for (auto& back : nbr.incident)
                    if (back.edge == inc.edge) back.neighbor_x = node.x;
            }
        }
        // local label/weight refresh and gradient step, nodes in id order
        Eigen::VectorXd next(n);
        for (auto& node : run.nodes) {
            double grad = 0.0;
            for (auto& inc : node.incident) {
                const double diff = inc.sign > 0.0 ? node.x - inc.neighbor_x
                                                   : inc.neighbor_x - node.x;
                if (round > 0)
                    inc.pi = posterior(inc.b - diff, config.alpha, config.beta,
                                       config.p);
                inc.w = (1.0 - inc.pi) / (config.alpha * config.alpha) +
                        inc.pi / (config.beta * config.beta);
                const double term = inc.w * (diff - inc.b);
                grad += inc.sign * term;
            }
            next(node.id) = node.x - config.tau * grad;
        }
        for (auto& node : run.nodes) node.x = next(node.id);
        const double sc =
            (next - snapshot).norm() / std::max(snapshot.norm(), 1e-30);
        snapshot = std::move(next);
        res.iterations = round + 1;
        if (rounds < 0 && sc < config.tol) {
            res.converged = true;
            break;
        }
    }
    if (rounds > 0) res.converged = true;

    // assembly from the final snapshot
    res.x_hat = snapshot;
    Eigen::VectorXd pi(m);
    for (int e = 0; e < m; ++e) {
        const Edge& ed = g.edge(e);
        pi(e) = posterior(b(e) - (snapshot(ed.to) - snapshot(ed.from)),
                          config.alpha, config.beta, config.p);
    }
    const Eigen::VectorXd w_final =
        detail::em_weights(pi, config.alpha, config.beta);
    const Eigen::MatrixXd l_final = weighted_laplacian(a, w_final);
    const Eigen::VectorXd atwb = a.transpose() * (w_final.asDiagonal() * b);
    res.fixed_point.x_gradient = (l_final * res.x_hat - atwb).norm();
    res.fixed_point.x_resolve = (res.x_hat - pinv_laplacian(l_final) * atwb).norm() /
                                std::max(res.x_hat.norm(), 1e-30);
    res.pi = std::move(pi);
    if (x_true) {
        IterationRecord rec;
        rec.iter = res.iterations;
        rec.nqe = nqe(res.x_hat, *x_true);
        res.trace.push_back(rec);
    }
    return run;
}

}  // namespace relest
