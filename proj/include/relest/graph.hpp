#pragma once

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace relest {

/// Oriented measurement edge (from, to): the measurement on this edge
/// observes x[to] - x[from]. In the incidence matrix the row carries
/// +1 at `to` and -1 at `from`.
struct Edge {
    int from = 0;
    int to = 0;
};

inline bool operator==(const Edge& a, const Edge& b) {
    return a.from == b.from && a.to == b.to;
}

/// Undirected connected-or-not measurement topology with oriented edges.
/// Node ids are 0-based. Edge order is significant: edge e is row e of the
/// incidence matrix and entry e of every measurement vector.
class Graph {
  public:
    Graph(int n_nodes, std::vector<Edge> edges)
        : n_nodes_(n_nodes), edges_(std::move(edges)) {
        if (n_nodes_ <= 0)
            throw std::invalid_argument("Graph: n_nodes must be positive");
        std::set<std::pair<int, int>> seen;
        for (const Edge& e : edges_) {
            if (e.from < 0 || e.from >= n_nodes_ || e.to < 0 || e.to >= n_nodes_)
                throw std::invalid_argument("Graph: node index out of range");
            if (e.from == e.to)
                throw std::invalid_argument("Graph: self-loop not allowed");
            auto key = std::minmax(e.from, e.to);
            if (!seen.insert(key).second)
                throw std::invalid_argument("Graph: duplicate edge {" +
                                            std::to_string(e.from) + "," +
                                            std::to_string(e.to) + "}");
        }
    }

    int n_nodes() const { return n_nodes_; }
    int n_edges() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int e) const { return edges_.at(static_cast<size_t>(e)); }

  private:
    int n_nodes_;
    std::vector<Edge> edges_;
};

/// |E| x N incidence matrix: row e has +1 at edges[e].to and -1 at
/// edges[e].from, so A*ones == 0 exactly.
inline Eigen::MatrixXd incidence_matrix(const Graph& g) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.n_edges(), g.n_nodes());
    for (int e = 0; e < g.n_edges(); ++e) {
        a(e, g.edge(e).to) = 1.0;
        a(e, g.edge(e).from) = -1.0;
    }
    return a;
}

/// True iff the graph has a single connected component (plain BFS).
inline bool is_connected(const Graph& g) {
    const int n = g.n_nodes();
    if (n == 1) return true;
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    for (const Edge& e : g.edges()) {
        adj[static_cast<size_t>(e.from)].push_back(e.to);
        adj[static_cast<size_t>(e.to)].push_back(e.from);
    }
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[static_cast<size_t>(v)]) {
            if (!seen[static_cast<size_t>(w)]) {
                seen[static_cast<size_t>(w)] = 1;
                ++count;
                stack.push_back(w);
            }
        }
    }
    return count == n;
}

}  // namespace relest
