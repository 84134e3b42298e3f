#include "nbhd/graph.hpp"

#include <algorithm>
#include <deque>

namespace nbhd {

void Graph::add_edge(std::size_t u, std::size_t v) {
    if (u == v || adjacent(u, v)) {
        return;
    }
    auto& au = adjacency_[u];
    au.insert(std::lower_bound(au.begin(), au.end(), v), v);
    auto& av = adjacency_[v];
    av.insert(std::lower_bound(av.begin(), av.end(), u), u);
}

std::size_t Graph::edge_count() const {
    std::size_t total = 0;
    for (const auto& a : adjacency_) {
        total += a.size();
    }
    return total / 2;
}

bool Graph::adjacent(std::size_t u, std::size_t v) const {
    const auto& au = adjacency_[u];
    return std::binary_search(au.begin(), au.end(), v);
}

std::vector<std::pair<std::size_t, std::size_t>> Graph::edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t u = 0; u < adjacency_.size(); ++u) {
        for (auto v : adjacency_[u]) {
            if (u < v) {
                out.emplace_back(u, v);
            }
        }
    }
    return out;
}

std::vector<int> Graph::bfs_distances(std::size_t source) const {
    std::vector<int> dist(adjacency_.size(), -1);
    std::deque<std::size_t> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
        const auto v = queue.front();
        queue.pop_front();
        for (auto w : adjacency_[v]) {
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

std::vector<std::size_t> Graph::component_of(std::size_t source) const {
    const auto dist = bfs_distances(source);
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < dist.size(); ++v) {
        if (dist[v] >= 0) {
            out.push_back(v);
        }
    }
    return out;
}

Graph Graph::induced(const std::vector<std::size_t>& nodes) const {
    Graph g(nodes.size());
    for (std::size_t a = 0; a < nodes.size(); ++a) {
        for (std::size_t b = a + 1; b < nodes.size(); ++b) {
            if (adjacent(nodes[a], nodes[b])) {
                g.add_edge(a, b);
            }
        }
    }
    return g;
}

}  // namespace nbhd
