#ifndef NBHD_GRAPH_HPP
#define NBHD_GRAPH_HPP

#include <cstddef>
#include <utility>
#include <vector>

namespace nbhd {

/** Simple undirected graph on nodes 0..n-1 with sorted adjacency lists. */
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t n) : adjacency_(n) {}

    /** Ignores self-loops and repeated edges. */
    void add_edge(std::size_t u, std::size_t v);

    std::size_t node_count() const { return adjacency_.size(); }
    std::size_t edge_count() const;
    std::size_t degree(std::size_t v) const { return adjacency_[v].size(); }
    const std::vector<std::size_t>& neighbors(std::size_t v) const { return adjacency_[v]; }
    bool adjacent(std::size_t u, std::size_t v) const;

    std::vector<std::pair<std::size_t, std::size_t>> edges() const;

    /** Hop distances from `source`; unreachable nodes get -1. */
    std::vector<int> bfs_distances(std::size_t source) const;

    /** Nodes reachable from `source` (including it), ascending. */
    std::vector<std::size_t> component_of(std::size_t source) const;

    /** Subgraph induced by `nodes`; node k of the result is `nodes[k]`. */
    Graph induced(const std::vector<std::size_t>& nodes) const;

private:
    std::vector<std::vector<std::size_t>> adjacency_;
};

}  // namespace nbhd

#endif
