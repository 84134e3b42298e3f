#ifndef NBHD_NETWORK_FEATURES_HPP
#define NBHD_NETWORK_FEATURES_HPP

#include "nbhd/feature_block.hpp"
#include "nbhd/graph.hpp"
#include "nbhd/neighborhood.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nbhd {

/** Geometric graph over one neighborhood. Node k corresponds to cell `cells[k]`. */
struct NeighborhoodGraph {
    std::vector<std::size_t> cells;
    Graph graph;
    std::size_t center_node = 0;
};

/** Links every pair of members whose centers are at most `edge_threshold` apart. */
NeighborhoodGraph build_graph(const Neighborhood& nb, const Matrix& coords, double edge_threshold);

/** Network statistics, numbered in registry order. */
enum class Statistic {
    Degree = 1,
    NodeCount,
    Betweenness,
    Closeness,
    Eigenvector,
    Eccentricity,
    SubgraphCentrality,
    Load,
    GilSchmidt,
    Information,
    Stress,
    AverageDistance,
    Barycenter,
    LatoraCloseness,
    ResidualCloseness,
    CommunicabilityBetweenness,
    CrossClique,
    Decay,
    DiffusionDegree,
    Radiality,
    GeodesicKPath,
    Laplacian,
    Leverage,
    Lin,
    Lobby,
    Markov,
    MaxNeighborhoodComponent,
    SemiLocal,
    TopologicalCoefficient,
};

constexpr int statistic_count = 29;

struct StatEntry {
    std::string name;
    Statistic id;
    bool graph_level = false;
};

struct NetworkParams {
    double decay = 0.5;     // base of decay centrality
    int k_path = 3;         // hop limit of geodesic k-path centrality
    bool mean_over_nodes = false;  // average node statistics over the graph instead of reading the center
};

class StatRegistry {
public:
    /** All 29 statistics in their canonical order. */
    static StatRegistry standard();

    /** Subset of the standard registry, by name, in the given order. */
    static StatRegistry select(const std::vector<std::string>& names);

    const std::vector<StatEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    std::vector<std::string> names() const;

private:
    std::vector<StatEntry> entries_;
};

/**
 * Evaluates registry statistics for nodes of one graph. All-pairs structure is
 * computed once on construction and shared across statistics.
 *
 * Disconnected graphs use finite conventions: path-based statistics only look
 * at the node's connected component, unreachable pairs contribute zero, and a
 * node with nothing reachable scores zero.
 */
class CentralityEvaluator {
public:
    explicit CentralityEvaluator(const Graph& graph, NetworkParams params = {});

    double evaluate(Statistic stat, std::size_t node) const;

    std::vector<double> evaluate(const StatRegistry& registry, std::size_t node) const;

private:
    struct Brandes {
        std::vector<double> betweenness;
        std::vector<double> stress;
        std::vector<double> load;
    };

    const Brandes& brandes() const;
    double eigenvector(std::size_t node) const;
    double subgraph(std::size_t node) const;
    double information(std::size_t node) const;
    double communicability_betweenness(std::size_t node) const;
    double cross_clique(std::size_t node) const;
    double radiality(std::size_t node) const;
    double markov(std::size_t node) const;
    double max_neighborhood_component(std::size_t node) const;
    double semi_local(std::size_t node) const;
    double topological_coefficient(std::size_t node) const;

    const Graph& graph_;
    NetworkParams params_;
    std::vector<std::vector<int>> dist_;
    std::vector<int> component_id_;
    mutable std::optional<Brandes> brandes_;
};

/** The registry statistics of `g`, read at its center node (or averaged, per `params`). */
std::vector<double> compute_network_features(const NeighborhoodGraph& g, const StatRegistry& registry,
                                             const NetworkParams& params = {});

/** Network block: one row per neighborhood, registry names as column headers. */
FeatureBlock network_matrix(const Matrix& coords, const std::vector<Neighborhood>& neighborhoods,
                            double edge_threshold, const StatRegistry& registry, const NetworkParams& params = {});

}  // namespace nbhd

#endif
