#ifndef NBHD_SIMULATION_HPP
#define NBHD_SIMULATION_HPP

#include "nbhd/cell_table.hpp"
#include "nbhd/embedding.hpp"
#include "nbhd/kmeans.hpp"
#include "nbhd/neighborhood.hpp"
#include "nbhd/quantile_features.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nbhd {

/**
 * Synthetic tissue: cell types drawn from `type_probs`; per-type mean profiles
 * ~ N(0, protein_mean_var I); cell profiles ~ N(type mean, protein_noise_var I);
 * per-type spatial centers ~ N(0, center_var I_2); cell positions
 * ~ N(type center, cluster_var I_2). Variances are covariance scales.
 */
struct SimulationParams {
    std::size_t n_cells = 2000;
    std::vector<double> type_probs{0.2, 0.3, 0.5};
    std::size_t n_proteins = 5;
    double protein_mean_var = 8.0;
    double protein_noise_var = 5.0;
    double center_var = 10.0;
    double cluster_var = 2.0;
    double radius = 0.2;
    std::size_t k_max = NeighborhoodRule::unlimited;
    QuantileSpec quantiles{0.0, 1.0, 21};
    std::uint64_t seed = 1;

    void validate() const;
};

/** Cell types are labelled "1".."T"; features `protein_1`..; ids `cell_1`... */
CellTable simulate(const SimulationParams& params);

/** Quantile block of the raw features over radius neighborhoods (N x P*Z). */
FeatureBlock simulation_neighborhood_matrix(const CellTable& table, const SimulationParams& params);

struct PipelineOutcome {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    EmbeddingResult embedding;
    ClusterModel clusters;
    double contiguity = 0.0;
    std::vector<double> entropies;  // bits, per cluster in ascending label order
    double max_entropy = 0.0;
};

/** Clusters an existing embedding and scores it against the table's cell types and positions. */
PipelineOutcome score_embedding(std::string name, std::size_t cols, const EmbeddingResult& embedding,
                                const CellTable& table, std::size_t k, std::uint64_t seed,
                                std::size_t contiguity_knn = 10);

/**
 * Fraction of cells whose cluster maps to their cell type under the best
 * one-to-one matching of cluster labels to types (unmatched clusters count as
 * wrong). Exhaustive over type subsets; at most 16 distinct types.
 */
double label_agreement(const std::vector<int>& assignments, const std::vector<std::string>& cell_types);

struct ComparisonParams {
    std::size_t k = 6;
    std::uint64_t seed = 42;
    EmbeddingParams embedding;
    std::size_t contiguity_knn = 10;
};

struct ComparisonReport {
    SimulationParams simulation;
    ComparisonParams comparison;
    PipelineOutcome cell_level;
    PipelineOutcome neighborhood;

    void write_text(std::ostream& out) const;
    void write_csv(std::ostream& out) const;
};

/**
 * Embeds the raw N x P matrix (cell level) and the N x P*Z neighborhood
 * quantile matrix, clusters both with the same k and seed, and reports spatial
 * contiguity and cluster cell-type entropy for each.
 */
ComparisonReport run_comparison(const CellTable& table, const SimulationParams& sim,
                                const ComparisonParams& params = {});

}  // namespace nbhd

#endif
