#ifndef NBHD_PIPELINE_HPP
#define NBHD_PIPELINE_HPP

#include "nbhd/assembly.hpp"
#include "nbhd/cell_table.hpp"
#include "nbhd/config.hpp"
#include "nbhd/kmeans.hpp"
#include "nbhd/pca.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace nbhd {

struct Featurization {
    PcaModel pca;
    Matrix reduced;  // N x P principal component scores
    std::vector<FeatureBlock> blocks;
    NeighborhoodMatrix matrix;
};

/** PCA, neighborhoods, quantile and network blocks, and block assembly. */
Featurization featurize(const CellTable& table, const PipelineConfig& config);

/** k-means on embedding coordinates with the configured k, seed and restarts. */
ClusterModel cluster_embedding(const Matrix& coords, const PipelineConfig& config);

/** Hex SHA-256 of a file's bytes. */
std::string sha256_file(const std::string& path);

enum class Stage { Run, Featurize, Embed, Cluster, Simulate, Compare };

std::string to_string(Stage stage);
Stage parse_stage(const std::string& text);

/**
 * Executes one stage into `config.output`, writing `manifest.json` there.
 *
 * Artifacts (by stage):
 *   featurize: cells.csv, reduced.csv, pca.json, quantile_block.csv,
 *              network_block.csv, neighborhood_matrix.csv, block_spans.json
 *   embed:     embedding.csv (reads neighborhood_matrix.csv)
 *   cluster:   clusters.csv, summaries.json (reads embedding.csv, cells.csv)
 *   run:       featurize + embed + cluster
 *   simulate:  simulated cells.csv and quantile block, then embed + cluster
 *   compare:   scorecard.txt, scorecard.csv
 *
 * On failure the manifest is written with status "FAILED" and the error, the
 * partial outputs are kept, and the error is rethrown. Returns the manifest.
 */
nlohmann::ordered_json run_stage(Stage stage, const PipelineConfig& config);

/** Reruns the stage and config recorded in a manifest file. */
nlohmann::ordered_json replay_manifest(const std::string& manifest_path);

}  // namespace nbhd

#endif
