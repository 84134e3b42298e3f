#ifndef NBHD_CONFIG_HPP
#define NBHD_CONFIG_HPP

#include "nbhd/cell_table.hpp"
#include "nbhd/embedding.hpp"
#include "nbhd/quantile_features.hpp"
#include "nbhd/simulation.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nbhd {

/**
 * Every parameter of a pipeline run. Serialized as JSON; see README for the
 * key grammar. Defaults reproduce the TNBC analysis settings.
 */
struct PipelineConfig {
    struct Input {
        std::string path;
        ColumnSchema schema;
        bool operator==(const Input&) const = default;
    } input;

    struct Pca {
        double variance_target = 0.9;
        bool standardize = true;
        bool operator==(const Pca&) const = default;
    } pca;

    struct Neighborhoods {
        double radius = 60.0;
        std::optional<std::size_t> k_max = 40;  // nullopt: no cap
        bool operator==(const Neighborhoods&) const = default;
    } neighborhood;

    QuantileSpec quantiles;

    struct Network {
        double edge_threshold = 30.0;
        std::vector<std::string> statistics;  // empty: all 29
        double decay = 0.5;
        int k_path = 3;
        std::string aggregate = "center";  // "center" or "mean"
        bool operator==(const Network&) const = default;
    } network;

    struct Assembly {
        std::string quantile = "none";
        std::string network = "zscore";
        bool operator==(const Assembly&) const = default;
    } assembly;

    EmbeddingParams embedding;

    struct Clustering {
        std::size_t k = 5;
        std::uint64_t seed = 42;
        std::size_t restarts = 10;
        std::size_t max_iterations = 300;
        bool operator==(const Clustering&) const = default;
    } clustering;

    struct Summaries {
        std::size_t bins = 30;
        std::size_t top_n = 10;
        bool operator==(const Summaries&) const = default;
    } summaries;

    struct Simulation {
        SimulationParams params;
        std::size_t compare_k = 6;
        std::vector<std::uint64_t> compare_seeds{1, 2, 3, 4, 5};
        std::size_t contiguity_knn = 10;
    } simulation;

    std::string output = "nbhd_out";

    /** Throws `Error(Validation)` naming the first out-of-range key. */
    void validate() const;

    bool operator==(const PipelineConfig& other) const;
};

nlohmann::ordered_json to_json(const PipelineConfig& config);

/**
 * Parses a config document. Missing keys keep their defaults; unknown keys are
 * rejected. A run manifest is accepted too: its "config" member is used.
 */
PipelineConfig config_from_json(const nlohmann::json& doc);

PipelineConfig load_config(const std::string& path);
void save_config(const PipelineConfig& config, const std::string& path);

/** Sets one value by dotted key path (e.g. "neighborhood.radius") from its text form. */
void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value);

}  // namespace nbhd

#endif
