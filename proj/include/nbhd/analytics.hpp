#ifndef NBHD_ANALYTICS_HPP
#define NBHD_ANALYTICS_HPP

#include "nbhd/matrix.hpp"

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace nbhd {

struct Histogram {
    std::vector<double> edges;  // bins + 1 edges
    std::vector<std::size_t> counts;
};

/** Equal-width bins over [min, max] of `values`; the last bin is closed on the right. */
Histogram feature_histogram(std::span<const double> values, std::size_t bins);

/** Counts `values` into the fixed `edges` (values outside are clamped to the end bins). */
Histogram histogram_with_edges(std::span<const double> values, const std::vector<double>& edges);

/** Cell-type fractions per cluster; each row of `fractions` sums to 1. */
struct Composition {
    std::vector<int> clusters;             // ascending
    std::vector<std::string> cell_types;   // ascending
    std::vector<std::vector<double>> fractions;  // [cluster][cell type]
    std::vector<std::size_t> counts;       // cells per cluster
};

Composition cluster_composition(const std::vector<int>& assignments, const std::vector<std::string>& cell_types);

/** Shannon entropy, in bits, of each cluster's cell-type mix (same order as `Composition::clusters`). */
std::vector<double> cluster_entropies(const Composition& composition);

/** Cells kept by the analysis filters. An absent set keeps everything. */
struct CellFilter {
    std::optional<std::set<int>> clusters;
    std::optional<std::set<std::string>> cell_types;
};

struct FeatureStats {
    double median = 0.0;
    double mean = 0.0;
    Histogram histogram;
};

/**
 * Per-cluster summaries over the filtered cells. Histograms of one feature
 * share bin edges across clusters (the feature's range over all filtered cells).
 */
struct ClusterSummary {
    std::vector<std::string> feature_names;
    std::vector<int> clusters;  // clusters with at least one filtered cell, ascending
    std::map<int, std::size_t> cell_counts;
    std::map<int, std::vector<FeatureStats>> stats;  // cluster -> per feature
    Composition composition;
};

ClusterSummary summarize_clusters(const Matrix& features, const std::vector<int>& assignments,
                                  const std::vector<std::string>& cell_types, const CellFilter& filter = {},
                                  std::size_t bins = 30);

struct DifferentialFeature {
    std::string name;
    double spread = 0.0;          // max - min of the per-cluster medians
    std::vector<double> medians;  // one per selected cluster, ascending cluster order
};

/**
 * Features ranked by the spread of their per-cluster medians over `clusters`,
 * descending, ties by name. Needs at least two clusters.
 */
std::vector<DifferentialFeature> top_differential_features(const ClusterSummary& summary,
                                                           const std::vector<int>& clusters, std::size_t n);

double median_of(std::vector<double> values);

}  // namespace nbhd

#endif
