#include "nbhd/analytics.hpp"

#include "nbhd/error.hpp"

#include <algorithm>
#include <cmath>

namespace nbhd {

double median_of(std::vector<double> values) {
    if (values.empty()) {
        throw Error(ErrorKind::Validation, "median of an empty set");
    }
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Histogram histogram_with_edges(std::span<const double> values, const std::vector<double>& edges) {
    if (edges.size() < 2) {
        throw Error(ErrorKind::Validation, "histogram needs at least one bin");
    }
    const auto bins = edges.size() - 1;
    Histogram h{edges, std::vector<std::size_t>(bins, 0)};
    const double lo = edges.front();
    const double width = edges.back() - lo;
    for (double v : values) {
        std::size_t b = 0;
        if (width > 0) {
            const double pos = (v - lo) / width * static_cast<double>(bins);
            b = pos <= 0 ? 0 : std::min(static_cast<std::size_t>(pos), bins - 1);
        }
        ++h.counts[b];
    }
    return h;
}

Histogram feature_histogram(std::span<const double> values, std::size_t bins) {
    if (bins < 1) {
        throw Error(ErrorKind::Validation, "histogram needs at least one bin");
    }
    if (values.empty()) {
        throw Error(ErrorKind::Validation, "histogram of an empty selection");
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    std::vector<double> edges(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) {
        edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
    }
    edges.back() = hi;
    return histogram_with_edges(values, edges);
}

Composition cluster_composition(const std::vector<int>& assignments, const std::vector<std::string>& cell_types) {
    if (assignments.size() != cell_types.size()) {
        throw Error(ErrorKind::Validation, "assignments and cell types differ in length");
    }
    std::map<int, std::map<std::string, std::size_t>> tally;
    std::set<std::string> types;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        ++tally[assignments[i]][cell_types[i]];
        types.insert(cell_types[i]);
    }

    Composition out;
    out.cell_types.assign(types.begin(), types.end());
    for (const auto& [cluster, counts] : tally) {
        std::size_t total = 0;
        for (const auto& [t, c] : counts) {
            total += c;
        }
        std::vector<double> row;
        for (const auto& t : out.cell_types) {
            auto it = counts.find(t);
            row.push_back(it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total));
        }
        out.clusters.push_back(cluster);
        out.fractions.push_back(std::move(row));
        out.counts.push_back(total);
    }
    return out;
}

std::vector<double> cluster_entropies(const Composition& composition) {
    std::vector<double> out;
    for (const auto& row : composition.fractions) {
        double h = 0.0;
        for (double p : row) {
            if (p > 0) {
                h -= p * std::log2(p);
            }
        }
        out.push_back(h);
    }
    return out;
}

ClusterSummary summarize_clusters(const Matrix& features, const std::vector<int>& assignments,
                                  const std::vector<std::string>& cell_types, const CellFilter& filter,
                                  std::size_t bins) {
    if (features.rows() != assignments.size() || assignments.size() != cell_types.size()) {
        throw Error(ErrorKind::Validation, "summary inputs differ in length");
    }
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (filter.clusters && !filter.clusters->contains(assignments[i])) {
            continue;
        }
        if (filter.cell_types && !filter.cell_types->contains(cell_types[i])) {
            continue;
        }
        kept.push_back(i);
    }
    if (kept.empty()) {
        throw Error(ErrorKind::Validation, "the cluster and cell-type filters select no cells");
    }

    ClusterSummary s;
    s.feature_names = features.col_names();
    std::vector<int> kept_labels;
    std::vector<std::string> kept_types;
    std::map<int, std::vector<std::size_t>> members;
    for (auto i : kept) {
        kept_labels.push_back(assignments[i]);
        kept_types.push_back(cell_types[i]);
        members[assignments[i]].push_back(i);
    }
    s.composition = cluster_composition(kept_labels, kept_types);
    for (const auto& [c, rows] : members) {
        s.clusters.push_back(c);
        s.cell_counts[c] = rows.size();
    }

    for (std::size_t f = 0; f < features.cols(); ++f) {
        std::vector<double> all;
        all.reserve(kept.size());
        for (auto i : kept) {
            all.push_back(features(i, f));
        }
        const auto shared = feature_histogram(all, bins).edges;
        for (const auto& [c, rows] : members) {
            std::vector<double> vals;
            vals.reserve(rows.size());
            double sum = 0.0;
            for (auto i : rows) {
                vals.push_back(features(i, f));
                sum += features(i, f);
            }
            FeatureStats fs;
            fs.mean = sum / static_cast<double>(vals.size());
            fs.histogram = histogram_with_edges(vals, shared);
            fs.median = median_of(std::move(vals));
            s.stats[c].push_back(std::move(fs));
        }
    }
    return s;
}

std::vector<DifferentialFeature> top_differential_features(const ClusterSummary& summary,
                                                           const std::vector<int>& clusters, std::size_t n) {
    std::set<int> unique(clusters.begin(), clusters.end());
    if (unique.size() < 2) {
        throw Error(ErrorKind::Validation, "differential features need at least two selected clusters");
    }
    if (n < 1) {
        throw Error(ErrorKind::Validation, "requested feature count must be at least 1");
    }
    for (int c : unique) {
        if (!summary.stats.contains(c)) {
            throw Error(ErrorKind::Validation, "cluster " + std::to_string(c) + " has no cells in the selection");
        }
    }

    std::vector<DifferentialFeature> rows;
    for (std::size_t f = 0; f < summary.feature_names.size(); ++f) {
        DifferentialFeature row;
        row.name = summary.feature_names[f];
        for (int c : unique) {
            row.medians.push_back(summary.stats.at(c)[f].median);
        }
        const auto [lo, hi] = std::minmax_element(row.medians.begin(), row.medians.end());
        row.spread = *hi - *lo;
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const DifferentialFeature& a, const DifferentialFeature& b) {
        if (a.spread != b.spread) {
            return a.spread > b.spread;
        }
        return a.name < b.name;
    });
    rows.resize(std::min(n, rows.size()));
    return rows;
}

}  // namespace nbhd
