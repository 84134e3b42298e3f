#include "nbhd/report_json.hpp"

namespace nbhd {

using nlohmann::ordered_json;

ordered_json to_json(const Histogram& h) {
    return ordered_json{{"edges", h.edges}, {"counts", h.counts}};
}

ordered_json to_json(const Composition& c) {
    return ordered_json{{"clusters", c.clusters},
                        {"cell_types", c.cell_types},
                        {"counts", c.counts},
                        {"fractions", c.fractions},
                        {"entropy_bits", cluster_entropies(c)}};
}

ordered_json to_json(const std::vector<DifferentialFeature>& rows) {
    auto out = ordered_json::array();
    for (const auto& row : rows) {
        out.push_back({{"feature", row.name}, {"spread", row.spread}, {"medians", row.medians}});
    }
    return out;
}

ordered_json to_json(const std::vector<BlockSpan>& spans) {
    auto out = ordered_json::array();
    for (const auto& s : spans) {
        out.push_back({{"name", s.name}, {"begin", s.begin}, {"end", s.end}, {"scaling", to_string(s.mode)}});
    }
    return out;
}

ordered_json to_json(const PcaModel& model, const std::vector<std::string>& feature_names) {
    std::vector<std::vector<double>> loadings(model.loadings.rows());
    for (std::size_t r = 0; r < model.loadings.rows(); ++r) {
        loadings[r].assign(model.loadings.row(r).begin(), model.loadings.row(r).end());
    }
    return ordered_json{{"components", model.components()},
                        {"standardized", model.standardized},
                        {"target_missed", model.target_missed},
                        {"features", feature_names},
                        {"means", model.means},
                        {"scales", model.scales},
                        {"explained_variance", model.explained_variance},
                        {"explained_fraction", model.explained_fraction()},
                        {"all_variances", model.all_variances},
                        {"loadings", loadings}};
}

ordered_json summary_json(const ClusterSummary& summary, std::size_t top_n) {
    ordered_json out;
    out["clusters"] = summary.clusters;
    auto counts = ordered_json::object();
    for (const auto& [c, n] : summary.cell_counts) {
        counts[std::to_string(c)] = n;
    }
    out["cell_counts"] = counts;
    out["composition"] = to_json(summary.composition);
    out["features"] = summary.feature_names;
    auto medians = ordered_json::object();
    for (const auto& [c, stats] : summary.stats) {
        std::vector<double> row;
        for (const auto& s : stats) {
            row.push_back(s.median);
        }
        medians[std::to_string(c)] = row;
    }
    out["medians"] = medians;
    out["top_differential"] = summary.clusters.size() >= 2
                                  ? to_json(top_differential_features(summary, summary.clusters, top_n))
                                  : ordered_json::array();
    return out;
}

}  // namespace nbhd
