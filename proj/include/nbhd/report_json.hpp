#ifndef NBHD_REPORT_JSON_HPP
#define NBHD_REPORT_JSON_HPP

#include "nbhd/analytics.hpp"
#include "nbhd/assembly.hpp"
#include "nbhd/pca.hpp"

#include <json.hpp>

namespace nbhd {

nlohmann::ordered_json to_json(const Histogram& h);
nlohmann::ordered_json to_json(const Composition& c);
nlohmann::ordered_json to_json(const std::vector<DifferentialFeature>& rows);
nlohmann::ordered_json to_json(const std::vector<BlockSpan>& spans);
nlohmann::ordered_json to_json(const PcaModel& model, const std::vector<std::string>& feature_names);

/**
 * Cluster sizes, composition with entropies, per-cluster medians and the top
 * differential features over all clusters (empty when fewer than two).
 */
nlohmann::ordered_json summary_json(const ClusterSummary& summary, std::size_t top_n);

}  // namespace nbhd

#endif
