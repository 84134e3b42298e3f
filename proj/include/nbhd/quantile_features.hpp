#ifndef NBHD_QUANTILE_FEATURES_HPP
#define NBHD_QUANTILE_FEATURES_HPP

#include "nbhd/feature_block.hpp"
#include "nbhd/neighborhood.hpp"

#include <span>
#include <string>
#include <vector>

namespace nbhd {

/** Evenly spaced inclusive grid of `count` probability levels from `min_level` to `max_level`. */
struct QuantileSpec {
    double min_level = 0.10;
    double max_level = 0.90;
    std::size_t count = 17;

    void validate() const;
    std::vector<double> levels() const;
    /** Column suffix for a level, e.g. `q0.25`. */
    static std::string label(double level);

    bool operator==(const QuantileSpec&) const = default;
};

/**
 * Quantiles by linear interpolation between order statistics:
 * h = (n - 1) q, result = v[floor h] + (h - floor h) (v[ceil h] - v[floor h]).
 * `values` need not be sorted.
 */
std::vector<double> quantiles_of(std::span<const double> values, const QuantileSpec& spec);

/**
 * Quantile block for all cells. Column layout is component-major: every level
 * of the first column of `reduced`, then the second, and so on. Columns are
 * named `<component>_q<level>`.
 */
FeatureBlock quantile_matrix(const Matrix& reduced, const std::vector<Neighborhood>& neighborhoods,
                             const QuantileSpec& spec);

FeatureBlock quantile_matrix(const Matrix& reduced, const SpatialIndex& index, const NeighborhoodRule& rule,
                             const QuantileSpec& spec);

}  // namespace nbhd

#endif
