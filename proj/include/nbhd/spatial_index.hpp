#ifndef NBHD_SPATIAL_INDEX_HPP
#define NBHD_SPATIAL_INDEX_HPP

#include "nbhd/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace nbhd {

/**
 * Static balanced 2-d tree over cell centers.
 *
 * Queries are exact: results equal a linear scan, including ordering. Hits are
 * reported as (squared distance, index) and ordered by that pair, so equal
 * distances resolve to the smaller index.
 */
class SpatialIndex {
public:
    using Hit = std::pair<double, std::size_t>;

    /** `coords` must be N x 2 with finite entries, N >= 1. */
    explicit SpatialIndex(const Matrix& coords);

    std::size_t size() const { return xs_.size(); }
    double x(std::size_t i) const { return xs_[i]; }
    double y(std::size_t i) const { return ys_[i]; }

    /** All points with Euclidean distance <= radius from (qx, qy), ordered by (distance, index). */
    std::vector<Hit> within(double qx, double qy, double radius) const;

    /**
     * The k nearest points to point `i`, ordered by (distance, index). When
     * `exclude_self` is set, index `i` itself is skipped (duplicates of its
     * location are still eligible).
     */
    std::vector<Hit> nearest(std::size_t i, std::size_t k, bool exclude_self) const;

private:
    struct Node {
        std::uint32_t begin;
        std::uint32_t end;
        std::int32_t left = -1;
        std::int32_t right = -1;
        double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end);
    static double box_distance2(const Node& node, double qx, double qy);

    std::vector<double> xs_;
    std::vector<double> ys_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace nbhd

#endif
