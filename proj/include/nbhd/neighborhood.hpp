#ifndef NBHD_NEIGHBORHOOD_HPP
#define NBHD_NEIGHBORHOOD_HPP

#include "nbhd/spatial_index.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace nbhd {

/** Radius plus nearest-neighbor cap defining m(i). The center counts against `k_max`. */
struct NeighborhoodRule {
    double radius = 60.0;
    std::size_t k_max = 40;

    static constexpr std::size_t unlimited = std::numeric_limits<std::size_t>::max();
};

struct Neighborhood {
    std::size_t center = 0;
    std::vector<std::size_t> members;  // ascending cell indices, includes `center`
    double radius = 0.0;
    std::size_t k_max = 0;

    std::size_t size() const { return members.size(); }
};

/**
 * The min(k_max, |ball|) nearest cells to `i` within `radius` (inclusive),
 * always including `i`. Ties at the cap break toward the smaller index.
 */
Neighborhood neighborhood_of(const SpatialIndex& index, std::size_t i, const NeighborhoodRule& rule);

/** `neighborhood_of` for every cell, in cell order. */
std::vector<Neighborhood> all_neighborhoods(const SpatialIndex& index, const NeighborhoodRule& rule);

}  // namespace nbhd

#endif
