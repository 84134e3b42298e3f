#include "nbhd/neighborhood.hpp"

#include "nbhd/error.hpp"

#include <algorithm>

namespace nbhd {

Neighborhood neighborhood_of(const SpatialIndex& index, std::size_t i, const NeighborhoodRule& rule) {
    if (i >= index.size()) {
        throw Error(ErrorKind::Validation, "cell index " + std::to_string(i) + " out of range (N = " +
                                               std::to_string(index.size()) + ")");
    }
    if (!(rule.radius > 0.0)) {
        throw Error(ErrorKind::Validation, "neighborhood radius must be positive");
    }
    if (rule.k_max < 1) {
        throw Error(ErrorKind::Validation, "neighborhood k_max must be at least 1");
    }

    Neighborhood nb;
    nb.center = i;
    nb.radius = rule.radius;
    nb.k_max = rule.k_max;
    nb.members.push_back(i);

    const auto hits = index.within(index.x(i), index.y(i), rule.radius);
    for (const auto& [d2, j] : hits) {
        if (nb.members.size() >= rule.k_max) {
            break;
        }
        if (j != i) {
            nb.members.push_back(j);
        }
    }
    std::sort(nb.members.begin(), nb.members.end());
    return nb;
}

std::vector<Neighborhood> all_neighborhoods(const SpatialIndex& index, const NeighborhoodRule& rule) {
    std::vector<Neighborhood> out;
    out.reserve(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) {
        out.push_back(neighborhood_of(index, i, rule));
    }
    return out;
}

}  // namespace nbhd
