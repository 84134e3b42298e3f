// Naive quantile references: full sort per neighborhood, explicit formula.
#pragma once

#include "nbhd/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

inline std::vector<double> interpolated_quantiles(std::vector<double> v, const std::vector<double>& levels) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double q : levels) {
        const double h = (static_cast<double>(v.size()) - 1.0) * q;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const auto hi = static_cast<std::size_t>(std::ceil(h));
        out.push_back(v[lo] + (h - std::floor(h)) * (v[hi] - v[lo]));
    }
    return out;
}

// Row-major N x (P * Z) values, neighborhoods by double loop over all cells.
inline std::vector<double> quantile_matrix(const nbhd::Matrix& coords, const nbhd::Matrix& reduced, double radius,
                                           std::size_t k_max, const std::vector<double>& levels) {
    const std::size_t n = coords.rows();
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<double, std::size_t>> cand;
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = coords(i, 0) - coords(j, 0);
            const double dy = coords(i, 1) - coords(j, 1);
            const double d2 = dx * dx + dy * dy;
            if (j != i && d2 <= radius * radius) {
                cand.emplace_back(d2, j);
            }
        }
        std::sort(cand.begin(), cand.end());
        std::vector<std::size_t> members{i};
        for (const auto& c : cand) {
            if (members.size() >= k_max) {
                break;
            }
            members.push_back(c.second);
        }
        for (std::size_t p = 0; p < reduced.cols(); ++p) {
            std::vector<double> vals;
            for (auto j : members) {
                vals.push_back(reduced(j, p));
            }
            for (double q : interpolated_quantiles(vals, levels)) {
                out.push_back(q);
            }
        }
    }
    return out;
}

}  // namespace oracle
