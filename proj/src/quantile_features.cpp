#include "nbhd/quantile_features.hpp"

#include "nbhd/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

namespace nbhd {

void FeatureBlock::validate() const {
    for (double v : values.values()) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::Validation, "feature block '" + name + "' contains a non-finite value");
        }
    }
    std::unordered_set<std::string> seen;
    for (const auto& c : values.col_names()) {
        if (!seen.insert(c).second) {
            throw Error(ErrorKind::Validation, "feature block '" + name + "' has duplicate column '" + c + "'");
        }
    }
}

void QuantileSpec::validate() const {
    if (count < 1) {
        throw Error(ErrorKind::Validation, "quantile count must be at least 1");
    }
    if (!(min_level >= 0.0 && min_level <= max_level && max_level <= 1.0)) {
        throw Error(ErrorKind::Validation, "quantile levels must satisfy 0 <= min <= max <= 1");
    }
    if (count == 1 && min_level != max_level) {
        throw Error(ErrorKind::Validation, "a single quantile level requires min == max");
    }
}

std::vector<double> QuantileSpec::levels() const {
    validate();
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = min_level;
        return out;
    }
    const double step = (max_level - min_level) / static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) {
        out[k] = min_level + step * static_cast<double>(k);
    }
    out.back() = max_level;
    return out;
}

std::string QuantileSpec::label(double level) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", level);
    std::string s(buf);
    // Trim trailing zeros but keep two decimals: q0.10, q0.125, q1.00.
    while (s.size() > 4 && s.back() == '0' && s[s.size() - 3] != '.') {
        s.pop_back();
    }
    return "q" + s;
}

namespace {

// `sorted` must be ascending and non-empty.
double interpolate(const std::vector<double>& sorted, double level) {
    const double h = static_cast<double>(sorted.size() - 1) * level;
    const double lo = std::floor(h);
    const auto lo_i = static_cast<std::size_t>(lo);
    const auto hi_i = static_cast<std::size_t>(std::ceil(h));
    return sorted[lo_i] + (h - lo) * (sorted[hi_i] - sorted[lo_i]);
}

}  // namespace

std::vector<double> quantiles_of(std::span<const double> values, const QuantileSpec& spec) {
    if (values.empty()) {
        throw Error(ErrorKind::Validation, "cannot take quantiles of an empty set");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto levels = spec.levels();
    std::vector<double> out;
    out.reserve(levels.size());
    for (double q : levels) {
        out.push_back(interpolate(sorted, q));
    }
    return out;
}

FeatureBlock quantile_matrix(const Matrix& reduced, const std::vector<Neighborhood>& neighborhoods,
                             const QuantileSpec& spec) {
    if (reduced.rows() != neighborhoods.size()) {
        throw Error(ErrorKind::Validation, "reduced matrix has " + std::to_string(reduced.rows()) + " rows but " +
                                               std::to_string(neighborhoods.size()) + " neighborhoods were given");
    }
    const auto levels = spec.levels();
    const auto n = reduced.rows();
    const auto p = reduced.cols();
    const auto z = levels.size();

    std::vector<std::string> names;
    names.reserve(p * z);
    for (const auto& component : reduced.col_names()) {
        for (double q : levels) {
            names.push_back(component + "_" + QuantileSpec::label(q));
        }
    }

    Matrix out(n, p * z);
    out.set_col_names(std::move(names));
    std::vector<double> local;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& members = neighborhoods[i].members;
        if (members.empty()) {
            throw Error(ErrorKind::Validation, "empty neighborhood for cell " + std::to_string(i));
        }
        auto row = out.row(i);
        for (std::size_t k = 0; k < p; ++k) {
            local.clear();
            for (auto m : members) {
                local.push_back(reduced(m, k));
            }
            std::sort(local.begin(), local.end());
            for (std::size_t l = 0; l < z; ++l) {
                row[k * z + l] = interpolate(local, levels[l]);
            }
        }
    }

    FeatureBlock block;
    block.name = "quantile";
    block.values = std::move(out);
    block.provenance = "quantile(levels=" + QuantileSpec::label(spec.min_level) + ".." +
                       QuantileSpec::label(spec.max_level) + ", count=" + std::to_string(spec.count) + ")";
    return block;
}

FeatureBlock quantile_matrix(const Matrix& reduced, const SpatialIndex& index, const NeighborhoodRule& rule,
                             const QuantileSpec& spec) {
    if (reduced.rows() != index.size()) {
        throw Error(ErrorKind::Validation, "reduced matrix rows do not match the spatial index");
    }
    return quantile_matrix(reduced, all_neighborhoods(index, rule), spec);
}

}  // namespace nbhd
