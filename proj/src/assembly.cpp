#include "nbhd/assembly.hpp"

#include "nbhd/error.hpp"

#include <cmath>

namespace nbhd {

ScalingMode parse_scaling_mode(const std::string& text) {
    if (text == "none") {
        return ScalingMode::None;
    }
    if (text == "zscore") {
        return ScalingMode::ZScore;
    }
    throw Error(ErrorKind::Validation, "unknown scaling mode '" + text + "' (expected none or zscore)");
}

std::string to_string(ScalingMode mode) {
    return mode == ScalingMode::ZScore ? "zscore" : "none";
}

std::vector<ColumnScaling> zscore_columns(Matrix& m) {
    const auto n = m.rows();
    std::vector<ColumnScaling> out(m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            mean += m(r, c);
        }
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double dev = m(r, c) - mean;
            ss += dev * dev;
        }
        const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;

        auto& s = out[c];
        s.mean = mean;
        // Relative guard: a column that is constant up to rounding is treated as constant.
        if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
            s.sd = 0.0;
            s.zero_variance = true;
            for (std::size_t r = 0; r < n; ++r) {
                m(r, c) = 0.0;
            }
        } else {
            s.sd = sd;
            for (std::size_t r = 0; r < n; ++r) {
                m(r, c) = (m(r, c) - mean) / sd;
            }
        }
    }
    return out;
}

NeighborhoodMatrix assemble(const std::vector<FeatureBlock>& blocks, const std::vector<ScalingMode>& modes) {
    if (blocks.empty()) {
        throw Error(ErrorKind::Validation, "assemble needs at least one feature block");
    }
    if (modes.size() != blocks.size()) {
        throw Error(ErrorKind::Validation, "assemble needs one scaling mode per block");
    }

    std::vector<Matrix> scaled;
    NeighborhoodMatrix out;
    std::size_t offset = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b].values.rows() != blocks.front().values.rows()) {
            throw Error(ErrorKind::Validation, "block '" + blocks[b].name + "' has " +
                                                   std::to_string(blocks[b].values.rows()) + " rows, expected " +
                                                   std::to_string(blocks.front().values.rows()));
        }
        Matrix m = blocks[b].values;
        if (modes[b] == ScalingMode::ZScore) {
            auto s = zscore_columns(m);
            out.scaling.insert(out.scaling.end(), s.begin(), s.end());
        } else {
            out.scaling.insert(out.scaling.end(), m.cols(), ColumnScaling{});
        }
        out.spans.push_back({blocks[b].name, offset, offset + m.cols(), modes[b]});
        offset += m.cols();
        scaled.push_back(std::move(m));
    }
    out.values = hconcat(scaled);
    return out;
}

}  // namespace nbhd
