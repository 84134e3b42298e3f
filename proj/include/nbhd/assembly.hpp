#ifndef NBHD_ASSEMBLY_HPP
#define NBHD_ASSEMBLY_HPP

#include "nbhd/feature_block.hpp"

#include <string>
#include <vector>

namespace nbhd {

enum class ScalingMode { None, ZScore };

ScalingMode parse_scaling_mode(const std::string& text);
std::string to_string(ScalingMode mode);

struct BlockSpan {
    std::string name;
    std::size_t begin = 0;  // first column in the assembled matrix
    std::size_t end = 0;    // one past the last column
    ScalingMode mode = ScalingMode::None;
};

struct ColumnScaling {
    double mean = 0.0;
    double sd = 1.0;
    bool zero_variance = false;
};

/** Concatenated, per-block rescaled featurization fed to the embedding. */
struct NeighborhoodMatrix {
    Matrix values;
    std::vector<BlockSpan> spans;
    std::vector<ColumnScaling> scaling;  // one per column; identity for unscaled blocks
};

/**
 * Concatenates `blocks` in order. Columns of z-score blocks are centered and
 * divided by their sample standard deviation (n - 1 denominator); a column
 * with zero variance becomes all zeros and is flagged, never dropped.
 */
NeighborhoodMatrix assemble(const std::vector<FeatureBlock>& blocks, const std::vector<ScalingMode>& modes);

/** In-place z-scoring of each column of `m`, returning the fitted scaling. */
std::vector<ColumnScaling> zscore_columns(Matrix& m);

}  // namespace nbhd

#endif
