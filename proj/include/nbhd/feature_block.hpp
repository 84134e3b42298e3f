#ifndef NBHD_FEATURE_BLOCK_HPP
#define NBHD_FEATURE_BLOCK_HPP

#include "nbhd/matrix.hpp"

#include <string>

namespace nbhd {

/** Output of one neighborhood featurization: an N x p matrix plus where it came from. */
struct FeatureBlock {
    std::string name;
    Matrix values;
    std::string provenance;

    /** Throws unless all values are finite and column names are unique. */
    void validate() const;
};

}  // namespace nbhd

#endif
