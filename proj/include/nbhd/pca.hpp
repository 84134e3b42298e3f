#ifndef NBHD_PCA_HPP
#define NBHD_PCA_HPP

#include "nbhd/matrix.hpp"

#include <vector>

namespace nbhd {

/**
 * Fitted principal component model.
 *
 * `loadings` is D x P with orthonormal columns, each column's largest-magnitude
 * entry positive. `explained_variance` holds the P retained eigenvalues of the
 * (optionally standardized) covariance, and `all_variances` the full spectrum.
 */
struct PcaModel {
    std::vector<double> means;
    std::vector<double> scales;  // 1 for every column when not standardized
    Matrix loadings;
    std::vector<double> explained_variance;
    std::vector<double> all_variances;
    double total_variance = 0.0;
    bool standardized = false;
    bool target_missed = false;  // all components kept and the target still not reached

    std::size_t components() const { return explained_variance.size(); }
    std::vector<double> explained_fraction() const;
};

struct PcaOptions {
    double variance_target = 0.9;
    bool standardize = true;
    /** Keep exactly this many components instead of applying the target (0 = use target). */
    std::size_t fixed_components = 0;
};

/**
 * Covariance eigendecomposition PCA. Keeps the smallest P whose cumulative
 * explained variance reaches `variance_target`.
 */
PcaModel fit_pca(const Matrix& expression, const PcaOptions& options = {});

/** Scores `(X - means) / scales * loadings`, columns `PC_1..PC_P`. */
Matrix pca_transform(const PcaModel& model, const Matrix& expression);

}  // namespace nbhd

#endif
