#ifndef NBHD_EMBEDDING_HPP
#define NBHD_EMBEDDING_HPP

#include "nbhd/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nbhd {

struct EmbeddingParams {
    std::string reducer = "umap";  // "umap" or "pca"
    std::size_t n_neighbors = 15;
    double min_dist = 0.1;
    double spread = 1.0;
    std::size_t epochs = 500;
    double negative_sample_rate = 5.0;
    std::uint64_t seed = 42;

    bool operator==(const EmbeddingParams&) const = default;
};

struct EmbeddingResult {
    Matrix coords;  // N x 2, columns x and y
    EmbeddingParams params;
    std::string reducer_id;
};

/** Exact k nearest rows (Euclidean), self first. Ties break toward the smaller row index. */
struct KnnGraph {
    std::size_t k = 0;
    std::vector<std::size_t> indices;  // N x k, row-major
    std::vector<double> distances;     // N x k, row-major
};

KnnGraph exact_knn(const Matrix& x, std::size_t k);

/** Symmetric fuzzy neighbor graph as a coordinate list with both (i, j) and (j, i) present. */
struct FuzzyGraph {
    std::size_t n = 0;
    std::vector<std::size_t> heads;
    std::vector<std::size_t> tails;
    std::vector<double> weights;
};

/**
 * Per-point bandwidths: rho is the distance to the nearest non-identical
 * neighbor and sigma solves sum_j exp(-(d_j - rho) / sigma) = log2(k).
 */
void smooth_knn_distances(const KnnGraph& knn, std::vector<double>& sigmas, std::vector<double>& rhos);

/** Directed memberships exp(-(d - rho) / sigma), then fuzzy union A + A^T - A o A^T. */
FuzzyGraph fuzzy_simplicial_set(const KnnGraph& knn);

/** Fits 1 / (1 + a d^(2b)) to the offset-exponential target curve by least squares. */
std::pair<double, double> fit_ab(double spread, double min_dist);

/**
 * Two-dimensional embedding of the rows of `x`.
 *
 * The "umap" reducer builds an exact kNN graph, fuzzy affinities, a spectral
 * initialization and runs stochastic gradient layout. Edge updates are applied
 * sequentially in a fixed order from one seeded generator, so the output is
 * bit-reproducible. The "pca" reducer returns the first two principal
 * component scores.
 */
EmbeddingResult embed(const Matrix& x, const EmbeddingParams& params = {});

}  // namespace nbhd

#endif
