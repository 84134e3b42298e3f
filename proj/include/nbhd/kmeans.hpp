#ifndef NBHD_KMEANS_HPP
#define NBHD_KMEANS_HPP

#include "nbhd/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nbhd {

struct KMeansParams {
    std::size_t max_iterations = 300;
    std::size_t restarts = 10;  // independent k-means++ starts; the lowest inertia wins
};

struct ClusterModel {
    std::size_t k = 0;
    std::vector<int> assignments;  // labels in 1..k
    Matrix centroids;              // k x dims
    double inertia = 0.0;
    std::uint64_t seed = 0;
    std::size_t iterations = 0;
    std::vector<double> inertia_trace;  // winning run, one entry per Lloyd iteration
};

/**
 * k-means++ seeding and Lloyd iterations until the assignment is a fixpoint.
 * An emptied cluster takes the point farthest from its centroid in the
 * cluster with the largest within-cluster sum of squares.
 */
ClusterModel kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, const KMeansParams& params = {});

/** Within-cluster sum of squares for 1-based labels and the given centroids. */
double inertia_of(const Matrix& points, const std::vector<int>& assignments, const Matrix& centroids);

/**
 * Mean over cells of the fraction of their `knn` nearest spatial neighbors
 * (self excluded) that carry the same label.
 */
double spatial_contiguity(const std::vector<int>& assignments, const Matrix& coords, std::size_t knn = 10);

}  // namespace nbhd

#endif
