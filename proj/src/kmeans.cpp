#include "nbhd/kmeans.hpp"

#include "nbhd/error.hpp"
#include "nbhd/random.hpp"
#include "nbhd/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nbhd {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        const double diff = a[c] - b[c];
        acc += diff * diff;
    }
    return acc;
}

Matrix plus_plus_init(const Matrix& points, std::size_t k, Rng& rng) {
    const auto n = points.rows();
    Matrix centers(k, points.cols());
    std::vector<double> closest(n, std::numeric_limits<double>::infinity());

    auto take = [&](std::size_t row, std::size_t slot) {
        std::copy(points.row(row).begin(), points.row(row).end(), centers.row(slot).begin());
        for (std::size_t i = 0; i < n; ++i) {
            closest[i] = std::min(closest[i], squared_distance(points.row(i), centers.row(slot)));
        }
    };

    take(static_cast<std::size_t>(rng.below(n)), 0);
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (double v : closest) {
            total += v;
        }
        std::size_t chosen = 0;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double running = 0.0;
            chosen = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                running += closest[i];
                if (running > target && closest[i] > 0.0) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = static_cast<std::size_t>(rng.below(n));
        }
        take(chosen, c);
    }
    return centers;
}

struct Run {
    std::vector<int> labels;  // 0-based during the run
    Matrix centers;
    double inertia = 0.0;
    std::size_t iterations = 0;
    std::vector<double> trace;
};

void recompute_centers(const Matrix& points, const std::vector<int>& labels, Matrix& centers) {
    const auto k = centers.rows();
    std::vector<std::size_t> counts(k, 0);
    std::fill(centers.values().begin(), centers.values().end(), 0.0);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        const auto c = static_cast<std::size_t>(labels[i]);
        ++counts[c];
        for (std::size_t d = 0; d < points.cols(); ++d) {
            centers(c, d) += points(i, d);
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] > 0) {
            for (std::size_t d = 0; d < points.cols(); ++d) {
                centers(c, d) /= static_cast<double>(counts[c]);
            }
        }
    }
}

// Moves the worst-fitting point of the costliest cluster into each empty cluster.
bool repair_empty(const Matrix& points, std::vector<int>& labels, Matrix& centers) {
    const auto k = centers.rows();
    bool repaired = false;
    for (std::size_t empty = 0; empty < k; ++empty) {
        std::vector<std::size_t> counts(k, 0);
        for (int l : labels) {
            ++counts[static_cast<std::size_t>(l)];
        }
        if (counts[empty] > 0) {
            continue;
        }
        std::vector<double> sse(k, 0.0);
        for (std::size_t i = 0; i < points.rows(); ++i) {
            const auto c = static_cast<std::size_t>(labels[i]);
            sse[c] += squared_distance(points.row(i), centers.row(c));
        }
        std::size_t donor = 0;
        for (std::size_t c = 1; c < k; ++c) {
            if (counts[c] > 1 && (counts[donor] < 2 || sse[c] > sse[donor])) {
                donor = c;
            }
        }
        if (counts[donor] < 2) {
            break;
        }
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < points.rows(); ++i) {
            if (static_cast<std::size_t>(labels[i]) == donor) {
                const double d = squared_distance(points.row(i), centers.row(donor));
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
        }
        labels[far] = static_cast<int>(empty);
        recompute_centers(points, labels, centers);
        repaired = true;
    }
    return repaired;
}

Run lloyd(const Matrix& points, std::size_t k, Rng& rng, std::size_t max_iterations) {
    const auto n = points.rows();
    Run run;
    run.centers = plus_plus_init(points, k, rng);
    run.labels.assign(n, -1);

    for (std::size_t it = 0; it < max_iterations; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double d = squared_distance(points.row(i), run.centers.row(c));
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(c);
                }
            }
            if (run.labels[i] != best) {
                run.labels[i] = best;
                changed = true;
            }
        }
        if (!changed) {
            break;
        }
        recompute_centers(points, run.labels, run.centers);
        repair_empty(points, run.labels, run.centers);
        ++run.iterations;

        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            inertia += squared_distance(points.row(i), run.centers.row(static_cast<std::size_t>(run.labels[i])));
        }
        run.trace.push_back(inertia);
    }
    recompute_centers(points, run.labels, run.centers);
    run.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        run.inertia += squared_distance(points.row(i), run.centers.row(static_cast<std::size_t>(run.labels[i])));
    }
    return run;
}

}  // namespace

ClusterModel kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, const KMeansParams& params) {
    const auto n = points.rows();
    if (k < 1 || k > n) {
        throw Error(ErrorKind::Validation, "k must satisfy 1 <= k <= N (k = " + std::to_string(k) +
                                               ", N = " + std::to_string(n) + ")");
    }
    if (points.cols() == 0) {
        throw Error(ErrorKind::Validation, "k-means needs at least one dimension");
    }

    Rng rng(seed);
    Run best;
    bool have = false;
    for (std::size_t r = 0; r < std::max<std::size_t>(params.restarts, 1); ++r) {
        Run run = lloyd(points, k, rng, params.max_iterations);
        if (!have || run.inertia < best.inertia) {
            best = std::move(run);
            have = true;
        }
    }

    ClusterModel model;
    model.k = k;
    model.seed = seed;
    model.inertia = best.inertia;
    model.iterations = best.iterations;
    model.inertia_trace = std::move(best.trace);
    model.centroids = std::move(best.centers);
    model.assignments.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        model.assignments[i] = best.labels[i] + 1;
    }
    return model;
}

double inertia_of(const Matrix& points, const std::vector<int>& assignments, const Matrix& centroids) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        total += squared_distance(points.row(i), centroids.row(static_cast<std::size_t>(assignments[i] - 1)));
    }
    return total;
}

double spatial_contiguity(const std::vector<int>& assignments, const Matrix& coords, std::size_t knn) {
    if (knn < 1) {
        throw Error(ErrorKind::Validation, "contiguity needs knn >= 1");
    }
    if (assignments.size() != coords.rows()) {
        throw Error(ErrorKind::Validation, "label count does not match coordinate rows");
    }
    const auto n = coords.rows();
    if (n < 2) {
        return 1.0;
    }
    const SpatialIndex index(coords);
    const auto k = std::min(knn, n - 1);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto hits = index.nearest(i, k, true);
        std::size_t same = 0;
        for (const auto& [d2, j] : hits) {
            same += assignments[j] == assignments[i] ? 1 : 0;
        }
        total += static_cast<double>(same) / static_cast<double>(hits.size());
    }
    return total / static_cast<double>(n);
}

}  // namespace nbhd
