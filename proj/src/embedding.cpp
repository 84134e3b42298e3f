#include "nbhd/embedding.hpp"

#include "nbhd/error.hpp"
#include "nbhd/pca.hpp"
#include "nbhd/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace nbhd {

KnnGraph exact_knn(const Matrix& x, std::size_t k) {
    const auto n = x.rows();
    const auto d = x.cols();
    if (k == 0 || k > n) {
        throw Error(ErrorKind::Validation, "kNN needs 1 <= k <= N");
    }
    KnnGraph g;
    g.k = k;
    g.indices.resize(n * k);
    g.distances.resize(n * k);

    std::vector<std::pair<double, std::size_t>> cand(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = x.row(i).data();
        for (std::size_t j = 0; j < n; ++j) {
            const double* xj = x.row(j).data();
            double acc = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = xi[c] - xj[c];
                acc += diff * diff;
            }
            cand[j] = {acc, j};
        }
        // Self goes first regardless of duplicates.
        cand[i].first = -1.0;
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
        for (std::size_t m = 0; m < k; ++m) {
            g.indices[i * k + m] = cand[m].second;
            g.distances[i * k + m] = m == 0 ? 0.0 : std::sqrt(cand[m].first);
        }
    }
    return g;
}

void smooth_knn_distances(const KnnGraph& knn, std::vector<double>& sigmas, std::vector<double>& rhos) {
    constexpr int iterations = 64;
    constexpr double tolerance = 1e-5;
    constexpr double min_scale = 1e-3;

    const auto k = knn.k;
    const auto n = knn.indices.size() / k;
    const double target = std::log2(static_cast<double>(k));
    sigmas.assign(n, 1.0);
    rhos.assign(n, 0.0);

    double global_mean = 0.0;
    for (double v : knn.distances) {
        global_mean += v;
    }
    global_mean /= static_cast<double>(knn.distances.size());

    for (std::size_t i = 0; i < n; ++i) {
        const double* dist = knn.distances.data() + i * k;
        double rho = 0.0;
        double row_mean = 0.0;
        for (std::size_t m = 0; m < k; ++m) {
            row_mean += dist[m];
            if (rho == 0.0 && dist[m] > 0.0) {
                rho = dist[m];
            }
        }
        row_mean /= static_cast<double>(k);

        double lo = 0.0;
        double hi = std::numeric_limits<double>::infinity();
        double mid = 1.0;
        for (int it = 0; it < iterations; ++it) {
            double psum = 0.0;
            for (std::size_t m = 1; m < k; ++m) {
                const double gap = dist[m] - rho;
                psum += gap > 0.0 ? std::exp(-gap / mid) : 1.0;
            }
            if (std::abs(psum - target) < tolerance) {
                break;
            }
            if (psum > target) {
                hi = mid;
                mid = (lo + hi) / 2.0;
            } else {
                lo = mid;
                mid = std::isinf(hi) ? mid * 2.0 : (lo + hi) / 2.0;
            }
        }

        if (rho > 0.0) {
            mid = std::max(mid, min_scale * row_mean);
        } else {
            mid = std::max(mid, min_scale * global_mean);
        }
        sigmas[i] = mid;
        rhos[i] = rho;
    }
}

FuzzyGraph fuzzy_simplicial_set(const KnnGraph& knn) {
    std::vector<double> sigmas;
    std::vector<double> rhos;
    smooth_knn_distances(knn, sigmas, rhos);

    const auto k = knn.k;
    const auto n = knn.indices.size() / k;
    // Directed memberships, keyed by (row, col) in sorted order for a deterministic layout.
    std::map<std::pair<std::size_t, std::size_t>, double> directed;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t m = 0; m < k; ++m) {
            const auto j = knn.indices[i * k + m];
            if (j == i) {
                continue;
            }
            const double gap = knn.distances[i * k + m] - rhos[i];
            const double w = gap <= 0.0 ? 1.0 : std::exp(-gap / sigmas[i]);
            directed[{i, j}] = w;
        }
    }

    std::map<std::pair<std::size_t, std::size_t>, double> sym;
    for (const auto& [key, w] : directed) {
        const auto it = directed.find({key.second, key.first});
        const double wt = it == directed.end() ? 0.0 : it->second;
        const double u = w + wt - w * wt;
        sym[key] = u;
        sym[{key.second, key.first}] = u;
    }

    FuzzyGraph g;
    g.n = n;
    for (const auto& [key, w] : sym) {
        if (w > 0.0) {
            g.heads.push_back(key.first);
            g.tails.push_back(key.second);
            g.weights.push_back(w);
        }
    }
    return g;
}

std::pair<double, double> fit_ab(double spread, double min_dist) {
    constexpr int samples = 300;
    std::vector<double> xs(samples);
    std::vector<double> ys(samples);
    for (int s = 0; s < samples; ++s) {
        xs[s] = 3.0 * spread * static_cast<double>(s) / (samples - 1);
        ys[s] = xs[s] < min_dist ? 1.0 : std::exp(-(xs[s] - min_dist) / spread);
    }

    auto residual_ss = [&](double a, double b) {
        double ss = 0.0;
        for (int s = 0; s < samples; ++s) {
            const double f = 1.0 / (1.0 + a * std::pow(xs[s], 2.0 * b));
            ss += (f - ys[s]) * (f - ys[s]);
        }
        return ss;
    };

    // Levenberg-Marquardt from (1, 1).
    double a = 1.0;
    double b = 1.0;
    double lambda = 1e-3;
    double current = residual_ss(a, b);
    for (int it = 0; it < 500; ++it) {
        Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
        Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
        for (int s = 0; s < samples; ++s) {
            const double x = xs[s];
            const double p = x > 0.0 ? std::pow(x, 2.0 * b) : 0.0;
            const double denom = 1.0 + a * p;
            const double f = 1.0 / denom;
            const double r = f - ys[s];
            const double da = -p / (denom * denom);
            const double db = x > 0.0 ? -a * p * 2.0 * std::log(x) / (denom * denom) : 0.0;
            jtj(0, 0) += da * da;
            jtj(0, 1) += da * db;
            jtj(1, 1) += db * db;
            jtr(0) += da * r;
            jtr(1) += db * r;
        }
        jtj(1, 0) = jtj(0, 1);

        bool improved = false;
        for (int tries = 0; tries < 50 && !improved; ++tries) {
            Eigen::Matrix2d damped = jtj;
            damped(0, 0) *= 1.0 + lambda;
            damped(1, 1) *= 1.0 + lambda;
            const Eigen::Vector2d step = damped.ldlt().solve(-jtr);
            const double na = a + step(0);
            const double nb = b + step(1);
            const double trial = (na > 0 && nb > 0) ? residual_ss(na, nb) : std::numeric_limits<double>::infinity();
            if (trial < current) {
                const double rel = std::abs(step(0)) / a + std::abs(step(1)) / b;
                a = na;
                b = nb;
                current = trial;
                lambda = std::max(lambda / 10.0, 1e-12);
                improved = true;
                if (rel < 1e-14) {
                    return {a, b};
                }
            } else {
                lambda *= 10.0;
            }
        }
        if (!improved) {
            break;
        }
    }
    return {a, b};
}

namespace {

// Two leading non-trivial eigenvectors of D^-1/2 W D^-1/2 by subspace iteration.
Matrix spectral_init(const FuzzyGraph& g, Rng& rng) {
    const auto n = g.n;
    std::vector<double> degree(n, 0.0);
    for (std::size_t e = 0; e < g.weights.size(); ++e) {
        degree[g.heads[e]] += g.weights[e];
    }
    std::vector<double> inv_sqrt(n);
    Eigen::VectorXd trivial(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        inv_sqrt[i] = degree[i] > 0 ? 1.0 / std::sqrt(degree[i]) : 0.0;
        trivial(static_cast<Eigen::Index>(i)) = std::sqrt(degree[i]);
    }
    if (trivial.norm() > 0) {
        trivial.normalize();
    }

    auto apply = [&](const Eigen::MatrixXd& in) {
        // (I + D^-1/2 W D^-1/2) / 2 has spectrum in [0, 1] with the wanted vectors on top.
        Eigen::MatrixXd out = 0.5 * in;
        for (std::size_t e = 0; e < g.weights.size(); ++e) {
            const auto h = static_cast<Eigen::Index>(g.heads[e]);
            const auto t = static_cast<Eigen::Index>(g.tails[e]);
            const double w = 0.5 * g.weights[e] * inv_sqrt[g.heads[e]] * inv_sqrt[g.tails[e]];
            out.row(h) += w * in.row(t);
        }
        return out;
    };
    auto orthonormalize = [&](Eigen::MatrixXd& q) {
        for (Eigen::Index c = 0; c < q.cols(); ++c) {
            q.col(c) -= trivial * trivial.dot(q.col(c));
            for (Eigen::Index p = 0; p < c; ++p) {
                q.col(c) -= q.col(p) * q.col(p).dot(q.col(c));
            }
            const double norm = q.col(c).norm();
            if (norm > 0) {
                q.col(c) /= norm;
            }
        }
    };

    Eigen::MatrixXd q(static_cast<Eigen::Index>(n), 2);
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        q(i, 0) = rng.normal();
        q(i, 1) = rng.normal();
    }
    orthonormalize(q);
    for (int it = 0; it < 3000; ++it) {
        Eigen::MatrixXd next = apply(q);
        orthonormalize(next);
        // Rayleigh-Ritz rotation so the two columns settle individually.
        const Eigen::Matrix2d small = next.transpose() * apply(next);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(small);
        Eigen::Matrix2d rot;
        rot.col(0) = solver.eigenvectors().col(1);
        rot.col(1) = solver.eigenvectors().col(0);
        next = next * rot;
        const double change = (next * (next.transpose() * q) - q).norm();
        q = next;
        if (change < 1e-9) {
            break;
        }
    }
    for (Eigen::Index c = 0; c < 2; ++c) {
        Eigen::Index arg = 0;
        q.col(c).cwiseAbs().maxCoeff(&arg);
        if (q(arg, c) < 0) {
            q.col(c) = -q.col(c);
        }
    }

    Matrix out(n, 2, std::vector<double>(n * 2, 0.0), {"x", "y"});
    for (std::size_t i = 0; i < n; ++i) {
        out(i, 0) = q(static_cast<Eigen::Index>(i), 0);
        out(i, 1) = q(static_cast<Eigen::Index>(i), 1);
    }
    return out;
}

double clip(double v) {
    return std::clamp(v, -4.0, 4.0);
}

EmbeddingResult embed_pca(const Matrix& x, const EmbeddingParams& params) {
    if (x.rows() < 2) {
        throw Error(ErrorKind::Validation, "PCA embedding needs at least 2 rows");
    }
    PcaOptions opts;
    opts.standardize = false;
    opts.fixed_components = std::min<std::size_t>(2, x.cols());
    const auto model = fit_pca(x, opts);
    const auto scores = pca_transform(model, x);

    EmbeddingResult out;
    out.coords = Matrix(x.rows(), 2, std::vector<double>(x.rows() * 2, 0.0), {"x", "y"});
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t c = 0; c < scores.cols(); ++c) {
            out.coords(i, c) = scores(i, c);
        }
    }
    out.params = params;
    out.reducer_id = "pca";
    return out;
}

}  // namespace

EmbeddingResult embed(const Matrix& x, const EmbeddingParams& params) {
    if (params.reducer == "pca") {
        return embed_pca(x, params);
    }
    if (params.reducer != "umap") {
        throw Error(ErrorKind::Validation, "unknown reducer '" + params.reducer + "' (expected umap or pca)");
    }
    const auto n = x.rows();
    if (params.n_neighbors < 2) {
        throw Error(ErrorKind::Validation, "n_neighbors must be at least 2");
    }
    if (n < params.n_neighbors + 1) {
        throw Error(ErrorKind::Validation, "embedding needs N >= n_neighbors + 1 (N = " + std::to_string(n) +
                                               ", n_neighbors = " + std::to_string(params.n_neighbors) + ")");
    }
    if (params.epochs == 0 || !(params.min_dist >= 0) || !(params.spread > 0)) {
        throw Error(ErrorKind::Validation, "invalid embedding parameters");
    }

    // No structure to lay out: every point goes to the origin.
    bool all_same = true;
    for (std::size_t i = 1; i < n && all_same; ++i) {
        all_same = std::equal(x.row(i).begin(), x.row(i).end(), x.row(0).begin());
    }
    if (all_same) {
        return {Matrix(n, 2, std::vector<double>(n * 2, 0.0), {"x", "y"}), params, "umap"};
    }

    Rng rng(params.seed);
    const auto knn = exact_knn(x, params.n_neighbors);
    const auto graph = fuzzy_simplicial_set(knn);
    const auto [a, b] = fit_ab(params.spread, params.min_dist);

    // Drop edges too weak to be sampled even once.
    const double max_w = graph.weights.empty() ? 0.0 : *std::max_element(graph.weights.begin(), graph.weights.end());
    const double n_epochs = static_cast<double>(params.epochs);
    std::vector<std::size_t> heads;
    std::vector<std::size_t> tails;
    std::vector<double> epochs_per_sample;
    for (std::size_t e = 0; e < graph.weights.size(); ++e) {
        if (graph.weights[e] < max_w / n_epochs) {
            continue;
        }
        heads.push_back(graph.heads[e]);
        tails.push_back(graph.tails[e]);
        epochs_per_sample.push_back(max_w / graph.weights[e]);
    }

    Matrix y = spectral_init(graph, rng);
    // Rescale each axis to [0, 10].
    for (std::size_t c = 0; c < 2; ++c) {
        double lo = INFINITY;
        double hi = -INFINITY;
        for (std::size_t i = 0; i < n; ++i) {
            lo = std::min(lo, y(i, c));
            hi = std::max(hi, y(i, c));
        }
        const double span = hi - lo;
        for (std::size_t i = 0; i < n; ++i) {
            y(i, c) = span > 0 ? 10.0 * (y(i, c) - lo) / span : 0.0;
        }
    }

    const std::size_t m = heads.size();
    std::vector<double> next_sample(epochs_per_sample);
    std::vector<double> epochs_per_negative(m);
    std::vector<double> next_negative(m);
    for (std::size_t e = 0; e < m; ++e) {
        epochs_per_negative[e] = epochs_per_sample[e] / params.negative_sample_rate;
        next_negative[e] = epochs_per_negative[e];
    }

    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        const double alpha = 1.0 - static_cast<double>(epoch) / n_epochs;
        const double now = static_cast<double>(epoch);
        for (std::size_t e = 0; e < m; ++e) {
            if (next_sample[e] > now) {
                continue;
            }
            const auto j = heads[e];
            const auto k = tails[e];
            double* yj = y.row(j).data();
            double* yk = y.row(k).data();

            double dist2 = (yj[0] - yk[0]) * (yj[0] - yk[0]) + (yj[1] - yk[1]) * (yj[1] - yk[1]);
            double coeff = 0.0;
            if (dist2 > 0.0) {
                coeff = -2.0 * a * b * std::pow(dist2, b - 1.0) / (1.0 + a * std::pow(dist2, b));
            }
            for (int c = 0; c < 2; ++c) {
                const double g = clip(coeff * (yj[c] - yk[c]));
                yj[c] += g * alpha;
                yk[c] -= g * alpha;
            }
            next_sample[e] += epochs_per_sample[e];

            const double due = std::floor((now - next_negative[e]) / epochs_per_negative[e]);
            const auto n_neg = due > 0.0 ? static_cast<std::size_t>(due) : std::size_t{0};
            for (std::size_t p = 0; p < n_neg; ++p) {
                const auto other = static_cast<std::size_t>(rng.below(n));
                if (other == j) {
                    continue;
                }
                const double* yo = y.row(other).data();
                dist2 = (yj[0] - yo[0]) * (yj[0] - yo[0]) + (yj[1] - yo[1]) * (yj[1] - yo[1]);
                if (dist2 > 0.0) {
                    coeff = 2.0 * b / ((0.001 + dist2) * (1.0 + a * std::pow(dist2, b)));
                    for (int c = 0; c < 2; ++c) {
                        yj[c] += clip(coeff * (yj[c] - yo[c])) * alpha;
                    }
                } else {
                    for (int c = 0; c < 2; ++c) {
                        yj[c] += 4.0 * alpha;
                    }
                }
            }
            next_negative[e] += static_cast<double>(n_neg) * epochs_per_negative[e];
        }
    }

    EmbeddingResult out;
    out.coords = std::move(y);
    out.params = params;
    out.reducer_id = "umap";
    return out;
}

}  // namespace nbhd
