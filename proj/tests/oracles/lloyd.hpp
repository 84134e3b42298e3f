// Reference k-means: uniform random initial centers, plain Lloyd, best of many starts.
#pragma once

#include "nbhd/matrix.hpp"

#include <limits>
#include <random>
#include <vector>

namespace oracle {

inline double lloyd_once(const nbhd::Matrix& x, std::size_t k, std::mt19937_64& gen) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    std::vector<std::size_t> pick(n);
    for (std::size_t i = 0; i < n; ++i) {
        pick[i] = i;
    }
    std::shuffle(pick.begin(), pick.end(), gen);
    std::vector<double> c(k * d);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t t = 0; t < d; ++t) {
            c[j * d + t] = x(pick[j], t);
        }
    }
    std::vector<std::size_t> label(n, 0);
    double inertia = 0.0;
    for (int it = 0; it < 500; ++it) {
        inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < k; ++j) {
                double s = 0.0;
                for (std::size_t t = 0; t < d; ++t) {
                    s += (x(i, t) - c[j * d + t]) * (x(i, t) - c[j * d + t]);
                }
                if (s < best) {
                    best = s;
                    label[i] = j;
                }
            }
            inertia += best;
        }
        std::vector<double> sum(k * d, 0.0);
        std::vector<std::size_t> count(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++count[label[i]];
            for (std::size_t t = 0; t < d; ++t) {
                sum[label[i] * d + t] += x(i, t);
            }
        }
        bool moved = false;
        for (std::size_t j = 0; j < k; ++j) {
            if (count[j] == 0) {
                continue;
            }
            for (std::size_t t = 0; t < d; ++t) {
                const double v = sum[j * d + t] / static_cast<double>(count[j]);
                moved = moved || v != c[j * d + t];
                c[j * d + t] = v;
            }
        }
        if (!moved) {
            break;
        }
    }
    return inertia;
}

inline double best_lloyd(const nbhd::Matrix& x, std::size_t k, int restarts, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        best = std::min(best, lloyd_once(x, k, gen));
    }
    return best;
}

}  // namespace oracle
