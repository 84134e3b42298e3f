#include "nbhd/spatial_index.hpp"

#include "nbhd/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace nbhd {

namespace {
constexpr std::uint32_t leaf_size = 8;
}

SpatialIndex::SpatialIndex(const Matrix& coords) {
    if (coords.cols() != 2) {
        throw Error(ErrorKind::Validation, "spatial index needs N x 2 coordinates");
    }
    if (coords.rows() == 0) {
        throw Error(ErrorKind::Validation, "spatial index needs at least one point");
    }
    const auto n = coords.rows();
    xs_.resize(n);
    ys_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs_[i] = coords(i, 0);
        ys_[i] = coords(i, 1);
        if (!std::isfinite(xs_[i]) || !std::isfinite(ys_[i])) {
            throw Error(ErrorKind::Validation, "non-finite coordinate for point " + std::to_string(i));
        }
    }
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    nodes_.reserve(2 * n / leaf_size + 2);
    build(0, static_cast<std::uint32_t>(n));
}

std::int32_t SpatialIndex::build(std::uint32_t begin, std::uint32_t end) {
    Node node{begin, end};
    node.min_x = node.min_y = INFINITY;
    node.max_x = node.max_y = -INFINITY;
    for (auto k = begin; k < end; ++k) {
        const auto p = order_[k];
        node.min_x = std::min(node.min_x, xs_[p]);
        node.max_x = std::max(node.max_x, xs_[p]);
        node.min_y = std::min(node.min_y, ys_[p]);
        node.max_y = std::max(node.max_y, ys_[p]);
    }
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(node);

    if (end - begin > leaf_size) {
        // Split the wider extent at the median.
        const bool split_x = (node.max_x - node.min_x) >= (node.max_y - node.min_y);
        const auto mid = begin + (end - begin) / 2;
        const auto& coord = split_x ? xs_ : ys_;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](std::size_t a, std::size_t b) { return coord[a] < coord[b]; });
        const auto left = build(begin, mid);
        const auto right = build(mid, end);
        nodes_[static_cast<std::size_t>(id)].left = left;
        nodes_[static_cast<std::size_t>(id)].right = right;
    }
    return id;
}

double SpatialIndex::box_distance2(const Node& node, double qx, double qy) {
    const double dx = std::max({node.min_x - qx, 0.0, qx - node.max_x});
    const double dy = std::max({node.min_y - qy, 0.0, qy - node.max_y});
    return dx * dx + dy * dy;
}

std::vector<SpatialIndex::Hit> SpatialIndex::within(double qx, double qy, double radius) const {
    std::vector<Hit> hits;
    const double r2 = radius * radius;
    std::vector<std::int32_t> stack{0};
    while (!stack.empty()) {
        const auto& node = nodes_[static_cast<std::size_t>(stack.back())];
        stack.pop_back();
        if (box_distance2(node, qx, qy) > r2) {
            continue;
        }
        if (node.left < 0) {
            for (auto k = node.begin; k < node.end; ++k) {
                const auto p = order_[k];
                const double dx = xs_[p] - qx;
                const double dy = ys_[p] - qy;
                const double d2 = dx * dx + dy * dy;
                if (d2 <= r2) {
                    hits.emplace_back(d2, p);
                }
            }
        } else {
            stack.push_back(node.left);
            stack.push_back(node.right);
        }
    }
    std::sort(hits.begin(), hits.end());
    return hits;
}

std::vector<SpatialIndex::Hit> SpatialIndex::nearest(std::size_t i, std::size_t k, bool exclude_self) const {
    if (i >= size()) {
        throw Error(ErrorKind::Validation, "point index " + std::to_string(i) + " out of range");
    }
    const double qx = xs_[i];
    const double qy = ys_[i];
    // Max-heap on (d2, index): the top is the current worst kept hit.
    std::priority_queue<Hit> best;
    if (k == 0) {
        return {};
    }

    std::vector<std::int32_t> stack{0};
    while (!stack.empty()) {
        const auto& node = nodes_[static_cast<std::size_t>(stack.back())];
        stack.pop_back();
        // Strict comparison keeps boxes at exactly the worst distance, so index ties resolve correctly.
        if (best.size() == k && box_distance2(node, qx, qy) > best.top().first) {
            continue;
        }
        if (node.left < 0) {
            for (auto kk = node.begin; kk < node.end; ++kk) {
                const auto p = order_[kk];
                if (exclude_self && p == i) {
                    continue;
                }
                const double dx = xs_[p] - qx;
                const double dy = ys_[p] - qy;
                const Hit hit{dx * dx + dy * dy, p};
                if (best.size() < k) {
                    best.push(hit);
                } else if (hit < best.top()) {
                    best.pop();
                    best.push(hit);
                }
            }
        } else {
            // Visit the nearer child last so it is popped first.
            const auto& l = nodes_[static_cast<std::size_t>(node.left)];
            const auto& r = nodes_[static_cast<std::size_t>(node.right)];
            if (box_distance2(l, qx, qy) <= box_distance2(r, qx, qy)) {
                stack.push_back(node.right);
                stack.push_back(node.left);
            } else {
                stack.push_back(node.left);
                stack.push_back(node.right);
            }
        }
    }

    std::vector<Hit> out;
    out.reserve(best.size());
    while (!best.empty()) {
        out.push_back(best.top());
        best.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace nbhd
