#include "nbhd/error.hpp"
#include "nbhd/neighborhood.hpp"
#include "nbhd/spatial_index.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace nbhd;

namespace {

std::vector<SpatialIndex::Hit> scan(const Matrix& c, double qx, double qy, double r) {
    std::vector<SpatialIndex::Hit> out;
    for (std::size_t i = 0; i < c.rows(); ++i) {
        const double d2 = (c(i, 0) - qx) * (c(i, 0) - qx) + (c(i, 1) - qy) * (c(i, 1) - qy);
        if (d2 <= r * r) {
            out.emplace_back(d2, i);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Filter by radius, sort by (distance, index), keep k_max, with the center first.
std::vector<std::size_t> brute_neighborhood(const Matrix& c, std::size_t i, double r, std::size_t k_max) {
    auto hits = scan(c, c(i, 0), c(i, 1), r);
    std::vector<std::size_t> order{i};
    for (const auto& [d2, j] : hits) {
        if (j != i) {
            order.push_back(j);
        }
    }
    order.resize(std::min(order.size(), k_max));
    std::sort(order.begin(), order.end());
    return order;
}

}  // namespace

TEST_CASE("radius queries equal a linear scan") {
    std::mt19937_64 gen(4);
    const auto coords = testing::uniform_coords(gen, 2000, 1000.0);
    const SpatialIndex index(coords);
    std::uniform_real_distribution<double> q(-50.0, 1050.0);
    std::uniform_real_distribution<double> rad(1.0, 120.0);
    for (int t = 0; t < 100; ++t) {
        const double x = q(gen);
        const double y = q(gen);
        const double r = rad(gen);
        CHECK(index.within(x, y, r) == scan(coords, x, y, r));
    }
}

TEST_CASE("kNN queries equal a sorted scan, including ties on a lattice") {
    Matrix grid(100, 2, std::vector<double>(200), {"x", "y"});
    for (std::size_t i = 0; i < 100; ++i) {
        grid(i, 0) = static_cast<double>(i % 10);
        grid(i, 1) = static_cast<double>(i / 10);
    }
    const SpatialIndex index(grid);
    for (std::size_t i = 0; i < 100; i += 3) {
        for (std::size_t k : {1u, 4u, 9u, 30u}) {
            auto all = scan(grid, grid(i, 0), grid(i, 1), 1e9);
            all.erase(std::remove_if(all.begin(), all.end(), [&](const auto& h) { return h.second == i; }),
                      all.end());
            all.resize(k);
            CHECK(index.nearest(i, k, true) == all);
        }
    }
}

TEST_CASE("three collinear points and the singleton index") {
    const Matrix line(3, 2, {0, 0, 1, 0, 2, 0}, {"x", "y"});
    const SpatialIndex index(line);
    CHECK(index.within(0, 0, 1.0).size() == 2);
    CHECK(index.within(1, 0, 1.0).size() == 3);
    CHECK(index.within(2, 0, 0.5).size() == 1);

    const Matrix one(1, 2, {5, 5}, {"x", "y"});
    const SpatialIndex single(one);
    const auto nb = neighborhood_of(single, 0, {10.0, 40});
    CHECK(nb.members == std::vector<std::size_t>{0});
}

TEST_CASE("non-finite coordinates are rejected; duplicates are legal") {
    const Matrix bad(2, 2, {0, 0, NAN, 1}, {"x", "y"});
    CHECK_THROWS_AS(SpatialIndex{bad}, Error);
    const Matrix dup(3, 2, {1, 1, 1, 1, 1, 1}, {"x", "y"});
    const SpatialIndex index(dup);
    CHECK(neighborhood_of(index, 1, {0.5, 40}).members == std::vector<std::size_t>{0, 1, 2});
    CHECK(neighborhood_of(index, 2, {0.5, 2}).members == std::vector<std::size_t>{0, 2});
}

TEST_CASE("isolated cells and k_max truncation") {
    const Matrix far(2, 2, {0, 0, 100, 100}, {"x", "y"});
    const SpatialIndex index(far);
    CHECK(neighborhood_of(index, 0, {60.0, 40}).members == std::vector<std::size_t>{0});

    std::mt19937_64 gen(12);
    const auto clump = testing::uniform_coords(gen, 100, 10.0);
    const SpatialIndex ci(clump);
    for (std::size_t i = 0; i < 100; i += 11) {
        const auto nb = neighborhood_of(ci, i, {60.0, 40});
        CHECK(nb.size() == 40);
        CHECK(std::find(nb.members.begin(), nb.members.end(), i) != nb.members.end());
    }
    CHECK_THROWS_AS(neighborhood_of(ci, 100, {60.0, 40}), Error);
    CHECK_THROWS_AS(neighborhood_of(ci, 0, {0.0, 40}), Error);
    CHECK_THROWS_AS(neighborhood_of(ci, 0, {1.0, 0}), Error);
}

TEST_CASE("neighborhoods equal brute-force filter then sort") {
    std::mt19937_64 gen(77);
    const auto coords = testing::uniform_coords(gen, 500, 400.0);
    const SpatialIndex index(coords);
    for (const NeighborhoodRule rule : {NeighborhoodRule{60.0, 40}, NeighborhoodRule{30.0, 5},
                                        NeighborhoodRule{45.0, NeighborhoodRule::unlimited}}) {
        const auto all = all_neighborhoods(index, rule);
        REQUIRE(all.size() == 500);
        for (std::size_t i = 0; i < 500; ++i) {
            CHECK(all[i].center == i);
            CHECK(all[i].members == brute_neighborhood(coords, i, rule.radius, rule.k_max));
        }
    }
}

TEST_CASE("enlarging radius or k_max never removes a member") {
    std::mt19937_64 gen(99);
    const auto coords = testing::uniform_coords(gen, 300, 200.0);
    const SpatialIndex index(coords);
    for (std::size_t i = 0; i < 300; i += 7) {
        auto prev = neighborhood_of(index, i, {10.0, 3}).members;
        for (const NeighborhoodRule rule : {NeighborhoodRule{20.0, 3}, NeighborhoodRule{20.0, 10},
                                            NeighborhoodRule{40.0, 10}, NeighborhoodRule{40.0, 40}}) {
            const auto next = neighborhood_of(index, i, rule).members;
            CHECK(std::includes(next.begin(), next.end(), prev.begin(), prev.end()));
            for (auto j : next) {
                const double d = std::hypot(coords(j, 0) - coords(i, 0), coords(j, 1) - coords(i, 1));
                CHECK(d <= rule.radius);
            }
            CHECK(next.size() <= rule.k_max);
            prev = next;
        }
    }
}
