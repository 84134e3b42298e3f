#include "nbhd/assembly.hpp"
#include "nbhd/error.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace nbhd;

namespace {

FeatureBlock block(const std::string& name, Matrix m) {
    std::vector<std::string> names;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        names.push_back(name + "_" + std::to_string(c));
    }
    m.set_col_names(names);
    return {name, std::move(m), "test"};
}

}  // namespace

TEST_CASE("quantile and network blocks assemble to 352 columns") {
    std::mt19937_64 gen(1);
    const auto q = block("quantile", testing::random_matrix(gen, 50, 323));
    const auto n = block("network", testing::random_matrix(gen, 50, 29, 10.0));
    const auto out = assemble({q, n}, {ScalingMode::None, ScalingMode::ZScore});
    CHECK(out.values.rows() == 50);
    CHECK(out.values.cols() == 352);
    REQUIRE(out.spans.size() == 2);
    CHECK(out.spans[0].begin == 0);
    CHECK(out.spans[0].end == 323);
    CHECK(out.spans[1].begin == 323);
    CHECK(out.spans[1].end == 352);
    CHECK(out.spans[1].mode == ScalingMode::ZScore);
    CHECK(out.scaling.size() == 352);
    CHECK(out.values.col_names()[323] == "network_0");
    for (std::size_t c = 323; c < 352; ++c) {
        const auto col = out.values.column(c);
        double m = 0.0;
        for (double v : col) {
            m += v;
        }
        m /= 50;
        double ss = 0.0;
        for (double v : col) {
            ss += (v - m) * (v - m);
        }
        CHECK(std::abs(m) < 1e-8);
        CHECK(std::sqrt(ss / 49) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("a single unscaled block passes through bit-identically") {
    std::mt19937_64 gen(2);
    const auto b = block("q", testing::random_matrix(gen, 30, 7));
    const auto out = assemble({b}, {ScalingMode::None});
    CHECK(out.values.values() == b.values.values());
    CHECK(out.values.col_names() == b.values.col_names());
}

TEST_CASE("constant columns become zero and are flagged") {
    std::mt19937_64 gen(3);
    auto m = testing::random_matrix(gen, 20, 3);
    for (std::size_t i = 0; i < 20; ++i) {
        m(i, 1) = 17.0;
    }
    const auto out = assemble({block("n", m)}, {ScalingMode::ZScore});
    CHECK(out.values.cols() == 3);
    CHECK(out.scaling[1].zero_variance);
    CHECK_FALSE(out.scaling[0].zero_variance);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(out.values(i, 1) == 0.0);
    }
}

TEST_CASE("z-scoring is idempotent") {
    std::mt19937_64 gen(4);
    for (int t = 0; t < 10; ++t) {
        auto m = testing::random_matrix(gen, 40, 6, 3.0 + t);
        zscore_columns(m);
        auto again = m;
        zscore_columns(again);
        for (std::size_t i = 0; i < m.values().size(); ++i) {
            CHECK(std::abs(m.values()[i] - again.values()[i]) < 1e-10);
        }
    }
}

TEST_CASE("column permutation preserves pairwise row distances") {
    std::mt19937_64 gen(5);
    const auto a = testing::random_matrix(gen, 25, 4, 5.0);
    const std::vector<std::size_t> perm{2, 0, 3, 1};
    Matrix b(25, 4);
    for (std::size_t i = 0; i < 25; ++i) {
        for (std::size_t c = 0; c < 4; ++c) {
            b(i, c) = a(i, perm[c]);
        }
    }
    const auto x = assemble({block("a", a)}, {ScalingMode::ZScore}).values;
    const auto y = assemble({block("b", b)}, {ScalingMode::ZScore}).values;
    for (std::size_t i = 0; i < 25; ++i) {
        for (std::size_t j = 0; j < 25; ++j) {
            double dx = 0.0;
            double dy = 0.0;
            for (std::size_t c = 0; c < 4; ++c) {
                dx += std::pow(x(i, c) - x(j, c), 2);
                dy += std::pow(y(i, c) - y(j, c), 2);
            }
            CHECK(std::abs(dx - dy) < 1e-10);
        }
    }
}

TEST_CASE("assembly errors") {
    std::mt19937_64 gen(6);
    const auto a = block("a", testing::random_matrix(gen, 10, 2));
    const auto b = block("b", testing::random_matrix(gen, 11, 2));
    CHECK_THROWS_AS(assemble({a, b}, {ScalingMode::None, ScalingMode::None}), Error);
    CHECK_THROWS_AS(assemble({}, {}), Error);
    CHECK_THROWS_AS(assemble({a}, {ScalingMode::None, ScalingMode::None}), Error);
    CHECK(parse_scaling_mode("zscore") == ScalingMode::ZScore);
    CHECK(parse_scaling_mode("none") == ScalingMode::None);
    CHECK_THROWS_AS(parse_scaling_mode("minmax"), Error);
}
