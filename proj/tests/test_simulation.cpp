#include "nbhd/analytics.hpp"
#include "nbhd/error.hpp"
#include "nbhd/simulation.hpp"
#include "support.hpp"

#include <doctest.h>

#include <map>
#include <sstream>

using namespace nbhd;

TEST_CASE("default simulation shapes and names") {
    const SimulationParams params;
    const auto table = simulate(params);
    CHECK_NOTHROW(table.validate());
    CHECK(table.size() == 2000);
    CHECK(table.expression.rows() == 2000);
    CHECK(table.expression.cols() == 5);
    CHECK(table.feature_names().front() == "protein_1");
    CHECK(table.ids.front() == "cell_1");
    CHECK(table.ids.back() == "cell_2000");
    for (const auto& t : table.cell_types) {
        CHECK((t == "1" || t == "2" || t == "3"));
    }
    const auto block = simulation_neighborhood_matrix(table, params);
    CHECK(block.values.rows() == 2000);
    CHECK(block.values.cols() == 105);
    CHECK(block.values.col_names().front() == "protein_1_q0.00");
    CHECK(block.values.col_names().back() == "protein_5_q1.00");
}

TEST_CASE("seeded simulation is deterministic and seeds differ") {
    SimulationParams p;
    p.n_cells = 300;
    const auto a = simulate(p);
    const auto b = simulate(p);
    CHECK(a.expression == b.expression);
    CHECK(a.coords == b.coords);
    CHECK(a.cell_types == b.cell_types);
    p.seed = 2;
    CHECK_FALSE(simulate(p).expression == a.expression);
}

TEST_CASE("zero noise gives one profile per type") {
    SimulationParams p;
    p.n_cells = 400;
    p.protein_noise_var = 0.0;
    const auto t = simulate(p);
    std::map<std::string, std::vector<double>> profile;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto row = t.expression.row(i);
        const std::vector<double> v(row.begin(), row.end());
        auto [it, inserted] = profile.emplace(t.cell_types[i], v);
        if (!inserted) {
            CHECK(it->second == v);
        }
    }
    CHECK(profile.size() == 3);
}

TEST_CASE("type proportions stay within three binomial deviations") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SimulationParams p;
        p.seed = seed;
        const auto t = simulate(p);
        std::map<std::string, double> n;
        for (const auto& c : t.cell_types) {
            n[c] += 1.0;
        }
        for (std::size_t k = 0; k < 3; ++k) {
            const double prob = p.type_probs[k];
            const double sd = std::sqrt(2000 * prob * (1 - prob));
            CHECK(std::abs(n[std::to_string(k + 1)] - 2000 * prob) <= 3 * sd);
        }
    }
}

TEST_CASE("parameter validation") {
    SimulationParams p;
    p.type_probs = {0.5, 0.4};
    CHECK_THROWS_AS(p.validate(), Error);
    p = {};
    p.type_probs = {1.2, -0.2};
    CHECK_THROWS_AS(p.validate(), Error);
    p = {};
    p.center_var = -1.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = {};
    p.radius = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = {};
    p.n_cells = 0;
    CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("label agreement with best one-to-one matching") {
    CHECK(label_agreement({2, 2, 1, 1}, {"a", "a", "b", "b"}) == 1.0);
    CHECK(label_agreement({1, 1, 1, 1}, {"a", "a", "b", "b"}) == 0.5);
    CHECK(label_agreement({1, 2, 3, 3}, {"a", "a", "b", "b"}) == 0.75);
}

TEST_CASE("a single forced type has zero entropy everywhere") {
    SimulationParams p;
    p.n_cells = 300;
    p.type_probs = {1.0, 0.0, 0.0};
    const auto t = simulate(p);
    ComparisonParams cp;
    cp.k = 4;
    cp.embedding.epochs = 100;
    const auto r = run_comparison(t, p, cp);
    CHECK(r.cell_level.max_entropy == 0.0);
    CHECK(r.neighborhood.max_entropy == 0.0);
}

TEST_CASE("comparison report on the default tissue") {
    SimulationParams p;
    const auto t = simulate(p);

    ComparisonParams three;
    three.k = 3;
    const auto r3 = run_comparison(t, p, three);
    CHECK(label_agreement(r3.cell_level.clusters.assignments, t.cell_types) > 0.9);

    const auto r6 = run_comparison(t, p, {});
    CHECK(r6.neighborhood.rows == 2000);
    CHECK(r6.neighborhood.cols == 105);
    CHECK(r6.cell_level.cols == 5);
    CHECK(r6.neighborhood.max_entropy > r6.cell_level.max_entropy);
    CHECK(r6.neighborhood.contiguity > r6.cell_level.contiguity);

    std::ostringstream text;
    std::ostringstream csv;
    r6.write_text(text);
    r6.write_csv(csv);
    CHECK(text.str().find("neighborhood") != std::string::npos);
    const auto rows = csv.str();
    CHECK(std::count(rows.begin(), rows.end(), '\n') == 3);
}
