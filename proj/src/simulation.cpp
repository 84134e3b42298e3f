#include "nbhd/simulation.hpp"

#include "nbhd/analytics.hpp"
#include "nbhd/error.hpp"
#include "nbhd/random.hpp"
#include "nbhd/spatial_index.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <ostream>

namespace nbhd {

void SimulationParams::validate() const {
    if (n_cells < 1 || n_proteins < 1 || type_probs.empty()) {
        throw Error(ErrorKind::Validation, "simulation needs at least one cell, protein and cell type");
    }
    double total = 0.0;
    for (double p : type_probs) {
        if (!(p >= 0.0)) {
            throw Error(ErrorKind::Validation, "cell type probabilities must be non-negative");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw Error(ErrorKind::Validation, "cell type probabilities must sum to 1");
    }
    // Zero variances are accepted as degenerate limits.
    for (double v : {protein_mean_var, protein_noise_var, center_var, cluster_var}) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw Error(ErrorKind::Validation, "simulation variances must be finite and non-negative");
        }
    }
    if (!(radius > 0.0)) {
        throw Error(ErrorKind::Validation, "simulation radius must be positive");
    }
    quantiles.validate();
}

CellTable simulate(const SimulationParams& params) {
    params.validate();
    Rng rng(params.seed);
    const auto types = params.type_probs.size();
    const auto p = params.n_proteins;
    const auto n = params.n_cells;

    std::vector<std::vector<double>> means(types, std::vector<double>(p));
    const double mean_sd = std::sqrt(params.protein_mean_var);
    for (auto& mu : means) {
        for (auto& v : mu) {
            v = mean_sd * rng.normal();
        }
    }
    std::vector<std::array<double, 2>> centers(types);
    const double center_sd = std::sqrt(params.center_var);
    for (auto& c : centers) {
        c[0] = center_sd * rng.normal();
        c[1] = center_sd * rng.normal();
    }

    std::vector<double> cumulative(types);
    std::partial_sum(params.type_probs.begin(), params.type_probs.end(), cumulative.begin());

    CellTable table;
    std::vector<double> coords(n * 2);
    std::vector<double> expr(n * p);
    const double noise_sd = std::sqrt(params.protein_noise_var);
    const double spread_sd = std::sqrt(params.cluster_var);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        std::size_t t = 0;
        while (t + 1 < types && (u >= cumulative[t] || params.type_probs[t] == 0.0)) {
            ++t;
        }
        table.ids.push_back("cell_" + std::to_string(i + 1));
        table.cell_types.push_back(std::to_string(t + 1));
        for (std::size_t j = 0; j < p; ++j) {
            expr[i * p + j] = means[t][j] + noise_sd * rng.normal();
        }
        coords[i * 2] = centers[t][0] + spread_sd * rng.normal();
        coords[i * 2 + 1] = centers[t][1] + spread_sd * rng.normal();
    }

    std::vector<std::string> names;
    for (std::size_t j = 0; j < p; ++j) {
        names.push_back("protein_" + std::to_string(j + 1));
    }
    table.coords = Matrix(n, 2, std::move(coords), {"x", "y"});
    table.expression = Matrix(n, p, std::move(expr), std::move(names));
    table.validate();
    return table;
}

FeatureBlock simulation_neighborhood_matrix(const CellTable& table, const SimulationParams& params) {
    const SpatialIndex index(table.coords);
    NeighborhoodRule rule{params.radius, params.k_max};
    return quantile_matrix(table.expression, index, rule, params.quantiles);
}

PipelineOutcome score_embedding(std::string name, std::size_t cols, const EmbeddingResult& embedding,
                                const CellTable& table, std::size_t k, std::uint64_t seed,
                                std::size_t contiguity_knn) {
    PipelineOutcome out;
    out.name = std::move(name);
    out.rows = embedding.coords.rows();
    out.cols = cols;
    out.embedding = embedding;
    out.clusters = kmeans(embedding.coords, k, seed);
    out.contiguity = spatial_contiguity(out.clusters.assignments, table.coords, contiguity_knn);
    out.entropies = cluster_entropies(cluster_composition(out.clusters.assignments, table.cell_types));
    out.max_entropy = 0.0;
    for (double h : out.entropies) {
        out.max_entropy = std::max(out.max_entropy, h);
    }
    return out;
}

double label_agreement(const std::vector<int>& assignments, const std::vector<std::string>& cell_types) {
    if (assignments.size() != cell_types.size()) {
        throw Error(ErrorKind::Validation, "assignments and cell types differ in length");
    }
    if (assignments.empty()) {
        return 1.0;
    }
    const auto comp = cluster_composition(assignments, cell_types);
    const auto k = comp.clusters.size();
    const auto t = comp.cell_types.size();
    if (t > 16) {
        throw Error(ErrorKind::Validation, "label agreement supports at most 16 cell types");
    }
    // best[mask] = most cells matched using clusters seen so far with types in mask.
    std::vector<double> best(std::size_t{1} << t, -1.0);
    best[0] = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        auto next = best;
        for (std::size_t mask = 0; mask < best.size(); ++mask) {
            if (best[mask] < 0) {
                continue;
            }
            for (std::size_t j = 0; j < t; ++j) {
                if (mask & (std::size_t{1} << j)) {
                    continue;
                }
                const double matched = comp.fractions[c][j] * static_cast<double>(comp.counts[c]);
                auto& slot = next[mask | (std::size_t{1} << j)];
                slot = std::max(slot, best[mask] + matched);
            }
        }
        best = std::move(next);
    }
    const double top = *std::max_element(best.begin(), best.end());
    return std::round(top) / static_cast<double>(assignments.size());
}

ComparisonReport run_comparison(const CellTable& table, const SimulationParams& sim, const ComparisonParams& params) {
    ComparisonReport report;
    report.simulation = sim;
    report.comparison = params;

    const auto cell_embedding = embed(table.expression, params.embedding);
    report.cell_level = score_embedding("cell_level", table.expression.cols(), cell_embedding, table, params.k,
                                        params.seed, params.contiguity_knn);

    const auto block = simulation_neighborhood_matrix(table, sim);
    const auto nb_embedding = embed(block.values, params.embedding);
    report.neighborhood = score_embedding("neighborhood", block.values.cols(), nb_embedding, table, params.k,
                                          params.seed, params.contiguity_knn);
    return report;
}

void ComparisonReport::write_text(std::ostream& out) const {
    out << "cell-level vs neighborhood comparison\n";
    out << "  cells: " << cell_level.rows << ", k: " << comparison.k << ", seed: " << comparison.seed
        << ", radius: " << simulation.radius << "\n";
    for (const auto* p : {&cell_level, &neighborhood}) {
        out << "  " << p->name << ": matrix " << p->rows << "x" << p->cols << ", contiguity " << p->contiguity
            << ", max cluster entropy " << p->max_entropy << " bits\n";
    }
}

void ComparisonReport::write_csv(std::ostream& out) const {
    out << "pipeline,rows,cols,k,seed,radius,contiguity,max_entropy_bits\n";
    for (const auto* p : {&cell_level, &neighborhood}) {
        out << p->name << ',' << p->rows << ',' << p->cols << ',' << comparison.k << ',' << comparison.seed << ','
            << simulation.radius << ',' << p->contiguity << ',' << p->max_entropy << '\n';
    }
}

}  // namespace nbhd
