#include "nbhd/pipeline.hpp"

#include "nbhd/analytics.hpp"
#include "nbhd/embedding.hpp"
#include "nbhd/error.hpp"
#include "nbhd/network_features.hpp"
#include "nbhd/quantile_features.hpp"
#include "nbhd/report_json.hpp"
#include "nbhd/simulation.hpp"
#include "nbhd/spatial_index.hpp"

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace nbhd {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

NeighborhoodRule rule_of(const PipelineConfig& c) {
    return NeighborhoodRule{c.neighborhood.radius, c.neighborhood.k_max.value_or(NeighborhoodRule::unlimited)};
}

ordered_json shape(const Matrix& m) {
    return ordered_json::array({m.rows(), m.cols()});
}

void write_json(const ordered_json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write " + path);
    }
    out << j.dump(2) << '\n';
}

// Tracks what one stage wrote so the manifest can list shapes and hashes.
class Recorder {
public:
    explicit Recorder(fs::path dir) : dir_(std::move(dir)) {}

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void matrix(const std::string& key, const std::string& file, const Matrix& m,
                const std::vector<std::string>* ids) {
        write_matrix_csv(m, path(file), ids);
        shapes_[key] = shape(m);
        files_.push_back(file);
    }

    void json_file(const std::string& file, const ordered_json& j) {
        write_json(j, path(file));
        files_.push_back(file);
    }

    void file(const std::string& file) { files_.push_back(file); }
    void input(const std::string& p) { inputs_.push_back(p); }
    void shape_of(const std::string& key, std::size_t rows, std::size_t cols) {
        shapes_[key] = ordered_json::array({rows, cols});
    }
    void note(const std::string& key, ordered_json value) { notes_[key] = std::move(value); }

    ordered_json manifest(Stage stage, const PipelineConfig& config, const std::string& status,
                          const std::string& error) const {
        ordered_json m;
        m["status"] = status;
        if (!error.empty()) {
            m["error"] = error;
        }
        m["stage"] = to_string(stage);
        m["config"] = to_json(config);
        m["shapes"] = shapes_;
        auto hashes = ordered_json::object();
        for (const auto& f : files_) {
            if (fs::exists(path(f))) {
                hashes[f] = sha256_file(path(f));
            }
        }
        m["outputs"] = hashes;
        auto inputs = ordered_json::object();
        for (const auto& p : inputs_) {
            if (fs::exists(p)) {
                inputs[p] = sha256_file(p);
            }
        }
        m["inputs"] = inputs;
        if (!notes_.empty()) {
            m["notes"] = notes_;
        }
        return m;
    }

private:
    fs::path dir_;
    ordered_json shapes_ = ordered_json::object();
    ordered_json notes_ = ordered_json::object();
    std::vector<std::string> files_;
    std::vector<std::string> inputs_;
};

CellTable load_cells(Recorder& rec, const std::string& path, const ColumnSchema& schema) {
    rec.input(path);
    return load_cells_csv(path, schema);
}

void write_featurization(Recorder& rec, const CellTable& table, const Featurization& f) {
    write_cells_csv(table, rec.path("cells.csv"));
    rec.file("cells.csv");
    rec.shape_of("expression", table.expression.rows(), table.expression.cols());
    rec.matrix("reduced", "reduced.csv", f.reduced, &table.ids);
    rec.json_file("pca.json", to_json(f.pca, table.feature_names()));
    for (const auto& block : f.blocks) {
        rec.matrix(block.name + "_block", block.name + "_block.csv", block.values, &table.ids);
    }
    rec.matrix("neighborhood_matrix", "neighborhood_matrix.csv", f.matrix.values, &table.ids);
    rec.json_file("block_spans.json", to_json(f.matrix.spans));
}

EmbeddingResult write_embedding(Recorder& rec, const Matrix& features, const std::vector<std::string>& ids,
                                const PipelineConfig& config) {
    auto result = embed(features, config.embedding);
    rec.matrix("embedding", "embedding.csv", result.coords, &ids);
    rec.note("reducer", result.reducer_id);
    return result;
}

void write_clusters(Recorder& rec, const CellTable& table, const Matrix& coords, const PipelineConfig& config) {
    const auto model = cluster_embedding(coords, config);
    Matrix out(coords.rows(), 3, std::vector<double>(coords.rows() * 3), {"x", "y", "cluster"});
    for (std::size_t i = 0; i < coords.rows(); ++i) {
        out(i, 0) = coords(i, 0);
        out(i, 1) = coords(i, 1);
        out(i, 2) = model.assignments[i];
    }
    rec.matrix("clusters", "clusters.csv", out, &table.ids);
    const auto summary =
        summarize_clusters(table.expression, model.assignments, table.cell_types, {}, config.summaries.bins);
    auto summaries = summary_json(summary, config.summaries.top_n);
    summaries["k"] = model.k;
    summaries["seed"] = model.seed;
    summaries["inertia"] = model.inertia;
    rec.json_file("summaries.json", summaries);
}

CellTable reload_cells(Recorder& rec) {
    const auto path = rec.path("cells.csv");
    rec.input(path);
    return load_cells_csv(path, ColumnSchema{});
}

LabeledMatrix reload_matrix(Recorder& rec, const std::string& file, const CellTable* table) {
    const auto path = rec.path(file);
    rec.input(path);
    auto m = read_matrix_csv(path);
    if (table && m.ids != table->ids) {
        throw Error(ErrorKind::Validation, file + " ids do not match cells.csv");
    }
    return m;
}

void run_compare(Recorder& rec, const PipelineConfig& config) {
    std::ostringstream text;
    std::ostringstream csv;
    csv << "seed,pipeline,rows,cols,k,radius,contiguity,max_entropy_bits\n";
    for (const auto seed : config.simulation.compare_seeds) {
        auto sim = config.simulation.params;
        sim.seed = seed;
        const auto table = simulate(sim);
        ComparisonParams cp;
        cp.k = config.simulation.compare_k;
        cp.seed = seed;
        cp.embedding = config.embedding;
        cp.contiguity_knn = config.simulation.contiguity_knn;
        const auto report = run_comparison(table, sim, cp);
        text << "seed " << seed << ":\n";
        report.write_text(text);
        for (const auto* p : {&report.cell_level, &report.neighborhood}) {
            csv << seed << ',' << p->name << ',' << p->rows << ',' << p->cols << ',' << cp.k << ',' << sim.radius
                << ',' << p->contiguity << ',' << p->max_entropy << '\n';
        }
    }
    for (const auto& [file, body] : {std::pair{"scorecard.txt", text.str()}, std::pair{"scorecard.csv", csv.str()}}) {
        std::ofstream out(rec.path(file));
        out << body;
        rec.file(file);
    }
}

void execute(Stage stage, const PipelineConfig& config, Recorder& rec) {
    switch (stage) {
    case Stage::Featurize:
    case Stage::Run: {
        if (config.input.path.empty()) {
            throw Error(ErrorKind::Validation, "config key 'input.path' is required for " + to_string(stage));
        }
        const auto table = load_cells(rec, config.input.path, config.input.schema);
        const auto f = featurize(table, config);
        write_featurization(rec, table, f);
        rec.note("pca_components", f.pca.components());
        if (stage == Stage::Run) {
            const auto e = write_embedding(rec, f.matrix.values, table.ids, config);
            write_clusters(rec, table, e.coords, config);
        }
        return;
    }
    case Stage::Embed: {
        const auto m = reload_matrix(rec, "neighborhood_matrix.csv", nullptr);
        write_embedding(rec, m.matrix, m.ids, config);
        return;
    }
    case Stage::Cluster: {
        const auto table = reload_cells(rec);
        const auto e = reload_matrix(rec, "embedding.csv", &table);
        write_clusters(rec, table, e.matrix, config);
        return;
    }
    case Stage::Simulate: {
        const auto table = simulate(config.simulation.params);
        write_cells_csv(table, rec.path("cells.csv"));
        rec.file("cells.csv");
        rec.shape_of("expression", table.expression.rows(), table.expression.cols());
        auto block = simulation_neighborhood_matrix(table, config.simulation.params);
        rec.matrix("quantile_block", "quantile_block.csv", block.values, &table.ids);
        const auto nm = assemble({block}, {ScalingMode::None});
        rec.matrix("neighborhood_matrix", "neighborhood_matrix.csv", nm.values, &table.ids);
        rec.json_file("block_spans.json", to_json(nm.spans));
        const auto e = write_embedding(rec, nm.values, table.ids, config);
        write_clusters(rec, table, e.coords, config);
        return;
    }
    case Stage::Compare:
        run_compare(rec, config);
        return;
    }
}

}  // namespace

Featurization featurize(const CellTable& table, const PipelineConfig& config) {
    table.validate();
    Featurization f;
    PcaOptions opts;
    opts.variance_target = config.pca.variance_target;
    opts.standardize = config.pca.standardize;
    f.pca = fit_pca(table.expression, opts);
    f.reduced = pca_transform(f.pca, table.expression);

    const SpatialIndex index(table.coords);
    const auto neighborhoods = all_neighborhoods(index, rule_of(config));
    f.blocks.push_back(quantile_matrix(f.reduced, neighborhoods, config.quantiles));

    const auto registry = config.network.statistics.empty() ? StatRegistry::standard()
                                                            : StatRegistry::select(config.network.statistics);
    NetworkParams params;
    params.decay = config.network.decay;
    params.k_path = config.network.k_path;
    params.mean_over_nodes = config.network.aggregate == "mean";
    f.blocks.push_back(network_matrix(table.coords, neighborhoods, config.network.edge_threshold, registry, params));

    f.matrix = assemble(f.blocks, {parse_scaling_mode(config.assembly.quantile),
                                   parse_scaling_mode(config.assembly.network)});
    return f;
}

ClusterModel cluster_embedding(const Matrix& coords, const PipelineConfig& config) {
    KMeansParams params;
    params.restarts = config.clustering.restarts;
    params.max_iterations = config.clustering.max_iterations;
    return kmeans(coords, config.clustering.k, config.clustering.seed, params);
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot read " + path);
    }
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::State, "SHA-256 unavailable");
    }
    std::vector<char> buffer(1 << 16);
    while (in) {
        in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

std::string to_string(Stage stage) {
    switch (stage) {
    case Stage::Run: return "run";
    case Stage::Featurize: return "featurize";
    case Stage::Embed: return "embed";
    case Stage::Cluster: return "cluster";
    case Stage::Simulate: return "simulate";
    case Stage::Compare: return "compare";
    }
    return "?";
}

Stage parse_stage(const std::string& text) {
    for (auto s : {Stage::Run, Stage::Featurize, Stage::Embed, Stage::Cluster, Stage::Simulate, Stage::Compare}) {
        if (to_string(s) == text) {
            return s;
        }
    }
    throw Error(ErrorKind::Validation, "unknown stage '" + text + "'");
}

ordered_json run_stage(Stage stage, const PipelineConfig& config) {
    config.validate();
    const fs::path dir(config.output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorKind::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
    }
    Recorder rec(dir);
    const auto manifest_path = (dir / "manifest.json").string();
    write_json(rec.manifest(stage, config, "RUNNING", ""), manifest_path);
    try {
        execute(stage, config, rec);
    } catch (const std::exception& e) {
        write_json(rec.manifest(stage, config, "FAILED", e.what()), manifest_path);
        throw;
    }
    auto manifest = rec.manifest(stage, config, "OK", "");
    write_json(manifest, manifest_path);
    return manifest;
}

ordered_json replay_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open manifest " + manifest_path);
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Format, "manifest " + manifest_path + " is not valid JSON: " + e.what());
    }
    if (!doc.contains("stage") || !doc.contains("config")) {
        throw Error(ErrorKind::Schema, "manifest " + manifest_path + " lacks 'stage' or 'config'");
    }
    return run_stage(parse_stage(doc.at("stage").get<std::string>()), config_from_json(doc.at("config")));
}

}  // namespace nbhd
