#include "nbhd/config.hpp"

#include "nbhd/assembly.hpp"
#include "nbhd/error.hpp"
#include "nbhd/network_features.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace nbhd {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void require(bool ok, const std::string& key, const std::string& rule) {
    if (!ok) {
        throw Error(ErrorKind::Validation, "config key '" + key + "' must be " + rule);
    }
}

bool finite(double v) {
    return std::isfinite(v);
}

// Reads members of one object, remembering which keys were consumed so that
// leftovers can be reported.
class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) {
            throw Error(ErrorKind::Schema, "config section '" + where() + "' must be an object");
        }
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        const auto it = obj_.find(key);
        if (it == obj_.end()) {
            return;
        }
        try {
            if constexpr (std::is_same_v<T, std::optional<std::size_t>>) {
                if (it->is_null()) {
                    out.reset();
                } else {
                    out = checked_unsigned(*it, key);
                }
            } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
                out = checked_unsigned(*it, key);
            } else if constexpr (std::is_same_v<T, int>) {
                if (!it->is_number_integer()) {
                    throw Error(ErrorKind::Schema, "config key '" + name(key) + "' must be an integer");
                }
                out = it->get<int>();
            } else if constexpr (std::is_same_v<T, double>) {
                if (!it->is_number()) {
                    throw Error(ErrorKind::Schema, "config key '" + name(key) + "' must be a number");
                }
                out = it->get<double>();
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!it->is_boolean()) {
                    throw Error(ErrorKind::Schema, "config key '" + name(key) + "' must be true or false");
                }
                out = it->get<bool>();
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!it->is_string()) {
                    throw Error(ErrorKind::Schema, "config key '" + name(key) + "' must be a string");
                }
                out = it->get<std::string>();
            } else {
                out = it->get<T>();
            }
        } catch (const json::exception& e) {
            throw Error(ErrorKind::Schema, "config key '" + name(key) + "': " + e.what());
        }
    }

    const json* section(const char* key) {
        seen_.insert(key);
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (const auto& item : obj_.items()) {
            if (!seen_.count(item.key())) {
                throw Error(ErrorKind::Schema, "unknown config key '" + name(item.key().c_str()) + "'");
            }
        }
    }

private:
    std::string where() const { return path_.empty() ? "<root>" : path_; }

    std::uint64_t checked_unsigned(const json& v, const char* key) const {
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            throw Error(ErrorKind::Schema, "config key '" + name(key) + "' must be a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_quantiles(const json& j, const std::string& path, QuantileSpec& q) {
    Reader r(j, path);
    r.get("min", q.min_level);
    r.get("max", q.max_level);
    r.get("count", q.count);
    r.finish();
}

ordered_json quantiles_json(const QuantileSpec& q) {
    return ordered_json{{"min", q.min_level}, {"max", q.max_level}, {"count", q.count}};
}

ordered_json k_max_json(const std::optional<std::size_t>& k) {
    return k ? ordered_json(*k) : ordered_json(nullptr);
}

}  // namespace

void PipelineConfig::validate() const {
    require(finite(pca.variance_target) && pca.variance_target > 0.0 && pca.variance_target <= 1.0,
            "pca.variance_target", "in (0, 1]");
    require(finite(neighborhood.radius) && neighborhood.radius > 0.0, "neighborhood.radius", "positive");
    require(!neighborhood.k_max || *neighborhood.k_max >= 1, "neighborhood.k_max", ">= 1 or null");
    try {
        quantiles.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::Validation, std::string("config key 'quantiles': ") + e.what());
    }
    require(finite(network.edge_threshold) && network.edge_threshold > 0.0, "network.edge_threshold", "positive");
    require(finite(network.decay) && network.decay > 0.0 && network.decay < 1.0, "network.decay", "in (0, 1)");
    require(network.k_path >= 1, "network.k_path", ">= 1");
    require(network.aggregate == "center" || network.aggregate == "mean", "network.aggregate",
            "\"center\" or \"mean\"");
    if (!network.statistics.empty()) {
        try {
            StatRegistry::select(network.statistics);
        } catch (const Error& e) {
            throw Error(ErrorKind::Validation, std::string("config key 'network.statistics': ") + e.what());
        }
    }
    for (const auto& [key, mode] : {std::pair{"assembly.quantile", assembly.quantile},
                                    std::pair{"assembly.network", assembly.network}}) {
        require(mode == "none" || mode == "zscore", key, "\"none\" or \"zscore\"");
    }
    require(embedding.reducer == "umap" || embedding.reducer == "pca", "embedding.reducer", "\"umap\" or \"pca\"");
    require(embedding.n_neighbors >= 2, "embedding.n_neighbors", ">= 2");
    require(finite(embedding.spread) && embedding.spread > 0.0, "embedding.spread", "positive");
    require(finite(embedding.min_dist) && embedding.min_dist >= 0.0 && embedding.min_dist <= embedding.spread,
            "embedding.min_dist", "in [0, spread]");
    require(embedding.epochs >= 1, "embedding.epochs", ">= 1");
    require(finite(embedding.negative_sample_rate) && embedding.negative_sample_rate > 0.0,
            "embedding.negative_sample_rate", "positive");
    require(clustering.k >= 1, "clustering.k", ">= 1");
    require(clustering.restarts >= 1, "clustering.restarts", ">= 1");
    require(clustering.max_iterations >= 1, "clustering.max_iterations", ">= 1");
    require(summaries.bins >= 1, "summaries.bins", ">= 1");
    require(summaries.top_n >= 1, "summaries.top_n", ">= 1");
    try {
        simulation.params.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::Validation, std::string("config key 'simulation': ") + e.what());
    }
    require(simulation.compare_k >= 1, "simulation.compare_k", ">= 1");
    require(!simulation.compare_seeds.empty(), "simulation.compare_seeds", "non-empty");
    require(simulation.contiguity_knn >= 1, "simulation.contiguity_knn", ">= 1");
    require(!output.empty(), "output", "a non-empty path");
}

bool PipelineConfig::operator==(const PipelineConfig& other) const {
    return to_json(*this) == to_json(other);
}

ordered_json to_json(const PipelineConfig& c) {
    ordered_json j;
    const auto& s = c.input.schema;
    j["input"] = {{"path", c.input.path},
                  {"id", s.id},
                  {"x", s.x},
                  {"y", s.y},
                  {"cell_type", s.cell_type},
                  {"expression", s.expression},
                  {"expression_first", s.expression_first},
                  {"expression_last", s.expression_last}};
    j["pca"] = {{"variance_target", c.pca.variance_target}, {"standardize", c.pca.standardize}};
    j["neighborhood"] = {{"radius", c.neighborhood.radius}, {"k_max", k_max_json(c.neighborhood.k_max)}};
    j["quantiles"] = quantiles_json(c.quantiles);
    j["network"] = {{"edge_threshold", c.network.edge_threshold},
                    {"statistics", c.network.statistics},
                    {"decay", c.network.decay},
                    {"k_path", c.network.k_path},
                    {"aggregate", c.network.aggregate}};
    j["assembly"] = {{"quantile", c.assembly.quantile}, {"network", c.assembly.network}};
    const auto& e = c.embedding;
    j["embedding"] = {{"reducer", e.reducer},
                      {"n_neighbors", e.n_neighbors},
                      {"min_dist", e.min_dist},
                      {"spread", e.spread},
                      {"epochs", e.epochs},
                      {"negative_sample_rate", e.negative_sample_rate},
                      {"seed", e.seed}};
    j["clustering"] = {{"k", c.clustering.k},
                       {"seed", c.clustering.seed},
                       {"restarts", c.clustering.restarts},
                       {"max_iterations", c.clustering.max_iterations}};
    j["summaries"] = {{"bins", c.summaries.bins}, {"top_n", c.summaries.top_n}};
    const auto& p = c.simulation.params;
    const auto sim_k_max = p.k_max == NeighborhoodRule::unlimited ? ordered_json(nullptr) : ordered_json(p.k_max);
    j["simulation"] = {{"n_cells", p.n_cells},
                       {"type_probs", p.type_probs},
                       {"n_proteins", p.n_proteins},
                       {"protein_mean_var", p.protein_mean_var},
                       {"protein_noise_var", p.protein_noise_var},
                       {"center_var", p.center_var},
                       {"cluster_var", p.cluster_var},
                       {"radius", p.radius},
                       {"k_max", sim_k_max},
                       {"quantiles", quantiles_json(p.quantiles)},
                       {"seed", p.seed},
                       {"compare_k", c.simulation.compare_k},
                       {"compare_seeds", c.simulation.compare_seeds},
                       {"contiguity_knn", c.simulation.contiguity_knn}};
    j["output"] = c.output;
    return j;
}

PipelineConfig config_from_json(const json& doc) {
    if (doc.is_object() && doc.contains("config") && doc.contains("status")) {
        return config_from_json(doc.at("config"));
    }
    PipelineConfig c;
    Reader root(doc, "");
    if (const auto* j = root.section("input")) {
        Reader r(*j, "input");
        auto& s = c.input.schema;
        r.get("path", c.input.path);
        r.get("id", s.id);
        r.get("x", s.x);
        r.get("y", s.y);
        r.get("cell_type", s.cell_type);
        r.get("expression", s.expression);
        r.get("expression_first", s.expression_first);
        r.get("expression_last", s.expression_last);
        r.finish();
    }
    if (const auto* j = root.section("pca")) {
        Reader r(*j, "pca");
        r.get("variance_target", c.pca.variance_target);
        r.get("standardize", c.pca.standardize);
        r.finish();
    }
    if (const auto* j = root.section("neighborhood")) {
        Reader r(*j, "neighborhood");
        r.get("radius", c.neighborhood.radius);
        r.get("k_max", c.neighborhood.k_max);
        r.finish();
    }
    if (const auto* j = root.section("quantiles")) {
        read_quantiles(*j, "quantiles", c.quantiles);
    }
    if (const auto* j = root.section("network")) {
        Reader r(*j, "network");
        r.get("edge_threshold", c.network.edge_threshold);
        r.get("statistics", c.network.statistics);
        r.get("decay", c.network.decay);
        r.get("k_path", c.network.k_path);
        r.get("aggregate", c.network.aggregate);
        r.finish();
    }
    if (const auto* j = root.section("assembly")) {
        Reader r(*j, "assembly");
        r.get("quantile", c.assembly.quantile);
        r.get("network", c.assembly.network);
        r.finish();
    }
    if (const auto* j = root.section("embedding")) {
        Reader r(*j, "embedding");
        auto& e = c.embedding;
        r.get("reducer", e.reducer);
        r.get("n_neighbors", e.n_neighbors);
        r.get("min_dist", e.min_dist);
        r.get("spread", e.spread);
        r.get("epochs", e.epochs);
        r.get("negative_sample_rate", e.negative_sample_rate);
        r.get("seed", e.seed);
        r.finish();
    }
    if (const auto* j = root.section("clustering")) {
        Reader r(*j, "clustering");
        r.get("k", c.clustering.k);
        r.get("seed", c.clustering.seed);
        r.get("restarts", c.clustering.restarts);
        r.get("max_iterations", c.clustering.max_iterations);
        r.finish();
    }
    if (const auto* j = root.section("summaries")) {
        Reader r(*j, "summaries");
        r.get("bins", c.summaries.bins);
        r.get("top_n", c.summaries.top_n);
        r.finish();
    }
    if (const auto* j = root.section("simulation")) {
        Reader r(*j, "simulation");
        auto& p = c.simulation.params;
        r.get("n_cells", p.n_cells);
        r.get("type_probs", p.type_probs);
        r.get("n_proteins", p.n_proteins);
        r.get("protein_mean_var", p.protein_mean_var);
        r.get("protein_noise_var", p.protein_noise_var);
        r.get("center_var", p.center_var);
        r.get("cluster_var", p.cluster_var);
        r.get("radius", p.radius);
        std::optional<std::size_t> k_max;
        if (p.k_max != NeighborhoodRule::unlimited) {
            k_max = p.k_max;
        }
        r.get("k_max", k_max);
        p.k_max = k_max.value_or(NeighborhoodRule::unlimited);
        if (const auto* q = r.section("quantiles")) {
            read_quantiles(*q, "simulation.quantiles", p.quantiles);
        }
        r.get("seed", p.seed);
        r.get("compare_k", c.simulation.compare_k);
        r.get("compare_seeds", c.simulation.compare_seeds);
        r.get("contiguity_knn", c.simulation.contiguity_knn);
        r.finish();
    }
    root.get("output", c.output);
    root.finish();
    c.validate();
    return c;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open config file: " + path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Format, "config file " + path + " is not valid JSON: " + e.what());
    }
    return config_from_json(doc);
}

void save_config(const PipelineConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write config file: " + path);
    }
    out << to_json(config).dump(2) << '\n';
}

void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value) {
    json doc = to_json(config);
    json* node = &doc;
    std::stringstream parts(key);
    std::string part;
    std::vector<std::string> path;
    while (std::getline(parts, part, '.')) {
        path.push_back(part);
    }
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (!node->is_object() || !node->contains(path[i])) {
            throw Error(ErrorKind::Schema, "unknown config key '" + key + "'");
        }
        node = &(*node)[path[i]];
    }
    if (node->is_object()) {
        throw Error(ErrorKind::Schema, "config key '" + key + "' is a section, not a value");
    }
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;  // bare words are strings
    }
    if (node->is_string() && !parsed.is_string()) {
        parsed = value;
    }
    if (node->is_array() && !parsed.is_array()) {
        // Comma-separated shorthand: 1,2,3 or a,b,c.
        json list = json::array();
        std::stringstream items(value);
        std::string item;
        while (std::getline(items, item, ',')) {
            try {
                list.push_back(json::parse(item));
            } catch (const json::parse_error&) {
                list.push_back(item);
            }
        }
        parsed = list;
    }
    *node = parsed;
    config = config_from_json(doc);
}

}  // namespace nbhd
