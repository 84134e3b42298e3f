#include "nbhd/service.hpp"

#include "nbhd/analytics.hpp"
#include "nbhd/error.hpp"
#include "nbhd/report_json.hpp"

#include <httplib.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace nbhd {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

bool parse_count(const std::string& text, long long& out) {
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end;
}

ApiResponse no_session() {
    return api_error(409, "NO_SESSION", "no dataset is loaded");
}

ApiResponse bad_count(const std::string& name, const std::string& value, long long lo, long long hi) {
    return api_error(400, "VALIDATION", name + " must be an integer in [" + std::to_string(lo) + ", " +
                                            std::to_string(hi) + "], got '" + value + "'",
                     {{"field", name}, {"min", lo}, {"max", hi}});
}

}  // namespace

ApiResponse api_error(int status, const std::string& code, const std::string& message, ordered_json extra) {
    ordered_json err{{"code", code}, {"message", message}};
    for (auto& [k, v] : extra.items()) {
        err[k] = v;
    }
    return ApiResponse{status, ordered_json{{"error", err}}};
}

void Session::load_artifacts(const std::string& dir) {
    const fs::path root(dir);
    auto table = load_cells_csv((root / "cells.csv").string(), ColumnSchema{});
    auto emb = read_matrix_csv((root / "embedding.csv").string());
    if (emb.ids != table.ids || emb.matrix.cols() != 2) {
        throw Error(ErrorKind::Validation, "embedding.csv does not match cells.csv");
    }
    std::uint64_t seed = 42;
    KMeansParams params;
    std::size_t k = 5;
    const auto manifest_path = root / "manifest.json";
    if (fs::exists(manifest_path)) {
        std::ifstream in(manifest_path);
        const auto doc = nlohmann::json::parse(in, nullptr, false);
        if (!doc.is_discarded() && doc.contains("config") && doc["config"].contains("clustering")) {
            const auto& c = doc["config"]["clustering"];
            seed = c.value("seed", seed);
            k = c.value("k", k);
            params.restarts = c.value("restarts", params.restarts);
            params.max_iterations = c.value("max_iterations", params.max_iterations);
        }
    }
    ClusterModel model;
    const auto clusters_path = root / "clusters.csv";
    if (fs::exists(clusters_path)) {
        const auto cl = read_matrix_csv(clusters_path.string());
        const auto& names = cl.matrix.col_names();
        const auto col = std::find(names.begin(), names.end(), "cluster");
        if (cl.ids != table.ids || col == names.end()) {
            throw Error(ErrorKind::Validation, "clusters.csv does not match cells.csv");
        }
        const auto c = static_cast<std::size_t>(col - names.begin());
        model.assignments.resize(cl.ids.size());
        int top = 0;
        for (std::size_t i = 0; i < cl.ids.size(); ++i) {
            model.assignments[i] = static_cast<int>(cl.matrix(i, c));
            top = std::max(top, model.assignments[i]);
        }
        model.k = static_cast<std::size_t>(top);
        model.seed = seed;
    } else {
        model = kmeans(emb.matrix, std::min(k, emb.matrix.rows()), seed, params);
    }
    load(std::move(table), std::move(emb.matrix), std::move(model), seed, params);
}

void Session::load(CellTable table, Matrix embedding, ClusterModel clusters, std::uint64_t seed, KMeansParams params) {
    table.validate();
    if (embedding.rows() != table.size() || embedding.cols() != 2 || clusters.assignments.size() != table.size()) {
        throw Error(ErrorKind::Validation, "session artifacts disagree on the number of cells");
    }
    std::scoped_lock writer(writer_);
    auto snap = std::make_shared<Snapshot>();
    snap->table = std::move(table);
    snap->embedding = std::move(embedding);
    snap->clusters = std::move(clusters);
    std::unique_lock guard(lock_);
    snap->version = current_ ? current_->version + 1 : 1;
    seed_ = seed;
    kmeans_params_ = params;
    current_ = std::move(snap);
}

bool Session::loaded() const {
    return snapshot() != nullptr;
}

std::shared_ptr<const Session::Snapshot> Session::snapshot() const {
    std::shared_lock guard(lock_);
    return current_;
}

ApiResponse Session::points() const {
    const auto s = snapshot();
    if (!s) {
        return no_session();
    }
    auto rows = ordered_json::array();
    for (std::size_t i = 0; i < s->table.size(); ++i) {
        rows.push_back({{"id", s->table.ids[i]},
                        {"x", s->table.coords(i, 0)},
                        {"y", s->table.coords(i, 1)},
                        {"embed_x", s->embedding(i, 0)},
                        {"embed_y", s->embedding(i, 1)},
                        {"cell_type", s->table.cell_types[i]},
                        {"cluster", s->clusters.assignments[i]}});
    }
    return {200, ordered_json{{"version", s->version}, {"k", s->clusters.k}, {"points", rows}}};
}

ApiResponse Session::expression(const QueryParams& query) const {
    const auto s = snapshot();
    if (!s) {
        return no_session();
    }
    const auto it = query.find("feature");
    if (it == query.end() || it->second.empty()) {
        return api_error(400, "VALIDATION", "query parameter 'feature' is required", {{"field", "feature"}});
    }
    const auto& names = s->table.feature_names();
    const auto pos = std::find(names.begin(), names.end(), it->second);
    if (pos == names.end()) {
        return api_error(404, "UNKNOWN_FEATURE", "no feature named '" + it->second + "'", {{"feature", it->second}});
    }
    const auto column = s->table.expression.column(static_cast<std::size_t>(pos - names.begin()));
    return {200, ordered_json{{"version", s->version}, {"feature", it->second}, {"values", column}}};
}

ApiResponse Session::recluster(const std::string& body) {
    // One writer at a time; readers keep using the previous snapshot meanwhile.
    std::scoped_lock writer(writer_);
    const auto s = snapshot();
    if (!s) {
        return no_session();
    }
    const auto n = static_cast<long long>(s->table.size());
    const auto doc = nlohmann::json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("k")) {
        return api_error(400, "VALIDATION", "body must be a JSON object with integer field 'k'",
                         {{"field", "k"}, {"min", 1}, {"max", n}});
    }
    const auto& kv = doc["k"];
    if (!kv.is_number_integer() || kv.get<long long>() < 1 || kv.get<long long>() > n) {
        return bad_count("k", kv.dump(), 1, n);
    }
    const auto k = static_cast<std::size_t>(kv.get<long long>());
    auto next = std::make_shared<Snapshot>(*s);
    next->clusters = kmeans(s->embedding, k, seed_, kmeans_params_);
    {
        std::unique_lock guard(lock_);
        next->version = current_->version + 1;
        current_ = next;
    }
    auto counts = ordered_json::object();
    std::vector<std::size_t> sizes(k, 0);
    for (int a : next->clusters.assignments) {
        ++sizes[static_cast<std::size_t>(a - 1)];
    }
    for (std::size_t c = 0; c < k; ++c) {
        counts[std::to_string(c + 1)] = sizes[c];
    }
    return {200, ordered_json{{"version", next->version},
                              {"k", k},
                              {"seed", next->clusters.seed},
                              {"inertia", next->clusters.inertia},
                              {"cluster_sizes", counts},
                              {"assignments", next->clusters.assignments}}};
}

ApiResponse Session::summaries(const QueryParams& query) const {
    const auto s = snapshot();
    if (!s) {
        return no_session();
    }
    auto count_param = [&](const char* name, long long def, long long lo, long long hi, long long& out) {
        const auto it = query.find(name);
        out = def;
        if (it == query.end() || it->second.empty()) {
            return true;
        }
        return parse_count(it->second, out) && out >= lo && out <= hi;
    };
    long long top_n = 10;
    long long bins = 30;
    const auto n_features = static_cast<long long>(s->table.feature_names().size());
    if (!count_param("top_n", 10, 1, n_features, top_n)) {
        return bad_count("top_n", query.at("top_n"), 1, n_features);
    }
    if (!count_param("bins", 30, 1, 1000, bins)) {
        return bad_count("bins", query.at("bins"), 1, 1000);
    }

    CellFilter filter;
    if (const auto it = query.find("clusters"); it != query.end()) {
        std::set<int> chosen;
        for (const auto& item : split_list(it->second)) {
            long long c = 0;
            if (!parse_count(item, c) || c < 1 || c > static_cast<long long>(s->clusters.k)) {
                return bad_count("clusters", item, 1, static_cast<long long>(s->clusters.k));
            }
            chosen.insert(static_cast<int>(c));
        }
        filter.clusters = chosen;
    }
    if (const auto it = query.find("cell_types"); it != query.end()) {
        const auto items = split_list(it->second);
        filter.cell_types = std::set<std::string>(items.begin(), items.end());
    }

    std::optional<std::size_t> feature;
    if (const auto it = query.find("feature"); it != query.end() && !it->second.empty()) {
        const auto& names = s->table.feature_names();
        const auto pos = std::find(names.begin(), names.end(), it->second);
        if (pos == names.end()) {
            return api_error(404, "UNKNOWN_FEATURE", "no feature named '" + it->second + "'",
                             {{"feature", it->second}});
        }
        feature = static_cast<std::size_t>(pos - names.begin());
    }

    ClusterSummary summary;
    try {
        summary = summarize_clusters(s->table.expression, s->clusters.assignments, s->table.cell_types, filter,
                                     static_cast<std::size_t>(bins));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Validation) {
            return api_error(400, "EMPTY_SELECTION", "no cells match the cluster and cell-type filters");
        }
        throw;
    }
    if (summary.clusters.size() < 2) {
        return api_error(400, "NEED_TWO_CLUSTERS", "the heatmap needs cells from at least two clusters",
                         {{"clusters", summary.clusters}});
    }

    ordered_json body;
    body["version"] = s->version;
    body["clusters"] = summary.clusters;
    body["cell_counts"] = summary_json(summary, 1)["cell_counts"];
    body["heatmap"] = to_json(top_differential_features(summary, summary.clusters, static_cast<std::size_t>(top_n)));
    body["structure"] = to_json(summary.composition);
    if (feature) {
        ordered_json by_cluster = ordered_json::object();
        std::vector<double> edges;
        std::vector<std::size_t> total;
        for (int c : summary.clusters) {
            const auto& h = summary.stats.at(c)[*feature].histogram;
            by_cluster[std::to_string(c)] = h.counts;
            edges = h.edges;
            total.resize(h.counts.size(), 0);
            for (std::size_t b = 0; b < h.counts.size(); ++b) {
                total[b] += h.counts[b];
            }
        }
        body["histogram"] = {{"feature", s->table.feature_names()[*feature]},
                             {"edges", edges},
                             {"counts", total},
                             {"by_cluster", by_cluster}};
    } else {
        body["histogram"] = nullptr;
    }
    return {200, body};
}

ApiResponse Session::meta() const {
    const auto s = snapshot();
    if (!s) {
        return no_session();
    }
    std::set<std::string> types(s->table.cell_types.begin(), s->table.cell_types.end());
    return {200, ordered_json{{"version", s->version},
                              {"n", s->table.size()},
                              {"k", s->clusters.k},
                              {"seed", seed_},
                              {"features", s->table.feature_names()},
                              {"cell_types", std::vector<std::string>(types.begin(), types.end())}}};
}

namespace {

QueryParams to_query(const httplib::Request& req) {
    QueryParams q;
    for (const auto& [k, v] : req.params) {
        q[k] = v;
    }
    return q;
}

void reply(httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    res.set_content(api.body.dump(), "application/json");
}

}  // namespace

ApiServer::ApiServer(Session& session) : server_(std::make_unique<httplib::Server>()) {
    auto& server = *server_;
    server.Get("/points", [&session](const httplib::Request&, httplib::Response& res) {
        reply(res, session.points());
    });
    server.Get("/expression", [&session](const httplib::Request& req, httplib::Response& res) {
        reply(res, session.expression(to_query(req)));
    });
    server.Post("/recluster", [&session](const httplib::Request& req, httplib::Response& res) {
        reply(res, session.recluster(req.body));
    });
    server.Get("/summaries", [&session](const httplib::Request& req, httplib::Response& res) {
        reply(res, session.summaries(to_query(req)));
    });
    server.Get("/meta", [&session](const httplib::Request&, httplib::Response& res) {
        reply(res, session.meta());
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        reply(res, api_error(500, "INTERNAL", what));
    });
}

ApiServer::~ApiServer() {
    stop();
}

int ApiServer::bind(const std::string& host, int port) {
    const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (bound < 0) {
        throw Error(ErrorKind::Io, "cannot bind " + host + ":" + std::to_string(port));
    }
    return bound;
}

void ApiServer::listen() {
    server_->listen_after_bind();
}

void ApiServer::stop() {
    if (server_->is_running()) {
        server_->stop();
    }
}

}  // namespace nbhd
