#ifndef NBHD_SERVICE_HPP
#define NBHD_SERVICE_HPP

#include "nbhd/cell_table.hpp"
#include "nbhd/kmeans.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

namespace httplib {
class Server;
}

namespace nbhd {

struct ApiResponse {
    int status = 200;
    nlohmann::ordered_json body;
};

using QueryParams = std::map<std::string, std::string>;

/**
 * The single dataset a server process exposes. Readers work on an immutable
 * snapshot taken under a shared lock; reclustering is serialized through one
 * writer and publishes a new snapshot with the next version number.
 */
class Session {
public:
    struct Snapshot {
        CellTable table;
        Matrix embedding;  // N x 2
        ClusterModel clusters;
        std::uint64_t version = 0;
    };

    Session() = default;

    /** Loads cells.csv, embedding.csv and clusters.csv (or clusters afresh) from a pipeline output directory. */
    void load_artifacts(const std::string& dir);

    void load(CellTable table, Matrix embedding, ClusterModel clusters, std::uint64_t seed = 42,
              KMeansParams params = {});

    bool loaded() const;
    std::shared_ptr<const Snapshot> snapshot() const;

    ApiResponse points() const;
    ApiResponse expression(const QueryParams& query) const;
    ApiResponse recluster(const std::string& body);
    ApiResponse summaries(const QueryParams& query) const;
    ApiResponse meta() const;

private:
    mutable std::shared_mutex lock_;
    std::mutex writer_;
    std::shared_ptr<const Snapshot> current_;
    std::uint64_t seed_ = 42;
    KMeansParams kmeans_params_;
};

/** Error body: {"error": {"code", "message", ...extra}}. */
ApiResponse api_error(int status, const std::string& code, const std::string& message,
                      nlohmann::ordered_json extra = nlohmann::ordered_json::object());

/**
 * HTTP front end: GET /points, GET /expression, POST /recluster,
 * GET /summaries and GET /meta, all with JSON bodies.
 */
class ApiServer {
public:
    explicit ApiServer(Session& session);
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /** Binds the socket; port 0 picks a free port. Returns the bound port. */
    int bind(const std::string& host, int port);

    /** Blocks serving requests until `stop` is called from another thread. */
    void listen();

    void stop();

private:
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace nbhd

#endif
