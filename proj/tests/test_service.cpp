#include "nbhd/embedding.hpp"
#include "nbhd/service.hpp"
#include "nbhd/simulation.hpp"
#include "support.hpp"

#include <doctest.h>
#include <httplib.h>

#include <thread>

using namespace nbhd;

namespace {

void load_small(Session& s, std::size_t n = 200) {
    SimulationParams p;
    p.n_cells = n;
    auto table = simulate(p);
    EmbeddingParams e;
    e.reducer = "pca";
    auto coords = embed(table.expression, e).coords;
    auto clusters = kmeans(coords, 4, 42);
    s.load(std::move(table), std::move(coords), std::move(clusters), 42);
}

std::string code_of(const ApiResponse& r) {
    return r.body.at("error").at("code").get<std::string>();
}

}  // namespace

TEST_CASE("every endpoint refuses without a session") {
    Session s;
    CHECK_FALSE(s.loaded());
    for (const auto& r : {s.points(), s.expression({{"feature", "protein_1"}}), s.summaries({}), s.meta()}) {
        CHECK(r.status == 409);
        CHECK(code_of(r) == "NO_SESSION");
    }
    const auto r = s.recluster(R"({"k": 3})");
    CHECK(r.status == 409);
}

TEST_CASE("points, meta and expression payloads") {
    Session s;
    load_small(s);
    const auto pts = s.points();
    CHECK(pts.status == 200);
    REQUIRE(pts.body["points"].size() == 200);
    const auto& first = pts.body["points"][0];
    for (const char* key : {"id", "x", "y", "embed_x", "embed_y", "cell_type", "cluster"}) {
        CHECK(first.contains(key));
    }
    CHECK(first["id"] == "cell_1");
    const auto snap = s.snapshot();
    CHECK(first["x"].get<double>() == snap->table.coords(0, 0));

    const auto meta = s.meta();
    CHECK(meta.body["n"] == 200);
    CHECK(meta.body["k"] == 4);
    CHECK(meta.body["features"].size() == 5);

    const auto e = s.expression({{"feature", "protein_3"}});
    CHECK(e.status == 200);
    CHECK(e.body["values"].size() == 200);
    CHECK(e.body["values"][5].get<double>() == snap->table.expression(5, 2));
    CHECK(s.expression({}).status == 400);
    CHECK(code_of(s.expression({{"feature", "CD45"}})) == "UNKNOWN_FEATURE");
}

TEST_CASE("recluster bounds, versions and idempotence") {
    Session s;
    load_small(s);
    const auto v0 = s.meta().body["version"].get<std::uint64_t>();
    auto bad = s.recluster(R"({"k": 0})");
    CHECK(bad.status == 400);
    CHECK(code_of(bad) == "VALIDATION");
    CHECK(bad.body["error"]["min"] == 1);
    CHECK(bad.body["error"]["max"] == 200);
    CHECK(s.recluster(R"({"k": 201})").status == 400);
    CHECK(s.recluster("not json").status == 400);
    CHECK(s.recluster(R"({"k": 2.5})").status == 400);
    CHECK(s.meta().body["version"] == v0);

    const auto one = s.recluster(R"({"k": 1})");
    CHECK(one.status == 200);
    for (const auto& a : one.body["assignments"]) {
        CHECK(a == 1);
    }
    const auto a = s.recluster(R"({"k": 5})");
    const auto b = s.recluster(R"({"k": 5})");
    CHECK(a.body["assignments"] == b.body["assignments"]);
    CHECK(a.body["inertia"] == b.body["inertia"]);
    CHECK(b.body["version"].get<std::uint64_t>() == a.body["version"].get<std::uint64_t>() + 1);
    for (const auto& size : a.body["cluster_sizes"]) {
        CHECK(size.get<int>() > 0);
    }
}

TEST_CASE("concurrent reclusters are serialized; the last version wins") {
    Session s;
    load_small(s, 400);
    ApiResponse r4;
    ApiResponse r6;
    std::thread t1([&] { r4 = s.recluster(R"({"k": 4})"); });
    t1.join();
    std::thread t2([&] { r6 = s.recluster(R"({"k": 6})"); });
    std::vector<std::thread> readers;
    for (int i = 0; i < 4; ++i) {
        readers.emplace_back([&] {
            for (int j = 0; j < 20; ++j) {
                const auto p = s.points();
                const auto k = p.body["k"].get<int>();
                for (const auto& pt : p.body["points"]) {
                    CHECK(pt["cluster"].get<int>() <= k);
                }
            }
        });
    }
    t2.join();
    for (auto& t : readers) {
        t.join();
    }
    CHECK(r4.body["version"].get<std::uint64_t>() < r6.body["version"].get<std::uint64_t>());
    CHECK(s.meta().body["k"] == 6);
    CHECK(s.meta().body["version"] == r6.body["version"]);
}

TEST_CASE("summaries: heatmap, structure, histogram and errors") {
    Session s;
    load_small(s);
    const auto all = s.summaries({{"top_n", "3"}, {"feature", "protein_2"}, {"bins", "8"}});
    REQUIRE(all.status == 200);
    CHECK(all.body["heatmap"].size() == 3);
    CHECK(all.body["clusters"].size() == 4);
    CHECK(all.body["histogram"]["edges"].size() == 9);
    std::size_t total = 0;
    for (const auto& c : all.body["histogram"]["counts"]) {
        total += c.get<std::size_t>();
    }
    CHECK(total == 200);
    for (const auto& row : all.body["structure"]["fractions"]) {
        double sum = 0.0;
        for (const auto& f : row) {
            sum += f.get<double>();
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
    CHECK(all.body.dump() == s.summaries({{"top_n", "3"}, {"feature", "protein_2"}, {"bins", "8"}}).body.dump());

    const auto two = s.summaries({{"clusters", "1,3"}});
    CHECK(two.body["clusters"] == nlohmann::json::array({1, 3}));
    CHECK(two.body["heatmap"].size() == 5);
    CHECK(two.body["histogram"].is_null());

    CHECK(code_of(s.summaries({{"clusters", "2"}})) == "NEED_TWO_CLUSTERS");
    CHECK(code_of(s.summaries({{"cell_types", "nope"}})) == "EMPTY_SELECTION");
    CHECK(code_of(s.summaries({{"clusters", "1,9"}})) == "VALIDATION");
    CHECK(code_of(s.summaries({{"top_n", "0"}})) == "VALIDATION");
    CHECK(code_of(s.summaries({{"bins", "x"}})) == "VALIDATION");
    CHECK(code_of(s.summaries({{"feature", "CD45"}})) == "UNKNOWN_FEATURE");
}

TEST_CASE("artifacts directory loads cells, embedding and clusters") {
    testing::TempDir dir("svc");
    SimulationParams p;
    p.n_cells = 120;
    const auto table = simulate(p);
    write_cells_csv(table, dir.file("cells.csv"));
    testing::write_text(dir.file("embedding.csv"), [&] {
        std::string text = "id,x,y\n";
        for (std::size_t i = 0; i < 120; ++i) {
            text += table.ids[i] + "," + std::to_string(i % 7) + "," + std::to_string(i / 7) + "\n";
        }
        return text;
    }());
    Session s;
    s.load_artifacts(dir.path().string());
    CHECK(s.loaded());
    CHECK(s.meta().body["n"] == 120);
    CHECK(s.meta().body["k"] == 5);
    Session empty;
    CHECK_THROWS(empty.load_artifacts(dir.file("nowhere")));
}

TEST_CASE("the HTTP server exposes the endpoints") {
    Session s;
    load_small(s);
    ApiServer server(s);
    const int port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread th([&] { server.listen(); });

    httplib::Client client("127.0.0.1", port);
    client.set_connection_timeout(5);
    auto res = client.Get("/meta");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Content-Type").find("application/json") == 0);
    CHECK(nlohmann::json::parse(res->body)["n"] == 200);

    res = client.Get("/points");
    REQUIRE(res);
    CHECK(nlohmann::json::parse(res->body)["points"].size() == 200);

    res = client.Get("/expression?feature=protein_1");
    REQUIRE(res);
    CHECK(res->status == 200);
    res = client.Get("/expression?feature=unknown");
    REQUIRE(res);
    CHECK(res->status == 404);

    res = client.Post("/recluster", R"({"k": 3})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(nlohmann::json::parse(res->body)["k"] == 3);
    res = client.Post("/recluster", R"({"k": -1})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);

    res = client.Get("/summaries?clusters=1,2&top_n=2&feature=protein_4");
    REQUIRE(res);
    CHECK(res->status == 200);
    const auto body = nlohmann::json::parse(res->body);
    CHECK(body["heatmap"].size() == 2);
    CHECK(body["histogram"]["feature"] == "protein_4");
    res = client.Get("/summaries?clusters=2");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(nlohmann::json::parse(res->body)["error"]["code"] == "NEED_TWO_CLUSTERS");

    res = client.Get("/no-such-endpoint");
    REQUIRE(res);
    CHECK(res->status == 404);

    server.stop();
    th.join();
}
