#include "nbhd/config.hpp"
#include "nbhd/error.hpp"
#include "nbhd/pipeline.hpp"
#include "nbhd/simulation.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>

using namespace nbhd;
namespace fs = std::filesystem;

namespace {

// A small labelled tissue written as an input CSV, with coordinates spread over ~[-300, 300].
std::string write_input(const testing::TempDir& dir, std::size_t n = 250) {
    SimulationParams p;
    p.n_cells = n;
    p.n_proteins = 6;
    p.center_var = 10000.0;
    p.cluster_var = 2000.0;
    auto table = simulate(p);
    const auto path = dir.file("cells_in.csv");
    write_cells_csv(table, path);
    return path;
}

PipelineConfig small_config(const testing::TempDir& dir) {
    PipelineConfig c;
    c.input.path = write_input(dir);
    c.neighborhood.radius = 80.0;
    c.network.edge_threshold = 40.0;
    c.embedding.epochs = 60;
    c.clustering.k = 4;
    c.output = dir.file("out");
    return c;
}

std::pair<std::string, int> run_cli(const std::string& args) {
    const std::string cmd = std::string(NBHD_CLI) + " " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    while (pipe && std::fgets(buf, sizeof buf, pipe)) {
        out += buf;
    }
    const int status = pipe ? ::pclose(pipe) : -1;
    return {out, WIFEXITED(status) ? WEXITSTATUS(status) : -1};
}

}  // namespace

TEST_CASE("config defaults carry the analysis settings") {
    const PipelineConfig c;
    CHECK(c.pca.variance_target == 0.9);
    CHECK(c.neighborhood.radius == 60.0);
    CHECK(c.neighborhood.k_max == 40u);
    CHECK(c.quantiles.count == 17);
    CHECK(c.network.edge_threshold == 30.0);
    CHECK(c.assembly.quantile == "none");
    CHECK(c.assembly.network == "zscore");
    CHECK(c.clustering.k == 5);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("config survives a file round trip") {
    testing::TempDir dir("cfg");
    PipelineConfig c;
    c.input.path = "data/x.csv";
    c.input.schema.expression = {"CD45", "CD3"};
    c.neighborhood.k_max.reset();
    c.network.statistics = {"degree", "betweenness"};
    c.embedding.min_dist = 0.25;
    c.clustering.seed = 123456789012345ULL;
    c.simulation.params.type_probs = {0.25, 0.75};
    c.simulation.compare_seeds = {7, 9};
    c.quantiles = {0.05, 0.95, 19};
    save_config(c, dir.file("c.json"));
    const auto back = load_config(dir.file("c.json"));
    CHECK(back == c);
    CHECK_FALSE(back.neighborhood.k_max.has_value());
    CHECK(to_json(back).dump() == to_json(c).dump());
}

TEST_CASE("config files are strict") {
    testing::TempDir dir("strict");
    testing::write_text(dir.file("a.json"), R"({"neighborhood": {"radius": 30, "radious": 2}})");
    CHECK_THROWS_AS(load_config(dir.file("a.json")), Error);
    testing::write_text(dir.file("b.json"), R"({"clustering": {"k": "five"}})");
    CHECK_THROWS_AS(load_config(dir.file("b.json")), Error);
    testing::write_text(dir.file("c.json"), R"({"neighborhood": {"radius": -1}})");
    try {
        load_config(dir.file("c.json"));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Validation);
        CHECK(std::string(e.what()).find("neighborhood.radius") != std::string::npos);
    }
    testing::write_text(dir.file("d.json"), "{not json");
    CHECK_THROWS_AS(load_config(dir.file("d.json")), Error);
    testing::write_text(dir.file("e.json"), R"({"neighborhood": {"radius": 25}})");
    const auto partial = load_config(dir.file("e.json"));
    CHECK(partial.neighborhood.radius == 25.0);
    CHECK(partial.neighborhood.k_max == 40u);
}

TEST_CASE("dotted keys set values from text") {
    PipelineConfig c;
    set_config_value(c, "neighborhood.radius", "12.5");
    CHECK(c.neighborhood.radius == 12.5);
    set_config_value(c, "neighborhood.k_max", "null");
    CHECK_FALSE(c.neighborhood.k_max.has_value());
    set_config_value(c, "network.statistics", "degree,lobby");
    CHECK(c.network.statistics == std::vector<std::string>{"degree", "lobby"});
    set_config_value(c, "input.id", "123");
    CHECK(c.input.schema.id == "123");
    set_config_value(c, "simulation.type_probs", "[0.5, 0.5]");
    CHECK(c.simulation.params.type_probs == std::vector<double>{0.5, 0.5});
    CHECK_THROWS_AS(set_config_value(c, "neighborhood.size", "3"), Error);
    CHECK_THROWS_AS(set_config_value(c, "clustering.k", "0"), Error);
    CHECK_THROWS_AS(set_config_value(c, "assembly.network", "minmax"), Error);
}

TEST_CASE("stage names") {
    for (auto s : {Stage::Run, Stage::Featurize, Stage::Embed, Stage::Cluster, Stage::Simulate, Stage::Compare}) {
        CHECK(parse_stage(to_string(s)) == s);
    }
    CHECK_THROWS_AS(parse_stage("serve"), Error);
}

TEST_CASE("a full run writes every artifact and replays byte-for-byte") {
    testing::TempDir dir("run");
    const auto config = small_config(dir);
    const auto manifest = run_stage(Stage::Run, config);
    CHECK(manifest.at("status") == "OK");
    const auto& shapes = manifest.at("shapes");
    CHECK(shapes.at("network_block") == nlohmann::json::array({250, 29}));
    const fs::path out(config.output);
    for (const char* f : {"cells.csv", "reduced.csv", "pca.json", "quantile_block.csv", "network_block.csv",
                          "neighborhood_matrix.csv", "block_spans.json", "embedding.csv", "clusters.csv",
                          "summaries.json", "manifest.json"}) {
        CHECK_MESSAGE(fs::exists(out / f), f);
    }
    std::map<std::string, std::string> before;
    for (const auto& [name, hash] : manifest.at("outputs").items()) {
        before[name] = hash.get<std::string>();
        CHECK(sha256_file((out / name).string()) == before[name]);
    }
    CHECK(before.size() >= 10);

    const auto replayed = replay_manifest((out / "manifest.json").string());
    CHECK(replayed.at("status") == "OK");
    for (const auto& [name, hash] : before) {
        CHECK_MESSAGE(sha256_file((out / name).string()) == hash, name);
    }
}

TEST_CASE("stages compose and agree with the single run") {
    testing::TempDir dir("stages");
    auto config = small_config(dir);
    run_stage(Stage::Run, config);
    const auto whole = testing::read_text(config.output + "/clusters.csv");
    config.output = dir.file("staged");
    run_stage(Stage::Featurize, config);
    run_stage(Stage::Embed, config);
    const auto m = run_stage(Stage::Cluster, config);
    CHECK(m.at("status") == "OK");
    CHECK(testing::read_text(config.output + "/clusters.csv") == whole);
}

TEST_CASE("a failing stage leaves a FAILED manifest") {
    testing::TempDir dir("fail");
    auto config = small_config(dir);
    config.output = dir.file("nothing_here");
    CHECK_THROWS(run_stage(Stage::Embed, config));
    const auto doc = nlohmann::json::parse(testing::read_text(config.output + "/manifest.json"));
    CHECK(doc.at("status") == "FAILED");
    CHECK(doc.at("error").get<std::string>().find("neighborhood_matrix.csv") != std::string::npos);

    config.input.path = dir.file("missing.csv");
    CHECK_THROWS(run_stage(Stage::Run, config));
}

TEST_CASE("the CLI applies file, flag and --set precedence") {
    testing::TempDir dir("cli");
    testing::write_text(dir.file("c.json"), R"({"neighborhood": {"radius": 20}, "clustering": {"k": 3}})");
    auto [out, code] = run_cli("config -c " + dir.file("c.json") + " --clustering.k 8");
    CHECK(code == 0);
    auto doc = nlohmann::json::parse(out);
    CHECK(doc["neighborhood"]["radius"] == 20.0);
    CHECK(doc["clustering"]["k"] == 8);

    std::tie(out, code) = run_cli("config -c " + dir.file("c.json") + " --clustering.k 8 --set clustering.k=9");
    CHECK(nlohmann::json::parse(out)["clustering"]["k"] == 9);

    std::tie(out, code) = run_cli("config --clustering.k 0");
    CHECK(code == 2);
    std::tie(out, code) = run_cli("config --set no.such=1");
    CHECK(code == 2);
    std::tie(out, code) = run_cli("replay " + dir.file("absent.json"));
    CHECK(code == 1);
}

TEST_CASE("the CLI simulate stage reports the expected shapes") {
    testing::TempDir dir("clisim");
    auto [out, code] = run_cli("simulate --simulation.n_cells 400 --embedding.epochs 40 --output " + dir.file("o"));
    CHECK(code == 0);
    CHECK(out.find("expression: 400 x 5") != std::string::npos);
    CHECK(out.find("quantile_block: 400 x 105") != std::string::npos);
    CHECK(fs::exists(dir.file("o") + "/clusters.csv"));
}
