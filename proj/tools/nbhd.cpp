// nbhd: command-line front end for the neighborhood featurization pipeline.

#include "nbhd/config.hpp"
#include "nbhd/error.hpp"
#include "nbhd/pipeline.hpp"
#include "nbhd/service.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

// Dotted leaf keys of the config document, in document order.
void collect_keys(const nlohmann::ordered_json& node, const std::string& prefix, std::vector<std::string>& out) {
    for (const auto& item : node.items()) {
        const auto key = prefix.empty() ? item.key() : prefix + "." + item.key();
        if (item.value().is_object()) {
            collect_keys(item.value(), key, out);
        } else {
            out.push_back(key);
        }
    }
}

void print_manifest(const nlohmann::ordered_json& manifest) {
    std::cout << "stage " << manifest["stage"].get<std::string>() << ": " << manifest["status"].get<std::string>()
              << "\n";
    for (const auto& [name, shape] : manifest["shapes"].items()) {
        std::cout << "  " << name << ": " << shape[0] << " x " << shape[1] << "\n";
    }
    std::cout << "  output: " << manifest["config"]["output"].get<std::string>() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neighborhood featurization, embedding and clustering of spatial omics tables"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    if (const char* env = std::getenv("NBHD_CONFIG")) {
        config_path = env;
    }
    app.add_option("-c,--config", config_path, "Config JSON or run manifest (default: $NBHD_CONFIG)");

    std::vector<std::string> sets;
    app.add_option("--set", sets, "Override a config key: key=value (repeatable)");

    // Every config key is also a flag of the same dotted name.
    std::vector<std::string> keys;
    collect_keys(nbhd::to_json(nbhd::PipelineConfig{}), "", keys);
    std::map<std::string, std::string> flag_values;
    for (const auto& key : keys) {
        app.add_option("--" + key, flag_values[key], "config key " + key)->group("Config keys");
    }

    std::map<std::string, nbhd::Stage> stages{
        {"run", nbhd::Stage::Run},           {"featurize", nbhd::Stage::Featurize},
        {"embed", nbhd::Stage::Embed},       {"cluster", nbhd::Stage::Cluster},
        {"simulate", nbhd::Stage::Simulate}, {"compare", nbhd::Stage::Compare},
    };
    std::map<std::string, std::string> help{
        {"run", "featurize, embed and cluster an input table"},
        {"featurize", "write quantile, network and assembled neighborhood matrices"},
        {"embed", "embed neighborhood_matrix.csv from the output directory"},
        {"cluster", "cluster embedding.csv and write summaries"},
        {"simulate", "simulate a tissue, featurize, embed and cluster it"},
        {"compare", "cell-level vs neighborhood comparison over simulation seeds"},
    };
    for (const auto& [name, stage] : stages) {
        app.add_subcommand(name, help[name]);
    }
    auto* show = app.add_subcommand("config", "print the effective config as JSON");
    auto* replay = app.add_subcommand("replay", "rerun the stage recorded in a manifest");
    std::string manifest_path;
    replay->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();

    auto* serve = app.add_subcommand("serve", "serve an artifact directory over HTTP");
    std::string artifacts;
    std::string host = "127.0.0.1";
    int port = 8080;
    serve->add_option("--artifacts", artifacts, "artifact directory (default: config output)");
    serve->add_option("--host", host, "bind address");
    serve->add_option("--port", port, "port (0 picks a free one)")->check(CLI::Range(0, 65535));

    CLI11_PARSE(app, argc, argv);

    try {
        if (replay->parsed()) {
            print_manifest(nbhd::replay_manifest(manifest_path));
            return 0;
        }

        nbhd::PipelineConfig config;
        if (!config_path.empty()) {
            config = nbhd::load_config(config_path);
        }
        for (const auto& key : keys) {
            if (app.count("--" + key) > 0) {
                nbhd::set_config_value(config, key, flag_values[key]);
            }
        }
        for (const auto& item : sets) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) {
                throw nbhd::Error(nbhd::ErrorKind::Validation, "--set expects key=value, got '" + item + "'");
            }
            nbhd::set_config_value(config, item.substr(0, eq), item.substr(eq + 1));
        }
        config.validate();

        if (show->parsed()) {
            std::cout << nbhd::to_json(config).dump(2) << "\n";
            return 0;
        }
        if (serve->parsed()) {
            nbhd::Session session;
            session.load_artifacts(artifacts.empty() ? config.output : artifacts);
            nbhd::ApiServer server(session);
            const int bound = server.bind(host, port);
            std::cout << "serving " << session.snapshot()->table.size() << " cells on http://" << host << ":"
                      << bound << std::endl;
            server.listen();
            return 0;
        }
        for (const auto& [name, stage] : stages) {
            if (app.got_subcommand(name)) {
                print_manifest(nbhd::run_stage(stage, config));
                return 0;
            }
        }
    } catch (const nbhd::Error& e) {
        std::cerr << "error (" << nbhd::to_string(e.kind()) << "): " << e.what() << "\n";
        return e.kind() == nbhd::ErrorKind::Validation || e.kind() == nbhd::ErrorKind::Schema ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
