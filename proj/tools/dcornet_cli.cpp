// dcornet: ingest -> network -> centrality pipeline.
//
// Exit codes: 0 success, 2 input/usage error, 3 numerical degeneracy, 1 other.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dcornet/commands.hpp"
#include "dcornet/config.hpp"
#include "dcornet/error.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
    std::string config;
    std::optional<std::string> grouping;
    std::optional<std::string> out;
    std::optional<std::size_t> max_cond_size;
    bool exhaustive = false;
    std::optional<double> threshold;
    std::optional<std::size_t> permutations;
    std::optional<double> alpha;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::vector<std::string> formats;
    std::optional<std::size_t> top;
};

void add_options(CLI::App& app, Overrides& o) {
    app.add_option("--config", o.config, "Run config (JSON)");
    app.add_option("--grouping", o.grouping, "Grouping name");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--max-cond-size", o.max_cond_size, "Largest conditioning subset");
    app.add_flag("--exhaustive", o.exhaustive, "Enumerate every conditioning subset");
    app.add_option("--threshold", o.threshold, "Prune edges with weight <= threshold");
    app.add_option("--permutations", o.permutations, "Permutations per edge test (0 disables)");
    app.add_option("--alpha", o.alpha, "Prune edges with p-value above alpha");
    app.add_option("--seed", o.seed, "Master seed");
    app.add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    app.add_option("--format", o.formats, "Export formats")
        ->check(CLI::IsMember({"json", "graphml", "dot", "csv"}))
        ->take_all();
    app.add_option("--top", o.top, "Centrality rows printed to stdout (0 = all)");
}

dcornet::RunConfig resolve(const Overrides& o) {
    nlohmann::json j = o.config.empty() ? nlohmann::json::object() : dcornet::read_config_file(o.config);
    dcornet::apply_env_overrides(j, [](const char* name) { return std::getenv(name); });
    if (o.grouping) j["grouping"] = *o.grouping;
    if (o.out) j["out"] = *o.out;
    if (o.max_cond_size) j["max_cond_size"] = *o.max_cond_size;
    if (o.exhaustive) j["exhaustive"] = true;
    if (o.threshold) j["threshold"] = *o.threshold;
    if (o.permutations) j["permutations"] = *o.permutations;
    if (o.alpha) j["alpha"] = *o.alpha;
    if (o.seed) j["seed"] = *o.seed;
    if (o.threads) j["threads"] = *o.threads;
    if (!o.formats.empty()) j["formats"] = o.formats;
    if (o.top) j["top"] = *o.top;
    return dcornet::RunConfig::from_json(j);
}

void run_ingest(const dcornet::RunConfig& config) {
    const auto s = dcornet::cmd_ingest(config);
    std::cout << "entities=" << s.entities << "\n"
              << "indicators=" << s.indicators << "\n"
              << "years=" << s.years << "\n"
              << "imputed_cells=" << s.imputed_cells << "\n"
              << "uniform_fallback_cells=" << s.uniform_fallback_cells << "\n";
}

void run_network(const dcornet::RunConfig& config) {
    const auto s = dcornet::cmd_network(config, &std::cerr);
    std::cout << "nodes=" << s.nodes << "\n"
              << "edges=" << s.edges << "\n"
              << "retained_edges=" << s.retained_edges << "\n"
              << "evaluated_subsets=" << s.evaluated_subsets << "\n";
}

void run_centrality(const dcornet::RunConfig& config) {
    const auto ranked = dcornet::cmd_centrality(config);
    std::cout << "rank,node,score\n";
    const std::size_t rows = config.top == 0 ? ranked.size() : std::min(config.top, ranked.size());
    for (std::size_t i = 0; i < rows; ++i) {
        std::cout << ranked[i].rank << ',' << ranked[i].node << ',' << ranked[i].score << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Partial distance correlation networks and eigenvector centrality"};
    app.require_subcommand(1);
    Overrides o;

    auto* ingest = app.add_subcommand("ingest", "Impute and standardize the panel; write the panel cache");
    auto* network = app.add_subcommand("network", "Build the dependence network from the panel cache");
    auto* centrality = app.add_subcommand("centrality", "Rank nodes by weighted eigenvector centrality");
    auto* run_all = app.add_subcommand("run-all", "ingest, network and centrality in sequence");
    for (auto* sub : {ingest, network, centrality, run_all}) add_options(*sub, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        const auto config = resolve(o);
        if (ingest->parsed() || run_all->parsed()) run_ingest(config);
        if (network->parsed() || run_all->parsed()) run_network(config);
        if (centrality->parsed() || run_all->parsed()) run_centrality(config);
    } catch (const dcornet::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const dcornet::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
