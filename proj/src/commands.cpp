#include "dcornet/commands.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "dcornet/csv.hpp"
#include "dcornet/error.hpp"
#include "dcornet/graph_io.hpp"

namespace dcornet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path out_path(const RunConfig& config, const char* name) {
    return fs::path(config.out) / name;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    return out;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string cache_fingerprint(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("panel cache '" + path.string() + "' not found; run `ingest` first");
    std::string first;
    std::getline(in, first);
    const std::string tag = "# ingest_fingerprint=";
    if (first.rfind(tag, 0) != 0) throw InputError("panel cache '" + path.string() + "' lacks a fingerprint line");
    return first.substr(tag.size());
}

}  // namespace

IngestSummary cmd_ingest(const RunConfig& config) {
    if (config.panel.empty() || config.node_map.empty()) throw InputError("ingest: `panel` and `node_map` are required");
    const auto node_map = load_node_map(config.node_map);
    const auto raw = load_panel(config.panel, node_map, config.schema);
    auto imputed = impute_missing(raw, config.epsilon);
    const Panel panel = config.standardize ? standardize(imputed.panel) : imputed.panel;

    fs::create_directories(config.out);
    const std::string fingerprint = config.fingerprint();
    {
        auto out = open_out(out_path(config, kPanelCacheFile));
        out << "# ingest_fingerprint=" << config.ingest_fingerprint() << "\n"
            << "# config_fingerprint=" << fingerprint << "\n"
            << "entity,indicator,year,value\n";
        for (std::size_t k = 0; k < panel.indicator_count(); ++k)
            for (std::size_t t = 0; t < panel.year_count(); ++t)
                for (std::size_t e = 0; e < panel.entity_count(); ++e) {
                    out << csv::escape(panel.entities()[e]) << ',' << csv::escape(panel.indicators()[k]) << ','
                        << panel.year_at(t) << ',' << json(panel.value(e, k, t)).dump() << '\n';
                }
    }

    IngestSummary summary;
    summary.entities = panel.entity_count();
    summary.indicators = panel.indicator_count();
    summary.years = panel.year_count();
    summary.imputed_cells = imputed.cells.size();
    std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>> per_cell;
    for (const auto& c : imputed.cells) {
        auto& slot = per_cell[{c.indicator, c.year}];
        ++slot.first;
        if (c.uniform_fallback) {
            ++slot.second;
            ++summary.uniform_fallback_cells;
        }
    }
    auto report = open_out(out_path(config, kIngestReportFile));
    report << "# config_fingerprint=" << fingerprint << "\n"
           << "indicator,year,imputed_cells,uniform_fallback_cells\n";
    for (const auto& [key, counts] : per_cell) {
        report << csv::escape(panel.indicators()[key.first]) << ',' << panel.year_at(key.second) << ','
               << counts.first << ',' << counts.second << '\n';
    }
    return summary;
}

NetworkSummary cmd_network(const RunConfig& config, std::ostream* progress) {
    if (config.node_map.empty()) throw InputError("network: `node_map` is required");
    const auto cache = out_path(config, kPanelCacheFile);
    if (cache_fingerprint(cache) != config.ingest_fingerprint()) {
        throw InputError("panel cache '" + cache.string() + "' is stale for this config; rerun `ingest`");
    }
    const auto node_map = load_node_map(config.node_map);
    const auto panel = load_panel(cache.string(), node_map);
    Grouping grouping;
    if (config.groupings.empty()) {
        if (config.grouping != "all") {
            throw InputError("grouping '" + config.grouping + "' requested but no groupings file configured");
        }
        grouping = all_entities(panel);
    } else {
        const auto groupings = load_groupings(config.groupings);
        const bool listed = std::any_of(groupings.begin(), groupings.end(),
                                        [&](const Grouping& g) { return g.name == config.grouping; });
        grouping = !listed && config.grouping == "all" ? all_entities(panel) : find_grouping(groupings, config.grouping);
    }
    const auto nodes = assemble_nodes(panel, grouping);

    NetworkConfig net = config.network_config();
    if (progress != nullptr) {
        net.progress = [progress](std::uint64_t done, std::uint64_t total) {
            *progress << "subsets " << done << "/" << total << "\n" << std::flush;
        };
    }
    const auto start = std::chrono::steady_clock::now();
    DependencyGraph graph = build_network(nodes, net);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string network_fp = graph.config_fingerprint;
    graph.config_fingerprint = config.fingerprint();

    {
        auto out = open_out(out_path(config, kGraphJsonFile));
        out << graph_to_json(graph);
    }
    if (config.wants("graphml")) {
        auto out = open_out(out_path(config, kGraphMlFile));
        write_graphml(out, graph);
    }
    if (config.wants("dot")) {
        auto out = open_out(out_path(config, kGraphDotFile));
        write_dot(out, graph);
    }
    if (config.wants("csv")) {
        auto out = open_out(out_path(config, kEdgesCsvFile));
        write_edges_csv(out, graph);
    }

    NetworkSummary summary;
    summary.nodes = graph.nodes.size();
    summary.edges = graph.edges.size();
    for (const auto& e : graph.edges) summary.retained_edges += e.pruned ? 0 : 1;
    summary.evaluated_subsets = graph.total_evaluated_subsets();
    summary.wall_seconds = wall;

    json manifest;
    manifest["config_fingerprint"] = graph.config_fingerprint;
    manifest["network_fingerprint"] = network_fp;
    manifest["grouping"] = grouping.name;
    manifest["samples"] = graph.samples;
    manifest["nodes"] = graph.nodes.size();
    manifest["edges"] = summary.edges;
    manifest["retained_edges"] = summary.retained_edges;
    manifest["max_cond_size"] = graph.max_cond_size ? json(*graph.max_cond_size) : json("unlimited");
    manifest["subsets_per_pair"] = graph.edges.empty() ? 0 : graph.edges.front().evaluated_subsets;
    manifest["evaluated_subsets"] = summary.evaluated_subsets;
    manifest["threads"] = config.threads;
    manifest["wall_seconds"] = wall;
    manifest["finished_at_unix"] = static_cast<std::int64_t>(std::time(nullptr));
    manifest["config"] = config.to_json();
    auto out = open_out(out_path(config, kManifestFile));
    out << manifest.dump(2) << "\n";
    return summary;
}

std::vector<RankedNode> cmd_centrality(const RunConfig& config) {
    const auto graph_path = out_path(config, kGraphJsonFile);
    if (!fs::exists(graph_path)) throw InputError("graph '" + graph_path.string() + "' not found; run `network` first");
    const auto graph = graph_from_json(read_text(graph_path));
    const auto scores = eigenvector_centrality(graph, config.centrality_options());
    auto ranked = rank_nodes(graph.nodes, scores);
    auto out = open_out(out_path(config, kCentralityFile));
    write_centrality_csv(out, ranked, graph.config_fingerprint);
    return ranked;
}

}  // namespace dcornet
