#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dcornet/centrality.hpp"
#include "dcornet/config.hpp"

namespace dcornet {

// File names inside RunConfig::out.
inline constexpr const char* kPanelCacheFile = "panel_cache.csv";
inline constexpr const char* kIngestReportFile = "ingest_report.csv";
inline constexpr const char* kGraphJsonFile = "graph.json";
inline constexpr const char* kGraphMlFile = "graph.graphml";
inline constexpr const char* kGraphDotFile = "graph.dot";
inline constexpr const char* kEdgesCsvFile = "edges.csv";
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kCentralityFile = "centrality.csv";

struct IngestSummary {
    std::size_t entities = 0;
    std::size_t indicators = 0;
    std::size_t years = 0;
    std::size_t imputed_cells = 0;
    std::size_t uniform_fallback_cells = 0;
};

// Load, impute, optionally standardize; writes the panel cache and a per
// (indicator, year) imputed-cell report.
IngestSummary cmd_ingest(const RunConfig& config);

struct NetworkSummary {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t retained_edges = 0;
    std::uint64_t evaluated_subsets = 0;
    double wall_seconds = 0.0;
};

// Reads the panel cache, assembles the grouping's node matrices and writes the
// graph exports plus manifest.json. Progress lines go to `progress`.
NetworkSummary cmd_network(const RunConfig& config, std::ostream* progress = nullptr);

// Reads graph.json, writes centrality.csv, returns the ranking.
std::vector<RankedNode> cmd_centrality(const RunConfig& config);

}  // namespace dcornet
