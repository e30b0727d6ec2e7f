#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcornet/centrality.hpp"
#include "dcornet/network.hpp"
#include "dcornet/panel.hpp"

namespace dcornet {

// Everything needed to reproduce a run. Serialized as a single JSON object;
// relative paths are resolved against the directory of the config file.
struct RunConfig {
    std::string panel;
    std::string node_map;
    std::string groupings;  // optional; without it only the "all" grouping exists
    std::string grouping = "all";
    std::string out = "out";
    PanelSchema schema;

    double epsilon = kDefaultImputeEpsilon;
    bool standardize = true;

    std::optional<std::size_t> max_cond_size;
    bool exhaustive = false;
    double threshold = 0.0;
    std::size_t permutations = 0;
    std::optional<double> alpha;
    TestAt test_at = TestAt::Argmin;
    std::uint64_t seed = 0;
    unsigned threads = 0;

    double tol = 1e-12;
    std::size_t max_iter = 10000;
    Normalization normalization = Normalization::Euclidean;

    std::vector<std::string> formats{"json", "graphml", "dot", "csv"};
    std::size_t top = 0;  // rows printed by `centrality`; 0 prints all

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);

    // Hash of the analytical settings and input file contents. Threads, output
    // location, export formats and `top` are excluded.
    std::string fingerprint() const;
    // Hash of the settings that determine the ingested panel cache.
    std::string ingest_fingerprint() const;

    NetworkConfig network_config() const;
    CentralityOptions centrality_options() const;
    bool wants(const std::string& format) const;
};

inline constexpr const char* kEnvPrefix = "DCORNET_";

// Parses a config file and rebases its relative paths onto the file's directory.
nlohmann::json read_config_file(const std::string& path);

// Overlays DCORNET_<KEY> variables (key upper-cased) onto `j`. Values are read
// as JSON scalars when they parse as such, else as strings; FORMATS accepts a
// comma-separated list.
void apply_env_overrides(nlohmann::json& j, const std::function<const char*(const char*)>& getenv_fn);

std::string hash_file(const std::string& path);

}  // namespace dcornet
