#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dcornet/distance.hpp"
#include "dcornet/panel.hpp"

namespace dcornet {

// Per-node quantities computed once and shared read-only by every pair search.
struct NodeCache {
    std::string name;
    DistanceMatrix dist;
    CenteredMatrix ucentered;
    double self_inner = 0.0;  // <A~, A~>
};

class NodeDataset {
public:
    explicit NodeDataset(const std::vector<NodeMatrix>& nodes);

    std::size_t node_count() const { return nodes_.size(); }
    Eigen::Index sample_count() const { return samples_; }
    const NodeCache& node(std::size_t i) const { return nodes_[i]; }
    std::vector<std::string> names() const;

private:
    std::vector<NodeCache> nodes_;
    Eigen::Index samples_ = 0;
};

enum class TieRule {
    SmallestSubset,   // equal weights: fewer members wins, then lexicographically smaller ids
    FirstEncountered  // keep the first subset in enumeration order
};

enum class TestAt { Argmin, Empty };

struct EdgeRecord {
    std::size_t source = 0;  // source < target
    std::size_t target = 0;
    double weight = 0.0;
    double unconditional = 0.0;  // pdcor given the empty set
    std::vector<std::size_t> argmin_subset;  // sorted node ids
    std::optional<double> p_value;
    std::uint64_t evaluated_subsets = 0;
    bool pruned = false;
    double audit_max_error = 0.0;  // largest relative accumulator drift seen by audits
};

struct EdgeSearchOptions {
    std::optional<std::size_t> max_size;  // nullopt: all subsets
    TieRule tie_rule = TieRule::SmallestSubset;
    // Rebuild the joint squared-distance accumulator from scratch this often.
    std::size_t rematerialize_every = 4096;
    // Compare the accumulator against a from-scratch sum every k subsets (0: off).
#ifdef NDEBUG
    std::size_t audit_every = 0;
#else
    std::size_t audit_every = 1000;
#endif
};

// Minimum pdcor(x, y | Z) over Z drawn from the other nodes, enumerated in Gray
// order with an incrementally updated joint squared-distance accumulator.
EdgeRecord min_pdcor_edge(std::size_t x, std::size_t y, const NodeDataset& data, const EdgeSearchOptions& options);

using ProgressCallback = std::function<void(std::uint64_t done, std::uint64_t total)>;

struct NetworkConfig {
    std::optional<std::size_t> max_cond_size;  // nullopt: automatic
    bool exhaustive = false;
    double threshold = 0.0;       // edges with weight <= threshold are pruned
    std::size_t permutations = 0;  // 0 disables significance testing
    std::optional<double> alpha;   // prune edges with p > alpha when set
    TestAt test_at = TestAt::Argmin;
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0: hardware concurrency
    TieRule tie_rule = TieRule::SmallestSubset;
    EdgeSearchOptions search{};  // max_size inside is overwritten by the resolved cap
    ProgressCallback progress;
    std::uint64_t progress_interval = 1U << 16;  // subsets between progress calls
};

inline constexpr std::size_t kAutoExhaustiveNodes = 12;
inline constexpr std::size_t kDefaultLargeGraphCap = 3;

// Unlimited for up to 12 nodes or when exhaustive, otherwise the configured
// cap, defaulting to 3.
std::optional<std::size_t> resolve_max_size(std::size_t node_count, const NetworkConfig& config);

struct DependencyGraph {
    std::vector<std::string> nodes;
    Eigen::Index samples = 0;
    std::optional<std::size_t> max_cond_size;
    std::vector<EdgeRecord> edges;  // canonical (i < j) lexicographic pair order
    std::string config_fingerprint;

    std::uint64_t total_evaluated_subsets() const;
};

// Position of pair (i, j), i < j, in canonical edge order.
std::size_t edge_index(std::size_t i, std::size_t j, std::size_t node_count);

// Hash of every setting that affects the analytical result (threads excluded).
std::string network_fingerprint(const NetworkConfig& config, const std::vector<std::string>& nodes,
                                Eigen::Index samples);

DependencyGraph build_network(const NodeDataset& data, const NetworkConfig& config);
DependencyGraph build_network(const std::vector<NodeMatrix>& nodes, const NetworkConfig& config);

}  // namespace dcornet
