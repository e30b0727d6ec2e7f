#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dcornet {

// Column names used to locate fields in the long-format panel CSV.
struct PanelSchema {
    std::string entity = "entity";
    std::string indicator = "indicator";
    std::string year = "year";
    std::string value = "value";
};

// indicator -> node assignment. Node order is first appearance in the file.
struct NodeMap {
    std::vector<std::string> nodes;
    std::vector<std::pair<std::string, std::size_t>> indicators;  // (indicator, node index)

    // Node index for an indicator, or npos when unassigned.
    std::size_t node_of(const std::string& indicator) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

struct Grouping {
    std::string name;
    std::vector<std::string> members;
};

// Dense entity x indicator x year tensor with an observation mask.
// Years are the contiguous range [first_year, first_year + year_count).
class Panel {
public:
    Panel() = default;
    Panel(std::vector<std::string> entities, std::vector<std::string> indicators,
          std::vector<std::size_t> indicator_node, std::vector<std::string> node_names,
          int first_year, std::size_t year_count);

    std::size_t entity_count() const { return entities_.size(); }
    std::size_t indicator_count() const { return indicators_.size(); }
    std::size_t year_count() const { return year_count_; }
    int first_year() const { return first_year_; }
    int year_at(std::size_t t) const { return first_year_ + static_cast<int>(t); }

    const std::vector<std::string>& entities() const { return entities_; }
    const std::vector<std::string>& indicators() const { return indicators_; }
    const std::vector<std::string>& node_names() const { return node_names_; }
    std::size_t node_of(std::size_t indicator) const { return indicator_node_[indicator]; }

    double value(std::size_t e, std::size_t k, std::size_t t) const { return values_[index(e, k, t)]; }
    bool observed(std::size_t e, std::size_t k, std::size_t t) const { return mask_[index(e, k, t)] != 0; }
    void set(std::size_t e, std::size_t k, std::size_t t, double v);
    void clear(std::size_t e, std::size_t k, std::size_t t);

    std::size_t missing_count() const;
    bool fully_observed() const { return missing_count() == 0; }
    std::size_t entity_index(const std::string& name) const;  // npos when absent

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::size_t index(std::size_t e, std::size_t k, std::size_t t) const {
        return (e * indicators_.size() + k) * year_count_ + t;
    }

    std::vector<std::string> entities_;
    std::vector<std::string> indicators_;
    std::vector<std::size_t> indicator_node_;
    std::vector<std::string> node_names_;
    int first_year_ = 0;
    std::size_t year_count_ = 0;
    std::vector<double> values_;
    std::vector<std::uint8_t> mask_;
};

// Samples for one network node: rows follow Grouping::members, columns are the
// node's indicators flattened indicator-major, year-minor.
struct NodeMatrix {
    std::string node;
    Eigen::MatrixXd data;
};

NodeMap load_node_map(const std::string& path);
std::vector<Grouping> load_groupings(const std::string& path);
const Grouping& find_grouping(const std::vector<Grouping>& groupings, const std::string& name);

// Parses the long-format panel. Blank or non-finite value cells stay unobserved;
// years absent from the file but inside [min, max] become all-missing slices.
Panel load_panel(const std::string& path, const NodeMap& node_map, const PanelSchema& schema = {});

struct ImputedCell {
    std::size_t entity;
    std::size_t indicator;
    std::size_t year;  // offset from first_year
    bool uniform_fallback;
};

struct ImputationResult {
    Panel panel;
    std::vector<ImputedCell> cells;
};

inline constexpr double kDefaultImputeEpsilon = 1e-9;

// Fills each missing cell with the inverse-distance weighted mean over the
// entities observing that (indicator, year). Entity distance is Euclidean over
// co-observed cells after per-indicator z-scoring; weight 1/(dist + epsilon).
// If any donor shares no observed cell with the recipient, the cell falls back
// to equal weights and is flagged.
ImputationResult impute_missing(const Panel& panel, double epsilon = kDefaultImputeEpsilon);

// Per-indicator z-score over all (entity, year) cells, population sd.
// Constant indicators become all zeros. Requires a fully observed panel.
Panel standardize(const Panel& panel);

// One NodeMatrix per node, in node order. Requires a fully observed panel and
// at least 4 members, all present in the panel.
std::vector<NodeMatrix> assemble_nodes(const Panel& panel, const Grouping& grouping);

// All entities of the panel, in panel order.
Grouping all_entities(const Panel& panel, std::string name = "all");

}  // namespace dcornet
