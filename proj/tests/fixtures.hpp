#pragma once

#include <string>
#include <vector>

#include "dcornet/panel.hpp"

namespace fixture {

inline std::string data_path(const std::string& rel) { return std::string(DCORNET_TEST_DATA) + "/" + rel; }

// Six-node planted panel: A-B, B-C and D-E dependent, F isolated. 80 entities.
inline std::vector<dcornet::NodeMatrix> planted6_nodes() {
    const auto map = dcornet::load_node_map(data_path("planted6/nodes.csv"));
    const auto raw = dcornet::load_panel(data_path("planted6/panel.csv"), map);
    const auto panel = dcornet::standardize(dcornet::impute_missing(raw).panel);
    return dcornet::assemble_nodes(panel, dcornet::all_entities(panel));
}

}  // namespace fixture
