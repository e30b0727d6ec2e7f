#pragma once

#include <iosfwd>
#include <string>

#include "dcornet/network.hpp"

namespace dcornet {

// JSON layout:
// {
//   "config_fingerprint": "<16 hex>", "samples": n, "max_cond_size": k | null,
//   "nodes": ["A", ...],
//   "edges": [{"source": "A", "target": "B", "weight": w, "unconditional": u,
//              "argmin_subset": ["C"], "p_value": p | null,
//              "evaluated_subsets": m, "pruned": false}, ...]
// }
// Doubles are written in shortest round-trip form, so equal graphs serialize
// to identical bytes.
std::string graph_to_json(const DependencyGraph& graph);
DependencyGraph graph_from_json(const std::string& text);

// GraphML with weight/pruned/p_value/argmin edge attributes; pruned edges omitted.
void write_graphml(std::ostream& out, const DependencyGraph& graph);

// Undirected DOT; pen width proportional to weight, pruned edges omitted.
void write_dot(std::ostream& out, const DependencyGraph& graph);

// Flat edge table: source,target,weight,unconditional,argmin_subset,p_value,evaluated_subsets,pruned
void write_edges_csv(std::ostream& out, const DependencyGraph& graph);

}  // namespace dcornet
