#include "dcornet/graph_io.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "dcornet/csv.hpp"
#include "dcornet/error.hpp"

namespace dcornet {

namespace {

using nlohmann::json;

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string shortest(double v) {
    // same shortest round-trip form nlohmann uses for JSON numbers
    return json(v).dump();
}

std::string subset_label(const DependencyGraph& g, const EdgeRecord& e) {
    std::string s;
    for (std::size_t i = 0; i < e.argmin_subset.size(); ++i) {
        if (i) s += ';';
        s += g.nodes[e.argmin_subset[i]];
    }
    return s;
}

}  // namespace

std::string graph_to_json(const DependencyGraph& graph) {
    json j;
    j["config_fingerprint"] = graph.config_fingerprint;
    j["samples"] = graph.samples;
    j["max_cond_size"] = graph.max_cond_size ? json(*graph.max_cond_size) : json(nullptr);
    j["nodes"] = graph.nodes;
    json edges = json::array();
    for (const auto& e : graph.edges) {
        json subset = json::array();
        for (auto v : e.argmin_subset) subset.push_back(graph.nodes[v]);
        json rec;
        rec["source"] = graph.nodes[e.source];
        rec["target"] = graph.nodes[e.target];
        rec["weight"] = e.weight;
        rec["unconditional"] = e.unconditional;
        rec["argmin_subset"] = std::move(subset);
        rec["p_value"] = e.p_value ? json(*e.p_value) : json(nullptr);
        rec["evaluated_subsets"] = e.evaluated_subsets;
        rec["pruned"] = e.pruned;
        edges.push_back(std::move(rec));
    }
    j["edges"] = std::move(edges);
    return j.dump(2) + "\n";
}

DependencyGraph graph_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("graph JSON: ") + e.what());
    }
    try {
        DependencyGraph g;
        g.config_fingerprint = j.at("config_fingerprint").get<std::string>();
        g.samples = j.value("samples", Eigen::Index{0});
        if (j.contains("max_cond_size") && !j["max_cond_size"].is_null()) {
            g.max_cond_size = j["max_cond_size"].get<std::size_t>();
        }
        g.nodes = j.at("nodes").get<std::vector<std::string>>();
        std::unordered_map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            if (!index.emplace(g.nodes[i], i).second) throw InputError("graph JSON: duplicate node '" + g.nodes[i] + "'");
        }
        const auto lookup = [&](const std::string& name) {
            const auto it = index.find(name);
            if (it == index.end()) throw InputError("graph JSON: edge references unknown node '" + name + "'");
            return it->second;
        };
        for (const auto& rec : j.at("edges")) {
            EdgeRecord e;
            e.source = lookup(rec.at("source").get<std::string>());
            e.target = lookup(rec.at("target").get<std::string>());
            if (e.source == e.target) throw InputError("graph JSON: self-loop on '" + g.nodes[e.source] + "'");
            if (e.source > e.target) std::swap(e.source, e.target);
            e.weight = rec.at("weight").get<double>();
            e.unconditional = rec.value("unconditional", e.weight);
            if (rec.contains("argmin_subset")) {
                for (const auto& v : rec["argmin_subset"]) e.argmin_subset.push_back(lookup(v.get<std::string>()));
            }
            if (rec.contains("p_value") && !rec["p_value"].is_null()) e.p_value = rec["p_value"].get<double>();
            e.evaluated_subsets = rec.value("evaluated_subsets", std::uint64_t{0});
            e.pruned = rec.value("pruned", false);
            g.edges.push_back(std::move(e));
        }
        return g;
    } catch (const json::exception& e) {
        throw InputError(std::string("graph JSON: ") + e.what());
    }
}

void write_graphml(std::ostream& out, const DependencyGraph& graph) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"fingerprint\" for=\"graph\" attr.name=\"config_fingerprint\" attr.type=\"string\"/>\n"
        << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
        << "  <key id=\"unconditional\" for=\"edge\" attr.name=\"unconditional\" attr.type=\"double\"/>\n"
        << "  <key id=\"p_value\" for=\"edge\" attr.name=\"p_value\" attr.type=\"double\"/>\n"
        << "  <key id=\"argmin\" for=\"edge\" attr.name=\"argmin_subset\" attr.type=\"string\"/>\n"
        << "  <graph id=\"G\" edgedefault=\"undirected\">\n"
        << "    <data key=\"fingerprint\">" << graph.config_fingerprint << "</data>\n";
    for (const auto& n : graph.nodes) out << "    <node id=\"" << xml_escape(n) << "\"/>\n";
    for (const auto& e : graph.edges) {
        if (e.pruned) continue;
        out << "    <edge source=\"" << xml_escape(graph.nodes[e.source]) << "\" target=\""
            << xml_escape(graph.nodes[e.target]) << "\">\n"
            << "      <data key=\"weight\">" << shortest(e.weight) << "</data>\n"
            << "      <data key=\"unconditional\">" << shortest(e.unconditional) << "</data>\n";
        if (e.p_value) out << "      <data key=\"p_value\">" << shortest(*e.p_value) << "</data>\n";
        out << "      <data key=\"argmin\">" << xml_escape(subset_label(graph, e)) << "</data>\n"
            << "    </edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
}

void write_dot(std::ostream& out, const DependencyGraph& graph) {
    double max_weight = 0.0;
    for (const auto& e : graph.edges)
        if (!e.pruned) max_weight = std::max(max_weight, e.weight);
    out << "// config_fingerprint=" << graph.config_fingerprint << "\n"
        << "graph dependence {\n"
        << "  node [shape=circle];\n";
    for (const auto& n : graph.nodes) out << "  " << dot_quote(n) << ";\n";
    for (const auto& e : graph.edges) {
        if (e.pruned) continue;
        const double width = max_weight > 0.0 ? 0.5 + 7.5 * e.weight / max_weight : 1.0;
        char pen[32];
        std::snprintf(pen, sizeof pen, "%.3f", width);
        char label[32];
        std::snprintf(label, sizeof label, "%.2f", e.weight);
        out << "  " << dot_quote(graph.nodes[e.source]) << " -- " << dot_quote(graph.nodes[e.target])
            << " [penwidth=" << pen << ", label=\"" << label << "\", weight=" << shortest(e.weight) << "];\n";
    }
    out << "}\n";
}

void write_edges_csv(std::ostream& out, const DependencyGraph& graph) {
    out << "# config_fingerprint=" << graph.config_fingerprint << "\n"
        << "source,target,weight,unconditional,argmin_subset,p_value,evaluated_subsets,pruned\n";
    for (const auto& e : graph.edges) {
        out << csv::escape(graph.nodes[e.source]) << ',' << csv::escape(graph.nodes[e.target]) << ','
            << shortest(e.weight) << ',' << shortest(e.unconditional) << ',' << csv::escape(subset_label(graph, e))
            << ',' << (e.p_value ? shortest(*e.p_value) : std::string()) << ',' << e.evaluated_subsets << ','
            << (e.pruned ? "true" : "false") << '\n';
    }
}

}  // namespace dcornet
