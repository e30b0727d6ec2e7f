#include "dcornet/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "dcornet/csv.hpp"
#include "dcornet/error.hpp"

namespace dcornet {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::string at_line(const std::string& path, std::size_t line) {
    return path + ":" + std::to_string(line) + ": ";
}

}  // namespace

std::size_t NodeMap::node_of(const std::string& indicator) const {
    for (const auto& [name, node] : indicators) {
        if (name == indicator) return node;
    }
    return npos;
}

Panel::Panel(std::vector<std::string> entities, std::vector<std::string> indicators,
             std::vector<std::size_t> indicator_node, std::vector<std::string> node_names,
             int first_year, std::size_t year_count)
    : entities_(std::move(entities)),
      indicators_(std::move(indicators)),
      indicator_node_(std::move(indicator_node)),
      node_names_(std::move(node_names)),
      first_year_(first_year),
      year_count_(year_count) {
    if (indicator_node_.size() != indicators_.size()) {
        throw InputError("panel: every indicator needs exactly one node assignment");
    }
    for (std::size_t node : indicator_node_) {
        if (node >= node_names_.size()) throw InputError("panel: indicator assigned to unknown node");
    }
    const std::size_t total = entities_.size() * indicators_.size() * year_count_;
    values_.assign(total, std::numeric_limits<double>::quiet_NaN());
    mask_.assign(total, 0);
}

void Panel::set(std::size_t e, std::size_t k, std::size_t t, double v) {
    const auto i = index(e, k, t);
    values_[i] = v;
    mask_[i] = 1;
}

void Panel::clear(std::size_t e, std::size_t k, std::size_t t) {
    const auto i = index(e, k, t);
    values_[i] = std::numeric_limits<double>::quiet_NaN();
    mask_[i] = 0;
}

std::size_t Panel::missing_count() const {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{0}));
}

std::size_t Panel::entity_index(const std::string& name) const {
    const auto it = std::find(entities_.begin(), entities_.end(), name);
    return it == entities_.end() ? npos : static_cast<std::size_t>(it - entities_.begin());
}

NodeMap load_node_map(const std::string& path) {
    const auto table = csv::read_file(path);
    const auto ci = table.column("indicator", path);
    const auto cn = table.column("node", path);
    NodeMap map;
    std::unordered_map<std::string, std::size_t> node_index;
    std::unordered_map<std::string, std::size_t> seen;
    for (const auto& row : table.rows) {
        const std::string indicator(trim(row.fields[ci]));
        const std::string node(trim(row.fields[cn]));
        if (indicator.empty() || node.empty()) {
            throw InputError(at_line(path, row.line) + "empty indicator or node");
        }
        auto [nit, inserted] = node_index.emplace(node, map.nodes.size());
        if (inserted) map.nodes.push_back(node);
        if (auto prev = seen.find(indicator); prev != seen.end()) {
            if (map.indicators[prev->second].second != nit->second) {
                throw InputError(at_line(path, row.line) + "indicator '" + indicator +
                                 "' assigned to more than one node");
            }
            continue;
        }
        seen.emplace(indicator, map.indicators.size());
        map.indicators.emplace_back(indicator, nit->second);
    }
    if (map.nodes.empty()) throw InputError(path + ": no node assignments");
    return map;
}

std::vector<Grouping> load_groupings(const std::string& path) {
    const auto table = csv::read_file(path);
    const auto cg = table.column("grouping", path);
    const auto ce = table.column("entity", path);
    std::vector<Grouping> groupings;
    for (const auto& row : table.rows) {
        const std::string name(trim(row.fields[cg]));
        const std::string entity(trim(row.fields[ce]));
        if (name.empty() || entity.empty()) {
            throw InputError(at_line(path, row.line) + "empty grouping or entity");
        }
        auto it = std::find_if(groupings.begin(), groupings.end(),
                               [&](const Grouping& g) { return g.name == name; });
        if (it == groupings.end()) {
            groupings.push_back({name, {}});
            it = std::prev(groupings.end());
        }
        if (std::find(it->members.begin(), it->members.end(), entity) != it->members.end()) {
            throw InputError(at_line(path, row.line) + "entity '" + entity +
                             "' listed twice in grouping '" + name + "'");
        }
        it->members.push_back(entity);
    }
    return groupings;
}

const Grouping& find_grouping(const std::vector<Grouping>& groupings, const std::string& name) {
    for (const auto& g : groupings) {
        if (g.name == name) return g;
    }
    throw InputError("unknown grouping '" + name + "'");
}

Panel load_panel(const std::string& path, const NodeMap& node_map, const PanelSchema& schema) {
    const auto table = csv::read_file(path);
    const auto ce = table.column(schema.entity, path);
    const auto ck = table.column(schema.indicator, path);
    const auto cy = table.column(schema.year, path);
    const auto cv = table.column(schema.value, path);

    struct Cell {
        std::size_t entity, indicator;
        int year;
        double value;
        bool observed;
        std::size_t line;
    };
    std::vector<Cell> cells;
    cells.reserve(table.rows.size());
    std::vector<std::string> entities, indicators;
    std::unordered_map<std::string, std::size_t> entity_index, indicator_index;
    int min_year = std::numeric_limits<int>::max();
    int max_year = std::numeric_limits<int>::min();

    for (const auto& row : table.rows) {
        const std::string entity(trim(row.fields[ce]));
        const std::string indicator(trim(row.fields[ck]));
        if (entity.empty() || indicator.empty()) {
            throw InputError(at_line(path, row.line) + "empty entity or indicator");
        }
        const auto year_text = trim(row.fields[cy]);
        int year = 0;
        const auto [yend, yerr] = std::from_chars(year_text.data(), year_text.data() + year_text.size(), year);
        if (yerr != std::errc{} || yend != year_text.data() + year_text.size()) {
            throw InputError(at_line(path, row.line) + "unparseable year '" + std::string(year_text) + "'");
        }
        const auto value_text = trim(row.fields[cv]);
        double value = std::numeric_limits<double>::quiet_NaN();
        bool observed = false;
        if (!value_text.empty()) {
            const auto [vend, verr] =
                std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
            if (verr != std::errc{} || vend != value_text.data() + value_text.size()) {
                throw InputError(at_line(path, row.line) + "unparseable value '" + std::string(value_text) + "'");
            }
            observed = std::isfinite(value);
        }
        auto [eit, e_new] = entity_index.emplace(entity, entities.size());
        if (e_new) entities.push_back(entity);
        auto [kit, k_new] = indicator_index.emplace(indicator, indicators.size());
        if (k_new) indicators.push_back(indicator);
        min_year = std::min(min_year, year);
        max_year = std::max(max_year, year);
        cells.push_back({eit->second, kit->second, year, value, observed, row.line});
    }
    if (cells.empty()) throw InputError(path + ": no data rows");

    std::vector<std::size_t> indicator_node;
    std::vector<std::string> unassigned;
    for (const auto& indicator : indicators) {
        const auto node = node_map.node_of(indicator);
        if (node == NodeMap::npos) unassigned.push_back(indicator);
        indicator_node.push_back(node);
    }
    if (!unassigned.empty()) {
        std::ostringstream os;
        os << path << ": indicators without node assignment:";
        for (const auto& s : unassigned) os << " " << s;
        throw InputError(os.str());
    }

    const auto year_count = static_cast<std::size_t>(max_year - min_year + 1);
    Panel panel(std::move(entities), std::move(indicators), std::move(indicator_node), node_map.nodes,
                min_year, year_count);
    std::vector<std::size_t> first_line(panel.entity_count() * panel.indicator_count() * year_count, 0);
    for (const auto& c : cells) {
        const auto t = static_cast<std::size_t>(c.year - min_year);
        auto& seen = first_line[(c.entity * panel.indicator_count() + c.indicator) * year_count + t];
        if (seen != 0) {
            std::ostringstream os;
            os << at_line(path, c.line) << "duplicate cell (" << panel.entities()[c.entity] << ", "
               << panel.indicators()[c.indicator] << ", " << c.year << "), first seen on line " << seen;
            throw InputError(os.str());
        }
        seen = c.line;
        if (c.observed) panel.set(c.entity, c.indicator, t, c.value);
    }
    return panel;
}

ImputationResult impute_missing(const Panel& panel, double epsilon) {
    if (!(epsilon > 0.0)) throw InputError("impute_missing: epsilon must be positive");
    const std::size_t E = panel.entity_count();
    const std::size_t K = panel.indicator_count();
    const std::size_t T = panel.year_count();

    ImputationResult result{panel, {}};
    if (panel.fully_observed()) return result;

    // Cells nobody observes cannot be imputed.
    std::vector<std::string> unimputable;
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t t = 0; t < T; ++t) {
            bool any_observed = false, any_missing = false;
            for (std::size_t e = 0; e < E; ++e) {
                (panel.observed(e, k, t) ? any_observed : any_missing) = true;
            }
            if (any_missing && !any_observed) {
                unimputable.push_back("(" + panel.indicators()[k] + ", " + std::to_string(panel.year_at(t)) + ")");
            }
        }
    }
    if (!unimputable.empty()) {
        std::ostringstream os;
        os << "unimputable cells, observed by no entity:";
        for (const auto& s : unimputable) os << " " << s;
        throw InputError(os.str());
    }

    // Per-indicator z-scores over observed cells, used only for distancing.
    std::vector<double> z(E * K * T, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        double sum = 0.0, count = 0.0;
        for (std::size_t e = 0; e < E; ++e)
            for (std::size_t t = 0; t < T; ++t)
                if (panel.observed(e, k, t)) {
                    sum += panel.value(e, k, t);
                    count += 1.0;
                }
        const double mean = sum / count;
        double ss = 0.0;
        for (std::size_t e = 0; e < E; ++e)
            for (std::size_t t = 0; t < T; ++t)
                if (panel.observed(e, k, t)) ss += (panel.value(e, k, t) - mean) * (panel.value(e, k, t) - mean);
        const double sd = std::sqrt(ss / count);
        for (std::size_t e = 0; e < E; ++e)
            for (std::size_t t = 0; t < T; ++t)
                if (panel.observed(e, k, t)) {
                    z[(e * K + k) * T + t] = sd > 0.0 ? (panel.value(e, k, t) - mean) / sd : 0.0;
                }
    }

    // Entity-entity distances over co-observed cells; -1 marks "nothing shared".
    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(E), static_cast<Eigen::Index>(E));
    for (std::size_t a = 0; a < E; ++a) {
        for (std::size_t b = a + 1; b < E; ++b) {
            double ss = 0.0;
            std::size_t shared = 0;
            for (std::size_t k = 0; k < K; ++k)
                for (std::size_t t = 0; t < T; ++t)
                    if (panel.observed(a, k, t) && panel.observed(b, k, t)) {
                        const double d = z[(a * K + k) * T + t] - z[(b * K + k) * T + t];
                        ss += d * d;
                        ++shared;
                    }
            const double value = shared == 0 ? -1.0 : std::sqrt(ss);
            dist(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = value;
            dist(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = value;
        }
    }

    for (std::size_t e = 0; e < E; ++e) {
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t t = 0; t < T; ++t) {
                if (panel.observed(e, k, t)) continue;
                bool fallback = false;
                for (std::size_t d = 0; d < E; ++d) {
                    if (d != e && panel.observed(d, k, t) &&
                        dist(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(d)) < 0.0) {
                        fallback = true;
                    }
                }
                double num = 0.0, den = 0.0;
                for (std::size_t d = 0; d < E; ++d) {
                    if (d == e || !panel.observed(d, k, t)) continue;
                    const double w = fallback
                        ? 1.0
                        : 1.0 / (dist(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(d)) + epsilon);
                    num += w * panel.value(d, k, t);
                    den += w;
                }
                result.panel.set(e, k, t, num / den);
                result.cells.push_back({e, k, t, fallback});
            }
        }
    }
    return result;
}

Panel standardize(const Panel& panel) {
    if (!panel.fully_observed()) throw InputError("standardize: panel has missing cells; impute first");
    Panel out = panel;
    const std::size_t E = panel.entity_count();
    const std::size_t T = panel.year_count();
    const double count = static_cast<double>(E * T);
    for (std::size_t k = 0; k < panel.indicator_count(); ++k) {
        double sum = 0.0, peak = 0.0;
        for (std::size_t e = 0; e < E; ++e)
            for (std::size_t t = 0; t < T; ++t) {
                sum += panel.value(e, k, t);
                peak = std::max(peak, std::abs(panel.value(e, k, t)));
            }
        const double mean = sum / count;
        double ss = 0.0;
        for (std::size_t e = 0; e < E; ++e)
            for (std::size_t t = 0; t < T; ++t) ss += (panel.value(e, k, t) - mean) * (panel.value(e, k, t) - mean);
        const double sd = std::sqrt(ss / count);
        const bool constant = sd <= 1e-14 * peak || sd == 0.0;
        for (std::size_t e = 0; e < E; ++e)
            for (std::size_t t = 0; t < T; ++t)
                out.set(e, k, t, constant ? 0.0 : (panel.value(e, k, t) - mean) / sd);
    }
    return out;
}

std::vector<NodeMatrix> assemble_nodes(const Panel& panel, const Grouping& grouping) {
    if (!panel.fully_observed()) throw InputError("assemble_nodes: panel has missing cells; impute first");
    if (grouping.members.size() < 4) {
        throw InputError("grouping '" + grouping.name + "' has " + std::to_string(grouping.members.size()) +
                         " members; at least 4 are required");
    }
    std::vector<std::size_t> rows;
    rows.reserve(grouping.members.size());
    for (const auto& member : grouping.members) {
        const auto e = panel.entity_index(member);
        if (e == Panel::npos) {
            throw InputError("grouping '" + grouping.name + "': entity '" + member + "' not in panel");
        }
        rows.push_back(e);
    }

    const auto& nodes = panel.node_names();
    std::vector<std::vector<std::size_t>> node_indicators(nodes.size());
    for (std::size_t k = 0; k < panel.indicator_count(); ++k) node_indicators[panel.node_of(k)].push_back(k);

    std::vector<NodeMatrix> out;
    out.reserve(nodes.size());
    const std::size_t T = panel.year_count();
    for (std::size_t v = 0; v < nodes.size(); ++v) {
        if (node_indicators[v].empty()) throw InputError("node '" + nodes[v] + "' has no indicators in the panel");
        NodeMatrix m{nodes[v], Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()),
                                               static_cast<Eigen::Index>(node_indicators[v].size() * T))};
        for (std::size_t i = 0; i < rows.size(); ++i) {
            Eigen::Index col = 0;
            for (std::size_t k : node_indicators[v]) {
                for (std::size_t t = 0; t < T; ++t) m.data(static_cast<Eigen::Index>(i), col++) = panel.value(rows[i], k, t);
            }
        }
        out.push_back(std::move(m));
    }
    return out;
}

Grouping all_entities(const Panel& panel, std::string name) {
    return {std::move(name), panel.entities()};
}

}  // namespace dcornet
