#include "dcornet/config.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dcornet/error.hpp"
#include "dcornet/hash.hpp"

namespace dcornet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kPathKeys{"panel", "node_map", "groupings", "out"};

const std::vector<std::string> kKnownKeys{
    "panel", "node_map", "groupings", "grouping", "out", "columns", "epsilon", "standardize",
    "max_cond_size", "exhaustive", "threshold", "permutations", "alpha", "test_at", "seed", "threads",
    "tol", "max_iter", "normalization", "formats", "top"};

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    return j[key].get<T>();
}

}  // namespace

json RunConfig::to_json() const {
    json j;
    j["panel"] = panel;
    j["node_map"] = node_map;
    j["groupings"] = groupings;
    j["grouping"] = grouping;
    j["out"] = out;
    j["columns"] = {{"entity", schema.entity}, {"indicator", schema.indicator},
                    {"year", schema.year}, {"value", schema.value}};
    j["epsilon"] = epsilon;
    j["standardize"] = standardize;
    j["max_cond_size"] = max_cond_size ? json(*max_cond_size) : json(nullptr);
    j["exhaustive"] = exhaustive;
    j["threshold"] = threshold;
    j["permutations"] = permutations;
    j["alpha"] = alpha ? json(*alpha) : json(nullptr);
    j["test_at"] = test_at == TestAt::Argmin ? "argmin" : "empty";
    j["seed"] = seed;
    j["threads"] = threads;
    j["tol"] = tol;
    j["max_iter"] = max_iter;
    j["normalization"] = normalization == Normalization::Euclidean ? "euclidean" : "max";
    j["formats"] = formats;
    j["top"] = top;
    return j;
}

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) throw InputError("config: expected a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
            throw InputError("config: unknown key '" + key + "'");
        }
    }
    try {
        RunConfig c;
        c.panel = get_or<std::string>(j, "panel", c.panel);
        c.node_map = get_or<std::string>(j, "node_map", c.node_map);
        c.groupings = get_or<std::string>(j, "groupings", c.groupings);
        c.grouping = get_or<std::string>(j, "grouping", c.grouping);
        c.out = get_or<std::string>(j, "out", c.out);
        if (j.contains("columns")) {
            const auto& cols = j["columns"];
            c.schema.entity = get_or<std::string>(cols, "entity", c.schema.entity);
            c.schema.indicator = get_or<std::string>(cols, "indicator", c.schema.indicator);
            c.schema.year = get_or<std::string>(cols, "year", c.schema.year);
            c.schema.value = get_or<std::string>(cols, "value", c.schema.value);
        }
        c.epsilon = get_or<double>(j, "epsilon", c.epsilon);
        c.standardize = get_or<bool>(j, "standardize", c.standardize);
        if (j.contains("max_cond_size") && !j["max_cond_size"].is_null()) {
            const auto& v = j["max_cond_size"];
            if (v.is_string() && v.get<std::string>() == "unlimited") {
                c.exhaustive = true;
            } else {
                c.max_cond_size = v.get<std::size_t>();
            }
        }
        c.exhaustive = get_or<bool>(j, "exhaustive", c.exhaustive);
        c.threshold = get_or<double>(j, "threshold", c.threshold);
        c.permutations = get_or<std::size_t>(j, "permutations", c.permutations);
        if (j.contains("alpha") && !j["alpha"].is_null()) c.alpha = j["alpha"].get<double>();
        const auto test_at = get_or<std::string>(j, "test_at", "argmin");
        if (test_at == "argmin") {
            c.test_at = TestAt::Argmin;
        } else if (test_at == "empty") {
            c.test_at = TestAt::Empty;
        } else {
            throw InputError("config: test_at must be 'argmin' or 'empty'");
        }
        c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
        c.threads = get_or<unsigned>(j, "threads", c.threads);
        c.tol = get_or<double>(j, "tol", c.tol);
        c.max_iter = get_or<std::size_t>(j, "max_iter", c.max_iter);
        const auto norm = get_or<std::string>(j, "normalization", "euclidean");
        if (norm == "euclidean") {
            c.normalization = Normalization::Euclidean;
        } else if (norm == "max") {
            c.normalization = Normalization::Max;
        } else {
            throw InputError("config: normalization must be 'euclidean' or 'max'");
        }
        c.formats = get_or<std::vector<std::string>>(j, "formats", c.formats);
        for (const auto& f : c.formats) {
            if (f != "json" && f != "graphml" && f != "dot" && f != "csv") {
                throw InputError("config: unknown format '" + f + "'");
            }
        }
        c.top = get_or<std::size_t>(j, "top", c.top);
        if (!(c.epsilon > 0.0)) throw InputError("config: epsilon must be positive");
        if (!(c.tol > 0.0)) throw InputError("config: tol must be positive");
        if (c.alpha && !(*c.alpha > 0.0 && *c.alpha < 1.0)) throw InputError("config: alpha must lie in (0, 1)");
        return c;
    } catch (const json::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
}

std::string hash_file(const std::string& path) {
    if (path.empty()) return "none";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return to_hex(fnv1a64(buf.str()));
}

std::string RunConfig::ingest_fingerprint() const {
    json j;
    j["panel"] = hash_file(panel);
    j["node_map"] = hash_file(node_map);
    j["columns"] = to_json()["columns"];
    j["epsilon"] = epsilon;
    j["standardize"] = standardize;
    return to_hex(fnv1a64(j.dump()));
}

std::string RunConfig::fingerprint() const {
    json j = to_json();
    for (const char* key : {"threads", "out", "formats", "top"}) j.erase(key);
    j["panel"] = hash_file(panel);
    j["node_map"] = hash_file(node_map);
    j["groupings"] = hash_file(groupings);
    // nlohmann objects are key-sorted, so dump() is canonical
    return to_hex(fnv1a64(j.dump()));
}

NetworkConfig RunConfig::network_config() const {
    NetworkConfig c;
    c.max_cond_size = max_cond_size;
    c.exhaustive = exhaustive;
    c.threshold = threshold;
    c.permutations = permutations;
    c.alpha = alpha;
    c.test_at = test_at;
    c.seed = seed;
    c.threads = threads;
    return c;
}

CentralityOptions RunConfig::centrality_options() const {
    return {tol, max_iter, normalization};
}

bool RunConfig::wants(const std::string& format) const {
    return std::find(formats.begin(), formats.end(), format) != formats.end();
}

json read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw InputError("config '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw InputError("config '" + path + "': expected a JSON object");
    const fs::path base = fs::path(path).parent_path();
    for (const auto& key : kPathKeys) {
        if (j.contains(key) && j[key].is_string()) {
            const fs::path p = j[key].get<std::string>();
            if (!p.empty() && p.is_relative()) j[key] = (base / p).lexically_normal().string();
        }
    }
    return j;
}

void apply_env_overrides(json& j, const std::function<const char*(const char*)>& getenv_fn) {
    for (const auto& key : kKnownKeys) {
        if (key == "columns") continue;
        std::string name = kEnvPrefix;
        for (char c : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        const char* raw = getenv_fn(name.c_str());
        if (raw == nullptr) continue;
        const std::string text = raw;
        if (key == "formats") {
            json list = json::array();
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (!item.empty()) list.push_back(item);
            }
            j[key] = std::move(list);
            continue;
        }
        const bool string_key = std::find(kPathKeys.begin(), kPathKeys.end(), key) != kPathKeys.end() ||
                                key == "grouping" || key == "test_at" || key == "normalization";
        if (string_key) {
            j[key] = text;
            continue;
        }
        const auto parsed = json::parse(text, nullptr, false);
        j[key] = parsed.is_discarded() ? json(text) : parsed;
    }
}

}  // namespace dcornet
