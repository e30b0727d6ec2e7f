#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "dcornet/commands.hpp"
#include "dcornet/config.hpp"
#include "dcornet/csv.hpp"
#include "dcornet/error.hpp"
#include "dcornet/graph_io.hpp"
#include "fixtures.hpp"

using namespace dcornet;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory, removed on scope exit.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("dcornet_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

// Four nodes with one indicator each over two years; `blanks` cells of node D left empty.
void write_small_panel(const TempDir& dir, int blanks) {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> g;
    std::ostringstream panel;
    panel << "entity,indicator,year,value\n";
    int left = blanks;
    for (int e = 0; e < 30; ++e) {
        const double a = g(rng);
        const double vals[4] = {a, a + 0.3 * g(rng), g(rng), g(rng)};
        for (int v = 0; v < 4; ++v)
            for (int y = 2010; y <= 2011; ++y) {
                panel << "e" << e << ',' << static_cast<char>('A' + v) << "_x," << y << ',';
                if (v == 3 && y == 2011 && left > 0) {
                    --left;
                } else {
                    panel << vals[v] + 0.1 * (y - 2010) * g(rng);
                }
                panel << '\n';
            }
    }
    spit(dir / "panel.csv", panel.str());
    spit(dir / "nodes.csv", "indicator,node\nA_x,A\nB_x,B\nC_x,C\nD_x,D\n");
}

RunConfig small_config(const TempDir& dir) {
    RunConfig c;
    c.panel = dir / "panel.csv";
    c.node_map = dir / "nodes.csv";
    c.out = dir / "out";
    return c;
}

RunConfig planted_config(const TempDir& dir) {
    RunConfig c;
    c.panel = fixture::data_path("planted6/panel.csv");
    c.node_map = fixture::data_path("planted6/nodes.csv");
    c.groupings = fixture::data_path("planted6/groupings.csv");
    c.out = dir / "out";
    c.threshold = 0.1;
    return c;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + DCORNET_CLI + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("RunConfig: JSON round trip and validation") {
    RunConfig c;
    c.panel = "/data/p.csv";
    c.max_cond_size = 2;
    c.alpha = 0.01;
    c.permutations = 499;
    c.test_at = TestAt::Empty;
    c.normalization = Normalization::Max;
    c.formats = {"json", "dot"};
    c.schema.value = "val";
    const auto back = RunConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());

    CHECK_THROWS_AS(RunConfig::from_json({{"bogus", 1}}), InputError);
    CHECK_THROWS_AS(RunConfig::from_json({{"formats", {"pdf"}}}), InputError);
    CHECK_THROWS_AS(RunConfig::from_json({{"test_at", "middle"}}), InputError);
    CHECK_THROWS_AS(RunConfig::from_json({{"seed", "abc"}}), InputError);
    CHECK(RunConfig::from_json({{"max_cond_size", "unlimited"}}).exhaustive);
}

TEST_CASE("RunConfig: fingerprint tracks analysis settings only") {
    RunConfig a;
    RunConfig b = a;
    b.threads = 16;
    b.out = "elsewhere";
    b.top = 3;
    b.formats = {"json"};
    CHECK(a.fingerprint() == b.fingerprint());
    b.seed = 9;
    CHECK(a.fingerprint() != b.fingerprint());
    RunConfig c = a;
    c.threshold = 0.2;
    CHECK(a.fingerprint() != c.fingerprint());
    CHECK(a.ingest_fingerprint() == c.ingest_fingerprint());
}

TEST_CASE("config precedence: file, then environment, then flags") {
    TempDir dir("cfg");
    fs::create_directories(dir.path / "sub");
    spit(dir / "sub/run.json", R"({"panel": "p.csv", "node_map": "/abs/n.csv", "seed": 3, "threshold": 0.2})");
    auto j = read_config_file(dir / "sub/run.json");
    CHECK(j["panel"] == (dir.path / "sub" / "p.csv").string());
    CHECK(j["node_map"] == "/abs/n.csv");

    const std::map<std::string, std::string> env{
        {"DCORNET_SEED", "11"}, {"DCORNET_FORMATS", "json,csv"}, {"DCORNET_GROUPING", "first_half"}};
    apply_env_overrides(j, [&](const char* name) -> const char* {
        const auto it = env.find(name);
        return it == env.end() ? nullptr : it->second.c_str();
    });
    j["threshold"] = 0.3;  // as a command-line flag would
    const auto c = RunConfig::from_json(j);
    CHECK(c.seed == 11);
    CHECK(c.threshold == 0.3);
    CHECK(c.grouping == "first_half");
    CHECK(c.formats == std::vector<std::string>{"json", "csv"});
    CHECK(c.wants("csv"));
    CHECK(!c.wants("dot"));
}

TEST_CASE("graph JSON round trip is byte-stable") {
    DependencyGraph g;
    g.nodes = {"A", "B", "C"};
    g.samples = 17;
    g.max_cond_size = 1;
    g.config_fingerprint = "00112233aabbccdd";
    EdgeRecord e;
    e.source = 0;
    e.target = 2;
    e.weight = 0.1 + 0.2;
    e.unconditional = 1.0 / 3.0;
    e.argmin_subset = {1};
    e.p_value = 0.005;
    e.evaluated_subsets = 2;
    g.edges = {e, e, e};
    g.edges[0].target = 1;
    g.edges[0].argmin_subset = {2};
    g.edges[1].p_value.reset();
    g.edges[2].source = 1;
    g.edges[2].pruned = true;
    const auto text = graph_to_json(g);
    const auto back = graph_from_json(text);
    CHECK(graph_to_json(back) == text);
    CHECK(back.edges[0].weight == 0.1 + 0.2);
    CHECK(!back.edges[1].p_value.has_value());
    CHECK(back.edges[2].pruned);
    CHECK(back.max_cond_size == std::optional<std::size_t>(1));
    CHECK_THROWS_AS(graph_from_json("{\"nodes\": 3}"), InputError);
}

TEST_CASE("ingest: complete panel needs no imputation; gaps are reported") {
    TempDir dir("ingest");
    write_small_panel(dir, 0);
    auto s = cmd_ingest(small_config(dir));
    CHECK(s.entities == 30);
    CHECK(s.indicators == 4);
    CHECK(s.years == 2);
    CHECK(s.imputed_cells == 0);

    write_small_panel(dir, 3);
    s = cmd_ingest(small_config(dir));
    CHECK(s.imputed_cells == 3);
    const auto report = csv::read_file(dir / "out/ingest_report.csv");
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].fields == std::vector<std::string>{"D_x", "2011", "3", "0"});
    const auto cache = slurp(dir / "out/panel_cache.csv");
    CHECK(cache.rfind("# ingest_fingerprint=", 0) == 0);
}

TEST_CASE("network: full pipeline on the small panel") {
    TempDir dir("network");
    write_small_panel(dir, 0);
    auto c = small_config(dir);
    cmd_ingest(c);
    const auto s = cmd_network(c);
    CHECK(s.nodes == 4);
    CHECK(s.edges == 6);
    CHECK(s.evaluated_subsets == 6 * 4);
    for (const char* f : {"graph.json", "graph.graphml", "graph.dot", "edges.csv", "manifest.json"}) {
        CHECK(fs::exists(dir.path / "out" / f));
    }
    const auto graph = graph_from_json(slurp(dir / "out/graph.json"));
    CHECK(graph.config_fingerprint == c.fingerprint());
    CHECK(slurp(dir / "out/edges.csv").rfind("# config_fingerprint=" + c.fingerprint(), 0) == 0);

    // empty-set-only search reproduces the unconditional values
    c.max_cond_size = 0;
    cmd_network(c);
    const auto flat = graph_from_json(slurp(dir / "out/graph.json"));
    for (const auto& e : flat.edges) {
        CHECK(e.weight == e.unconditional);
        CHECK(e.argmin_subset.empty());
        CHECK(e.evaluated_subsets == 1);
    }

    const auto ranked = cmd_centrality(c);
    REQUIRE(ranked.size() == 4);
    for (std::size_t i = 1; i < ranked.size(); ++i) CHECK(ranked[i - 1].score >= ranked[i].score);
    CHECK(slurp(dir / "out/centrality.csv").rfind("# config_fingerprint=", 0) == 0);
}

TEST_CASE("network: reruns and thread counts give identical bytes") {
    TempDir dir("bytes");
    auto c = planted_config(dir);
    c.permutations = 49;
    c.seed = 5;
    cmd_ingest(c);
    c.threads = 1;
    cmd_network(c);
    const auto first = slurp(dir / "out/graph.json");
    const auto dot = slurp(dir / "out/graph.dot");
    for (unsigned t : {1U, 4U, 8U}) {
        c.threads = t;
        cmd_network(c);
        CHECK(slurp(dir / "out/graph.json") == first);
        CHECK(slurp(dir / "out/graph.dot") == dot);
    }
}

TEST_CASE("network: groupings, stale cache and missing inputs") {
    TempDir dir("groups");
    auto c = planted_config(dir);
    CHECK_THROWS_AS(cmd_network(c), InputError);  // no cache yet
    CHECK_THROWS_AS(cmd_centrality(c), InputError);  // no graph yet
    cmd_ingest(c);
    c.grouping = "first_half";
    c.max_cond_size = 1;
    cmd_network(c);
    CHECK(graph_from_json(slurp(dir / "out/graph.json")).samples == 40);
    c.grouping = "nope";
    CHECK_THROWS_AS(cmd_network(c), InputError);

    c.grouping = "all";
    c.epsilon = 1e-6;  // changes the ingest fingerprint
    CHECK_THROWS_AS(cmd_network(c), InputError);
}

TEST_CASE("CLI binary: exit codes") {
    TempDir dir("cli");
    write_small_panel(dir, 0);
    const std::string base = "--out \"" + (dir / "out") + "\"";
    spit(dir / "run.json", "{\"panel\": \"panel.csv\", \"node_map\": \"nodes.csv\"}");
    CHECK(run_cli("run-all --config \"" + (dir / "run.json") + "\" " + base + " --threads 2 --top 2") == 0);
    CHECK(fs::exists(dir.path / "out" / "centrality.csv"));

    spit(dir / "bad.csv", "entity,indicator,year,value\ne1,A_x,2010,\"unterminated\n");
    spit(dir / "bad.json", "{\"panel\": \"bad.csv\", \"node_map\": \"nodes.csv\"}");
    CHECK(run_cli("ingest --config \"" + (dir / "bad.json") + "\" " + base) == 2);
    CHECK(run_cli("ingest --config \"" + (dir / "missing.json") + "\" " + base) == 2);
    CHECK(run_cli("network --no-such-flag") == 2);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("--help") == 0);
}
