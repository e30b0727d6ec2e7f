#include "dcornet/network.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "dcornet/error.hpp"
#include "dcornet/hash.hpp"
#include "dcornet/partial.hpp"
#include "dcornet/significance.hpp"
#include "dcornet/subsets.hpp"

namespace dcornet {

NodeDataset::NodeDataset(const std::vector<NodeMatrix>& nodes) {
    if (nodes.size() < 2) throw InputError("network: need at least 2 nodes");
    samples_ = nodes.front().data.rows();
    nodes_.reserve(nodes.size());
    for (const auto& node : nodes) {
        if (node.data.rows() != samples_) {
            std::ostringstream os;
            os << "network: node '" << node.node << "' has " << node.data.rows() << " samples, expected " << samples_;
            throw InputError(os.str());
        }
        NodeCache cache;
        cache.name = node.node;
        cache.dist = distance_matrix(node.data);
        cache.ucentered = u_center(cache.dist);
        cache.self_inner = hilbert_inner(cache.ucentered, cache.ucentered);
        nodes_.push_back(std::move(cache));
    }
}

std::vector<std::string> NodeDataset::names() const {
    std::vector<std::string> out;
    for (const auto& n : nodes_) out.push_back(n.name);
    return out;
}

namespace {

// Workspace for one pair search: O(n^2) memory, reused across subsets.
class JointAccumulator {
public:
    JointAccumulator(const NodeDataset& data, std::vector<std::size_t> candidates)
        : data_(data), candidates_(std::move(candidates)) {
        const auto n = data.sample_count();
        acc_ = Eigen::MatrixXd::Zero(n, n);
    }

    void apply(std::uint64_t mask, std::uint64_t changed) {
        for (std::uint64_t bits = changed; bits != 0; bits &= bits - 1) {
            const auto i = static_cast<std::size_t>(std::countr_zero(bits));
            const auto& sq = data_.node(candidates_[i]).dist.sq;
            if (mask >> i & 1U) {
                acc_ += sq;
            } else {
                acc_ -= sq;
            }
        }
    }

    void rebuild(std::uint64_t mask) { from_scratch(mask, acc_); }

    // Largest |acc - scratch| relative to the largest scratch entry.
    double audit(std::uint64_t mask) {
        from_scratch(mask, scratch_);
        const double peak = scratch_.cwiseAbs().maxCoeff();
        const double err = (acc_ - scratch_).cwiseAbs().maxCoeff();
        return peak > 0.0 ? err / peak : err;
    }

    const Eigen::MatrixXd& joint_sq() const { return acc_; }

private:
    void from_scratch(std::uint64_t mask, Eigen::MatrixXd& out) const {
        out.setZero(data_.sample_count(), data_.sample_count());
        for (std::uint64_t bits = mask; bits != 0; bits &= bits - 1) {
            out += data_.node(candidates_[static_cast<std::size_t>(std::countr_zero(bits))]).dist.sq;
        }
    }

    const NodeDataset& data_;
    std::vector<std::size_t> candidates_;
    Eigen::MatrixXd acc_;
    Eigen::MatrixXd scratch_;
};

std::vector<std::size_t> members_of(std::uint64_t mask, const std::vector<std::size_t>& candidates) {
    std::vector<std::size_t> out;
    for (std::uint64_t bits = mask; bits != 0; bits &= bits - 1) {
        out.push_back(candidates[static_cast<std::size_t>(std::countr_zero(bits))]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool preferred(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

EdgeRecord min_pdcor_edge(std::size_t x, std::size_t y, const NodeDataset& data, const EdgeSearchOptions& options) {
    if (x == y || x >= data.node_count() || y >= data.node_count()) throw InputError("min_pdcor_edge: bad node pair");
    if (x > y) std::swap(x, y);
    const Eigen::Index n = data.sample_count();
    const double norm = static_cast<double>(n) * static_cast<double>(n - 3);

    std::vector<std::size_t> candidates;
    for (std::size_t v = 0; v < data.node_count(); ++v) {
        if (v != x && v != y) candidates.push_back(v);
    }

    const auto& a = data.node(x).ucentered;
    const auto& b = data.node(y).ucentered;
    Gram gram;
    gram.aa = data.node(x).self_inner;
    gram.bb = data.node(y).self_inner;
    gram.ab = hilbert_inner(a, b);

    EdgeRecord rec;
    rec.source = x;
    rec.target = y;

    JointAccumulator acc(data, candidates);
    Eigen::MatrixXd joint_dist(n, n);
    Eigen::MatrixXd c_tilde(n, n);
    const std::size_t remat = std::max<std::size_t>(options.rematerialize_every, 1);
    std::size_t since_rebuild = 0;

    SubsetEnumerator it(candidates.size(), options.max_size);
    bool have_best = false;
    std::vector<std::size_t> best_members;
    while (it.next()) {
        const std::uint64_t mask = it.mask();
        Gram g = gram;
        if (mask != 0) {
            if (++since_rebuild >= remat) {
                acc.rebuild(mask);
                since_rebuild = 0;
            } else {
                acc.apply(mask, it.changed());
            }
            if (options.audit_every != 0 && it.yielded() % options.audit_every == 0) {
                rec.audit_max_error = std::max(rec.audit_max_error, acc.audit(mask));
            }
            joint_dist = acc.joint_sq().cwiseMax(0.0).cwiseSqrt();
            u_center_into(joint_dist, c_tilde);
            g.has_c = true;
            g.cc = frobenius(c_tilde, c_tilde) / norm;
            g.ac = frobenius(a.m, c_tilde) / norm;
            g.bc = frobenius(b.m, c_tilde) / norm;
            g.c_degenerate = projection_degenerate(g.cc, c_tilde.cwiseAbs().maxCoeff());
        } else {
            // the empty set; reset drift
            acc.rebuild(0);
            since_rebuild = 0;
        }
        const double value = pdcor_from_gram(g);
        if (mask == 0) rec.unconditional = value;

        if (!have_best || value < rec.weight) {
            have_best = true;
            rec.weight = value;
            best_members = members_of(mask, candidates);
        } else if (value == rec.weight && options.tie_rule == TieRule::SmallestSubset) {
            auto members = members_of(mask, candidates);
            if (preferred(members, best_members)) best_members = std::move(members);
        }
    }
    rec.argmin_subset = std::move(best_members);
    rec.evaluated_subsets = it.yielded();
    return rec;
}

std::optional<std::size_t> resolve_max_size(std::size_t node_count, const NetworkConfig& config) {
    if (config.exhaustive) return std::nullopt;
    if (config.max_cond_size) return config.max_cond_size;
    if (node_count <= kAutoExhaustiveNodes) return std::nullopt;
    return kDefaultLargeGraphCap;
}

std::uint64_t DependencyGraph::total_evaluated_subsets() const {
    std::uint64_t total = 0;
    for (const auto& e : edges) total += e.evaluated_subsets;
    return total;
}

std::size_t edge_index(std::size_t i, std::size_t j, std::size_t node_count) {
    if (i > j) std::swap(i, j);
    // pairs before row i: sum_{r < i} (node_count - 1 - r)
    return i * (2 * node_count - i - 1) / 2 + (j - i - 1);
}

std::string network_fingerprint(const NetworkConfig& config, const std::vector<std::string>& nodes,
                                Eigen::Index samples) {
    const auto cap = resolve_max_size(nodes.size(), config);
    std::ostringstream os;
    os << "nodes=";
    for (const auto& name : nodes) os << name.size() << ':' << name << ';';
    os << "|samples=" << samples;
    os << "|max_cond_size=" << (cap ? std::to_string(*cap) : std::string("unlimited"));
    os << "|threshold=" << format_double(config.threshold);
    os << "|permutations=" << config.permutations;
    os << "|alpha=" << (config.alpha ? format_double(*config.alpha) : std::string("none"));
    os << "|test_at=" << (config.test_at == TestAt::Argmin ? "argmin" : "empty");
    os << "|seed=" << config.seed;
    os << "|tie_rule=" << (config.tie_rule == TieRule::SmallestSubset ? "smallest" : "first");
    os << "|rematerialize=" << config.search.rematerialize_every;
    return to_hex(fnv1a64(os.str()));
}

DependencyGraph build_network(const NodeDataset& data, const NetworkConfig& config) {
    DependencyGraph graph;
    graph.nodes = data.names();
    graph.samples = data.sample_count();
    graph.max_cond_size = resolve_max_size(data.node_count(), config);
    graph.config_fingerprint = network_fingerprint(config, graph.nodes, graph.samples);

    const std::size_t V = data.node_count();
    const std::size_t pairs = V * (V - 1) / 2;
    graph.edges.resize(pairs);

    EdgeSearchOptions search = config.search;
    search.max_size = graph.max_cond_size;
    search.tie_rule = config.tie_rule;

    const std::uint64_t per_pair = SubsetEnumerator::count(V - 2, search.max_size);
    const std::uint64_t total = per_pair * pairs;
    std::atomic<std::uint64_t> done{0};
    std::mutex progress_mutex;
    const std::uint64_t interval = std::max<std::uint64_t>(config.progress_interval, 1);

    std::vector<std::pair<std::size_t, std::size_t>> order;
    order.reserve(pairs);
    for (std::size_t i = 0; i < V; ++i)
        for (std::size_t j = i + 1; j < V; ++j) order.emplace_back(i, j);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= pairs) return;
            try {
                const auto [i, j] = order[k];
                EdgeRecord rec = min_pdcor_edge(i, j, data, search);
                if (config.permutations > 0) {
                    ConditioningSet z;
                    if (config.test_at == TestAt::Argmin && !rec.argmin_subset.empty()) {
                        std::vector<const Eigen::MatrixXd*> sq;
                        for (auto v : rec.argmin_subset) sq.push_back(&data.node(v).dist.sq);
                        z = ConditioningSet::from_squared(rec.argmin_subset, sq);
                    }
                    const auto test = permutation_test(data.node(i).dist, data.node(j).dist, z, config.permutations,
                                                       mix_seed(config.seed, k));
                    rec.p_value = test.p_value;
                }
                rec.pruned = rec.weight <= config.threshold ||
                             (config.alpha && rec.p_value && *rec.p_value > *config.alpha);
                graph.edges[k] = std::move(rec);

                const std::uint64_t before = done.fetch_add(per_pair);
                if (config.progress && (before / interval != (before + per_pair) / interval || before + per_pair == total)) {
                    std::lock_guard lock(progress_mutex);
                    config.progress(before + per_pair, total);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(pairs);
                return;
            }
        }
    };

    unsigned threads = config.threads != 0 ? config.threads : std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, pairs));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return graph;
}

DependencyGraph build_network(const std::vector<NodeMatrix>& nodes, const NetworkConfig& config) {
    return build_network(NodeDataset(nodes), config);
}

}  // namespace dcornet
