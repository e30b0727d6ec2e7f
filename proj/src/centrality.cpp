#include "dcornet/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "dcornet/csv.hpp"
#include "dcornet/error.hpp"

namespace dcornet {

Eigen::MatrixXd adjacency(const DependencyGraph& graph) {
    const auto V = static_cast<Eigen::Index>(graph.nodes.size());
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(V, V);
    for (const auto& e : graph.edges) {
        if (e.pruned) continue;
        if (e.weight < 0.0) {
            throw InputError("centrality: edge " + graph.nodes[e.source] + " -- " + graph.nodes[e.target] +
                             " has negative weight; prune at threshold >= 0");
        }
        const auto i = static_cast<Eigen::Index>(e.source);
        const auto j = static_cast<Eigen::Index>(e.target);
        k(i, j) = e.weight;
        k(j, i) = e.weight;
    }
    return k;
}

CentralityScores eigenvector_centrality(const Eigen::MatrixXd& weights, const CentralityOptions& options) {
    const Eigen::Index V = weights.rows();
    if (V == 0 || weights.cols() != V) throw InputError("centrality: adjacency must be square and nonempty");
    if (!weights.allFinite() || (weights.array() < 0.0).any()) {
        throw InputError("centrality: adjacency must be finite and nonnegative");
    }
    if (!(weights.maxCoeff() > 0.0)) throw NumericalError("centrality: degenerate graph (no positive edge weight)");

    const double shift = 0.5 * weights.rowwise().sum().maxCoeff();
    CentralityScores out;
    Eigen::VectorXd x = Eigen::VectorXd::Constant(V, 1.0 / std::sqrt(static_cast<double>(V)));
    Eigen::VectorXd next(V);
    for (out.iterations = 1; out.iterations <= options.max_iter; ++out.iterations) {
        next.noalias() = weights * x;
        next += shift * x;
        next /= next.norm();
        const double delta = (next - x).norm();
        x.swap(next);
        if (delta < options.tol) {
            out.converged = true;
            break;
        }
    }
    if (!out.converged) out.iterations = options.max_iter;

    // entries are nonnegative up to rounding; clear the noise
    x = x.cwiseMax(0.0);
    x /= x.norm();
    out.eigenvalue = x.dot(weights * x);
    if (options.normalization == Normalization::Max) x /= x.maxCoeff();
    out.scores = std::move(x);
    return out;
}

CentralityScores eigenvector_centrality(const DependencyGraph& graph, const CentralityOptions& options) {
    return eigenvector_centrality(adjacency(graph), options);
}

std::vector<RankedNode> rank_nodes(const std::vector<std::string>& nodes, const CentralityScores& scores) {
    std::vector<std::size_t> order(nodes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores.scores(static_cast<Eigen::Index>(a)) > scores.scores(static_cast<Eigen::Index>(b));
    });
    std::vector<RankedNode> out;
    for (std::size_t r = 0; r < order.size(); ++r) {
        out.push_back({nodes[order[r]], scores.scores(static_cast<Eigen::Index>(order[r])), r + 1});
    }
    return out;
}

void write_centrality_csv(std::ostream& out, const std::vector<RankedNode>& ranked, const std::string& fingerprint) {
    out << "# config_fingerprint=" << fingerprint << "\n"
        << "node,score,rank\n";
    for (const auto& r : ranked) {
        out << csv::escape(r.node) << ',' << nlohmann::json(r.score).dump() << ',' << r.rank << '\n';
    }
}

}  // namespace dcornet
