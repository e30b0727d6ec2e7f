#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dcornet/network.hpp"

namespace dcornet {

enum class Normalization { Euclidean, Max };

struct CentralityOptions {
    double tol = 1e-12;
    std::size_t max_iter = 10000;
    Normalization normalization = Normalization::Euclidean;
};

struct CentralityScores {
    Eigen::VectorXd scores;  // nonnegative; unit norm under the chosen normalization
    double eigenvalue = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

// Symmetric weighted adjacency from the graph's unpruned edges. Throws
// InputError when an unpruned edge has a negative weight.
Eigen::MatrixXd adjacency(const DependencyGraph& graph);

// Power iteration from the uniform vector. Iterates on K + s*I with
// s = max weighted degree / 2: same eigenvectors, but the Perron root is
// strictly dominant even for bipartite graphs. Convergence: successive unit
// iterates differ by < tol. Eigenvalue is the Rayleigh quotient on K.
// Throws NumericalError for an all-zero adjacency.
CentralityScores eigenvector_centrality(const Eigen::MatrixXd& weights, const CentralityOptions& options = {});
CentralityScores eigenvector_centrality(const DependencyGraph& graph, const CentralityOptions& options = {});

struct RankedNode {
    std::string node;
    double score;
    std::size_t rank;  // 1-based
};

// Descending by score; equal scores keep node order.
std::vector<RankedNode> rank_nodes(const std::vector<std::string>& nodes, const CentralityScores& scores);

// "# config_fingerprint=..." line, then node,score,rank rows.
void write_centrality_csv(std::ostream& out, const std::vector<RankedNode>& ranked, const std::string& fingerprint);

}  // namespace dcornet
