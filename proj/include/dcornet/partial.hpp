#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "dcornet/distance.hpp"

namespace dcornet {

// Conditioning variables Z. The joint distance of concatenated members equals
// sqrt of the sum of the members' squared distances, so only that sum is kept.
// An empty set (no nodes) means "no conditioning".
struct ConditioningSet {
    std::vector<std::size_t> nodes;
    Eigen::MatrixXd joint_sq;

    bool empty() const { return nodes.empty(); }

    static ConditioningSet none() { return {}; }
    // Members given as raw sample matrices; node ids are their positions.
    static ConditioningSet from_samples(const std::vector<Eigen::MatrixXd>& members);
    static ConditioningSet from_squared(std::vector<std::size_t> nodes,
                                        const std::vector<const Eigen::MatrixXd*>& member_sq);
};

// (1 / (n(n-3))) * sum_{i != j} a_ij b_ij over U-centered matrices.
double hilbert_inner(const CenteredMatrix& a, const CenteredMatrix& b);

// a - (<a,c>/<c,c>) c. When c is degenerate (constant Z) the projection term is
// dropped and `a` is returned unchanged.
CenteredMatrix project_complement(const CenteredMatrix& a, const CenteredMatrix& c);

// The six inner products that determine a partial distance correlation.
struct Gram {
    double aa = 0.0, bb = 0.0, ab = 0.0;
    double ac = 0.0, bc = 0.0, cc = 0.0;
    bool has_c = false;
    bool c_degenerate = true;
};

// True when <c,c> is too small to project onto (relative to the largest entry
// of c~, which is exactly zero for constant Z).
bool projection_degenerate(double cc, double c_max_abs);

// Partial distance correlation from inner products; shares every degeneracy
// rule with the matrix route below.
double pdcor_from_gram(const Gram& g);

struct ProjectionResult {
    CenteredMatrix x_perp;
    CenteredMatrix y_perp;
    double ac = 0.0, bc = 0.0, cc = 0.0;
};

ProjectionResult project_pair(const CenteredMatrix& a, const CenteredMatrix& b, const CenteredMatrix* c);

double pdcov(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const ConditioningSet& z);
double pdcor(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const ConditioningSet& z);

// Same estimators over precomputed distances.
double pdcov(const DistanceMatrix& x, const DistanceMatrix& y, const ConditioningSet& z);
double pdcor(const DistanceMatrix& x, const DistanceMatrix& y, const ConditioningSet& z);

namespace detail {
// ||P_perp||^2 below this fraction of the unprojected ||A~||^2 counts as zero.
inline constexpr double kPerpRelTol = 1e-12;
}  // namespace detail

}  // namespace dcornet
