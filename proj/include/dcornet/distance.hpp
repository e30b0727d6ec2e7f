#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace dcornet {

// Pairwise Euclidean distances between sample rows. `dist` is always the
// entrywise square root of `sq`, so two matrices built from equal squared
// distances compare bit-identical.
struct DistanceMatrix {
    Eigen::MatrixXd dist;
    Eigen::MatrixXd sq;

    Eigen::Index size() const { return dist.rows(); }
    double max_distance() const { return dist.size() == 0 ? 0.0 : dist.maxCoeff(); }
};

enum class Centering { Double, U };

struct CenteredMatrix {
    Centering kind = Centering::Double;
    Eigen::MatrixXd m;

    Eigen::Index size() const { return m.rows(); }
};

enum class Estimator { Biased, Unbiased };

// Rows are samples. Requires n >= 2 and finite entries.
DistanceMatrix distance_matrix(const Eigen::MatrixXd& samples);

// Builds a distance matrix from already-summed squared distances
// (joint distance of concatenated variables).
DistanceMatrix distance_from_squared(Eigen::MatrixXd sq);

// Standard double-centering: A_ij = a_ij - row_i - col_j + grand, including
// the diagonal, so every row and column sums to zero.
CenteredMatrix double_center(const DistanceMatrix& dm);

// U-centering with (n-2) and (n-1)(n-2) divisors and a zero diagonal.
// Requires n >= 4.
CenteredMatrix u_center(const DistanceMatrix& dm);
void u_center_into(const Eigen::MatrixXd& dist, Eigen::MatrixXd& out);

// Sum of a[i]*b[i] in pairwise (cascade) order; the result depends only on
// the data, never on threading.
double pairwise_dot(std::span<const double> a, std::span<const double> b);
double frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

double dcov_biased(const DistanceMatrix& x, const DistanceMatrix& y);
double dcov_biased(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

// Inner product of U-centered matrices; may be negative.
double dcov_unbiased(const DistanceMatrix& x, const DistanceMatrix& y);
double dcov_unbiased(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

// Distance correlation. Zero when either variable's self-covariance is
// degenerate (<= 1e-14 * max_distance^2). Biased result clamped to [0, 1],
// unbiased to [-1, 1].
double dcor(const DistanceMatrix& x, const DistanceMatrix& y, Estimator estimator);
double dcor(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, Estimator estimator);

namespace detail {
inline constexpr double kZeroRelTol = 1e-14;
inline constexpr double kClampTol = 1e-12;
}  // namespace detail

}  // namespace dcornet
