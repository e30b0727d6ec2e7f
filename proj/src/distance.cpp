#include "dcornet/distance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dcornet/error.hpp"

namespace dcornet {

namespace {

void require_same_n(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b) {
        std::ostringstream os;
        os << what << ": sample counts differ (" << a << " vs " << b << ")";
        throw InputError(os.str());
    }
}

double inner_scale(const CenteredMatrix& a, const CenteredMatrix& b) {
    return std::sqrt(frobenius(a.m, a.m) * frobenius(b.m, b.m));
}

}  // namespace

DistanceMatrix distance_matrix(const Eigen::MatrixXd& samples) {
    const Eigen::Index n = samples.rows();
    if (n < 2) throw InputError("distance_matrix: need at least 2 samples");
    if (!samples.allFinite()) throw InputError("distance_matrix: non-finite sample value");
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double s = (samples.row(i) - samples.row(j)).squaredNorm();
            sq(i, j) = s;
            sq(j, i) = s;
        }
    }
    return distance_from_squared(std::move(sq));
}

DistanceMatrix distance_from_squared(Eigen::MatrixXd sq) {
    DistanceMatrix dm;
    dm.dist = sq.cwiseMax(0.0).cwiseSqrt();
    dm.sq = std::move(sq);
    return dm;
}

CenteredMatrix double_center(const DistanceMatrix& dm) {
    const Eigen::Index n = dm.size();
    if (n < 2) throw InputError("double_center: need at least 2 samples");
    const double inv_n = 1.0 / static_cast<double>(n);
    const Eigen::VectorXd row_mean = dm.dist.rowwise().sum() * inv_n;
    const Eigen::VectorXd col_mean = dm.dist.colwise().sum().transpose() * inv_n;
    const double grand = row_mean.sum() * inv_n;
    CenteredMatrix out{Centering::Double, Eigen::MatrixXd(n, n)};
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) out.m(i, j) = dm.dist(i, j) - row_mean(i) - col_mean(j) + grand;
    return out;
}

void u_center_into(const Eigen::MatrixXd& dist, Eigen::MatrixXd& out) {
    const Eigen::Index n = dist.rows();
    if (n < 4) throw InputError("u_center: need at least 4 samples, got " + std::to_string(n));
    const double nd = static_cast<double>(n);
    // distance matrices are symmetric, so row sums double as column sums
    const Eigen::VectorXd row_sum = dist.colwise().sum().transpose();
    const double total = row_sum.sum();
    const Eigen::VectorXd row_term = row_sum / (nd - 2.0);
    const double grand = total / ((nd - 1.0) * (nd - 2.0));
    out.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) out(i, j) = dist(i, j) - row_term(i) - row_term(j) + grand;
        out(j, j) = 0.0;
    }
}

CenteredMatrix u_center(const DistanceMatrix& dm) {
    CenteredMatrix out{Centering::U, {}};
    u_center_into(dm.dist, out.m);
    return out;
}

double pairwise_dot(std::span<const double> a, std::span<const double> b) {
    constexpr std::size_t kBlock = 128;
    const std::size_t n = a.size();
    if (n <= kBlock) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_dot(a.first(half), b.first(half)) + pairwise_dot(a.subspan(half), b.subspan(half));
}

double frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const auto len = static_cast<std::size_t>(a.size());
    return pairwise_dot({a.data(), len}, {b.data(), len});
}

double dcov_biased(const DistanceMatrix& x, const DistanceMatrix& y) {
    require_same_n(x.size(), y.size(), "dcov_biased");
    const auto a = double_center(x);
    const auto b = double_center(y);
    const double n = static_cast<double>(x.size());
    const double v = frobenius(a.m, b.m) / (n * n);
    if (v >= 0.0) return v;
    const double scale = inner_scale(a, b) / (n * n);
    if (v >= -detail::kClampTol * scale) return 0.0;
    std::ostringstream os;
    os << "dcov_biased: negative estimate " << v << " beyond rounding (scale " << scale << ")";
    throw NumericalError(os.str());
}

double dcov_biased(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    require_same_n(x.rows(), y.rows(), "dcov_biased");
    return dcov_biased(distance_matrix(x), distance_matrix(y));
}

double dcov_unbiased(const DistanceMatrix& x, const DistanceMatrix& y) {
    require_same_n(x.size(), y.size(), "dcov_unbiased");
    const auto a = u_center(x);
    const auto b = u_center(y);
    const double n = static_cast<double>(x.size());
    return frobenius(a.m, b.m) / (n * (n - 3.0));
}

double dcov_unbiased(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    require_same_n(x.rows(), y.rows(), "dcov_unbiased");
    return dcov_unbiased(distance_matrix(x), distance_matrix(y));
}

double dcor(const DistanceMatrix& x, const DistanceMatrix& y, Estimator estimator) {
    require_same_n(x.size(), y.size(), "dcor");
    const auto dcov = [estimator](const DistanceMatrix& p, const DistanceMatrix& q) {
        return estimator == Estimator::Biased ? dcov_biased(p, q) : dcov_unbiased(p, q);
    };
    const double vxx = dcov(x, x);
    const double vyy = dcov(y, y);
    const double sx = x.max_distance();
    const double sy = y.max_distance();
    if (vxx <= detail::kZeroRelTol * sx * sx || vyy <= detail::kZeroRelTol * sy * sy) return 0.0;
    const double denom = std::sqrt(vxx * vyy);
    if (!(denom > 0.0) || !std::isfinite(denom)) return 0.0;
    const double r = dcov(x, y) / denom;
    const double lo = estimator == Estimator::Biased ? 0.0 : -1.0;
    return std::clamp(r, lo, 1.0);
}

double dcor(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, Estimator estimator) {
    require_same_n(x.rows(), y.rows(), "dcor");
    return dcor(distance_matrix(x), distance_matrix(y), estimator);
}

}  // namespace dcornet
