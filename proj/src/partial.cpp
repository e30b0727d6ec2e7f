#include "dcornet/partial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dcornet/error.hpp"

namespace dcornet {

namespace {

void require_u(const CenteredMatrix& m, const char* what) {
    if (m.kind != Centering::U) throw InputError(std::string(what) + ": expected a U-centered matrix");
}

void require_same(const CenteredMatrix& a, const CenteredMatrix& b, const char* what) {
    require_u(a, what);
    require_u(b, what);
    if (a.size() != b.size()) {
        std::ostringstream os;
        os << what << ": size mismatch (" << a.size() << " vs " << b.size() << ")";
        throw InputError(os.str());
    }
    if (a.size() < 4) throw InputError(std::string(what) + ": need at least 4 samples");
}

double ratio(double cross, double px, double py, double aa, double bb) {
    if (px <= detail::kPerpRelTol * aa || py <= detail::kPerpRelTol * bb) return 0.0;
    const double denom = std::sqrt(px * py);
    if (!(denom > 0.0) || !std::isfinite(denom)) return 0.0;
    return std::clamp(cross / denom, -1.0, 1.0);
}

CenteredMatrix conditioning_matrix(const ConditioningSet& z, Eigen::Index n) {
    if (z.joint_sq.rows() != n || z.joint_sq.cols() != n) {
        throw InputError("conditioning set: joint distance size does not match sample count");
    }
    return u_center(distance_from_squared(z.joint_sq));
}

}  // namespace

ConditioningSet ConditioningSet::from_samples(const std::vector<Eigen::MatrixXd>& members) {
    ConditioningSet z;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto dm = distance_matrix(members[i]);
        if (i == 0) {
            z.joint_sq = dm.sq;
        } else {
            if (dm.size() != z.joint_sq.rows()) throw InputError("conditioning set: members differ in sample count");
            z.joint_sq += dm.sq;
        }
        z.nodes.push_back(i);
    }
    return z;
}

ConditioningSet ConditioningSet::from_squared(std::vector<std::size_t> nodes,
                                              const std::vector<const Eigen::MatrixXd*>& member_sq) {
    if (nodes.size() != member_sq.size()) throw InputError("conditioning set: node/matrix count mismatch");
    ConditioningSet z;
    z.nodes = std::move(nodes);
    for (std::size_t i = 0; i < member_sq.size(); ++i) {
        if (i == 0) {
            z.joint_sq = *member_sq[i];
        } else {
            if (member_sq[i]->rows() != z.joint_sq.rows()) {
                throw InputError("conditioning set: members differ in sample count");
            }
            z.joint_sq += *member_sq[i];
        }
    }
    return z;
}

double hilbert_inner(const CenteredMatrix& a, const CenteredMatrix& b) {
    require_same(a, b, "hilbert_inner");
    const double n = static_cast<double>(a.size());
    // diagonals are zero by construction, so the full sum is the i != j sum
    return frobenius(a.m, b.m) / (n * (n - 3.0));
}

bool projection_degenerate(double cc, double c_max_abs) {
    return !(cc > detail::kZeroRelTol * c_max_abs * c_max_abs);
}

CenteredMatrix project_complement(const CenteredMatrix& a, const CenteredMatrix& c) {
    require_same(a, c, "project_complement");
    const double cc = hilbert_inner(c, c);
    if (projection_degenerate(cc, c.m.cwiseAbs().maxCoeff())) return a;
    const double beta = hilbert_inner(a, c) / cc;
    return {Centering::U, a.m - beta * c.m};
}

double pdcor_from_gram(const Gram& g) {
    if (!g.has_c || g.c_degenerate) return ratio(g.ab, g.aa, g.bb, g.aa, g.bb);
    const double px = g.aa - g.ac * g.ac / g.cc;
    const double py = g.bb - g.bc * g.bc / g.cc;
    const double cross = g.ab - g.ac * g.bc / g.cc;
    return ratio(cross, px, py, g.aa, g.bb);
}

ProjectionResult project_pair(const CenteredMatrix& a, const CenteredMatrix& b, const CenteredMatrix* c) {
    require_same(a, b, "project_pair");
    if (c == nullptr) return {a, b, 0.0, 0.0, 0.0};
    ProjectionResult r{project_complement(a, *c), project_complement(b, *c), 0.0, 0.0, 0.0};
    r.ac = hilbert_inner(a, *c);
    r.bc = hilbert_inner(b, *c);
    r.cc = hilbert_inner(*c, *c);
    return r;
}

double pdcov(const DistanceMatrix& x, const DistanceMatrix& y, const ConditioningSet& z) {
    if (x.size() != y.size()) throw InputError("pdcov: sample counts differ");
    const auto a = u_center(x);
    const auto b = u_center(y);
    if (z.empty()) return hilbert_inner(a, b);
    const auto c = conditioning_matrix(z, x.size());
    const auto p = project_pair(a, b, &c);
    return hilbert_inner(p.x_perp, p.y_perp);
}

double pdcor(const DistanceMatrix& x, const DistanceMatrix& y, const ConditioningSet& z) {
    if (x.size() != y.size()) throw InputError("pdcor: sample counts differ");
    const auto a = u_center(x);
    const auto b = u_center(y);
    const double aa = hilbert_inner(a, a);
    const double bb = hilbert_inner(b, b);
    if (z.empty()) return ratio(hilbert_inner(a, b), aa, bb, aa, bb);
    const auto c = conditioning_matrix(z, x.size());
    const auto p = project_pair(a, b, &c);
    return ratio(hilbert_inner(p.x_perp, p.y_perp), hilbert_inner(p.x_perp, p.x_perp),
                 hilbert_inner(p.y_perp, p.y_perp), aa, bb);
}

double pdcov(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const ConditioningSet& z) {
    if (x.rows() != y.rows()) throw InputError("pdcov: sample counts differ");
    return pdcov(distance_matrix(x), distance_matrix(y), z);
}

double pdcor(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const ConditioningSet& z) {
    if (x.rows() != y.rows()) throw InputError("pdcor: sample counts differ");
    return pdcor(distance_matrix(x), distance_matrix(y), z);
}

}  // namespace dcornet
