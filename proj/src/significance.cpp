#include "dcornet/significance.hpp"

#include <limits>
#include <numeric>

#include "dcornet/error.hpp"

namespace dcornet {

namespace {

// Fixed Y and Z parts of the statistic; only X's matrix moves between draws.
class PermutationKernel {
public:
    PermutationKernel(const DistanceMatrix& x, const DistanceMatrix& y, const ConditioningSet& z)
        : a_(u_center(x)), b_(u_center(y)), permuted_(a_) {
        if (x.size() != y.size()) throw InputError("permutation_test: sample counts differ");
        gram_.bb = hilbert_inner(b_, b_);
        if (!z.empty()) {
            if (z.joint_sq.rows() != x.size()) throw InputError("permutation_test: conditioning set size mismatch");
            c_ = u_center(distance_from_squared(z.joint_sq));
            gram_.has_c = true;
            gram_.cc = hilbert_inner(c_, c_);
            gram_.bc = hilbert_inner(b_, c_);
            gram_.c_degenerate = projection_degenerate(gram_.cc, c_.m.cwiseAbs().maxCoeff());
        }
    }

    Eigen::Index size() const { return a_.size(); }

    double evaluate(const std::vector<Eigen::Index>& perm) {
        const Eigen::Index n = a_.size();
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i) permuted_.m(i, j) = a_.m(perm[i], perm[j]);
        Gram g = gram_;
        g.aa = hilbert_inner(permuted_, permuted_);
        g.ab = hilbert_inner(permuted_, b_);
        if (g.has_c) g.ac = hilbert_inner(permuted_, c_);
        return pdcor_from_gram(g);
    }

private:
    CenteredMatrix a_;
    CenteredMatrix b_;
    CenteredMatrix c_;
    CenteredMatrix permuted_;
    Gram gram_;
};

std::vector<Eigen::Index> identity(Eigen::Index n) {
    std::vector<Eigen::Index> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), Eigen::Index{0});
    return p;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    // rejection on the top of the range keeps every residue equally likely
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % bound;
}

std::vector<Eigen::Index> random_permutation(std::mt19937_64& rng, Eigen::Index n) {
    auto p = identity(n);
    for (std::size_t i = p.size(); i > 1; --i) {
        const auto j = uniform_below(rng, i);
        std::swap(p[i - 1], p[j]);
    }
    return p;
}

double permuted_pdcor(const DistanceMatrix& x, const DistanceMatrix& y, const ConditioningSet& z,
                      const std::vector<Eigen::Index>& perm) {
    PermutationKernel kernel(x, y, z);
    if (static_cast<Eigen::Index>(perm.size()) != kernel.size()) throw InputError("permuted_pdcor: bad permutation size");
    return kernel.evaluate(perm);
}

TestResult permutation_test(const DistanceMatrix& x, const DistanceMatrix& y, const ConditioningSet& z,
                            std::size_t n_perm, std::uint64_t seed) {
    if (n_perm < 1) throw InputError("permutation_test: need at least one permutation");
    PermutationKernel kernel(x, y, z);
    TestResult result;
    result.n_permutations = n_perm;
    result.seed = seed;
    result.statistic = kernel.evaluate(identity(kernel.size()));

    std::mt19937_64 rng(seed);
    std::size_t at_least = 0;
    for (std::size_t p = 0; p < n_perm; ++p) {
        if (kernel.evaluate(random_permutation(rng, kernel.size())) >= result.statistic) ++at_least;
    }
    result.p_value = static_cast<double>(1 + at_least) / static_cast<double>(1 + n_perm);
    return result;
}

TestResult permutation_test(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const ConditioningSet& z,
                            std::size_t n_perm, std::uint64_t seed) {
    if (x.rows() != y.rows()) throw InputError("permutation_test: sample counts differ");
    return permutation_test(distance_matrix(x), distance_matrix(y), z, n_perm, seed);
}

}  // namespace dcornet
