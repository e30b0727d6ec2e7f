#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dcornet/distance.hpp"
#include "dcornet/partial.hpp"

namespace dcornet {

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n_permutations = 0;
    std::uint64_t seed = 0;

    bool operator==(const TestResult&) const = default;
};

inline constexpr std::size_t kDefaultPermutations = 999;

// SplitMix64 finalizer; used to derive independent per-edge streams.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream);

// Uniform integer in [0, bound) without modulo bias.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

// Fisher-Yates shuffle of 0..n-1 driven by `rng`.
std::vector<Eigen::Index> random_permutation(std::mt19937_64& rng, Eigen::Index n);

// Permutation test of pdcor(x, y | z): rows of x are permuted (its U-centered
// matrix is re-indexed, never recomputed) while y and z stay fixed.
// p = (1 + #{permuted >= observed}) / (1 + n_perm).
TestResult permutation_test(const DistanceMatrix& x, const DistanceMatrix& y, const ConditioningSet& z,
                            std::size_t n_perm, std::uint64_t seed);
TestResult permutation_test(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const ConditioningSet& z,
                            std::size_t n_perm, std::uint64_t seed);

// pdcor of (x permuted by `perm`, y | z) using the same arithmetic as the test.
double permuted_pdcor(const DistanceMatrix& x, const DistanceMatrix& y, const ConditioningSet& z,
                      const std::vector<Eigen::Index>& perm);

}  // namespace dcornet
