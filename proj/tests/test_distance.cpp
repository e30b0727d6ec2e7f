#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dcornet/distance.hpp"
#include "dcornet/error.hpp"
#include "oracles.hpp"

using namespace dcornet;

TEST_CASE("distance_matrix: 3-4-5 and identical rows") {
    Eigen::MatrixXd x(2, 2);
    x << 0, 0, 3, 4;
    const auto dm = distance_matrix(x);
    CHECK(dm.dist(0, 1) == 5.0);
    CHECK(dm.dist(1, 0) == 5.0);
    CHECK(dm.dist(0, 0) == 0.0);
    CHECK(dm.sq(0, 1) == 25.0);

    const Eigen::MatrixXd same = Eigen::MatrixXd::Constant(4, 3, 1.25);
    CHECK(distance_matrix(same).dist.isZero(0.0));
}

TEST_CASE("distance_matrix: matches nested loops and is a metric") {
    std::mt19937_64 rng(1);
    const auto x = oracle::normal_matrix(rng, 5, 3);
    const auto dm = distance_matrix(x);
    const auto ref = oracle::distances(oracle::from_eigen(x));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            CHECK(std::abs(dm.dist(i, j) - ref[i][j]) <= 1e-12);
            CHECK(dm.dist(i, j) == dm.dist(j, i));
            for (int k = 0; k < 5; ++k) CHECK(dm.dist(i, k) <= dm.dist(i, j) + dm.dist(j, k) + 1e-12);
        }
}

TEST_CASE("distance_matrix: error contracts") {
    CHECK_THROWS_AS(distance_matrix(Eigen::MatrixXd::Zero(1, 3)), InputError);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 1);
    bad(1, 0) = std::nan("");
    CHECK_THROWS_AS(distance_matrix(bad), InputError);
}

TEST_CASE("double_center: zero input, 2x2 closed form, row sums") {
    const auto zero = double_center(distance_matrix(Eigen::MatrixXd::Zero(3, 2)));
    CHECK(zero.m.isZero(0.0));
    CHECK(zero.kind == Centering::Double);

    // points at distance c: row means c/2, grand mean c/2
    Eigen::MatrixXd x(2, 1);
    x << 0.0, 3.0;
    const auto two = double_center(distance_matrix(x));
    CHECK(two.m(0, 1) == doctest::Approx(1.5));
    CHECK(two.m(0, 0) == doctest::Approx(-1.5));

    std::mt19937_64 rng(2);
    const auto dm = distance_matrix(oracle::normal_matrix(rng, 6, 6));
    const auto c = double_center(dm);
    const double scale = dm.dist.cwiseAbs().maxCoeff();
    for (int i = 0; i < 6; ++i) {
        CHECK(std::abs(c.m.row(i).sum()) <= 1e-10 * scale);
        CHECK(std::abs(c.m.col(i).sum()) <= 1e-10 * scale);
    }
}

TEST_CASE("u_center: zero input, direct formula, row sums, small n") {
    const auto zero = u_center(distance_matrix(Eigen::MatrixXd::Zero(5, 2)));
    CHECK(zero.m.isZero(0.0));
    CHECK(zero.kind == Centering::U);

    std::mt19937_64 rng(3);
    const auto x = oracle::normal_matrix(rng, 5, 2);
    const auto u = u_center(distance_matrix(x));
    const auto ref = oracle::u_center(oracle::distances(oracle::from_eigen(x)));
    double scale = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) scale = std::max(scale, std::abs(ref[i][j]));
    for (int i = 0; i < 5; ++i) {
        CHECK(u.m(i, i) == 0.0);
        for (int j = 0; j < 5; ++j) CHECK(std::abs(u.m(i, j) - ref[i][j]) <= 1e-12 * scale);
        CHECK(std::abs(u.m.row(i).sum()) <= 1e-10 * scale);
    }
    CHECK_THROWS_AS(u_center(distance_matrix(Eigen::MatrixXd::Zero(3, 1))), InputError);
}

TEST_CASE("centering reproduces the naive reference on 100 random instances") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> n_dist(4, 12), d_dist(1, 4);
    for (int t = 0; t < 100; ++t) {
        const int n = n_dist(rng);
        const auto x = oracle::normal_matrix(rng, n, d_dist(rng));
        const auto dm = distance_matrix(x);
        const auto a = oracle::distances(oracle::from_eigen(x));
        const auto dc_ref = oracle::double_center(a);
        const auto uc_ref = oracle::u_center(a);
        const auto dc = double_center(dm);
        const auto uc = u_center(dm);
        double s1 = 0, s2 = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                s1 = std::max(s1, std::abs(dc_ref[i][j]));
                s2 = std::max(s2, std::abs(uc_ref[i][j]));
            }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                CHECK(std::abs(dc.m(i, j) - dc_ref[i][j]) <= 1e-12 * s1);
                CHECK(std::abs(uc.m(i, j) - uc_ref[i][j]) <= 1e-12 * s2);
            }
    }
}

TEST_CASE("dcov_biased: constant y, two-point closed form, nested-loop oracle") {
    std::mt19937_64 rng(5);
    const auto x = oracle::normal_matrix(rng, 8, 3);
    CHECK(dcov_biased(x, Eigen::MatrixXd::Constant(8, 2, 4.0)) == 0.0);

    // two points at distance 5: A = [[-5/2, 5/2], [5/2, -5/2]], (1/4) * sum A^2 = 25/4
    Eigen::MatrixXd two(2, 2);
    two << 0, 0, 3, 4;
    CHECK(dcov_biased(two, two) == doctest::Approx(6.25).epsilon(1e-14));

    const auto y = oracle::normal_matrix(rng, 8, 2);
    const double want = oracle::dcov_biased(oracle::from_eigen(x), oracle::from_eigen(y));
    const double scale = std::sqrt(oracle::dcov_biased(oracle::from_eigen(x), oracle::from_eigen(x)) *
                                   oracle::dcov_biased(oracle::from_eigen(y), oracle::from_eigen(y)));
    CHECK(std::abs(dcov_biased(x, y) - want) <= 1e-12 * scale);
    CHECK_THROWS_AS(dcov_biased(x, oracle::normal_matrix(rng, 7, 2)), InputError);
}

TEST_CASE("dcov_unbiased: constant y, self nonnegative, nested-loop oracle") {
    std::mt19937_64 rng(6);
    const auto x = oracle::normal_matrix(rng, 10, 2);
    const auto y = oracle::normal_matrix(rng, 10, 3);
    CHECK(dcov_unbiased(x, Eigen::MatrixXd::Constant(10, 1, -2.0)) == 0.0);
    CHECK(dcov_unbiased(x, x) >= 0.0);
    const auto xs = oracle::from_eigen(x), ys = oracle::from_eigen(y);
    const double scale = std::sqrt(oracle::dcov_unbiased(xs, xs) * oracle::dcov_unbiased(ys, ys));
    CHECK(std::abs(dcov_unbiased(x, y) - oracle::dcov_unbiased(xs, ys)) <= 1e-12 * scale);
    CHECK_THROWS_AS(dcov_unbiased(oracle::normal_matrix(rng, 3, 1), oracle::normal_matrix(rng, 3, 1)), InputError);
}

TEST_CASE("estimator properties on random instances") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 40; ++t) {
        const auto x = oracle::normal_matrix(rng, 12, 3);
        const auto y = oracle::normal_matrix(rng, 12, 2);
        // exact symmetry
        CHECK(dcov_biased(x, y) == dcov_biased(y, x));
        CHECK(dcov_unbiased(x, y) == dcov_unbiased(y, x));
        CHECK(dcov_biased(x, y) >= 0.0);
        CHECK(dcov_unbiased(y, y) >= 0.0);

        // translation invariance
        const Eigen::RowVectorXd shift = oracle::normal_matrix(rng, 1, 3).row(0) * 100.0;
        const Eigen::MatrixXd xs = x.rowwise() + shift;
        const double scale = std::sqrt(dcov_unbiased(x, x) * dcov_unbiased(y, y));
        CHECK(std::abs(dcov_unbiased(xs, y) - dcov_unbiased(x, y)) <= 1e-10 * scale * 100.0);
        CHECK(std::abs(dcov_biased(xs, y) - dcov_biased(x, y)) <= 1e-10 * scale * 100.0);

        // scale law
        const double b = -2.5;
        const auto d1 = distance_matrix(x), d2 = distance_matrix(b * x);
        CHECK((d2.dist - std::abs(b) * d1.dist).cwiseAbs().maxCoeff() <= 1e-12 * d2.dist.maxCoeff());
        CHECK(std::abs(dcor(Eigen::MatrixXd(b * x), y, Estimator::Biased) - dcor(x, y, Estimator::Biased)) <= 1e-10);
    }
}

TEST_CASE("dcor: affine-orthogonal map gives one, constant gives zero") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 5; ++t) {
        const auto x = oracle::normal_matrix(rng, 40, 3);
        const auto c = oracle::random_orthogonal(rng, 3);
        const Eigen::RowVectorXd a = oracle::normal_matrix(rng, 1, 3).row(0);
        const Eigen::MatrixXd y = ((-1.7 * x * c.transpose()).rowwise() + a).eval();
        CHECK(std::abs(dcor(x, y, Estimator::Biased) - 1.0) <= 1e-10);
        CHECK(std::abs(dcor(x, y, Estimator::Unbiased) - 1.0) <= 1e-10);
    }
    const auto y = oracle::normal_matrix(rng, 10, 2);
    CHECK(dcor(Eigen::MatrixXd::Constant(10, 2, 3.0), y, Estimator::Biased) == 0.0);
    CHECK(dcor(Eigen::MatrixXd::Constant(10, 2, 3.0), y, Estimator::Unbiased) == 0.0);
}

TEST_CASE("dcor: biased lies in [0, 1]; unbiased near zero for independent normals") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 30; ++t) {
        const double r = dcor(oracle::normal_matrix(rng, 15, 2), oracle::normal_matrix(rng, 15, 1), Estimator::Biased);
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
    }
    // Monte-Carlo: n = 500 independent standard normals
    std::mt19937_64 mc(20240101);
    const auto x = oracle::normal_matrix(mc, 500, 1);
    const auto y = oracle::normal_matrix(mc, 500, 1);
    CHECK(std::abs(dcor(x, y, Estimator::Unbiased)) <= 0.05);
}

TEST_CASE("pairwise_dot: deterministic and close to the naive sum") {
    std::vector<double> a(1000), b(1000);
    for (int i = 0; i < 1000; ++i) {
        a[i] = std::sin(i);
        b[i] = std::cos(i * 0.5);
    }
    const double s1 = pairwise_dot(a, b);
    const double s2 = pairwise_dot(a, b);
    CHECK(s1 == s2);
    double naive = 0;
    for (int i = 0; i < 1000; ++i) naive += a[i] * b[i];
    CHECK(s1 == doctest::Approx(naive).epsilon(1e-12));
}
