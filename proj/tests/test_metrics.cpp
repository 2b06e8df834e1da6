#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "oracle.hpp"
#include "repsim/error.hpp"
#include "repsim/metrics.hpp"

using namespace repsim;

namespace {

// Worked pair used throughout: XX' = [[5,11,17],[11,25,39],[17,39,61]],
// YY' = [[1,0,2],[0,0,0],[2,0,4]].
DataMatrix worked_x() { return DataMatrix::from_rows({{1, 2}, {3, 4}, {5, 6}}); }
DataMatrix worked_y() { return DataMatrix::from_rows({{1}, {0}, {2}}); }

// Frozen from the explicit-Gram oracle: tr(GH) = 317, sum G_ii H_ii = 249,
// ||G||^2 = 8233, sum G_ii^2 = 4371, ||H||^2 = 25, sum H_ii^2 = 17.
const double kGoldenRv = 317.0 / std::sqrt(8233.0 * 25.0);
const double kGoldenRv2 = 68.0 / std::sqrt(3862.0 * 8.0);
const double kGoldenCka = 0.25;

DataMatrix permute_rows(const DataMatrix& m, const std::vector<std::size_t>& perm) {
    std::vector<double> v;
    for (std::size_t r : perm) v.insert(v.end(), m.row(r).begin(), m.row(r).end());
    return DataMatrix(m.n_obs(), m.n_feat(), std::move(v));
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("center_columns examples") {
    const auto c = center_columns(DataMatrix::from_rows({{1, 2}, {3, 4}}));
    CHECK(c == DataMatrix::from_rows({{-1, -1}, {1, 1}}));

    const auto constant = center_columns(DataMatrix::from_rows({{5}, {5}, {5}}));
    CHECK(constant == DataMatrix::from_rows({{0}, {0}, {0}}));

    const auto m = oracle::random_normal(40, 7, 3);
    const auto once = center_columns(m);
    const auto twice = center_columns(once);
    double max_abs = 0.0;
    for (double v : m.values()) max_abs = std::max(max_abs, std::abs(v));
    for (std::size_t k = 0; k < m.n_feat(); ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < m.n_obs(); ++i) sum += once(i, k);
        CHECK(std::abs(sum) <= 1e-9 * 40 * max_abs);
        for (std::size_t i = 0; i < m.n_obs(); ++i) CHECK(twice(i, k) == doctest::Approx(once(i, k)).epsilon(1e-12));
    }
}

TEST_CASE("cross_gram_stats on the worked pair matches the explicit-Gram oracle") {
    const auto x = worked_x(), y = worked_y();
    const auto o = oracle::explicit_stats(x, y);
    CHECK(o.t_cross == 317.0);
    CHECK(o.d_diag == 249.0);
    CHECK(o.sxx == 8233.0);
    CHECK(o.dxx == 4371.0);
    CHECK(o.syy == 25.0);
    CHECK(o.dyy == 17.0);

    for (auto path : {StatsPath::automatic, StatsPath::feature_space, StatsPath::gram_space}) {
        const auto s = cross_gram_stats(x, y, path);
        CHECK(s.t_cross == 317.0);
        CHECK(s.d_diag == 249.0);
        CHECK(s.sxx == 8233.0);
        CHECK(s.dxx == 4371.0);
        CHECK(s.syy == 25.0);
        CHECK(s.dyy == 17.0);
    }
}

TEST_CASE("cross_gram_stats rejects differing row counts") {
    CHECK_THROWS_AS(cross_gram_stats(worked_x(), oracle::random_normal(4, 1, 1)), ShapeMismatch);
}

TEST_CASE("golden values") {
    const auto x = worked_x(), y = worked_y();
    REQUIRE(oracle::rv(x, y) == doctest::Approx(kGoldenRv).epsilon(1e-14));
    REQUIRE(oracle::rv2(x, y) == doctest::Approx(kGoldenRv2).epsilon(1e-14));
    REQUIRE(oracle::linear_cka(x, y) == doctest::Approx(kGoldenCka).epsilon(1e-14));

    CHECK(oracle::rel_diff(rv(x, y), kGoldenRv) <= 1e-9);
    CHECK(oracle::rel_diff(rv2(x, y), kGoldenRv2) <= 1e-9);
    CHECK(oracle::rel_diff(linear_cka(x, y), kGoldenCka) <= 1e-9);
    CHECK(rv(x, y) == doctest::Approx(0.6987).epsilon(1e-4));
    CHECK(rv2(x, y) == doctest::Approx(0.38686).epsilon(1e-5));
}

TEST_CASE("self-similarity is exactly one") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto x = oracle::random_normal(3 + seed * 7, 1 + seed * 5, seed);
        CHECK(rv(x, x) == 1.0);
        CHECK(rv2(x, x) == 1.0);
        CHECK(linear_cka(x, x) == 1.0);
    }
}

TEST_CASE("degenerate inputs") {
    const auto zero = DataMatrix::from_rows({{0, 0}, {0, 0}, {0, 0}});
    const auto y = worked_y();
    CHECK_THROWS_AS(rv(zero, y), DegenerateInput);
    CHECK_THROWS_AS(rv2(zero, y), DegenerateInput);

    // Orthogonal observations: every off-diagonal Gram entry vanishes.
    const auto orth = DataMatrix::from_rows({{3, 0}, {0, -2}});
    const auto other = DataMatrix::from_rows({{1, 1}, {2, 1}});
    CHECK_THROWS_AS(rv2(orth, other), DegenerateInput);
    CHECK_THROWS_AS(rv2(other, orth), DegenerateInput);
    CHECK_NOTHROW(rv(orth, other));

    const auto constant = DataMatrix::from_rows({{4, 1}, {4, 1}, {4, 1}});
    CHECK_THROWS_AS(linear_cka(constant, worked_x()), DegenerateInput);

    const auto single = DataMatrix::from_rows({{1, 2}});
    CHECK_THROWS_AS(rv(single, single), DegenerateInput);
}

TEST_CASE("shape mismatch") {
    const auto a = oracle::random_normal(5, 2, 1);
    const auto b = oracle::random_normal(6, 2, 2);
    CHECK_THROWS_AS(rv(a, b), ShapeMismatch);
    CHECK_THROWS_AS(rv2(a, b), ShapeMismatch);
    CHECK_THROWS_AS(linear_cka(a, b), ShapeMismatch);
}

TEST_CASE("non-finite entries rejected at construction") {
    CHECK_THROWS_AS(DataMatrix(2, 1, {1.0, std::numeric_limits<double>::quiet_NaN()}), InvalidInput);
    CHECK_THROWS_AS(DataMatrix(2, 1, {1.0, std::numeric_limits<double>::infinity()}), InvalidInput);
    CHECK_THROWS_AS(DataMatrix(2, 2, {1.0, 2.0}), InvalidInput);
}

TEST_CASE("metrics agree with the oracle on random shapes") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + rng() % 60, p = 1 + rng() % 40, q = 1 + rng() % 40;
        const auto x = oracle::random_normal(n, p, rng());
        const auto y = oracle::random_normal(n, q, rng());
        CHECK(oracle::rel_diff(rv(x, y), oracle::rv(x, y)) <= 1e-9);
        CHECK(oracle::rel_diff(linear_cka(x, y), oracle::linear_cka(x, y)) <= 1e-9);
        if (n > 2) CHECK(std::abs(rv2(x, y) - oracle::rv2(x, y)) <= 1e-9);
    }
}

TEST_CASE("symmetry is exact and bounds hold") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 3 + rng() % 80, p = 1 + rng() % 50, q = 1 + rng() % 50;
        const auto x = oracle::random_normal(n, p, rng());
        const auto y = oracle::random_normal(n, q, rng());
        const double r = rv(x, y), r2 = rv2(x, y), c = linear_cka(x, y);
        CHECK(r == rv(y, x));
        CHECK(r2 == rv2(y, x));
        CHECK(c == linear_cka(y, x));
        CHECK(r >= -1e-12);
        CHECK(r <= 1 + 1e-12);
        CHECK(r2 >= -1 - 1e-12);
        CHECK(r2 <= 1 + 1e-12);
        CHECK(c >= -1e-12);
        CHECK(c <= 1 + 1e-12);
    }
}

TEST_CASE("linear_cka is rv on centered inputs, bit for bit") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto x = oracle::random_normal(10 + seed, 3 + seed % 11, 1000 + seed);
        const auto y = oracle::random_normal(10 + seed, 1 + seed % 17, 2000 + seed);
        CHECK(linear_cka(x, y) == rv(center_columns(x), center_columns(y)));
    }
    const auto x = oracle::random_normal(30, 6, 1), y = oracle::random_normal(30, 4, 2);
    CHECK(std::abs(linear_cka(oracle::scaled(x, 3.7), y) - linear_cka(x, y)) <= 1e-12);
}

TEST_CASE("orthogonal, scaling and permutation invariance") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const std::size_t n = seed % 2 ? 50 : 12, p = 5 + seed, q = 3 + seed;
        const auto x = oracle::random_normal(n, p, seed * 11 + 1);
        const auto y = oracle::random_normal(n, q, seed * 11 + 2);
        const auto xq = oracle::times(x, oracle::random_orthogonal(p, seed + 99));
        for (Metric m : {Metric::rv, Metric::rv2, Metric::linear_cka}) {
            const double base = compute_metric(m, x, y);
            CHECK(std::abs(compute_metric(m, xq, y) - base) <= 1e-10);
            for (double a : {1e-3, 1.0, 1e3})
                for (double b : {1e-3, 1.0, 1e3})
                    CHECK(std::abs(compute_metric(m, oracle::scaled(x, a), oracle::scaled(y, b)) - base) <= 1e-10);
            std::vector<std::size_t> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), std::mt19937_64(seed));
            CHECK(std::abs(compute_metric(m, permute_rows(x, perm), permute_rows(y, perm)) - base) <= 1e-12);
        }
    }
}

TEST_CASE("general invertible maps change rv2 and linear_cka") {
    const auto x = oracle::random_normal(40, 4, 8);
    // y shares three of x's four directions, so stretching the fourth
    // swamps the shared structure.
    const auto y = oracle::from_eigen(oracle::to_eigen(x).rightCols(3));
    oracle::Mat a = oracle::Mat::Identity(4, 4);
    a(0, 0) = 25.0;
    a(1, 0) = 3.0;
    const auto xa = oracle::times(x, a);
    CHECK(std::abs(rv2(xa, y) - rv2(x, y)) > 0.01);
    CHECK(std::abs(linear_cka(xa, y) - linear_cka(x, y)) > 0.01);
}

TEST_CASE("pairwise_similarity contract") {
    const std::size_t n = 30;
    std::vector<DataMatrix> layers;
    for (std::size_t i = 0; i < 4; ++i)
        layers.push_back(oracle::random_normal(n, 3 + i, 50 + i).with_label("c" + std::to_string(i + 1)));
    const ActivationSet s(layers, "probe");

    SUBCASE("self comparison") {
        const auto r = pairwise_similarity(s, s, Metric::rv2);
        CHECK(r.degenerate_cells == 0);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(r.matrix(i, i) == 1.0);
            for (std::size_t j = 0; j < 4; ++j) CHECK(r.matrix(i, j) == r.matrix(j, i));
        }
    }
    SUBCASE("shape and labels") {
        const ActivationSet a({layers[0], layers[1]}, "probe");
        const ActivationSet b({layers[1], layers[2], layers[3]}, "probe");
        const auto r = pairwise_similarity(a, b, Metric::linear_cka);
        CHECK(r.matrix.rows() == 2);
        CHECK(r.matrix.cols() == 3);
        CHECK(r.matrix.row_labels() == std::vector<std::string>{"c1", "c2"});
        CHECK(r.matrix.col_labels() == std::vector<std::string>{"c2", "c3", "c4"});
        CHECK(r.matrix.metric() == "linear_cka");
        CHECK(r.matrix(1, 0) == linear_cka(layers[1], layers[1]));
    }
    SUBCASE("degenerate cells become NaN") {
        std::vector<double> v(n * 2, 0.0);
        const ActivationSet withzero({layers[0], DataMatrix(n, 2, v, "dead")}, "probe");
        const auto r = pairwise_similarity(withzero, s, Metric::rv);
        CHECK(r.degenerate_cells == 4);
        CHECK(std::isnan(r.matrix(1, 0)));
        CHECK(!std::isnan(r.matrix(0, 0)));
    }
    SUBCASE("probe size mismatch") {
        const ActivationSet other({oracle::random_normal(n + 1, 2, 1).with_label("x")}, "probe");
        CHECK_THROWS_AS(pairwise_similarity(s, other, Metric::rv2), ShapeMismatch);
    }
    SUBCASE("worker count does not change bytes") {
        const auto one = to_csv(pairwise_similarity(s, s, Metric::rv2, {false, 1}).matrix);
        const auto many = to_csv(pairwise_similarity(s, s, Metric::rv2, {false, 4}).matrix);
        CHECK(one == many);
    }
}

TEST_CASE("center flag") {
    const auto x = oracle::random_normal(20, 5, 1), y = oracle::random_normal(20, 5, 2);
    CHECK(compute_metric(Metric::rv, x, y, true) == linear_cka(x, y));
    CHECK(compute_metric(Metric::rv2, x, y, true) == rv2(center_columns(x), center_columns(y)));
    CHECK(compute_metric(Metric::rv2, x, y, false) == rv2(x, y));
}

TEST_CASE("metric ids") {
    CHECK(parse_metric("cka") == Metric::linear_cka);
    CHECK(parse_metric("rv2") == Metric::rv2);
    CHECK(!parse_metric("pwcca"));
    CHECK(metric_id(Metric::rv) == "rv");
}

}  // TEST_SUITE
