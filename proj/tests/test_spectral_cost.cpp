#include <doctest.h>

#include <cmath>
#include <functional>

#include "rescost/matrix.hpp"
#include "rescost/prng.hpp"
#include "rescost/spectral_cost.hpp"
#include "rescost/svd.hpp"

using namespace rescost;

namespace {

// Independent oracle for the depth-1 inner problem: dense grid over the
// bracket followed by bisection on the derivative. Stays clear of the
// golden-section path used by the implementation.
struct ScalarOracle {
    double cost;
    double alpha;
};

ScalarOracle grid_bisect_min(const std::function<double(double)>& f,
                             const std::function<double(double)>& df, double hi) {
    double best_x = 0.0, best_f = f(0.0);
    const double step = hi / 2e5;
    for (double x = step; x <= hi; x += step) {
        const double fx = f(x);
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
    }
    double lo = std::max(0.0, best_x - 2.0 * step), up = std::min(hi, best_x + 2.0 * step);
    if (df(lo) > 0.0) {
        return {f(0.0) < best_f ? f(0.0) : best_f, 0.0};
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + up);
        (df(mid) > 0.0 ? up : lo) = mid;
    }
    const double x = 0.5 * (lo + up);
    return {f(x), x};
}

ScalarOracle oracle_depth1(double sigma, std::size_t depth, double lambda) {
    const double l = static_cast<double>(depth);
    auto f = [&](double a) { return sigma * std::pow(1.0 + a / l, -l) + lambda * a * a; };
    auto df = [&](double a) {
        return -sigma * std::pow(1.0 + a / l, -l - 1.0) + 2.0 * lambda * a;
    };
    return grid_bisect_min(f, df, std::sqrt(sigma / lambda) + 1.0);
}

ScalarOracle oracle_depth1_inf(double sigma, double lambda) {
    auto f = [&](double a) { return sigma * std::exp(-a) + lambda * a * a; };
    auto df = [&](double a) { return -sigma * std::exp(-a) + 2.0 * lambda * a; };
    return grid_bisect_min(f, df, std::sqrt(sigma / lambda) + 1.0);
}

}  // namespace

TEST_SUITE("spectral-cost") {
    TEST_CASE("depth-1 scalar cost against the grid+bisection oracle") {
        // frozen from the oracle: argmin of 1/(1+a) + a^2 solves 2a(1+a)^2 = 1
        const ScalarOracle ref = oracle_depth1(1.0, 1, 1.0);
        CHECK(ref.cost == doctest::Approx(0.859219).epsilon(1e-5));
        CHECK(ref.alpha == doctest::Approx(0.298).epsilon(7e-3));

        const ScalarCostResult got = scalar_cost_depth1(1.0, 1, 1.0);
        CHECK(got.cost == doctest::Approx(ref.cost).epsilon(1e-10));
        CHECK(std::abs(got.alpha_star - ref.alpha) < 1e-8);

        CHECK(scalar_cost_depth1(0.0, 3, 2.0).cost == 0.0);
        CHECK(scalar_cost_depth1(0.0, 3, 2.0).alpha_star == 0.0);
    }

    TEST_CASE("depth-1 cost approaches the infinite-depth value") {
        // frozen from the oracle: min e^{-a} + a^2 at the root of e^{-a} = 2a
        const ScalarOracle ref = oracle_depth1_inf(1.0, 1.0);
        CHECK(ref.cost == doctest::Approx(0.827184).epsilon(1e-5));
        CHECK(ref.alpha == doctest::Approx(0.35173).epsilon(1e-4));

        const ScalarCostResult inf = scalar_cost_depth1_inf(1.0, 1.0);
        CHECK(inf.cost == doctest::Approx(ref.cost).epsilon(1e-10));
        CHECK(std::abs(inf.alpha_star - ref.alpha) < 1e-8);

        const ScalarCostResult big = scalar_cost_depth1(1.0, 100000, 1.0);
        CHECK(big.cost == doctest::Approx(inf.cost).epsilon(1e-4));
    }

    TEST_CASE("depth-2 closed form") {
        CHECK(scalar_cost_depth2(0.5, 3, 1.0).cost == doctest::Approx(0.5));
        CHECK(scalar_cost_depth2(0.5, 3, 1.0).alpha_star == 0.0);
        // 4 * 2^(1/4) - 3
        CHECK(scalar_cost_depth2(2.0, 3, 1.0).cost ==
              doctest::Approx(4.0 * std::pow(2.0, 0.25) - 3.0).epsilon(1e-14));
        CHECK(scalar_cost_depth2(2.0, 3, 1.0).alpha_star ==
              doctest::Approx(std::pow(2.0, 0.25) - 1.0).epsilon(1e-14));
        // continuity at the threshold
        CHECK(scalar_cost_depth2(1.0, 5, 1.0).cost == doctest::Approx(1.0));
        CHECK(scalar_cost_depth2(1.0 + 1e-13, 5, 1.0).cost == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("depth-2 infinite depth") {
        const double e = std::exp(1.0);
        CHECK(scalar_cost_depth2_inf(e, 1.0).cost == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(scalar_cost_depth2_inf(0.0, 1.0).cost == 0.0);
        CHECK(scalar_cost_depth1_inf(0.0, 1.0).cost == 0.0);
        // L -> infinity limit of the closed form
        CHECK(scalar_cost_depth2(3.0, 100000, 0.5).cost ==
              doctest::Approx(scalar_cost_depth2_inf(3.0, 0.5).cost).epsilon(1e-4));
    }

    TEST_CASE("scalar cost bounded by sigma and monotone") {
        Rng rng(5);
        for (int rep = 0; rep < 1000; ++rep) {
            const double sig_lo = rng.uniform(1e-3, 10.0);
            const double sig_hi = sig_lo + rng.uniform(1e-6, 5.0);
            const double lam_lo = rng.uniform(0.01, 100.0);
            const double lam_hi = lam_lo + rng.uniform(1e-6, 50.0);
            const std::size_t depth = 1 + rng.uniform_index(64);
            const int bd = rep % 2 + 1;
            auto eval = [&](double s, double lam) {
                return bd == 1 ? scalar_cost_depth1(s, depth, lam)
                               : scalar_cost_depth2(s, depth, lam);
            };
            const ScalarCostResult base = eval(sig_lo, lam_lo);
            REQUIRE(base.cost >= 0.0);
            REQUIRE(base.cost <= sig_lo + 1e-12);
            REQUIRE(eval(sig_hi, lam_lo).cost >= base.cost - 1e-10);
            REQUIRE(eval(sig_lo, lam_hi).cost >= base.cost - 1e-10);
        }
    }

    TEST_CASE("cost nonincreasing in depth, bounded below by the limit") {
        Rng rng(6);
        for (int rep = 0; rep < 300; ++rep) {
            const double sigma = rng.uniform(1e-3, 10.0);
            const double lambda = rng.uniform(0.01, 100.0);
            const int bd = rep % 2 + 1;
            auto eval = [&](std::size_t depth) {
                return bd == 1 ? scalar_cost_depth1(sigma, depth, lambda).cost
                               : scalar_cost_depth2(sigma, depth, lambda).cost;
            };
            const double inf_cost = bd == 1 ? scalar_cost_depth1_inf(sigma, lambda).cost
                                            : scalar_cost_depth2_inf(sigma, lambda).cost;
            double prev = eval(1);
            for (std::size_t depth : {2, 4, 8, 16, 32, 64}) {
                const double cur = eval(depth);
                REQUIRE(cur <= prev + 1e-10);
                REQUIRE(cur >= inf_cost - 1e-10);
                prev = cur;
            }
        }
    }

    TEST_CASE("finite-to-infinite depth gap at L = 1e4") {
        for (double sigma : {0.1, 1.0, 10.0}) {
            for (double lambda : {0.1, 1.0, 10.0}) {
                const double fin1 = scalar_cost_depth1(sigma, 10000, lambda).cost;
                const double inf1 = scalar_cost_depth1_inf(sigma, lambda).cost;
                CHECK(std::abs(fin1 - inf1) < 1e-3);
                const double fin2 = scalar_cost_depth2(sigma, 10000, lambda).cost;
                const double inf2 = scalar_cost_depth2_inf(sigma, lambda).cost;
                CHECK(std::abs(fin2 - inf2) < 1e-3);
            }
        }
    }

    TEST_CASE("matrix cost basics") {
        CostParams p;
        p.lambda = 10.0;
        p.depth = 5;
        p.block_depth = 2;
        p.width = 2;
        CHECK(matrix_cost(Matrix(2, 2), p).total == 0.0);
        const Matrix d31 = Matrix::diagonal(std::vector<double>{3.0, 1.0});
        CHECK(matrix_cost(d31, p).total == doctest::Approx(4.0).epsilon(1e-14));
        p.width = 1;
        CHECK_THROWS_AS(matrix_cost(d31, p), WidthError);
        p.width = 2;
        p.lambda = -1.0;
        CHECK_THROWS(matrix_cost(d31, p));
    }

    TEST_CASE("additivity against a direct diagonal evaluation") {
        Rng rng(8);
        for (int rep = 0; rep < 40; ++rep) {
            CostParams p;
            p.lambda = rng.uniform(0.05, 20.0);
            p.depth = 1 + rng.uniform_index(16);
            p.block_depth = rep % 2 + 1;
            const std::size_t n = 1 + rng.uniform_index(4);
            p.width = n;
            std::vector<double> sigma(n);
            for (double& s : sigma) {
                s = rng.uniform(0.0, 5.0);
            }
            std::sort(sigma.rbegin(), sigma.rend());
            const CostReport report = matrix_cost(Matrix::diagonal(sigma), p);
            double direct = 0.0;
            for (double s : sigma) {
                direct += scalar_cost(s, p).cost;
            }
            REQUIRE(std::abs(report.total - direct) <= 1e-12 * (1.0 + std::abs(direct)));
            double per_sum = 0.0;
            for (const ScalarCostResult& r : report.per_sigma) {
                per_sum += r.cost;
            }
            REQUIRE(std::abs(report.total - per_sum) <= 1e-12 * (1.0 + std::abs(per_sum)));
        }
    }

    TEST_CASE("orthogonal invariance") {
        Rng rng(9);
        for (int rep = 0; rep < 20; ++rep) {
            const std::size_t n = 2 + rng.uniform_index(3);
            const Matrix a = random_gaussian(n, n, rng);
            const Matrix q1 = random_orthogonal(n, derive_seed(9, rep * 2));
            const Matrix q2 = random_orthogonal(n, derive_seed(9, rep * 2 + 1));
            CostParams p;
            p.lambda = rng.uniform(0.1, 10.0);
            p.depth = 1 + rng.uniform_index(8);
            p.block_depth = rep % 2 + 1;
            p.width = n;
            const double base = matrix_cost(a, p).total;
            const double rotated = matrix_cost(matmul(q1, matmul(a, transpose(q2))), p).total;
            REQUIRE(std::abs(base - rotated) <= 1e-8 * (1.0 + std::abs(base)));
        }
    }

    TEST_CASE("nuclear norm bound, equality for depth-2 at large lambda") {
        Rng rng(10);
        for (int rep = 0; rep < 30; ++rep) {
            const std::size_t r = 1 + rng.uniform_index(4);
            const std::size_t c = 1 + rng.uniform_index(4);
            const Matrix a = random_gaussian(r, c, rng);
            const double nuclear = nuclear_norm(a);
            CostParams p;
            p.lambda = rng.uniform(0.05, 20.0);
            p.depth = rep % 3 == 0 ? kInfiniteDepth : 1 + rng.uniform_index(16);
            p.block_depth = rep % 2 + 1;
            p.width = std::max(r, c);
            REQUIRE(matrix_cost(a, p).total <= nuclear + 1e-10 * (1.0 + nuclear));
            if (p.block_depth == 2) {
                p.lambda = spectral_norm(a) + 1.0;
                p.depth = 1 + rng.uniform_index(16);
                REQUIRE(std::abs(matrix_cost(a, p).total - nuclear) <=
                        1e-12 * (1.0 + nuclear));
            }
        }
    }

    TEST_CASE("rank ratio") {
        CHECK(rank_ratio(Matrix::identity(2), 1e-6, 2) ==
              doctest::Approx(2.0 * (1.0 + std::log(1e6)) / std::log(1e6)).epsilon(1e-12));
        CHECK(rank_ratio(Matrix(3, 2), 0.5, 1) == 0.0);
        CHECK_THROWS_AS(rank_ratio(Matrix::identity(2), 1.0, 2), std::domain_error);
        CHECK_THROWS_AS(rank_ratio(Matrix::identity(2), 1.5, 1), std::domain_error);

        // rank-1 sigma = 5: strictly decreasing toward 1 as lambda shrinks
        const Matrix r1 = Matrix::diagonal(std::vector<double>{5.0});
        double prev = std::numeric_limits<double>::infinity();
        for (double lambda : {1e-3, 1e-5, 1e-7}) {
            const double ratio = rank_ratio(r1, lambda, 2);
            CHECK(ratio < prev);
            CHECK(ratio > 1.0);
            prev = ratio;
        }
        CHECK(prev == doctest::Approx(1.0).epsilon(0.25));
    }
}
