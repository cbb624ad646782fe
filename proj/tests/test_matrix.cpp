#include <doctest.h>

#include "rescost/matrix.hpp"
#include "rescost/prng.hpp"

using namespace rescost;

TEST_SUITE("matrix") {
    TEST_CASE("construction and element access") {
        Matrix m(2, 3);
        CHECK(m.rows() == 2);
        CHECK(m.cols() == 3);
        for (double v : m.entries()) {
            CHECK(v == 0.0);
        }
        m(1, 2) = 5.0;
        CHECK(m(1, 2) == 5.0);
        CHECK_THROWS_AS(Matrix(2, 2, {1.0, 2.0, 3.0}), DimensionError);
    }

    TEST_CASE("identity and diagonal factories") {
        const Matrix i3 = Matrix::identity(3);
        CHECK(i3(0, 0) == 1.0);
        CHECK(i3(0, 1) == 0.0);
        const Matrix d = Matrix::diagonal(std::vector<double>{3.0, 1.0});
        CHECK(d(0, 0) == 3.0);
        CHECK(d(1, 1) == 1.0);
        const Matrix r = Matrix::diagonal(2, 4, std::vector<double>{5.0, 6.0});
        CHECK(r(1, 1) == 6.0);
        CHECK(r(1, 3) == 0.0);
    }

    TEST_CASE("matmul identity and dimension errors") {
        Rng rng(3);
        const Matrix a = random_gaussian(3, 4, rng);
        const Matrix prod = matmul(Matrix::identity(3), a);
        CHECK(max_abs_diff(prod, a) == 0.0);
        CHECK_THROWS_AS(matmul(a, a), DimensionError);
        CHECK_THROWS_AS(a + Matrix(2, 2), DimensionError);
    }

    TEST_CASE("frobenius") {
        const Matrix d = Matrix::diagonal(std::vector<double>{3.0, 4.0});
        CHECK(frobenius_sq(d) == doctest::Approx(25.0));
        CHECK(frobenius_norm(d) == doctest::Approx(5.0));
    }

    TEST_CASE("finite checks") {
        Matrix m(1, 2, {1.0, 2.0});
        CHECK(all_finite(m));
        m(0, 1) = std::numeric_limits<double>::quiet_NaN();
        CHECK_FALSE(all_finite(m));
        CHECK_THROWS(require_finite(m, "test"));
    }

    TEST_CASE("rng determinism per seed") {
        Rng a(42), b(42), c(43);
        bool all_equal = true, any_diff = false;
        for (int i = 0; i < 64; ++i) {
            const double x = a.uniform01();
            all_equal = all_equal && x == b.uniform01();
            any_diff = any_diff || x != c.uniform01();
        }
        CHECK(all_equal);
        CHECK(any_diff);
    }

    TEST_CASE("gaussian moments are sane") {
        Rng rng(7);
        double sum = 0.0, sum2 = 0.0;
        const int n = 20000;
        for (int i = 0; i < n; ++i) {
            const double g = rng.gaussian();
            sum += g;
            sum2 += g * g;
        }
        CHECK(std::abs(sum / n) < 0.03);
        CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.03));
    }

    TEST_CASE("random_orthogonal is orthogonal and deterministic") {
        for (std::size_t n : {1, 2, 3, 5, 8}) {
            const Matrix q = random_orthogonal(n, 42);
            const Matrix gram = matmul(transpose(q), q);
            CHECK(frobenius_norm(gram - Matrix::identity(n)) < 1e-12);
        }
        CHECK(max_abs_diff(random_orthogonal(4, 9), random_orthogonal(4, 9)) == 0.0);
    }

    TEST_CASE("latin hypercube stays in the box and stratifies") {
        const auto pts = latin_hypercube({-1.0, 0.0}, {1.0, 4.0}, 10, 5);
        REQUIRE(pts.size() == 10);
        std::vector<int> strata(10, 0);
        for (const auto& p : pts) {
            CHECK(p[0] >= -1.0);
            CHECK(p[0] <= 1.0);
            CHECK(p[1] >= 0.0);
            CHECK(p[1] <= 4.0);
            ++strata[static_cast<int>((p[1] - 0.0) / 0.4)];
        }
        for (int count : strata) {
            CHECK(count == 1);
        }
    }
}
