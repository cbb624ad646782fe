#include <doctest.h>

#include "rescost/prng.hpp"
#include "rescost/serialization.hpp"
#include "rescost/suites.hpp"

using namespace rescost;

TEST_SUITE("serialization") {
    TEST_CASE("matrix schema and round trip") {
        Rng rng(1);
        const Matrix a = random_gaussian(2, 3, rng);
        const nlohmann::json j = to_json(a);
        CHECK(j.at("rows") == 2);
        CHECK(j.at("cols") == 3);
        CHECK(j.at("entries").size() == 6);
        const Matrix back = matrix_from_json(j);
        CHECK(max_abs_diff(a, back) == 0.0);

        nlohmann::json bad = j;
        bad["entries"] = std::vector<double>{1.0};
        CHECK_THROWS(matrix_from_json(bad));
    }

    TEST_CASE("linear params round trip, both block variants") {
        for (int bd : {1, 2}) {
            Rng rng(bd);
            LinearResNetParams p;
            p.block_depth = bd;
            p.w_u = random_gaussian(2, 4, rng);
            p.w_e = random_gaussian(4, 3, rng);
            for (int i = 0; i < 3; ++i) {
                if (bd == 1) {
                    p.blocks.push_back(Depth1Block{random_gaussian(4, 4, rng)});
                } else {
                    p.blocks.push_back(
                        Depth2Block{random_gaussian(4, 4, rng), random_gaussian(4, 4, rng)});
                }
            }
            const LinearResNetParams back = linear_params_from_json(to_json(p));
            CHECK(back.block_depth == bd);
            CHECK(max_abs_diff(back.w_u, p.w_u) == 0.0);
            CHECK(max_abs_diff(back.w_e, p.w_e) == 0.0);
            REQUIRE(back.blocks.size() == 3);
            CHECK(max_abs_diff(forward_linear(back), forward_linear(p)) == 0.0);
        }
    }

    TEST_CASE("nonlinear params round trip preserves forward evaluation") {
        for (std::size_t i : {0, 1}) {
            const NonlinResNetParams p = suites::make_random_nonlin(9, i, 5, 4);
            const NonlinResNetParams back = nonlin_params_from_json(to_json(p));
            Rng rng(55);
            for (int rep = 0; rep < 10; ++rep) {
                std::vector<double> x(p.in_dim());
                for (double& v : x) {
                    v = rng.gaussian();
                }
                const auto ya = forward_nonlin(p, x);
                const auto yb = forward_nonlin(back, x);
                for (std::size_t d = 0; d < ya.size(); ++d) {
                    CHECK(ya[d] == yb[d]);
                }
            }
        }
    }

    TEST_CASE("fplf round trip") {
        auto [h1, h2] = suites::relu_plan_parts();
        const FplfSpec back = fplf_from_json(to_json(h1));
        REQUIRE(back.layers.size() == h1.layers.size());
        const std::vector<double> x = {0.37};
        CHECK(eval_fplf(back, x)[0] == eval_fplf(h1, x)[0]);
    }

    TEST_CASE("cost report carries the spectrum and parameters") {
        CostParams p;
        p.lambda = 10.0;
        p.depth = 5;
        p.block_depth = 2;
        p.width = 2;
        const nlohmann::json j =
            to_json(matrix_cost(Matrix::diagonal(std::vector<double>{3.0, 1.0}), p));
        CHECK(j.at("total").get<double>() == doctest::Approx(4.0));
        CHECK(j.at("rank") == 2);
        CHECK(j.at("params").at("depth") == 5);
        CostParams inf = p;
        inf.depth = kInfiniteDepth;
        const nlohmann::json ji =
            to_json(matrix_cost(Matrix::diagonal(std::vector<double>{3.0, 1.0}), inf));
        CHECK(ji.at("params").at("depth") == "inf");
    }
}
