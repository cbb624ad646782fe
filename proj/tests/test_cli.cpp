#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef RESCOST_CLI_PATH
#define RESCOST_CLI_PATH "rescost"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string out;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "rescost_cli_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path out = scratch_dir() / ("stdout_" + std::to_string(counter++) + ".txt");
    const std::string cmd =
        std::string(RESCOST_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    return r;
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("cost on a diagonal spectrum") {
        const RunResult r = run_cli("cost --diag 3,1 --block-depth 2 --lambda 10 --depth 5");
        REQUIRE(r.exit_code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j.at("total").get<double>() == doctest::Approx(4.0));
        CHECK(j.at("rank") == 2);

        const RunResult zero = run_cli("cost --diag 0 --block-depth 2 --lambda 1 --depth 3");
        REQUIRE(zero.exit_code == 0);
        CHECK(nlohmann::json::parse(zero.out).at("total").get<double>() == 0.0);
    }

    TEST_CASE("cost accepts a matrix entries file") {
        const fs::path m = scratch_dir() / "matrix.json";
        {
            std::ofstream out(m);
            out << R"({"rows": 2, "cols": 2, "entries": [3.0, 0.0, 0.0, 1.0]})";
        }
        const RunResult from_file =
            run_cli("cost --entries " + m.string() + " --block-depth 2 --lambda 10 --depth 5");
        const RunResult from_diag = run_cli("cost --diag 3,1 --block-depth 2 --lambda 10 --depth 5");
        REQUIRE(from_file.exit_code == 0);
        CHECK(from_file.out == from_diag.out);
    }

    TEST_CASE("cost is deterministic for a fixed random seed") {
        const std::string args = "cost --random-seed 7 --dims 3x3 --lambda 0.5 --depth 4";
        const RunResult a = run_cli(args);
        const RunResult b = run_cli(args);
        REQUIRE(a.exit_code == 0);
        CHECK(a.out == b.out);
    }

    TEST_CASE("errors come back as machine-readable JSON") {
        const RunResult r = run_cli("cost --diag 3,1 --width 1 --block-depth 1 --lambda 1 --depth 2");
        CHECK(r.exit_code != 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j.at("error").at("type") == "width");

        const RunResult unknown = run_cli("verify nonsense --count 2 --seed 1");
        CHECK(unknown.exit_code != 0);
    }

    TEST_CASE("sweep emits the stable schema and deterministic bytes") {
        const fs::path csv_a = scratch_dir() / "sweep_a.csv";
        const fs::path csv_b = scratch_dir() / "sweep_b.csv";
        const std::string args =
            "sweep --diag 3,2 --lambda-grid 1e-2,1e-3,1e-4,1e-5,1e-6,1e-7 --depth-grid inf "
            "--block-depths 2 --out ";
        REQUIRE(run_cli(args + csv_a.string()).exit_code == 0);
        REQUIRE(run_cli(args + csv_b.string()).exit_code == 0);
        const std::string body = slurp(csv_a);
        CHECK(body == slurp(csv_b));

        std::istringstream lines(body);
        std::string header;
        std::getline(lines, header);
        CHECK(header ==
              "block_depth,L,lambda,sigma_list_id,cost,nuclear_norm,cost_over_nuclear,rank,"
              "rank_ratio,oracle_cost,oracle_converged,error");
        // rows ascend in lambda, so the rank-normalized column strictly
        // decreases toward rank = 2 as lambda shrinks (reading bottom-up)
        double prev_ratio = 0.0;
        double smallest_lambda_ratio = 0.0;
        std::size_t rows = 0;
        std::string line;
        bool first = true;
        while (std::getline(lines, line)) {
            std::vector<std::string> cells;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) {
                cells.push_back(cell);
            }
            REQUIRE(cells.size() >= 9);
            CHECK(cells[1] == "inf");
            CHECK(cells[7] == "2");
            const double ratio = std::stod(cells[8]);
            if (first) {
                smallest_lambda_ratio = ratio;
            } else {
                CHECK(ratio > prev_ratio);
            }
            prev_ratio = ratio;
            first = false;
            ++rows;
        }
        CHECK(rows == 6);
        CHECK(smallest_lambda_ratio == doctest::Approx(2.0).epsilon(0.25));
    }

    TEST_CASE("sweep reports cost over nuclear approaching one at large lambda") {
        const RunResult r = run_cli(
            "sweep --diag 3,2 --lambda-grid 10,100,1000 --depth-grid inf --block-depths 1");
        REQUIRE(r.exit_code == 0);
        std::istringstream lines(r.out);
        std::string line;
        std::getline(lines, line);  // header
        double prev = 0.0;
        while (std::getline(lines, line)) {
            std::stringstream ss(line);
            std::vector<std::string> cells;
            std::string cell;
            while (std::getline(ss, cell, ',')) {
                cells.push_back(cell);
            }
            const double over = std::stod(cells[6]);
            CHECK(over <= 1.0 + 1e-12);
            CHECK(over >= prev - 1e-12);
            prev = over;
        }
        CHECK(prev > 0.99);
    }

    TEST_CASE("sweep marks precondition failures with reason codes") {
        const RunResult r = run_cli(
            "sweep --diag 3,2 --width 1 --lambda-grid 0.5 --depth-grid 2 --block-depths 1");
        REQUIRE(r.exit_code == 0);
        CHECK(r.out.find("width_below_rank") != std::string::npos);
    }

    TEST_CASE("witness round-trips through train --init") {
        const fs::path params = scratch_dir() / "witness_params.json";
        const RunResult w = run_cli(
            "witness --diag 2,1 --block-depth 2 --lambda 1 --depth 3 --width 2 --out " +
            params.string());
        REQUIRE(w.exit_code == 0);
        const auto wj = nlohmann::json::parse(w.out);
        const double formula = wj.at("formula_cost").get<double>();
        CHECK(std::abs(wj.at("penalty").get<double>() - formula) <= 1e-9 * (1.0 + formula));

        const RunResult t = run_cli(
            "train --diag 2,1 --block-depth 2 --lambda 1 --depth 3 --width 2 --init " +
            params.string());
        REQUIRE(t.exit_code == 0);
        const auto tj = nlohmann::json::parse(t.out);
        CHECK(tj.at("converged").get<bool>());
        // starting at the witness cannot drop materially below it
        CHECK(tj.at("penalty").get<double>() >= formula - 1e-6);
    }

    TEST_CASE("train exports the trace schema") {
        const fs::path trace = scratch_dir() / "trace.csv";
        const RunResult t = run_cli(
            "train --diag 1 --block-depth 1 --lambda 1 --depth 1 --restarts 1 --max-iters 40 "
            "--trace-csv " +
            trace.string());
        REQUIRE(t.exit_code == 0);
        std::istringstream lines(slurp(trace));
        std::string header;
        std::getline(lines, header);
        CHECK(header == "stage,iteration,fit_residual,penalty");
        std::string first_row;
        CHECK(static_cast<bool>(std::getline(lines, first_row)));
    }

    TEST_CASE("verify subcommand gates on suite success") {
        const fs::path csv = scratch_dir() / "gelfand.csv";
        const RunResult ok = run_cli("verify gelfand --count 300 --seed 1 --out " + csv.string());
        CHECK(ok.exit_code == 0);
        CHECK(ok.out.find("PASS") != std::string::npos);
        const std::string detail = slurp(csv);
        CHECK(detail.find("case,") == 0);

        const RunResult wit = run_cli("verify witness --count 40 --seed 2");
        CHECK(wit.exit_code == 0);
    }

    TEST_CASE("config file values are overridden by flags") {
        const fs::path cfg = scratch_dir() / "config_nested.json";
        {
            std::ofstream out(cfg);
            out << R"({"cost": {"diag": "3,1", "block-depth": 2, "lambda": 10, "depth": "5"}})";
        }
        const RunResult base = run_cli("--config " + cfg.string() + " cost");
        REQUIRE(base.exit_code == 0);
        CHECK(nlohmann::json::parse(base.out).at("total").get<double>() == doctest::Approx(4.0));

        const RunResult overridden = run_cli("--config " + cfg.string() + " cost --lambda 1");
        REQUIRE(overridden.exit_code == 0);
        const double total = nlohmann::json::parse(overridden.out).at("total").get<double>();
        CHECK(total < 4.0);  // lambda 1 must win over the config's lambda 10
    }

    TEST_CASE("nonlinear build and verify round trip") {
        const fs::path net = scratch_dir() / "net.json";
        const RunResult b = run_cli(
            "nonlinear-build --plan relu --block-depth 2 --depth 64 --lambda 1e-3 "
            "--lower -1 --upper 1 --samples 100 --out " +
            net.string());
        REQUIRE(b.exit_code == 0);
        const auto bj = nlohmann::json::parse(b.out);
        CHECK(bj.at("max_deviation").get<double>() < 1e-6);

        const RunResult v = run_cli(
            "nonlinear-verify --plan relu --lower -1 --upper 1 --samples 150 --tol 1e-6 "
            "--jacobian-rank --params " +
            net.string());
        REQUIRE(v.exit_code == 0);
        const auto vj = nlohmann::json::parse(v.out);
        CHECK(vj.at("pass").get<bool>());
        CHECK(vj.at("jacobian_rank").get<int>() == 1);
    }

    TEST_CASE("nonlinear build from FPLF spec files") {
        const std::string identity_fplf =
            R"({"layers":[{"w":{"rows":1,"cols":1,"entries":[1.0]},"b":[0.0]}]})";
        const fs::path h1 = scratch_dir() / "h1.json";
        const fs::path h2 = scratch_dir() / "h2.json";
        {
            std::ofstream(h1) << identity_fplf;
            std::ofstream(h2) << identity_fplf;
        }
        const RunResult b = run_cli("nonlinear-build --h1 " + h1.string() + " --h2 " +
                                    h2.string() +
                                    " --block-depth 1 --depth 32 --lambda 1e-2 "
                                    "--lower 0.1 --upper 2 --samples 120");
        REQUIRE(b.exit_code == 0);
        const auto bj = nlohmann::json::parse(b.out);
        CHECK(bj.at("max_deviation").get<double>() < 1e-9);
        CHECK(bj.at("l_int").get<int>() == 32);
    }
}
