// Acceptance suite: every release criterion in one binary, one PASS/FAIL line
// each. Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rescost/majorization.hpp"
#include "rescost/matrix.hpp"
#include "rescost/nonlinear.hpp"
#include "rescost/oracle.hpp"
#include "rescost/prng.hpp"
#include "rescost/spectral_cost.hpp"
#include "rescost/suites.hpp"
#include "rescost/svd.hpp"
#include "rescost/witness.hpp"

#ifndef RESCOST_CLI_PATH
#define RESCOST_CLI_PATH "rescost"
#endif

namespace {

using namespace rescost;
using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int index, bool pass, const std::string& what, const std::string& detail,
            double seconds) {
    char line[512];
    std::snprintf(line, sizeof(line), "[%d] %s  %s (%s; %.1fs)", index, pass ? "PASS" : "FAIL",
                  what.c_str(), detail.c_str(), seconds);
    std::cout << line << std::endl;
    if (!pass) {
        ++failures;
    }
}

template <class Fn>
void criterion(int index, const std::string& what, Fn&& fn) {
    const auto t0 = Clock::now();
    bool pass = false;
    std::string detail;
    try {
        detail = fn(pass);
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    report(index, pass, what, detail, std::chrono::duration<double>(Clock::now() - t0).count());
}

// --- criterion 1: formula / witness / oracle three-way agreement ------------

std::string run_three_way(bool& pass) {
    const suites::SuiteReport report = suites::run_oracle_suite(7, 20);
    pass = report.pass;
    return report.summary;
}

// --- criterion 2: scalar brute force vs both closed forms -------------------

std::string run_brute_force(bool& pass) {
    double worst_rel = 0.0, worst_balance = 0.0;
    std::size_t cases = 0;
    for (double sigma : {0.5, 1.0, 2.0}) {
        for (std::size_t depth : {1, 2, 3}) {
            for (double lambda : {0.5, 1.0, 2.0}) {
                for (int bd : {1, 2}) {
                    const double formula = bd == 1
                                               ? scalar_cost_depth1(sigma, depth, lambda).cost
                                               : scalar_cost_depth2(sigma, depth, lambda).cost;
                    const BruteForceResult bf =
                        brute_force_scalar(sigma, depth, lambda, bd, 0.1);
                    worst_rel = std::max(worst_rel, std::abs(bf.penalty - formula) / formula);
                    for (std::size_t i = 0; i < bf.blocks.size(); ++i) {
                        for (std::size_t j = i + 1; j < bf.blocks.size(); ++j) {
                            worst_balance = std::max(
                                worst_balance, std::abs(bf.blocks[i] - bf.blocks[j]));
                        }
                    }
                    ++cases;
                }
            }
        }
    }
    pass = worst_rel <= 1e-3 && worst_balance <= 1e-2;
    return "cases " + std::to_string(cases) + ", max rel err " +
           suites::format_float(worst_rel) + ", max layer imbalance " +
           suites::format_float(worst_balance);
}

// --- criterion 3: nuclear-norm side of the interpolation --------------------

std::string run_nuclear_side(bool& pass) {
    double worst_exact = 0.0, worst_inf = 0.0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        Rng rng(derive_seed(100, seed));
        const std::size_t r = 1 + rng.uniform_index(4);
        const std::size_t c = 1 + rng.uniform_index(4);
        const Matrix a = random_gaussian(r, c, rng);
        const double nuclear = nuclear_norm(a);
        const double smax = spectral_norm(a);
        if (nuclear == 0.0) {
            continue;
        }
        for (double factor : {1.0, 3.0}) {
            CostParams p;
            p.lambda = factor * smax;
            p.depth = 1 + rng.uniform_index(16);
            p.block_depth = 2;
            p.width = std::max(r, c);
            worst_exact = std::max(
                worst_exact, std::abs(matrix_cost(a, p).total - nuclear) / nuclear);
        }
        CostParams q;
        q.lambda = 100.0 * smax;
        q.depth = kInfiniteDepth;
        q.block_depth = 1;
        q.width = std::max(r, c);
        worst_inf = std::max(worst_inf, std::abs(matrix_cost(a, q).total - nuclear) / nuclear);
    }
    pass = worst_exact <= 1e-12 && worst_inf <= 0.01;
    return "depth-2 exactness gap " + suites::format_float(worst_exact) +
           ", depth-1 infinite-depth gap " + suites::format_float(worst_inf);
}

// --- criterion 4: rank side of the interpolation ----------------------------

std::string run_rank_side(bool& pass) {
    const std::vector<std::vector<double>> spectra = {{5.0}, {6.0, 5.0}, {7.0, 6.0, 5.0}};
    const std::vector<double> lambdas = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
    pass = true;
    std::string detail;
    for (const auto& sigma : spectra) {
        const double rank = static_cast<double>(sigma.size());
        const Matrix a = Matrix::diagonal(sigma);
        for (int bd : {2, 1}) {
            double prev = std::numeric_limits<double>::infinity();
            bool decreasing = true;
            double terminal = 0.0;
            for (double lambda : lambdas) {
                terminal = rank_ratio(a, lambda, bd);
                if (!(terminal < prev)) {
                    decreasing = false;
                }
                prev = terminal;
            }
            const double budget = bd == 2 ? 0.25 : 0.50;
            const bool close = std::abs(terminal - rank) / rank <= budget;
            if (!decreasing || !close) {
                pass = false;
            }
            if (bd == 1) {
                detail += "r" + std::to_string(sigma.size()) + ":" +
                          suites::format_float(terminal) + " ";
            }
        }
    }
    return "depth-1 terminal ratios " + detail;
}

// --- criterion 5: inequality fuzzing -----------------------------------------

std::string run_inequalities(bool& pass) {
    const suites::SuiteReport g = suites::run_gelfand_suite(1, 10000, 1);
    const suites::SuiteReport s = suites::run_submajorization_suite(2, 10000, 1);
    const suites::SuiteReport c = suites::run_chain_suite(3, 500);
    pass = g.pass && s.pass && c.pass;
    return g.summary + " | " + s.summary + " | " + c.summary;
}

// --- criterion 6: nonlinear lower bound --------------------------------------

std::string run_nonlinear_lower(bool& pass) {
    const suites::SuiteReport report = suites::run_nonlinear_lower_suite(4, 500, 1);
    pass = report.pass;
    return report.summary;
}

// --- criterion 7: nonlinear upper bound --------------------------------------

std::string run_nonlinear_upper(bool& pass) {
    const suites::SuiteReport report = suites::run_nonlinear_upper_suite(5, 4096, 200);
    pass = report.pass;
    return report.summary;
}

// --- criterion 8: determinism -------------------------------------------------

std::string csv_of(const suites::SuiteReport& r) {
    std::ostringstream ss;
    suites::write_csv(r, ss);
    return ss.str();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string run_determinism(bool& pass) {
    pass = true;
    std::vector<std::string> mismatches;
    auto expect_equal = [&](const std::string& name, const std::string& a, const std::string& b) {
        if (a != b || a.empty()) {
            pass = false;
            mismatches.push_back(name);
        }
    };
    expect_equal("witness", csv_of(suites::run_witness_suite(11, 30)),
                 csv_of(suites::run_witness_suite(11, 30)));
    expect_equal("oracle", csv_of(suites::run_oracle_suite(11, 4)),
                 csv_of(suites::run_oracle_suite(11, 4)));
    expect_equal("gelfand", csv_of(suites::run_gelfand_suite(11, 500, 1)),
                 csv_of(suites::run_gelfand_suite(11, 500, 1)));
    // job count must not change the bytes either
    expect_equal("gelfand-jobs", csv_of(suites::run_gelfand_suite(11, 500, 1)),
                 csv_of(suites::run_gelfand_suite(11, 500, 4)));
    expect_equal("submajorization", csv_of(suites::run_submajorization_suite(11, 500, 1)),
                 csv_of(suites::run_submajorization_suite(11, 500, 1)));
    expect_equal("chain", csv_of(suites::run_chain_suite(11, 40)),
                 csv_of(suites::run_chain_suite(11, 40)));
    expect_equal("nonlinear-lower", csv_of(suites::run_nonlinear_lower_suite(11, 40, 1)),
                 csv_of(suites::run_nonlinear_lower_suite(11, 40, 1)));
    expect_equal("nonlinear-upper", csv_of(suites::run_nonlinear_upper_suite(11, 512, 100)),
                 csv_of(suites::run_nonlinear_upper_suite(11, 512, 100)));

    // the CLI sweep writes byte-identical files for fixed flags
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "rescost_acceptance";
    fs::create_directories(dir);
    const fs::path a = dir / "sweep_a.csv";
    const fs::path b = dir / "sweep_b.csv";
    const std::string sweep_cmd =
        std::string(RESCOST_CLI_PATH) +
        " sweep --random-seed 7 --dims 3x3 --lambda-grid 1e-1,1e-2,1e-3,10 "
        "--depth-grid 1,4,inf --block-depths 1,2 --out ";
    if (std::system((sweep_cmd + a.string() + " > /dev/null").c_str()) != 0 ||
        std::system((sweep_cmd + b.string() + " > /dev/null").c_str()) != 0) {
        pass = false;
        mismatches.push_back("sweep-exit");
    } else {
        expect_equal("sweep", slurp(a), slurp(b));
    }
    const fs::path va = dir / "verify_a.csv";
    const fs::path vb = dir / "verify_b.csv";
    const std::string verify_cmd = std::string(RESCOST_CLI_PATH) +
                                   " verify submajorization --count 400 --seed 3 --out ";
    if (std::system((verify_cmd + va.string() + " > /dev/null").c_str()) != 0 ||
        std::system((verify_cmd + vb.string() + " > /dev/null").c_str()) != 0) {
        pass = false;
        mismatches.push_back("verify-exit");
    } else {
        expect_equal("verify", slurp(va), slurp(vb));
    }

    if (mismatches.empty()) {
        return "all suite and CLI outputs byte-identical across repeated runs";
    }
    std::string detail = "mismatches:";
    for (const std::string& m : mismatches) {
        detail += " " + m;
    }
    return detail;
}

}  // namespace

int main() {
    std::cout << "rescost acceptance suite" << std::endl;
    criterion(1, "three-way agreement of formula, witness and trained oracle", run_three_way);
    criterion(2, "scalar brute force matches both closed forms with balanced layers",
              run_brute_force);
    criterion(3, "large lambda recovers the nuclear norm", run_nuclear_side);
    criterion(4, "small lambda drives the normalized cost toward the rank", run_rank_side);
    criterion(5, "product/submajorization inequalities and the chain bound hold",
              run_inequalities);
    criterion(6, "nonlinear penalty dominates the Jacobian's linear cost", run_nonlinear_lower);
    criterion(7, "bottleneck constructions reproduce their target within budget",
              run_nonlinear_upper);
    criterion(8, "fixed seeds give byte-identical outputs", run_determinism);
    std::cout << "ACCEPTANCE: " << (8 - failures) << "/8 criteria passed" << std::endl;
    return failures;
}
