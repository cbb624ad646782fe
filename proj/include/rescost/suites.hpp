#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "rescost/majorization.hpp"
#include "rescost/matrix.hpp"
#include "rescost/nonlinear.hpp"
#include "rescost/oracle.hpp"
#include "rescost/prng.hpp"
#include "rescost/spectral_cost.hpp"
#include "rescost/svd.hpp"
#include "rescost/witness.hpp"

// Seeded verification corpora shared by the CLI `verify` subcommand and the
// acceptance suite. Every case derives its own stream from (seed, index), so
// results are independent of evaluation order and job count.

namespace rescost::suites {

/// 17 significant digits; round-trips doubles exactly.
inline std::string format_float(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct SuiteReport {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::size_t cases = 0;
    std::size_t violations = 0;
    bool pass = false;
    std::string summary;
};

inline void write_csv(const SuiteReport& report, std::ostream& os) {
    for (std::size_t i = 0; i < report.columns.size(); ++i) {
        os << (i ? "," : "") << report.columns[i];
    }
    os << "\n";
    for (const auto& row : report.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << row[i];
        }
        os << "\n";
    }
}

/// Index-deterministic parallel map: f(i) fills slot i of caller-owned
/// storage; output never depends on the job count.
template <class F>
void parallel_for(std::size_t count, unsigned jobs, F&& f) {
    if (jobs <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) {
            f(i);
        }
        return;
    }
    const unsigned workers = std::min<unsigned>(jobs, std::thread::hardware_concurrency() > 0
                                                          ? std::thread::hardware_concurrency()
                                                          : 1);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = w; i < count; i += workers) {
                    f(i);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

// ---------------------------------------------------------------------------
// instance generators
// ---------------------------------------------------------------------------

struct LinearInstance {
    Matrix a;
    CostParams params;
};

/// Structured grid over (block depth, L, λ) with random dims/rank and a fixed
/// well-separated spectrum. The σ values keep every direction either
/// comfortably above λ or below it for all three grid λ's; directions with σ
/// marginally above λ take plain gradient descent pathologically many
/// iterations to grow their residual blocks.
inline LinearInstance make_linear_instance(std::uint64_t seed, std::size_t index,
                                           std::size_t max_dim, std::size_t max_width) {
    static constexpr std::size_t kDepths[] = {1, 2, 4, 8};
    static constexpr double kLambdas[] = {0.1, 1.0, 10.0};
    static constexpr double kSigmas[] = {2.4, 1.2, 0.8};
    Rng rng(derive_seed(seed, index));
    LinearInstance inst;
    inst.params.block_depth = static_cast<int>(index % 2) + 1;
    inst.params.depth = kDepths[(index / 2) % 4];
    inst.params.lambda = kLambdas[(index / 8) % 3];
    const std::size_t d_out = 1 + rng.uniform_index(max_dim);
    const std::size_t d_in = 1 + rng.uniform_index(max_dim);
    const std::size_t rank = 1 + rng.uniform_index(std::min({d_out, d_in, std::size_t{3}}));
    inst.params.width = std::min(max_width, std::max({d_out, d_in, rank}));

    std::vector<double> sigma(kSigmas, kSigmas + rank);
    const Matrix ql = random_orthogonal(d_out, derive_seed(seed, index * 3 + 1));
    const Matrix qr = random_orthogonal(d_in, derive_seed(seed, index * 3 + 2));
    inst.a = Matrix(d_out, d_in);
    for (std::size_t i = 0; i < d_out; ++i) {
        for (std::size_t j = 0; j < d_in; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < rank; ++r) {
                s += ql(i, r) * sigma[r] * qr(j, r);
            }
            inst.a(i, j) = s;
        }
    }
    return inst;
}

inline NonlinResNetParams make_random_nonlin(std::uint64_t seed, std::size_t index,
                                             std::size_t max_width, std::size_t max_depth) {
    Rng rng(derive_seed(seed, index));
    NonlinResNetParams p;
    p.block_depth = static_cast<int>(index % 2) + 1;
    const std::size_t n = 2 + rng.uniform_index(max_width - 1);
    const std::size_t d_in = 1 + rng.uniform_index(std::min<std::size_t>(3, n));
    const std::size_t d_out = 1 + rng.uniform_index(std::min<std::size_t>(3, n));
    const std::size_t depth = 1 + rng.uniform_index(max_depth);
    const double wscale = 1.0 / std::sqrt(static_cast<double>(n));
    auto gauss_matrix = [&](std::size_t r, std::size_t c, double scale) {
        Matrix m = random_gaussian(r, c, rng);
        for (double& v : m.entries()) {
            v *= scale;
        }
        return m;
    };
    auto gauss_vec = [&](std::size_t len, double scale) {
        std::vector<double> v(len);
        for (double& x : v) {
            x = scale * rng.gaussian();
        }
        return v;
    };
    p.w_u = gauss_matrix(d_out, n, wscale);
    p.b_u = gauss_vec(d_out, 0.3);
    p.w_e = gauss_matrix(n, d_in, wscale);
    p.b_e = gauss_vec(n, 0.3);
    for (std::size_t i = 0; i < depth; ++i) {
        if (p.block_depth == 1) {
            p.blocks.push_back(NonlinDepth1Block{gauss_matrix(n, n, wscale), gauss_vec(n, 0.3)});
        } else {
            p.blocks.push_back(NonlinDepth2Block{gauss_matrix(n, n, wscale), gauss_vec(n, 0.3),
                                                 gauss_matrix(n, n, wscale), gauss_vec(n, 0.3)});
        }
    }
    return p;
}

// ---------------------------------------------------------------------------
// witness suite: construction reproduces the target and its cost exactly
// ---------------------------------------------------------------------------

inline SuiteReport run_witness_suite(std::uint64_t seed, std::size_t count) {
    SuiteReport report;
    report.name = "witness";
    report.columns = {"case",      "block_depth", "depth",       "lambda", "rows", "cols",
                      "rank",      "width",       "formula_cost", "penalty_gap", "forward_err",
                      "balance_gap"};
    double worst_gap = 0.0, worst_fwd = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const LinearInstance inst = make_linear_instance(seed, i, 4, 6);
        const WitnessReport w = build_min_cost(inst.a, inst.params);
        const double gap = std::abs(w.penalty_value - w.formula_cost) / (1.0 + w.formula_cost);
        const double fwd =
            frobenius_norm(w.realized - inst.a) / (1.0 + frobenius_norm(inst.a));
        double balance_gap = 0.0;
        if (inst.params.block_depth == 2) {
            for (const ResidualBlock& b : w.params.blocks) {
                const auto& blk = std::get<Depth2Block>(b);
                const double split = 0.5 * (frobenius_sq(blk.w1) + frobenius_sq(blk.w2));
                balance_gap = std::max(
                    balance_gap, std::abs(split - nuclear_norm(matmul(blk.w2, blk.w1))));
            }
        }
        const bool bad = gap > 1e-9 || fwd > 1e-9 || balance_gap > 1e-10;
        if (bad) {
            ++report.violations;
        }
        worst_gap = std::max(worst_gap, gap);
        worst_fwd = std::max(worst_fwd, fwd);
        report.rows.push_back({std::to_string(i), std::to_string(inst.params.block_depth),
                               std::to_string(inst.params.depth), format_float(inst.params.lambda),
                               std::to_string(inst.a.rows()), std::to_string(inst.a.cols()),
                               std::to_string(singular_values(inst.a).numeric_rank()),
                               std::to_string(inst.params.width), format_float(w.formula_cost),
                               format_float(gap), format_float(fwd), format_float(balance_gap)});
        ++report.cases;
    }
    report.pass = report.violations == 0;
    report.summary = "witness: " + std::to_string(report.cases) + " cases, max penalty gap " +
                     format_float(worst_gap) + ", max forward err " + format_float(worst_fwd) +
                     ", violations " + std::to_string(report.violations);
    return report;
}

// ---------------------------------------------------------------------------
// oracle suite: three-way agreement formula / witness / trained minimum
// ---------------------------------------------------------------------------

struct OracleSuiteOptions {
    std::size_t restarts = 5;
    std::size_t max_iterations = 6000;
    double agreement_tolerance = 1e-2;
    double min_convergence_rate = 0.8;
};

inline SuiteReport run_oracle_suite(std::uint64_t seed, std::size_t count,
                                    const OracleSuiteOptions& opt = {}) {
    SuiteReport report;
    report.name = "oracle";
    report.columns = {"case",   "block_depth", "depth",      "lambda",     "formula_cost",
                      "witness_gap", "oracle_penalty", "fit_residual", "converged", "rel_gap"};
    std::size_t converged_count = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const LinearInstance inst = make_linear_instance(seed, i, 3, 3);
        const double formula = matrix_cost(inst.a, inst.params).total;
        const WitnessReport w = build_min_cost(inst.a, inst.params);
        const double witness_gap =
            std::abs(w.penalty_value - w.formula_cost) / (1.0 + w.formula_cost);
        const double forward_err =
            frobenius_norm(w.realized - inst.a) / (1.0 + frobenius_norm(inst.a));

        OracleConfig cfg;
        cfg.seed = derive_seed(seed, 1000 + i);
        cfg.restarts = opt.restarts;
        cfg.max_iterations = opt.max_iterations;
        cfg.record_trace = false;
        const TrainResult trained = min_norm_train(inst.a, inst.params, cfg);
        double rel_gap = 0.0;
        bool violation = witness_gap > 1e-9 || forward_err > 1e-9;
        if (trained.converged) {
            ++converged_count;
            rel_gap = std::abs(trained.penalty_value - formula) / std::max(formula, 1e-12);
            if (rel_gap > opt.agreement_tolerance) {
                violation = true;
            }
            // the trained penalty must never undercut the formula
            if (trained.penalty_value < formula - 1e-4 * (1.0 + formula)) {
                violation = true;
            }
        }
        if (violation) {
            ++report.violations;
        }
        report.rows.push_back({std::to_string(i), std::to_string(inst.params.block_depth),
                               std::to_string(inst.params.depth), format_float(inst.params.lambda),
                               format_float(formula), format_float(witness_gap),
                               format_float(trained.penalty_value),
                               format_float(trained.fit_residual),
                               trained.converged ? "1" : "0", format_float(rel_gap)});
        ++report.cases;
    }
    const double rate = count ? static_cast<double>(converged_count) / static_cast<double>(count) : 0.0;
    report.pass = report.violations == 0 && rate >= opt.min_convergence_rate;
    report.summary = "oracle: " + std::to_string(report.cases) + " cases, convergence rate " +
                     format_float(rate) + ", violations " + std::to_string(report.violations);
    return report;
}

// ---------------------------------------------------------------------------
// gelfand suite
// ---------------------------------------------------------------------------

inline SuiteReport run_gelfand_suite(std::uint64_t seed, std::size_t count, unsigned jobs = 1) {
    SuiteReport report;
    report.name = "gelfand";
    report.columns = {"case", "seed", "n0", "n", "n1", "k", "lhs", "rhs", "margin", "holds"};
    report.rows.resize(count);
    std::vector<char> ok(count, 1);
    parallel_for(count, jobs, [&](std::size_t i) {
        const std::uint64_t case_seed = derive_seed(seed, i);
        Rng rng(case_seed);
        const std::size_t n = 1 + rng.uniform_index(6);
        const std::size_t n0 = 1 + rng.uniform_index(6);
        const std::size_t n1 = 1 + rng.uniform_index(6);
        GelfandInstance inst;
        inst.a = random_gaussian(n0, n, rng);
        inst.b = random_gaussian(n, n, rng);
        inst.c = random_gaussian(n, n1, rng);
        const std::size_t k = 1 + rng.uniform_index(n);
        std::vector<std::size_t> pool(n);
        for (std::size_t j = 0; j < n; ++j) {
            pool[j] = j;
        }
        for (std::size_t j = n; j > 1; --j) {
            std::swap(pool[j - 1], pool[rng.uniform_index(j)]);
        }
        inst.indices.assign(pool.begin(), pool.begin() + k);
        std::sort(inst.indices.begin(), inst.indices.end());
        const InequalityCheck check = gelfand_check(inst);
        ok[i] = check.holds ? 1 : 0;
        report.rows[i] = {std::to_string(i),       std::to_string(case_seed),
                          std::to_string(n0),      std::to_string(n),
                          std::to_string(n1),      std::to_string(k),
                          format_float(check.lhs), format_float(check.rhs),
                          format_float(check.rhs - check.lhs), check.holds ? "1" : "0"};
    });
    report.cases = count;
    for (char c : ok) {
        if (!c) {
            ++report.violations;
        }
    }
    report.pass = report.violations == 0;
    report.summary = "gelfand: " + std::to_string(report.cases) + " cases, violations " +
                     std::to_string(report.violations);
    return report;
}

// ---------------------------------------------------------------------------
// submajorization suite
// ---------------------------------------------------------------------------

inline SuiteReport run_submajorization_suite(std::uint64_t seed, std::size_t count,
                                             unsigned jobs = 1) {
    SuiteReport report;
    report.name = "submajorization";
    report.columns = {"case", "seed", "n1", "n2", "n3", "gauge", "lhs", "rhs", "margin", "holds"};
    report.rows.resize(count);
    std::vector<char> ok(count, 1);
    parallel_for(count, jobs, [&](std::size_t i) {
        const std::uint64_t case_seed = derive_seed(seed, i);
        Rng rng(case_seed);
        const std::size_t n1 = 1 + rng.uniform_index(6);
        const std::size_t n2 = 1 + rng.uniform_index(6);
        const std::size_t n3 = 1 + rng.uniform_index(6);
        const Matrix a = random_gaussian(n1, n2, rng);
        const Matrix b = random_gaussian(n2, n3, rng);
        ConvexGauge gauge;
        switch (i % 4) {
            case 0:
                gauge = ConvexGauge::square();
                break;
            case 1:
                gauge = ConvexGauge::linear(rng.uniform(0.1, 10.0));
                break;
            case 2:
                gauge = ConvexGauge::hinge(rng.uniform(0.1, 10.0));
                break;
            default:
                gauge = ConvexGauge::hinge_sq(rng.uniform(0.1, 10.0));
                break;
        }
        const InequalityCheck check = submajorization_check(a, b, gauge);
        ok[i] = check.holds ? 1 : 0;
        report.rows[i] = {std::to_string(i),       std::to_string(case_seed),
                          std::to_string(n1),      std::to_string(n2),
                          std::to_string(n3),      gauge.name(),
                          format_float(check.lhs), format_float(check.rhs),
                          format_float(check.lhs - check.rhs), check.holds ? "1" : "0"};
    });
    report.cases = count;
    for (char c : ok) {
        if (!c) {
            ++report.violations;
        }
    }
    report.pass = report.violations == 0;
    report.summary = "submajorization: " + std::to_string(report.cases) + " cases, violations " +
                     std::to_string(report.violations);
    return report;
}

// ---------------------------------------------------------------------------
// chain suite: the proof chain bound never exceeds the penalty; tight on
// witnesses
// ---------------------------------------------------------------------------

inline SuiteReport run_chain_suite(std::uint64_t seed, std::size_t count) {
    SuiteReport report;
    report.name = "chain";
    report.columns = {"case", "kind", "block_depth", "depth", "lambda", "bound", "penalty",
                      "rel_gap", "holds"};
    double worst_witness_gap = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const LinearInstance inst = make_linear_instance(seed, i, 3, 3);
        const bool witness_case = (i % 5) == 0;
        LinearResNetParams params;
        std::string kind;
        if (witness_case) {
            kind = "witness";
            params = build_min_cost(inst.a, inst.params).params;
        } else {
            kind = "oracle";
            OracleConfig cfg;
            cfg.seed = derive_seed(seed, 5000 + i);
            cfg.restarts = 1;
            cfg.max_iterations = 150;
            cfg.penalty_schedule = {1e2, 1e4};
            cfg.record_trace = false;
            params = min_norm_train(inst.a, inst.params, cfg).params;
        }
        bool holds = true;
        double bound = 0.0, pen = 0.0, rel_gap = 0.0;
        try {
            const ChainBound cb = layer_chain_bound(params, inst.params.lambda);
            bound = cb.bound;
            pen = cb.penalty;
            holds = bound <= pen + 1e-8 * (1.0 + pen);
            rel_gap = (pen - bound) / (1.0 + pen);
            if (witness_case) {
                worst_witness_gap = std::max(worst_witness_gap, std::abs(rel_gap));
                if (std::abs(rel_gap) > 1e-6) {
                    holds = false;
                }
            }
        } catch (const DegenerateError&) {
            holds = false;
            kind += "-degenerate";
        }
        if (!holds) {
            ++report.violations;
        }
        report.rows.push_back({std::to_string(i), kind, std::to_string(inst.params.block_depth),
                               std::to_string(inst.params.depth), format_float(inst.params.lambda),
                               format_float(bound), format_float(pen), format_float(rel_gap),
                               holds ? "1" : "0"});
        ++report.cases;
    }
    report.pass = report.violations == 0;
    report.summary = "chain: " + std::to_string(report.cases) + " cases, max witness gap " +
                     format_float(worst_witness_gap) + ", violations " +
                     std::to_string(report.violations);
    return report;
}

// ---------------------------------------------------------------------------
// nonlinear lower-bound suite: penalty dominates the linear cost of every
// Jacobian; activation-pattern Jacobians match finite differences
// ---------------------------------------------------------------------------

inline Matrix finite_difference_jacobian(const NonlinResNetParams& p, std::span<const double> x,
                                         double step = 1e-6) {
    Matrix jac(p.out_dim(), p.in_dim());
    std::vector<double> plus(x.begin(), x.end());
    std::vector<double> minus(x.begin(), x.end());
    for (std::size_t j = 0; j < p.in_dim(); ++j) {
        plus[j] += step;
        minus[j] -= step;
        const std::vector<double> fp = forward_nonlin(p, plus);
        const std::vector<double> fm = forward_nonlin(p, minus);
        for (std::size_t i = 0; i < p.out_dim(); ++i) {
            jac(i, j) = (fp[i] - fm[i]) / (2.0 * step);
        }
        plus[j] = x[j];
        minus[j] = x[j];
    }
    return jac;
}

inline SuiteReport run_nonlinear_lower_suite(std::uint64_t seed, std::size_t count,
                                             unsigned jobs = 1) {
    SuiteReport report;
    report.name = "nonlinear-lower";
    report.columns = {"case",       "block_depth", "depth",   "width", "lambda",
                      "max_linear_cost", "penalty", "fd_err", "holds"};
    report.rows.resize(count);
    std::vector<char> ok(count, 1);
    parallel_for(count, jobs, [&](std::size_t i) {
        Rng rng(derive_seed(seed, 70000 + i));
        const NonlinResNetParams net = make_random_nonlin(seed, i, 6, 6);
        const double lambda = std::exp(rng.uniform(std::log(0.05), std::log(5.0)));
        DomainBox box;
        box.lower.assign(net.in_dim(), -1.0);
        box.upper.assign(net.in_dim(), 1.0);
        box.seed = derive_seed(seed, 90000 + i);
        box.sample_points = latin_hypercube(box.lower, box.upper, 8, box.seed);

        const LowerBoundCheck check = jacobian_lower_bound_check(net, lambda, box);

        // finite differences are exact between kinks of a piecewise-linear
        // map; test at points whose preactivations clear the FD step
        double fd_err = 0.0;
        std::size_t tested = 0;
        Rng point_rng(derive_seed(seed, 110000 + i));
        for (std::size_t attempt = 0; attempt < 40 && tested < 3; ++attempt) {
            const std::vector<double> pt = box.random_point(point_rng);
            try {
                const Matrix jac = jacobian_at(net, pt, 1e-4);
                const Matrix fd = finite_difference_jacobian(net, pt);
                fd_err = std::max(fd_err,
                                  frobenius_norm(fd - jac) / (1.0 + frobenius_norm(jac)));
                ++tested;
            } catch (const BoundaryError&) {
                continue;
            }
        }
        const bool good = check.holds && fd_err <= 1e-6;
        ok[i] = good ? 1 : 0;
        report.rows[i] = {std::to_string(i),
                          std::to_string(net.block_depth),
                          std::to_string(net.depth()),
                          std::to_string(net.width()),
                          format_float(lambda),
                          format_float(check.max_linear_cost),
                          format_float(check.penalty),
                          format_float(fd_err),
                          good ? "1" : "0"};
    });
    report.cases = count;
    for (char c : ok) {
        if (!c) {
            ++report.violations;
        }
    }
    report.pass = report.violations == 0;
    report.summary = "nonlinear-lower: " + std::to_string(report.cases) + " cases, violations " +
                     std::to_string(report.violations);
    return report;
}

// ---------------------------------------------------------------------------
// nonlinear upper-bound suite: the bottleneck construction reproduces its
// target and its normalized penalty decreases toward the bottleneck dimension
// ---------------------------------------------------------------------------

/// k = 1 target g(x) = max(0, x) on [-1, 1]: h1 = [ReLU layer, affine
/// identity], h2 = affine identity.
inline std::pair<FplfSpec, FplfSpec> relu_plan_parts() {
    FplfSpec h1;
    h1.layers.push_back({Matrix(1, 1, {1.0}), {0.0}});
    h1.layers.push_back({Matrix(1, 1, {1.0}), {0.0}});
    FplfSpec h2;
    h2.layers.push_back({Matrix(1, 1, {1.0}), {0.0}});
    return {h1, h2};
}

struct UpperBoundPoint {
    double lambda = 0.0;
    double penalty = 0.0;
    double ratio = 0.0;
    double deviation = 0.0;
};

struct UpperBoundSeries {
    int block_depth = 0;
    std::vector<UpperBoundPoint> points;
    bool reproduces = false;
    bool decreasing = false;
    double terminal_ratio = 0.0;
};

inline UpperBoundSeries run_upper_bound_series(int block_depth, std::size_t depth,
                                               const std::vector<double>& lambdas,
                                               std::size_t samples, double tol,
                                               std::uint64_t seed) {
    auto [h1, h2] = relu_plan_parts();
    const DomainBox box = DomainBox::sampled({-1.0}, {1.0}, samples, seed);
    UpperBoundSeries series;
    series.block_depth = block_depth;
    series.reproduces = true;
    for (double lambda : lambdas) {
        const BottleneckPlan plan =
            make_bottleneck_plan(h1, h2, box, depth, lambda, block_depth);
        const std::size_t width = bottleneck_min_width(plan);
        const NonlinResNetParams net = block_depth == 2
                                           ? build_bottleneck_depth2(plan, depth, width, lambda)
                                           : build_bottleneck_depth1(plan, depth, width, lambda);
        const RepresentationReport rep = verify_representation(net, plan, box, tol);
        const double pen = penalty_nonlin(net, lambda);
        const double log_inv = std::log(1.0 / lambda);
        const double normalizer =
            block_depth == 1 ? lambda * log_inv * log_inv : lambda * log_inv;
        series.points.push_back({lambda, pen, pen / normalizer, rep.max_deviation});
        if (!rep.pass) {
            series.reproduces = false;
        }
    }
    series.decreasing = true;
    for (std::size_t i = 1; i < series.points.size(); ++i) {
        if (!(series.points[i].ratio < series.points[i - 1].ratio)) {
            series.decreasing = false;
        }
    }
    series.terminal_ratio = series.points.empty() ? 0.0 : series.points.back().ratio;
    return series;
}

inline SuiteReport run_nonlinear_upper_suite(std::uint64_t seed, std::size_t depth = 4096,
                                             std::size_t samples = 200) {
    SuiteReport report;
    report.name = "nonlinear-upper";
    report.columns = {"block_depth", "lambda", "penalty", "ratio", "deviation"};
    const std::vector<double> lambdas = {1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
    const UpperBoundSeries d2 = run_upper_bound_series(2, depth, lambdas, samples, 1e-6, seed);
    const UpperBoundSeries d1 = run_upper_bound_series(1, depth, lambdas, samples, 1e-4, seed);
    for (const UpperBoundSeries* s : {&d2, &d1}) {
        for (const UpperBoundPoint& pt : s->points) {
            report.rows.push_back({std::to_string(s->block_depth), format_float(pt.lambda),
                                   format_float(pt.penalty), format_float(pt.ratio),
                                   format_float(pt.deviation)});
            ++report.cases;
        }
    }
    const bool d2_ok = d2.reproduces && d2.decreasing && std::abs(d2.terminal_ratio - 1.0) <= 0.30;
    const bool d1_ok = d1.reproduces && d1.decreasing && std::abs(d1.terminal_ratio - 1.0) <= 0.50;
    if (!d2_ok) {
        ++report.violations;
    }
    if (!d1_ok) {
        ++report.violations;
    }
    report.pass = report.violations == 0;
    report.summary = "nonlinear-upper: depth-2 terminal ratio " + format_float(d2.terminal_ratio) +
                     ", depth-1 terminal ratio " + format_float(d1.terminal_ratio) +
                     ", violations " + std::to_string(report.violations);
    return report;
}

}  // namespace rescost::suites
