// rescost: evaluate representation costs of linear/ReLU residual networks,
// build witness parameters, train the numerical oracle, sweep (λ, L) grids,
// and run the seeded verification suites. CSV for tables, JSON for structured
// results and parameter files.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rescost/majorization.hpp"
#include "rescost/matrix.hpp"
#include "rescost/nonlinear.hpp"
#include "rescost/oracle.hpp"
#include "rescost/prng.hpp"
#include "rescost/serialization.hpp"
#include "rescost/spectral_cost.hpp"
#include "rescost/suites.hpp"
#include "rescost/svd.hpp"
#include "rescost/witness.hpp"

namespace {

using nlohmann::json;
using namespace rescost;

std::string f17(double v) { return suites::format_float(v); }

// ---------------------------------------------------------------------------
// JSON config files: {"subcommand": {"flag": value, ...}, "flag": value}
// Command-line flags override config values.
// ---------------------------------------------------------------------------

class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        json j = json::object();
        for (const CLI::Option* opt : app->get_options()) {
            if (!opt->get_lnames().empty() && opt->get_configurable()) {
                if (opt->count() > 0) {
                    j[opt->get_lnames()[0]] = opt->results().size() == 1 ? opt->results()[0] : "";
                } else if (default_also && !opt->get_default_str().empty()) {
                    j[opt->get_lnames()[0]] = opt->get_default_str();
                }
            }
        }
        return j.dump(2);
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json j;
        input >> j;
        std::vector<CLI::ConfigItem> out;
        collect(j, {}, out);
        return out;
    }

private:
    static void collect(const json& node, std::vector<std::string> parents,
                        std::vector<CLI::ConfigItem>& out) {
        for (const auto& [key, value] : node.items()) {
            if (value.is_object()) {
                auto nested = parents;
                nested.push_back(key);
                collect(value, nested, out);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array()) {
                for (const auto& v : value) {
                    item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
                }
            } else {
                item.inputs.push_back(value.is_string() ? v_to_string(value) : value.dump());
            }
            out.push_back(std::move(item));
        }
    }
    static std::string v_to_string(const json& v) { return v.get<std::string>(); }
};

// ---------------------------------------------------------------------------
// shared option groups
// ---------------------------------------------------------------------------

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) {
            out.push_back(std::stod(tok));
        }
    }
    return out;
}

struct MatrixSourceOptions {
    std::string diag;
    std::string entries_file;
    std::int64_t random_seed = -1;
    std::string dims;
    std::size_t rank = 0;

    void attach(CLI::App* cmd) {
        auto* d = cmd->add_option("--diag", diag, "diagonal spectrum, e.g. 3,1");
        auto* f = cmd->add_option("--entries", entries_file, "matrix JSON file");
        auto* s = cmd->add_option("--random-seed", random_seed, "seeded Gaussian matrix");
        cmd->add_option("--dims", dims, "RxC shape for --random-seed");
        cmd->add_option("--rank", rank, "restrict the random matrix to this rank");
        d->excludes(f);
        d->excludes(s);
        f->excludes(s);
    }

    Matrix load() const {
        if (!diag.empty()) {
            const std::vector<double> values = parse_double_list(diag);
            return Matrix::diagonal(values);
        }
        if (!entries_file.empty()) {
            std::ifstream in(entries_file);
            if (!in) {
                throw std::runtime_error("cannot open matrix file: " + entries_file);
            }
            json j;
            in >> j;
            return matrix_from_json(j);
        }
        if (random_seed >= 0) {
            std::size_t rows = 0, cols = 0;
            if (std::sscanf(dims.c_str(), "%zux%zu", &rows, &cols) != 2 || rows == 0 || cols == 0) {
                throw std::runtime_error("--random-seed requires --dims RxC");
            }
            const auto seed = static_cast<std::uint64_t>(random_seed);
            if (rank > 0) {
                return random_rank_matrix(rows, cols, rank, 0.5, 3.0, seed);
            }
            return random_gaussian(rows, cols, seed);
        }
        throw std::runtime_error("no matrix source given (--diag, --entries or --random-seed)");
    }

    std::string id() const {
        std::string out;
        if (!diag.empty()) {
            out = "diag:" + diag;
        } else if (!entries_file.empty()) {
            out = "file:" + entries_file;
        } else {
            out = "random:" + std::to_string(random_seed) + ":" + dims;
            if (rank > 0) {
                out += ":r" + std::to_string(rank);
            }
        }
        // the id is one CSV cell
        for (char& c : out) {
            if (c == ',') {
                c = ';';
            }
        }
        return out;
    }
};

struct CostParamOptions {
    double lambda = 1.0;
    std::string depth = "1";
    int block_depth = 1;
    std::size_t width = 0;  // 0 = max(rows, cols)

    void attach(CLI::App* cmd) {
        cmd->add_option("--lambda", lambda, "layer-weighting parameter")->check(CLI::PositiveNumber);
        cmd->add_option("--depth", depth, "residual block count, or 'inf'");
        cmd->add_option("--block-depth", block_depth, "1 or 2")->check(CLI::Range(1, 2));
        cmd->add_option("--width", width, "inner width (0 = max of the matrix dims)");
    }

    CostParams resolve(const Matrix& a) const {
        CostParams p;
        p.lambda = lambda;
        p.block_depth = block_depth;
        p.depth = depth == "inf" ? kInfiniteDepth
                                 : static_cast<std::size_t>(std::stoull(depth));
        p.width = width > 0 ? width : std::max(a.rows(), a.cols());
        return p;
    }
};

int fail_with(const std::exception& e, const char* type) {
    json err{{"error", {{"type", type}, {"message", e.what()}}}};
    std::cout << err.dump(2) << "\n";
    return 1;
}

template <class Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const DimensionError& e) {
        return fail_with(e, "dimension");
    } catch (const WidthError& e) {
        return fail_with(e, "width");
    } catch (const BudgetError& e) {
        return fail_with(e, "budget");
    } catch (const DegenerateError& e) {
        return fail_with(e, "degenerate");
    } catch (const ConvergenceError& e) {
        return fail_with(e, "convergence");
    } catch (const std::exception& e) {
        return fail_with(e, "invalid_argument");
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open output file: " + path);
    }
    out << content;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepOptions {
    MatrixSourceOptions source;
    CostParamOptions base;
    std::string lambda_grid;
    std::string depth_grid = "inf";
    std::string block_depths = "1,2";
    std::string normalizations = "raw,nuclear_ratio,rank_ratio";
    std::string out_path;
    bool with_oracle = false;
    std::uint64_t oracle_seed = 0;
    std::size_t oracle_restarts = 3;
    std::size_t oracle_iters = 2000;
    unsigned jobs = 1;
};

struct SweepRow {
    std::string block_depth, l, lambda, sigma_id, cost, nuclear, cost_over_nuclear, rank,
        rank_ratio, oracle_cost, oracle_converged, error;
};

int run_sweep(const SweepOptions& opt) {
    const Matrix a = opt.source.load();
    require_finite(a, "sweep matrix");
    const std::string sigma_id = opt.source.id();
    const std::vector<double> lambdas = parse_double_list(opt.lambda_grid);
    if (lambdas.empty()) {
        throw std::runtime_error("--lambda-grid must be non-empty");
    }
    std::vector<std::size_t> depths;
    bool with_inf = false;
    {
        std::stringstream ss(opt.depth_grid);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok == "inf") {
                with_inf = true;
            } else if (!tok.empty()) {
                depths.push_back(std::stoull(tok));
            }
        }
    }
    std::vector<int> block_depths;
    for (double b : parse_double_list(opt.block_depths)) {
        block_depths.push_back(static_cast<int>(b));
    }
    std::sort(block_depths.begin(), block_depths.end());
    std::sort(depths.begin(), depths.end());
    std::vector<double> lam_sorted = lambdas;
    std::sort(lam_sorted.begin(), lam_sorted.end());

    const bool emit_raw = opt.normalizations.find("raw") != std::string::npos;
    const bool emit_nuc = opt.normalizations.find("nuclear_ratio") != std::string::npos;
    const bool emit_rank = opt.normalizations.find("rank_ratio") != std::string::npos;

    const double nuclear = nuclear_norm(a);
    const std::size_t rank = numeric_rank(a);

    struct Point {
        int bd;
        std::size_t depth;  // kInfiniteDepth for inf
        double lambda;
    };
    std::vector<Point> grid;
    for (int bd : block_depths) {
        for (std::size_t l : depths) {
            for (double lam : lam_sorted) {
                grid.push_back({bd, l, lam});
            }
        }
        if (with_inf) {
            for (double lam : lam_sorted) {
                grid.push_back({bd, kInfiniteDepth, lam});
            }
        }
    }

    std::vector<SweepRow> rows(grid.size());
    suites::parallel_for(grid.size(), opt.jobs, [&](std::size_t i) {
        const Point& pt = grid[i];
        SweepRow& row = rows[i];
        row.block_depth = std::to_string(pt.bd);
        row.l = pt.depth == kInfiniteDepth ? "inf" : std::to_string(pt.depth);
        row.lambda = f17(pt.lambda);
        row.sigma_id = sigma_id;
        CostParams p;
        p.lambda = pt.lambda;
        p.depth = pt.depth;
        p.block_depth = pt.bd;
        p.width = opt.base.width > 0 ? opt.base.width : std::max(a.rows(), a.cols());
        try {
            const double cost = matrix_cost(a, p).total;
            if (emit_raw) {
                row.cost = f17(cost);
            }
            if (emit_nuc) {
                row.nuclear = f17(nuclear);
                if (nuclear > 0.0) {
                    row.cost_over_nuclear = f17(cost / nuclear);
                }
            }
            row.rank = std::to_string(rank);
            if (emit_rank && pt.lambda < 1.0) {
                const double log_inv = std::log(1.0 / pt.lambda);
                const double normalizer = pt.bd == 1 ? pt.lambda * log_inv * log_inv
                                                     : pt.lambda * log_inv;
                row.rank_ratio = f17(cost / normalizer);
            }
            if (opt.with_oracle && pt.depth != kInfiniteDepth) {
                OracleConfig cfg;
                cfg.seed = derive_seed(opt.oracle_seed, i);
                cfg.restarts = opt.oracle_restarts;
                cfg.max_iterations = opt.oracle_iters;
                cfg.record_trace = false;
                const TrainResult r = min_norm_train(a, p, cfg);
                row.oracle_cost = f17(r.penalty_value);
                row.oracle_converged = r.converged ? "1" : "0";
            }
        } catch (const WidthError&) {
            row.error = "width_below_rank";
        } catch (const std::domain_error&) {
            row.error = "domain";
        }
    });

    std::ostringstream csv;
    csv << "block_depth,L,lambda,sigma_list_id,cost,nuclear_norm,cost_over_nuclear,rank,"
           "rank_ratio,oracle_cost,oracle_converged,error\n";
    for (const SweepRow& r : rows) {
        csv << r.block_depth << ',' << r.l << ',' << r.lambda << ',' << r.sigma_id << ','
            << r.cost << ',' << r.nuclear << ',' << r.cost_over_nuclear << ',' << r.rank << ','
            << r.rank_ratio << ',' << r.oracle_cost << ',' << r.oracle_converged << ','
            << r.error << '\n';
    }
    if (opt.out_path.empty()) {
        std::cout << csv.str();
    } else {
        write_text_file(opt.out_path, csv.str());
        std::cout << json{{"rows", rows.size()}, {"out", opt.out_path}}.dump(2) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// nonlinear plans
// ---------------------------------------------------------------------------

struct PlanOptions {
    std::string plan;  // "relu" | "identity" | "" (use files)
    std::string h1_file, h2_file;
    std::string lower = "-1";
    std::string upper = "1";
    std::size_t samples = 200;
    std::uint64_t sample_seed = 17;

    void attach(CLI::App* cmd) {
        cmd->add_option("--plan", plan, "builtin k=1 plan: relu | identity");
        cmd->add_option("--h1", h1_file, "FPLF JSON for the inner factor");
        cmd->add_option("--h2", h2_file, "FPLF JSON for the outer factor");
        cmd->add_option("--lower", lower, "domain lower bounds, comma list");
        cmd->add_option("--upper", upper, "domain upper bounds, comma list");
        cmd->add_option("--samples", samples, "domain sample count");
        cmd->add_option("--sample-seed", sample_seed, "domain sampling seed");
    }

    std::pair<FplfSpec, FplfSpec> parts() const {
        if (plan == "relu") {
            return suites::relu_plan_parts();
        }
        if (plan == "identity") {
            FplfSpec id;
            id.layers.push_back({Matrix(1, 1, {1.0}), {0.0}});
            return {id, id};
        }
        if (!h1_file.empty() && !h2_file.empty()) {
            auto load = [](const std::string& path) {
                std::ifstream in(path);
                if (!in) {
                    throw std::runtime_error("cannot open FPLF file: " + path);
                }
                json j;
                in >> j;
                return fplf_from_json(j);
            };
            return {load(h1_file), load(h2_file)};
        }
        throw std::runtime_error("need --plan or both --h1 and --h2");
    }

    DomainBox domain() const {
        return DomainBox::sampled(parse_double_list(lower), parse_double_list(upper), samples,
                                  sample_seed);
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimum-norm representation costs of residual networks"};
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<JsonConfig>());
    // placed before the subcommand: rescost --config file.json <subcommand> ...;
    // sections in the file are keyed by subcommand name
    app.set_config("--config", "", "JSON config file; command-line flags override");

    // ---- cost ----
    auto* cost_cmd = app.add_subcommand("cost", "evaluate the cost formula for a matrix");
    MatrixSourceOptions cost_src;
    CostParamOptions cost_params;
    cost_src.attach(cost_cmd);
    cost_params.attach(cost_cmd);
    cost_cmd->callback([&]() {
        std::exit(guarded([&]() {
            const Matrix a = cost_src.load();
            const CostReport report = matrix_cost(a, cost_params.resolve(a));
            std::cout << to_json(report).dump(2) << "\n";
            return 0;
        }));
    });

    // ---- witness ----
    auto* wit_cmd = app.add_subcommand("witness", "build minimum-cost parameters for a matrix");
    MatrixSourceOptions wit_src;
    CostParamOptions wit_params;
    std::string wit_out;
    bool wit_full = false;
    wit_src.attach(wit_cmd);
    wit_params.attach(wit_cmd);
    wit_cmd->add_option("--out", wit_out, "write parameters JSON here");
    wit_cmd->add_flag("--full", wit_full, "include parameters in stdout JSON");
    wit_cmd->callback([&]() {
        std::exit(guarded([&]() {
            const Matrix a = wit_src.load();
            const WitnessReport report = build_min_cost(a, wit_params.resolve(a));
            if (!wit_out.empty()) {
                write_text_file(wit_out, to_json(report.params).dump(2) + "\n");
            }
            json j = to_json(report, wit_full);
            j["forward_error"] = frobenius_norm(report.realized - a);
            std::cout << j.dump(2) << "\n";
            return 0;
        }));
    });

    // ---- train ----
    auto* train_cmd = app.add_subcommand("train", "train the numerical oracle on a matrix");
    MatrixSourceOptions train_src;
    CostParamOptions train_params;
    OracleConfig train_cfg;
    std::string train_trace, train_save, train_init;
    train_src.attach(train_cmd);
    train_params.attach(train_cmd);
    train_cmd->add_option("--seed", train_cfg.seed, "base seed for restarts");
    train_cmd->add_option("--restarts", train_cfg.restarts, "random restarts");
    train_cmd->add_option("--fit-tol", train_cfg.fit_tolerance, "relative fit tolerance");
    train_cmd->add_option("--max-iters", train_cfg.max_iterations, "iterations per stage");
    train_cmd->add_option("--trace-csv", train_trace, "write (stage, iteration, fit, penalty) CSV");
    train_cmd->add_option("--save-params", train_save, "write trained parameters JSON");
    train_cmd->add_option("--init", train_init, "initialize from a parameters JSON file");
    train_cmd->callback([&]() {
        std::exit(guarded([&]() {
            const Matrix a = train_src.load();
            const CostParams p = train_params.resolve(a);
            train_cfg.record_trace = !train_trace.empty();
            TrainResult result;
            if (!train_init.empty()) {
                std::ifstream in(train_init);
                if (!in) {
                    throw std::runtime_error("cannot open init file: " + train_init);
                }
                json j;
                in >> j;
                result = min_norm_train_from(a, p, linear_params_from_json(j), train_cfg);
            } else {
                result = min_norm_train(a, p, train_cfg);
            }
            if (!train_trace.empty()) {
                std::ostringstream csv;
                csv << "stage,iteration,fit_residual,penalty\n";
                for (const TracePoint& t : result.trace) {
                    csv << t.stage << ',' << t.iteration << ',' << f17(t.fit_residual) << ','
                        << f17(t.penalty) << '\n';
                }
                write_text_file(train_trace, csv.str());
            }
            if (!train_save.empty()) {
                write_text_file(train_save, to_json(result.params).dump(2) + "\n");
            }
            json j = to_json(result);
            j["formula_cost"] = matrix_cost(a, p).total;
            std::cout << j.dump(2) << "\n";
            return 0;
        }));
    });

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand("sweep", "cost over a (block depth, L, lambda) grid");
    SweepOptions sweep;
    sweep.source.attach(sweep_cmd);
    sweep_cmd->add_option("--width", sweep.base.width, "inner width (0 = max matrix dim)");
    sweep_cmd->add_option("--lambda-grid", sweep.lambda_grid, "comma list of lambdas")->required();
    sweep_cmd->add_option("--depth-grid", sweep.depth_grid, "comma list of L values, 'inf' allowed");
    sweep_cmd->add_option("--block-depths", sweep.block_depths, "subset of 1,2");
    sweep_cmd->add_option("--normalizations", sweep.normalizations,
                          "columns to fill: raw,nuclear_ratio,rank_ratio");
    sweep_cmd->add_option("--out", sweep.out_path, "CSV output path (stdout if omitted)");
    sweep_cmd->add_flag("--with-oracle", sweep.with_oracle, "fill oracle columns (finite L only)");
    sweep_cmd->add_option("--oracle-seed", sweep.oracle_seed, "oracle base seed");
    sweep_cmd->add_option("--oracle-restarts", sweep.oracle_restarts, "oracle restarts");
    sweep_cmd->add_option("--oracle-iters", sweep.oracle_iters, "oracle iterations per stage");
    sweep_cmd->add_option("--jobs", sweep.jobs, "parallel evaluation bound");
    sweep_cmd->callback([&]() { std::exit(guarded([&]() { return run_sweep(sweep); })); });

    // ---- nonlinear-build ----
    auto* nb_cmd = app.add_subcommand("nonlinear-build",
                                      "build a bottleneck ReLU network for h2 ∘ h1");
    PlanOptions nb_plan;
    int nb_block_depth = 2;
    std::size_t nb_depth = 64, nb_width = 0, nb_m = 0;
    double nb_lambda = 1e-3;
    std::string nb_out;
    nb_plan.attach(nb_cmd);
    nb_cmd->add_option("--block-depth", nb_block_depth, "1 or 2")->check(CLI::Range(1, 2));
    nb_cmd->add_option("--depth", nb_depth, "residual block count");
    nb_cmd->add_option("--width", nb_width, "inner width (0 = minimal layout width)");
    nb_cmd->add_option("--m", nb_m, "depth-1 replication count (0 = floor(L/log(1/lambda)))");
    nb_cmd->add_option("--lambda", nb_lambda, "layer-weighting parameter")->check(CLI::PositiveNumber);
    nb_cmd->add_option("--out", nb_out, "write network JSON here");
    nb_cmd->callback([&]() {
        std::exit(guarded([&]() {
            auto [h1, h2] = nb_plan.parts();
            const DomainBox box = nb_plan.domain();
            const BottleneckPlan plan =
                make_bottleneck_plan(h1, h2, box, nb_depth, nb_lambda, nb_block_depth, nb_m);
            const std::size_t width = nb_width > 0 ? nb_width : bottleneck_min_width(plan);
            const NonlinResNetParams net =
                nb_block_depth == 2 ? build_bottleneck_depth2(plan, nb_depth, width, nb_lambda)
                                    : build_bottleneck_depth1(plan, nb_depth, width, nb_lambda);
            const RepresentationReport rep = verify_representation(net, plan, box, 1e-6);
            if (!nb_out.empty()) {
                write_text_file(nb_out, to_json(net).dump() + "\n");
            }
            const double pen = penalty_nonlin(net, nb_lambda);
            json j{{"block_depth", nb_block_depth},
                   {"depth", nb_depth},
                   {"width", width},
                   {"min_width", bottleneck_min_width(plan)},
                   {"m", plan.m},
                   {"l1", plan.l1},
                   {"l_int", plan.l_int},
                   {"l2", plan.l2},
                   {"penalty", pen},
                   {"max_deviation", rep.max_deviation}};
            if (nb_lambda < 1.0) {
                const double log_inv = std::log(1.0 / nb_lambda);
                j["normalized_ratio"] = nb_block_depth == 1
                                            ? pen / (nb_lambda * log_inv * log_inv)
                                            : pen / (nb_lambda * log_inv);
            }
            std::cout << j.dump(2) << "\n";
            return 0;
        }));
    });

    // ---- nonlinear-verify ----
    auto* nv_cmd = app.add_subcommand("nonlinear-verify",
                                      "check a network JSON against a target on a domain");
    PlanOptions nv_plan;
    std::string nv_params;
    double nv_tol = 1e-6;
    bool nv_rank = false;
    nv_plan.attach(nv_cmd);
    nv_cmd->add_option("--params", nv_params, "network JSON file")->required();
    nv_cmd->add_option("--tol", nv_tol, "max absolute deviation allowed");
    nv_cmd->add_flag("--jacobian-rank", nv_rank, "also report the sampled Jacobian rank");
    nv_cmd->callback([&]() {
        std::exit(guarded([&]() {
            std::ifstream in(nv_params);
            if (!in) {
                throw std::runtime_error("cannot open params file: " + nv_params);
            }
            json pj;
            in >> pj;
            const NonlinResNetParams net = nonlin_params_from_json(pj);
            auto [h1, h2] = nv_plan.parts();
            const DomainBox box = nv_plan.domain();
            const FplfSpec target = compose_fplf(h2, h1);
            const RepresentationReport rep = verify_representation(
                net, [&](std::span<const double> x) { return eval_fplf(target, x); }, box, nv_tol);
            json j{{"max_deviation", rep.max_deviation},
                   {"samples", rep.samples},
                   {"pass", rep.pass}};
            if (nv_rank) {
                const JacobianRankReport jr = jacobian_rank(net, box);
                j["jacobian_rank"] = jr.rank;
                j["boundary_rejected"] = jr.boundary_rejected;
            }
            std::cout << j.dump(2) << "\n";
            return rep.pass ? 0 : 1;
        }));
    });

    // ---- verify ----
    auto* ver_cmd = app.add_subcommand("verify", "run a seeded verification suite");
    std::string ver_suite;
    std::size_t ver_count = 1000;
    std::uint64_t ver_seed = 1;
    std::string ver_out;
    unsigned ver_jobs = 1;
    std::size_t ver_depth = 4096;
    ver_cmd->add_option("suite", ver_suite,
                        "witness | oracle | gelfand | submajorization | chain | "
                        "nonlinear-lower | nonlinear-upper")
        ->required();
    ver_cmd->add_option("--count", ver_count, "number of cases");
    ver_cmd->add_option("--seed", ver_seed, "base seed");
    ver_cmd->add_option("--out", ver_out, "write per-case CSV here");
    ver_cmd->add_option("--jobs", ver_jobs, "parallel evaluation bound");
    ver_cmd->add_option("--depth", ver_depth, "network depth for nonlinear-upper");
    ver_cmd->callback([&]() {
        std::exit(guarded([&]() {
            suites::SuiteReport report;
            if (ver_suite == "witness") {
                report = suites::run_witness_suite(ver_seed, ver_count);
            } else if (ver_suite == "oracle") {
                report = suites::run_oracle_suite(ver_seed, ver_count);
            } else if (ver_suite == "gelfand") {
                report = suites::run_gelfand_suite(ver_seed, ver_count, ver_jobs);
            } else if (ver_suite == "submajorization") {
                report = suites::run_submajorization_suite(ver_seed, ver_count, ver_jobs);
            } else if (ver_suite == "chain") {
                report = suites::run_chain_suite(ver_seed, ver_count);
            } else if (ver_suite == "nonlinear-lower") {
                report = suites::run_nonlinear_lower_suite(ver_seed, ver_count, ver_jobs);
            } else if (ver_suite == "nonlinear-upper") {
                report = suites::run_nonlinear_upper_suite(ver_seed, ver_depth);
            } else {
                throw std::runtime_error("unknown suite: " + ver_suite);
            }
            if (!ver_out.empty()) {
                std::ostringstream csv;
                suites::write_csv(report, csv);
                write_text_file(ver_out, csv.str());
            }
            std::cout << report.summary << "\n";
            std::cout << (report.pass ? "PASS" : "FAIL") << "\n";
            return report.pass ? 0 : 1;
        }));
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}
