#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "rescost/matrix.hpp"
#include "rescost/prng.hpp"
#include "rescost/spectral_cost.hpp"
#include "rescost/svd.hpp"
#include "rescost/witness.hpp"

namespace rescost {

struct OracleConfig {
    double fit_tolerance = 1e-6;  // ‖f(θ)−A‖_F / (1+‖A‖_F)
    // Scaled by 1+‖A‖_F⁻². The gentle μ=1 opening stage is what lets residual
    // blocks grow out of the zero saddle while line-search steps are still
    // large; with the opening at 1e2 the weak singular directions stay parked
    // in the embeddings.
    std::vector<double> penalty_schedule = {1e0, 1e2, 1e4, 1e6, 1e8};
    std::size_t max_iterations = 2000;  // per continuation stage
    double initial_step = 1e-2;
    std::uint64_t seed = 0;
    std::size_t restarts = 3;
    bool record_trace = true;
};

struct TracePoint {
    std::size_t stage = 0;
    std::size_t iteration = 0;
    double objective = 0.0;
    double fit_residual = 0.0;
    double penalty = 0.0;
};

struct TrainResult {
    LinearResNetParams params;
    double fit_residual = 0.0;
    double penalty_value = 0.0;
    bool converged = false;
    std::vector<TracePoint> trace;
    std::uint64_t restart_index = 0;
};

namespace detail {

template <class Params, class F>
void for_each_weight(Params& p, F&& f) {
    f(p.w_u);
    f(p.w_e);
    for (auto& b : p.blocks) {
        std::visit(
            [&](auto& blk) {
                using T = std::decay_t<decltype(blk)>;
                if constexpr (std::is_same_v<T, Depth1Block>) {
                    f(blk.w);
                } else {
                    f(blk.w1);
                    f(blk.w2);
                }
            },
            b);
    }
}

inline double weight_dot(const LinearResNetParams& a, const LinearResNetParams& b) {
    double s = 0.0;
    std::size_t slot = 0;
    std::vector<const Matrix*> lhs, rhs;
    for_each_weight(a, [&](const Matrix& m) { lhs.push_back(&m); });
    for_each_weight(b, [&](const Matrix& m) { rhs.push_back(&m); });
    for (slot = 0; slot < lhs.size(); ++slot) {
        const auto& x = lhs[slot]->entries();
        const auto& y = rhs[slot]->entries();
        for (std::size_t i = 0; i < x.size(); ++i) {
            s += x[i] * y[i];
        }
    }
    return s;
}

inline void axpy_weights(LinearResNetParams& x, double t, const LinearResNetParams& g) {
    std::vector<Matrix*> dst;
    std::vector<const Matrix*> src;
    for_each_weight(x, [&](Matrix& m) { dst.push_back(&m); });
    for_each_weight(g, [&](const Matrix& m) { src.push_back(&m); });
    for (std::size_t slot = 0; slot < dst.size(); ++slot) {
        auto d = dst[slot]->entries();
        const auto s = src[slot]->entries();
        for (std::size_t i = 0; i < d.size(); ++i) {
            d[i] += t * s[i];
        }
    }
}

// μ‖f(θ)−A‖_F² + penalty(θ, λ); +inf when the forward pass is non-finite.
inline double staged_objective(const LinearResNetParams& p, const Matrix& a, double lambda,
                               double mu) {
    Matrix acc = p.w_u;
    for (const ResidualBlock& b : p.blocks) {
        acc = matmul(acc, residual_map(b));
    }
    const Matrix f = matmul(acc, p.w_e);
    if (!all_finite(f)) {
        return std::numeric_limits<double>::infinity();
    }
    return mu * frobenius_sq(f - a) + penalty(p, lambda);
}

// Closed-form gradient of the staged objective by reverse accumulation over
// the product chain: grad wrt factor P_i is Preᵀ_{i-1} G Sufᵀ_{i+1} with
// G = 2μ(f(θ)−A), plus the quadratic penalty terms.
inline LinearResNetParams staged_gradient(const LinearResNetParams& p, const Matrix& a,
                                          double lambda, double mu) {
    const std::size_t depth = p.depth();
    std::vector<Matrix> maps;
    maps.reserve(depth);
    for (const ResidualBlock& b : p.blocks) {
        maps.push_back(residual_map(b));
    }
    std::vector<Matrix> pre(depth + 1);  // pre[i] = W_u P_1 ... P_i
    pre[0] = p.w_u;
    for (std::size_t i = 0; i < depth; ++i) {
        pre[i + 1] = matmul(pre[i], maps[i]);
    }
    std::vector<Matrix> suf(depth + 1);  // suf[i] = P_{i+1} ... P_L W_e
    suf[depth] = p.w_e;
    for (std::size_t i = depth; i > 0; --i) {
        suf[i - 1] = matmul(maps[i - 1], suf[i]);
    }
    const Matrix residual = matmul(pre[depth], p.w_e) - a;
    const Matrix g = (2.0 * mu) * residual;

    LinearResNetParams grad = p;
    grad.w_u = matmul(g, transpose(suf[0])) + p.w_u;
    grad.w_e = matmul(transpose(pre[depth]), g) + p.w_e;
    const double l = static_cast<double>(depth);
    for (std::size_t i = 0; i < depth; ++i) {
        const Matrix map_grad = matmul(matmul(transpose(pre[i]), g), transpose(suf[i + 1]));
        std::visit(
            [&](auto& blk) {
                using T = std::decay_t<decltype(blk)>;
                const auto& src = std::get<T>(p.blocks[i]);
                if constexpr (std::is_same_v<T, Depth1Block>) {
                    blk.w = map_grad + (2.0 * lambda * l) * src.w;
                } else {
                    blk.w2 = matmul(map_grad, transpose(src.w1)) + lambda * src.w2;
                    blk.w1 = matmul(transpose(src.w2), map_grad) + lambda * src.w1;
                }
            },
            grad.blocks[i]);
    }
    return grad;
}

inline double fit_residual_of(const LinearResNetParams& p, const Matrix& a) {
    return frobenius_norm(forward_linear(p) - a) / (1.0 + frobenius_norm(a));
}

inline LinearResNetParams random_init(std::size_t d_out, std::size_t d_in, std::size_t width,
                                      std::size_t depth, int block_depth, Rng& rng) {
    LinearResNetParams p;
    p.block_depth = block_depth;
    p.w_u = random_gaussian(d_out, width, rng);
    p.w_e = random_gaussian(width, d_in, rng);
    for (double& v : p.w_u.entries()) {
        v *= 1e-2;
    }
    for (double& v : p.w_e.entries()) {
        v *= 1e-2;
    }
    for (std::size_t i = 0; i < depth; ++i) {
        if (block_depth == 1) {
            Matrix w = random_gaussian(width, width, rng);
            for (double& v : w.entries()) {
                v *= 1e-3;
            }
            p.blocks.push_back(Depth1Block{std::move(w)});
        } else {
            Matrix w1 = random_gaussian(width, width, rng);
            Matrix w2 = random_gaussian(width, width, rng);
            for (double& v : w1.entries()) {
                v *= 1e-3;
            }
            for (double& v : w2.entries()) {
                v *= 1e-3;
            }
            p.blocks.push_back(Depth2Block{std::move(w1), std::move(w2)});
        }
    }
    return p;
}

// Staged descent on one start point.
inline TrainResult run_continuation(LinearResNetParams theta, const Matrix& a,
                                    const CostParams& cost_params, const OracleConfig& config,
                                    std::size_t restart_index) {
    const double a_fro2 = frobenius_sq(a);
    const double mu_scale = a_fro2 > 0.0 ? 1.0 + 1.0 / a_fro2 : 1.0;
    std::vector<TracePoint> trace;
    double step = config.initial_step;
    for (std::size_t stage = 0; stage < config.penalty_schedule.size(); ++stage) {
        const double mu = config.penalty_schedule[stage] * mu_scale;
        double f_cur = staged_objective(theta, a, cost_params.lambda, mu);
        for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
            const LinearResNetParams grad = staged_gradient(theta, a, cost_params.lambda, mu);
            const double gnorm2 = weight_dot(grad, grad);
            if (!(gnorm2 > 1e-22 * (1.0 + f_cur * f_cur))) {
                break;
            }
            bool accepted = false;
            while (step > 1e-18) {
                LinearResNetParams trial = theta;
                axpy_weights(trial, -step, grad);
                const double f_trial = staged_objective(trial, a, cost_params.lambda, mu);
                if (f_trial <= f_cur - 1e-4 * step * gnorm2) {
                    theta = std::move(trial);
                    f_cur = f_trial;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) {
                break;
            }
            step = std::min(step * 1.3, 1.0);
            if (config.record_trace) {
                trace.push_back({stage, iter, f_cur, fit_residual_of(theta, a),
                                 penalty(theta, cost_params.lambda)});
            }
        }
    }
    TrainResult result;
    result.fit_residual = fit_residual_of(theta, a);
    result.penalty_value = penalty(theta, cost_params.lambda);
    result.converged = result.fit_residual <= config.fit_tolerance;
    result.params = std::move(theta);
    result.trace = std::move(trace);
    result.restart_index = restart_index;
    return result;
}

inline void validate_train_inputs(const Matrix& a, const CostParams& cost_params,
                                  const OracleConfig& config) {
    validate(cost_params);
    if (cost_params.infinite_depth()) {
        throw std::invalid_argument("min_norm_train: finite depth required");
    }
    require_finite(a, "min_norm_train");
    if (cost_params.width < numeric_rank(a)) {
        throw WidthError("min_norm_train: width below numeric rank");
    }
    for (std::size_t i = 0; i < config.penalty_schedule.size(); ++i) {
        if (!(config.penalty_schedule[i] > 0.0) ||
            (i > 0 && !(config.penalty_schedule[i] > config.penalty_schedule[i - 1]))) {
            throw std::invalid_argument(
                "min_norm_train: penalty_schedule must be positive and increasing");
        }
    }
}

}  // namespace detail

/// Penalty continuation: minimize μ‖f(θ)−A‖² + penalty(θ, λ) by full-gradient
/// descent with backtracking line search, warm-starting the stages as μ grows.
/// Non-convergence is reported, not thrown; the best of `restarts` seeded runs
/// is returned, ordered by (converged, penalty, restart index).
inline TrainResult min_norm_train(const Matrix& a, const CostParams& cost_params,
                                  const OracleConfig& config = {}) {
    detail::validate_train_inputs(a, cost_params, config);
    TrainResult best;
    bool have_best = false;
    for (std::size_t restart = 0; restart < std::max<std::size_t>(1, config.restarts); ++restart) {
        Rng rng(derive_seed(config.seed, restart));
        LinearResNetParams theta = detail::random_init(a.rows(), a.cols(), cost_params.width,
                                                       cost_params.depth, cost_params.block_depth,
                                                       rng);
        TrainResult result =
            detail::run_continuation(std::move(theta), a, cost_params, config, restart);
        // deterministic reduction: converged first, then penalty, then index
        auto key = [](const TrainResult& r) {
            return std::make_tuple(r.converged ? 0 : 1,
                                   r.converged ? r.penalty_value : r.fit_residual,
                                   r.restart_index);
        };
        if (!have_best || key(result) < key(best)) {
            best = std::move(result);
            have_best = true;
        }
    }
    return best;
}

/// Single continuation run started from the given parameters instead of a
/// random draw.
inline TrainResult min_norm_train_from(const Matrix& a, const CostParams& cost_params,
                                       const LinearResNetParams& init,
                                       const OracleConfig& config = {}) {
    detail::validate_train_inputs(a, cost_params, config);
    validate_shapes(init);
    if (init.width() != cost_params.width || init.depth() != cost_params.depth ||
        init.block_depth != cost_params.block_depth) {
        throw std::invalid_argument("min_norm_train_from: init does not match cost params");
    }
    return detail::run_continuation(init, a, cost_params, config, 0);
}

/// Argmin found by brute force at 1×1 scale, for cross-checking the formulas.
struct BruteForceResult {
    double penalty = 0.0;
    double w_u = 0.0;
    double w_e = 0.0;
    std::vector<double> blocks;  // depth-1: block scalars; depth-2: per-block products
};

/// Exhaustive coarse grid over (w_u, w_1..w_L) ∈ (0, 2max(1,σ)]^{L+1} with the
/// constraint eliminated through w_e = σ/(w_u ∏(1+w_i)), then coordinate
/// descent refinement. Search restricted to w_i ≥ 0. Depth-2 blocks are
/// searched through their per-block product m ≥ 0 at balanced-split cost λm.
inline BruteForceResult brute_force_scalar(double sigma, std::size_t depth, double lambda,
                                           int block_depth, double grid_step) {
    if (depth == 0 || depth > 4) {
        throw std::invalid_argument("brute_force_scalar: depth must be in [1, 4]");
    }
    if (!(grid_step > 0.0)) {
        throw std::invalid_argument("brute_force_scalar: grid step must be positive");
    }
    if (sigma == 0.0) {
        return {0.0, 0.0, 0.0, std::vector<double>(depth, 0.0)};
    }
    const double bound = 2.0 * std::max(1.0, sigma);
    const double l = static_cast<double>(depth);
    auto objective = [&](double wu, const std::vector<double>& w) {
        double prod = 1.0;
        for (double wi : w) {
            prod *= 1.0 + wi;
        }
        if (!(wu > 0.0) || !(prod > 0.0)) {
            return std::numeric_limits<double>::infinity();
        }
        const double we = sigma / (wu * prod);
        double pen = 0.5 * (wu * wu + we * we);
        if (block_depth == 1) {
            double sum = 0.0;
            for (double wi : w) {
                sum += wi * wi;
            }
            pen += lambda * l * sum;
        } else {
            double sum = 0.0;
            for (double wi : w) {
                sum += wi;
            }
            pen += lambda * sum;
        }
        return pen;
    };

    // coarse grid
    const std::size_t steps = static_cast<std::size_t>(std::floor(bound / grid_step)) + 1;
    std::vector<std::size_t> idx(depth + 1, 0);
    std::vector<double> w(depth, 0.0);
    double best_f = std::numeric_limits<double>::infinity();
    double best_wu = grid_step;
    std::vector<double> best_w(depth, 0.0);
    bool done = false;
    while (!done) {
        const double wu = static_cast<double>(idx[0] + 1) * grid_step;  // w_u > 0
        bool wu_ok = wu <= bound;
        if (wu_ok) {
            for (std::size_t i = 0; i < depth; ++i) {
                w[i] = static_cast<double>(idx[i + 1]) * grid_step;
            }
            const double f = objective(wu, w);
            if (f < best_f) {
                best_f = f;
                best_wu = wu;
                best_w = w;
            }
        }
        // odometer
        std::size_t d = 0;
        for (;; ++d) {
            if (d == idx.size()) {
                done = true;
                break;
            }
            if (++idx[d] < steps) {
                break;
            }
            idx[d] = 0;
        }
    }

    // coordinate descent refinement around the coarse argmin
    double h = grid_step;
    while (h > 1e-11) {
        for (std::size_t coord = 0; coord <= depth; ++coord) {
            auto line = [&](double x) {
                if (coord == 0) {
                    return objective(x, best_w);
                }
                std::vector<double> trial = best_w;
                trial[coord - 1] = x;
                return objective(best_wu, trial);
            };
            const double center = coord == 0 ? best_wu : best_w[coord - 1];
            const double lo = std::max(coord == 0 ? 1e-9 : 0.0, center - h);
            const double hi = std::min(bound, center + h);
            const GoldenResult g = golden_section_min(line, lo, hi, 1e-12);
            if (g.f < best_f) {
                best_f = g.f;
                if (coord == 0) {
                    best_wu = g.x;
                } else {
                    best_w[coord - 1] = g.x;
                }
            }
        }
        h *= 0.6;
    }

    double prod = 1.0;
    for (double wi : best_w) {
        prod *= 1.0 + wi;
    }
    return {best_f, best_wu, sigma / (best_wu * prod), best_w};
}

/// Max relative discrepancy between the analytic gradient of the staged
/// objective and central finite differences at `count` random coordinates.
inline double finite_difference_check(const LinearResNetParams& params, const Matrix& a,
                                      double lambda, double mu, std::uint64_t seed = 0,
                                      std::size_t count = 20) {
    const LinearResNetParams grad = detail::staged_gradient(params, a, lambda, mu);
    std::vector<const Matrix*> grad_slots;
    detail::for_each_weight(grad, [&](const Matrix& m) { grad_slots.push_back(&m); });

    std::size_t total_coords = 0;
    detail::for_each_weight(params, [&](const Matrix& m) { total_coords += m.size(); });

    Rng rng(seed);
    double worst = 0.0;
    for (std::size_t c = 0; c < count; ++c) {
        std::size_t flat = rng.uniform_index(total_coords);
        LinearResNetParams plus = params;
        LinearResNetParams minus = params;
        double analytic = 0.0;
        double h = 0.0;
        std::size_t offset = 0;
        std::size_t slot = 0;
        detail::for_each_weight(plus, [&](Matrix& m) {
            if (flat >= offset && flat < offset + m.size()) {
                const std::size_t local = flat - offset;
                h = 1e-6 * (1.0 + std::abs(m.entries()[local]));
                m.entries()[local] += h;
                analytic = grad_slots[slot]->entries()[local];
            }
            offset += m.size();
            ++slot;
        });
        offset = 0;
        detail::for_each_weight(minus, [&](Matrix& m) {
            if (flat >= offset && flat < offset + m.size()) {
                m.entries()[flat - offset] -= h;
            }
            offset += m.size();
        });
        const double f_plus = detail::staged_objective(plus, a, lambda, mu);
        const double f_minus = detail::staged_objective(minus, a, lambda, mu);
        const double fd = (f_plus - f_minus) / (2.0 * h);
        const double rel = std::abs(fd - analytic) / (1.0 + std::max(std::abs(fd), std::abs(analytic)));
        worst = std::max(worst, rel);
    }
    return worst;
}

}  // namespace rescost
