#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rescost/matrix.hpp"
#include "rescost/svd.hpp"

namespace rescost {

/// Distinguished depth value for the L → ∞ limit.
inline constexpr std::size_t kInfiniteDepth = static_cast<std::size_t>(-1);

struct CostParams {
    double lambda = 1.0;        // layer-weighting parameter, > 0
    std::size_t depth = 1;      // residual block count, or kInfiniteDepth
    int block_depth = 1;        // 1 or 2
    std::size_t width = 1;      // inner width n

    bool infinite_depth() const { return depth == kInfiniteDepth; }
};

inline void validate(const CostParams& p) {
    if (!(p.lambda > 0.0)) {
        throw std::invalid_argument("CostParams: lambda must be positive");
    }
    if (p.block_depth != 1 && p.block_depth != 2) {
        throw std::invalid_argument("CostParams: block_depth must be 1 or 2");
    }
    if (p.depth == 0) {
        throw std::invalid_argument("CostParams: depth must be at least 1");
    }
    if (p.width == 0) {
        throw std::invalid_argument("CostParams: width must be at least 1");
    }
}

/// Value and argmin of one per-singular-value inner problem.
struct ScalarCostResult {
    double cost = 0.0;
    double alpha_star = 0.0;
};

struct CostReport {
    double total = 0.0;
    std::vector<ScalarCostResult> per_sigma;  // aligned with spectrum.values
    SingularSpectrum spectrum;
    CostParams params;
};

struct GoldenResult {
    double x = 0.0;
    double f = 0.0;
};

/// Golden-section minimization of a unimodal function on [lo, hi], shrinking
/// the bracket to width xtol.
template <class F>
GoldenResult golden_section_min(F&& f, double lo, double hi, double xtol = 1e-10) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    if (b < a) {
        std::swap(a, b);
    }
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > xtol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    const double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

namespace detail {

// (1+t)^L evaluated as exp(L log1p(t)); accurate for large L.
inline double pow1p(double t, double l) { return std::exp(l * std::log1p(t)); }

}  // namespace detail

/// Depth-1 blocks, finite depth: min over α ≥ 0 of σ/(1+α/L)^L + λα².
/// Strictly convex in α; the minimizer lies in [0, √(σ/λ)] because λα² ≤ σ
/// at any minimizer.
inline ScalarCostResult scalar_cost_depth1(double sigma, std::size_t depth, double lambda) {
    if (sigma == 0.0) {
        return {0.0, 0.0};
    }
    const double l = static_cast<double>(depth);
    auto objective = [&](double alpha) {
        return sigma / detail::pow1p(alpha / l, l) + lambda * alpha * alpha;
    };
    const GoldenResult g = golden_section_min(objective, 0.0, std::sqrt(sigma / lambda));
    return {g.f, g.x};
}

/// Depth-2 blocks, finite depth: closed form
///   σ                              if σ ≤ λ
///   λ((L+1)(σ/λ)^{1/(L+1)} − L)    otherwise,
/// with per-block nuclear-norm scale α* = (σ/λ)^{1/(L+1)} − 1 when σ > λ.
inline ScalarCostResult scalar_cost_depth2(double sigma, std::size_t depth, double lambda) {
    if (sigma == 0.0) {
        return {0.0, 0.0};
    }
    if (sigma <= lambda) {
        return {sigma, 0.0};
    }
    const double l = static_cast<double>(depth);
    const double root = std::exp(std::log(sigma / lambda) / (l + 1.0));
    return {lambda * ((l + 1.0) * root - l), root - 1.0};
}

/// Depth-1 blocks, infinite depth: min over α ≥ 0 of σ e^{−α} + λα².
inline ScalarCostResult scalar_cost_depth1_inf(double sigma, double lambda) {
    if (sigma == 0.0) {
        return {0.0, 0.0};
    }
    auto objective = [&](double alpha) { return sigma * std::exp(-alpha) + lambda * alpha * alpha; };
    const GoldenResult g = golden_section_min(objective, 0.0, std::sqrt(sigma / lambda));
    return {g.f, g.x};
}

/// Depth-2 blocks, infinite depth: σ if σ ≤ λ, else λ(1 + log(σ/λ)).
inline ScalarCostResult scalar_cost_depth2_inf(double sigma, double lambda) {
    if (sigma == 0.0) {
        return {0.0, 0.0};
    }
    if (sigma <= lambda) {
        return {sigma, 0.0};
    }
    return {lambda * (1.0 + std::log(sigma / lambda)), 0.0};
}

inline ScalarCostResult scalar_cost(double sigma, const CostParams& p) {
    if (sigma < 0.0) {
        throw std::invalid_argument("scalar_cost: sigma must be nonnegative");
    }
    if (p.block_depth == 1) {
        return p.infinite_depth() ? scalar_cost_depth1_inf(sigma, p.lambda)
                                  : scalar_cost_depth1(sigma, p.depth, p.lambda);
    }
    return p.infinite_depth() ? scalar_cost_depth2_inf(sigma, p.lambda)
                              : scalar_cost_depth2(sigma, p.depth, p.lambda);
}

/// Minimum representation cost of A: the per-singular-value costs summed over
/// the spectrum. Requires width ≥ numeric rank; width in excess of the rank
/// contributes nothing.
inline CostReport matrix_cost(const Matrix& a, const CostParams& p) {
    validate(p);
    require_finite(a, "matrix_cost");
    CostReport report;
    report.params = p;
    report.spectrum = singular_values(a);
    const std::size_t rank = report.spectrum.numeric_rank();
    if (p.width < rank) {
        throw WidthError("matrix_cost: width " + std::to_string(p.width) +
                         " below numeric rank " + std::to_string(rank));
    }
    report.per_sigma.reserve(report.spectrum.values.size());
    for (double s : report.spectrum.values) {
        report.per_sigma.push_back(scalar_cost(s, p));
        report.total += report.per_sigma.back().cost;
    }
    return report;
}

/// Infinite-depth cost over its small-λ normalizer:
///   depth-1: c / (λ log²(1/λ)),  depth-2: c / (λ log(1/λ)).
/// Tends to the numeric rank of A as λ → 0.
inline double rank_ratio(const Matrix& a, double lambda, int block_depth) {
    if (!(lambda > 0.0) || lambda >= 1.0) {
        throw std::domain_error("rank_ratio: lambda must lie in (0, 1)");
    }
    CostParams p;
    p.lambda = lambda;
    p.depth = kInfiniteDepth;
    p.block_depth = block_depth;
    p.width = std::max<std::size_t>(1, std::min(a.rows(), a.cols()));
    const double cost = matrix_cost(a, p).total;
    const double log_inv = std::log(1.0 / lambda);
    const double normalizer =
        block_depth == 1 ? lambda * log_inv * log_inv : lambda * log_inv;
    return cost / normalizer;
}

}  // namespace rescost
