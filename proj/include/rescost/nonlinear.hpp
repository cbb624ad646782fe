#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rescost/matrix.hpp"
#include "rescost/prng.hpp"
#include "rescost/spectral_cost.hpp"
#include "rescost/svd.hpp"

namespace rescost {

struct NonlinDepth1Block {
    Matrix w;               // n × n
    std::vector<double> b;  // n
};

struct NonlinDepth2Block {
    Matrix w1;               // n × n
    std::vector<double> b1;  // n
    Matrix w2;               // n × n
    std::vector<double> b2;  // n
};

using NonlinBlock = std::variant<NonlinDepth1Block, NonlinDepth2Block>;

/// ReLU residual network f_u ∘ (id+f_L) ∘ ... ∘ (id+f_1) ∘ f_e with
/// f_ℓ(z) = σ(Wz+b) (depth-1) or W2 σ(W1 z + b1) + b2 (depth-2).
/// blocks[0] is applied first, right after the embedding.
struct NonlinResNetParams {
    int block_depth = 1;
    Matrix w_u;               // d_out × n
    std::vector<double> b_u;  // d_out
    Matrix w_e;               // n × d_in
    std::vector<double> b_e;  // n
    std::vector<NonlinBlock> blocks;

    std::size_t depth() const { return blocks.size(); }
    std::size_t width() const { return w_e.rows(); }
    std::size_t in_dim() const { return w_e.cols(); }
    std::size_t out_dim() const { return w_u.rows(); }
};

namespace detail {

inline void relu_inplace(std::vector<double>& v) {
    for (double& x : v) {
        x = std::max(0.0, x);
    }
}

inline void add_inplace(std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw DimensionError("vector add: size mismatch");
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] += b[i];
    }
}

inline std::vector<double> affine(const Matrix& w, std::span<const double> x,
                                  const std::vector<double>& b) {
    std::vector<double> y = matvec(w, x);
    add_inplace(y, b);
    return y;
}

}  // namespace detail

inline void validate_shapes(const NonlinResNetParams& p) {
    const std::size_t n = p.width();
    if (p.w_u.cols() != n || p.b_u.size() != p.w_u.rows() || p.b_e.size() != n) {
        throw DimensionError("NonlinResNetParams: embedding shapes do not conform");
    }
    for (const NonlinBlock& b : p.blocks) {
        const int bd = b.index() == 0 ? 1 : 2;
        if (bd != p.block_depth) {
            throw std::invalid_argument("NonlinResNetParams: mixed block variants");
        }
        std::visit(
            [&](const auto& blk) {
                using T = std::decay_t<decltype(blk)>;
                if constexpr (std::is_same_v<T, NonlinDepth1Block>) {
                    if (blk.w.rows() != n || blk.w.cols() != n || blk.b.size() != n) {
                        throw DimensionError("NonlinResNetParams: block shape mismatch");
                    }
                } else {
                    if (blk.w1.rows() != n || blk.w1.cols() != n || blk.b1.size() != n ||
                        blk.w2.rows() != n || blk.w2.cols() != n || blk.b2.size() != n) {
                        throw DimensionError("NonlinResNetParams: block shape mismatch");
                    }
                }
            },
            b);
    }
}

inline std::vector<double> forward_nonlin(const NonlinResNetParams& p, std::span<const double> x) {
    std::vector<double> z = detail::affine(p.w_e, x, p.b_e);
    for (const NonlinBlock& b : p.blocks) {
        std::visit(
            [&](const auto& blk) {
                using T = std::decay_t<decltype(blk)>;
                if constexpr (std::is_same_v<T, NonlinDepth1Block>) {
                    std::vector<double> f = detail::affine(blk.w, z, blk.b);
                    detail::relu_inplace(f);
                    detail::add_inplace(z, f);
                } else {
                    std::vector<double> h = detail::affine(blk.w1, z, blk.b1);
                    detail::relu_inplace(h);
                    std::vector<double> f = detail::affine(blk.w2, h, blk.b2);
                    detail::add_inplace(z, f);
                }
            },
            b);
    }
    return detail::affine(p.w_u, z, p.b_u);
}

/// Same weight terms as the linear penalty; biases contribute nothing.
inline double penalty_nonlin(const NonlinResNetParams& p, double lambda) {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("penalty_nonlin: lambda must be positive");
    }
    double total = 0.5 * (frobenius_sq(p.w_u) + frobenius_sq(p.w_e));
    if (p.block_depth == 1) {
        double blocks = 0.0;
        for (const NonlinBlock& b : p.blocks) {
            blocks += frobenius_sq(std::get<NonlinDepth1Block>(b).w);
        }
        total += lambda * static_cast<double>(p.depth()) * blocks;
    } else {
        double blocks = 0.0;
        for (const NonlinBlock& b : p.blocks) {
            const auto& blk = std::get<NonlinDepth2Block>(b);
            blocks += frobenius_sq(blk.w1) + frobenius_sq(blk.w2);
        }
        total += 0.5 * lambda * blocks;
    }
    return total;
}

/// Exact Jacobian from the forward pass's activation pattern:
///   J = W_u (I + W_{2,L} D_L W_{1,L}) ··· (I + W_{2,1} D_1 W_{1,1}) W_e
/// with D_ℓ the 0/1 diagonal of preactivation signs. Throws BoundaryError when
/// a preactivation lies within boundary_tol of 0 while actually varying with
/// the input; a preactivation pinned at zero independently of x (its row of
/// W·J vanishes) is differentiable and passes.
inline Matrix jacobian_at(const NonlinResNetParams& p, std::span<const double> x,
                          double boundary_tol = 1e-12) {
    validate_shapes(p);
    std::vector<double> z = detail::affine(p.w_e, x, p.b_e);
    Matrix jac = p.w_e;
    for (const NonlinBlock& b : p.blocks) {
        std::visit(
            [&](const auto& blk) {
                using T = std::decay_t<decltype(blk)>;
                const Matrix& w_in = [&]() -> const Matrix& {
                    if constexpr (std::is_same_v<T, NonlinDepth1Block>) {
                        return blk.w;
                    } else {
                        return blk.w1;
                    }
                }();
                const std::vector<double>& bias = [&]() -> const std::vector<double>& {
                    if constexpr (std::is_same_v<T, NonlinDepth1Block>) {
                        return blk.b;
                    } else {
                        return blk.b1;
                    }
                }();
                std::vector<double> pre = detail::affine(w_in, z, bias);
                Matrix inner = matmul(w_in, jac);  // n × d_in
                for (std::size_t i = 0; i < inner.rows(); ++i) {
                    if (std::abs(pre[i]) < boundary_tol) {
                        double row_norm = 0.0;
                        for (std::size_t j = 0; j < inner.cols(); ++j) {
                            row_norm += inner(i, j) * inner(i, j);
                        }
                        if (row_norm > boundary_tol * boundary_tol) {
                            throw BoundaryError(
                                "jacobian_at: preactivation on activation boundary");
                        }
                    }
                }
                for (std::size_t i = 0; i < inner.rows(); ++i) {
                    if (pre[i] <= 0.0) {
                        for (std::size_t j = 0; j < inner.cols(); ++j) {
                            inner(i, j) = 0.0;
                        }
                    }
                }
                if constexpr (std::is_same_v<T, NonlinDepth1Block>) {
                    jac = jac + inner;
                    detail::relu_inplace(pre);
                    detail::add_inplace(z, pre);
                } else {
                    jac = jac + matmul(blk.w2, inner);
                    detail::relu_inplace(pre);
                    std::vector<double> f = detail::affine(blk.w2, pre, blk.b2);
                    detail::add_inplace(z, f);
                }
            },
            b);
    }
    return matmul(p.w_u, jac);
}

/// Plain feedforward ReLU map: every layer applies σ(Wz+b) except the final
/// one, which is affine.
struct FplfLayer {
    Matrix w;
    std::vector<double> b;
};

struct FplfSpec {
    std::vector<FplfLayer> layers;

    std::size_t input_dim() const { return layers.front().w.cols(); }
    std::size_t output_dim() const { return layers.back().w.rows(); }
};

inline void validate_shapes(const FplfSpec& f) {
    if (f.layers.empty()) {
        throw std::invalid_argument("FplfSpec: needs at least one layer");
    }
    for (std::size_t i = 0; i < f.layers.size(); ++i) {
        const FplfLayer& l = f.layers[i];
        if (l.b.size() != l.w.rows()) {
            throw DimensionError("FplfSpec: bias length mismatch");
        }
        if (i > 0 && l.w.cols() != f.layers[i - 1].w.rows()) {
            throw DimensionError("FplfSpec: layer widths do not chain");
        }
        require_finite(l.w, "FplfSpec layer");
    }
}

inline std::vector<double> eval_fplf(const FplfSpec& f, std::span<const double> x) {
    std::vector<double> z(x.begin(), x.end());
    for (std::size_t i = 0; i < f.layers.size(); ++i) {
        z = detail::affine(f.layers[i].w, z, f.layers[i].b);
        if (i + 1 < f.layers.size()) {
            detail::relu_inplace(z);
        }
    }
    return z;
}

inline Matrix fplf_jacobian_at(const FplfSpec& f, std::span<const double> x,
                               double boundary_tol = 1e-12) {
    std::vector<double> z(x.begin(), x.end());
    Matrix jac = Matrix::identity(f.input_dim());
    for (std::size_t i = 0; i < f.layers.size(); ++i) {
        std::vector<double> pre = detail::affine(f.layers[i].w, z, f.layers[i].b);
        jac = matmul(f.layers[i].w, jac);
        if (i + 1 < f.layers.size()) {
            for (std::size_t r = 0; r < jac.rows(); ++r) {
                if (std::abs(pre[r]) < boundary_tol) {
                    double row_norm = 0.0;
                    for (std::size_t c = 0; c < jac.cols(); ++c) {
                        row_norm += jac(r, c) * jac(r, c);
                    }
                    if (row_norm > boundary_tol * boundary_tol) {
                        throw BoundaryError(
                            "fplf_jacobian_at: preactivation on activation boundary");
                    }
                }
            }
            for (std::size_t r = 0; r < jac.rows(); ++r) {
                if (pre[r] <= 0.0) {
                    for (std::size_t c = 0; c < jac.cols(); ++c) {
                        jac(r, c) = 0.0;
                    }
                }
            }
            detail::relu_inplace(pre);
        }
        z = std::move(pre);
    }
    return jac;
}

/// h2 ∘ h1 as one spec; h1's final affine layer is folded into h2's first
/// layer.
inline FplfSpec compose_fplf(const FplfSpec& h2, const FplfSpec& h1) {
    validate_shapes(h1);
    validate_shapes(h2);
    if (h2.input_dim() != h1.output_dim()) {
        throw DimensionError("compose_fplf: inner dimensions differ");
    }
    FplfSpec out;
    out.layers.assign(h1.layers.begin(), h1.layers.end() - 1);
    const FplfLayer& last1 = h1.layers.back();
    const FplfLayer& first2 = h2.layers.front();
    FplfLayer merged;
    merged.w = matmul(first2.w, last1.w);
    merged.b = matvec(first2.w, last1.b);
    detail::add_inplace(merged.b, first2.b);
    out.layers.push_back(std::move(merged));
    out.layers.insert(out.layers.end(), h2.layers.begin() + 1, h2.layers.end());
    return out;
}

/// Bounded evaluation region with a fixed set of interior samples.
struct DomainBox {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<std::vector<double>> sample_points;
    std::uint64_t seed = 0;

    std::size_t dim() const { return lower.size(); }

    /// Latin-hypercube sampled box.
    static DomainBox sampled(std::vector<double> lower, std::vector<double> upper,
                             std::size_t count, std::uint64_t seed) {
        DomainBox box;
        box.lower = std::move(lower);
        box.upper = std::move(upper);
        box.seed = seed;
        box.sample_points = latin_hypercube(box.lower, box.upper, count, seed);
        box.validate();
        return box;
    }

    void validate() const {
        if (lower.size() != upper.size() || lower.empty()) {
            throw DimensionError("DomainBox: bound dimensions differ");
        }
        for (std::size_t d = 0; d < lower.size(); ++d) {
            if (!(lower[d] < upper[d])) {
                throw std::invalid_argument("DomainBox: lower must be below upper");
            }
        }
        for (const auto& pt : sample_points) {
            if (pt.size() != lower.size()) {
                throw DimensionError("DomainBox: sample dimension mismatch");
            }
            for (std::size_t d = 0; d < pt.size(); ++d) {
                if (pt[d] < lower[d] || pt[d] > upper[d]) {
                    throw std::invalid_argument("DomainBox: sample outside the box");
                }
            }
        }
    }

    std::vector<double> random_point(Rng& rng) const {
        std::vector<double> pt(dim());
        for (std::size_t d = 0; d < dim(); ++d) {
            pt[d] = rng.uniform(lower[d], upper[d]);
        }
        return pt;
    }
};

struct JacobianRankReport {
    std::size_t rank = 0;
    std::size_t boundary_rejected = 0;
    std::size_t valid_samples = 0;
};

namespace detail {

template <class JacobianFn>
JacobianRankReport jacobian_rank_impl(const DomainBox& domain, double tol, JacobianFn&& jac_at) {
    if (domain.sample_points.empty()) {
        throw std::invalid_argument("jacobian_rank: needs at least one sample");
    }
    JacobianRankReport report;
    for (const auto& pt : domain.sample_points) {
        try {
            const Matrix j = jac_at(pt);
            report.rank = std::max(report.rank, numeric_rank(j, tol));
            ++report.valid_samples;
        } catch (const BoundaryError&) {
            ++report.boundary_rejected;
        }
    }
    if (report.valid_samples == 0) {
        throw DegenerateError("jacobian_rank: every sample hit an activation boundary");
    }
    return report;
}

}  // namespace detail

/// Max over valid samples of the numeric rank of the Jacobian.
inline JacobianRankReport jacobian_rank(const NonlinResNetParams& p, const DomainBox& domain,
                                        double tol = 1e-9) {
    return detail::jacobian_rank_impl(
        domain, tol, [&](const std::vector<double>& pt) { return jacobian_at(p, pt); });
}

inline JacobianRankReport jacobian_rank(const FplfSpec& f, const DomainBox& domain,
                                        double tol = 1e-9) {
    return detail::jacobian_rank_impl(
        domain, tol, [&](const std::vector<double>& pt) { return fplf_jacobian_at(f, pt); });
}

/// Construction recipe for a low-cost network computing h2 ∘ h1 through a
/// k-dimensional bottleneck. h1's range is nonnegative on the domain (enforced
/// by a bias shift at plan time); h2's first layer is compensated.
struct BottleneckPlan {
    FplfSpec h1;  // into R^k, outputs nonnegative on the domain
    FplfSpec h2;  // from R^k
    std::size_t k = 0;
    double alpha = 1.0;  // embedding carries x/α
    double beta = 1.0;   // values enter the h2 stage at scale β = τ/α
    double tau = 1.0;    // middle-stage multiplier, ≥ 1
    std::size_t m = 1;   // depth-1 replication count
    std::size_t l1 = 0;  // simulated h1 layers (0 = absorbed into the embedding)
    std::size_t l_int = 0;
    std::size_t l2 = 0;  // simulated h2 layers (final affine layer absorbed into W_u)
};

/// Shift h1's range into the nonnegative orthant (margin 1e-6, measured on the
/// domain samples), pick α = β = 1/√λ, τ = 1/λ, and split the layer budget.
/// For depth-1 blocks m defaults to ⌊L/log(1/λ)⌋, capped so at least one
/// middle layer remains.
inline BottleneckPlan make_bottleneck_plan(FplfSpec h1, FplfSpec h2, const DomainBox& domain,
                                           std::size_t depth, double lambda, int block_depth,
                                           std::size_t replication = 0) {
    validate_shapes(h1);
    validate_shapes(h2);
    domain.validate();
    if (h1.output_dim() != h2.input_dim()) {
        throw DimensionError("make_bottleneck_plan: h1 output and h2 input dims differ");
    }
    if (h1.input_dim() != domain.dim()) {
        throw DimensionError("make_bottleneck_plan: h1 input dim differs from domain");
    }
    if (!(lambda > 0.0) || lambda > 1.0) {
        throw std::domain_error("make_bottleneck_plan: lambda must lie in (0, 1]");
    }
    if (domain.sample_points.empty()) {
        throw std::invalid_argument("make_bottleneck_plan: domain needs samples");
    }

    BottleneckPlan plan;
    plan.k = h1.output_dim();

    // nonnegativity shift, only where the sampled range dips below the margin
    std::vector<double> mins(plan.k, std::numeric_limits<double>::infinity());
    for (const auto& pt : domain.sample_points) {
        const std::vector<double> y = eval_fplf(h1, pt);
        for (std::size_t j = 0; j < plan.k; ++j) {
            mins[j] = std::min(mins[j], y[j]);
        }
    }
    std::vector<double> shift(plan.k, 0.0);
    for (std::size_t j = 0; j < plan.k; ++j) {
        shift[j] = std::max(0.0, 1e-6 - mins[j]);
    }
    detail::add_inplace(h1.layers.back().b, shift);
    {
        std::vector<double> comp = matvec(h2.layers.front().w, shift);
        for (std::size_t i = 0; i < comp.size(); ++i) {
            h2.layers.front().b[i] -= comp[i];
        }
    }

    plan.alpha = 1.0 / std::sqrt(lambda);
    plan.beta = 1.0 / std::sqrt(lambda);
    plan.tau = 1.0 / lambda;
    plan.l1 = h1.layers.size() == 1 ? 0 : h1.layers.size();
    plan.l2 = h2.layers.size() - 1;
    plan.h1 = std::move(h1);
    plan.h2 = std::move(h2);

    const std::size_t sim_layers = plan.l1 + plan.l2;
    if (block_depth == 2) {
        plan.m = 1;
        if (depth < sim_layers + 1) {
            throw BudgetError("make_bottleneck_plan: depth too small for the simulation layers");
        }
        plan.l_int = depth - sim_layers;
    } else {
        std::size_t m = replication;
        if (m == 0) {
            const double log_inv = std::log(1.0 / lambda);
            m = log_inv >= 1.0 ? static_cast<std::size_t>(std::floor(static_cast<double>(depth) / log_inv))
                               : depth;
        }
        if (sim_layers > 0) {
            const std::size_t m_max = (depth - 1) / sim_layers;
            if (m_max == 0) {
                throw BudgetError("make_bottleneck_plan: depth too small for one simulation copy");
            }
            m = std::min(std::max<std::size_t>(1, m), m_max);
        } else {
            m = 1;  // nothing to replicate
        }
        plan.m = m;
        plan.l_int = depth - plan.m * sim_layers;
    }
    return plan;
}

namespace detail {

struct Bank {
    std::size_t offset = 0;
    std::size_t width = 0;
};

struct BottleneckLayout {
    std::vector<Bank> h1_banks;  // S_0..S_{l1}; single bank (= T) when l1 == 0
    std::vector<Bank> h2_banks;  // S'_1..S'_{l2}
    Bank t;                      // h1-stage output bank, width k
    std::size_t required_width = 0;
};

inline BottleneckLayout bottleneck_layout(const BottleneckPlan& plan) {
    BottleneckLayout lay;
    std::size_t cursor = 0;
    auto push = [&](std::vector<Bank>& banks, std::size_t width) {
        banks.push_back({cursor, width});
        cursor += width;
    };
    if (plan.l1 == 0) {
        push(lay.h1_banks, plan.k);
    } else {
        push(lay.h1_banks, plan.h1.input_dim());
        for (std::size_t i = 0; i < plan.l1; ++i) {
            push(lay.h1_banks, plan.h1.layers[i].w.rows());
        }
    }
    lay.t = lay.h1_banks.back();
    if (lay.t.width != plan.k) {
        throw DimensionError("bottleneck_layout: h1 output bank width must equal k");
    }
    for (std::size_t j = 0; j < plan.l2; ++j) {
        push(lay.h2_banks, plan.h2.layers[j].w.rows());
    }
    lay.required_width = cursor;
    return lay;
}

}  // namespace detail

/// Width the bank layout needs for the given plan.
inline std::size_t bottleneck_min_width(const BottleneckPlan& plan) {
    return detail::bottleneck_layout(plan).required_width;
}

/// Depth-2 construction: each simulated layer occupies one residual block
/// writing its σ-output into a fresh coordinate bank; l_int blocks scale the
/// bottleneck coordinates by τ^{1/l_int} with zero biases; the embedding and
/// unembedding carry 1/α and α/τ. Values ride at scale 1/α through the h1
/// stage and τ/α through the h2 stage, so all simulation weight norms are
/// independent of α, τ, λ (ReLU homogeneity; only biases rescale).
inline NonlinResNetParams build_bottleneck_depth2(const BottleneckPlan& plan, std::size_t depth,
                                                  std::size_t width, double lambda) {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("build_bottleneck_depth2: lambda must be positive");
    }
    const detail::BottleneckLayout lay = detail::bottleneck_layout(plan);
    if (width < lay.required_width) {
        throw WidthError("build_bottleneck_depth2: width " + std::to_string(width) +
                         " below required " + std::to_string(lay.required_width));
    }
    if (depth < plan.l1 + plan.l2 + 1) {
        throw BudgetError("build_bottleneck_depth2: depth cannot host the simulation layers");
    }
    const std::size_t l_int = depth - plan.l1 - plan.l2;
    const double s1 = 1.0 / plan.alpha;
    const double s2 = s1 * plan.tau;
    const std::size_t n = width;

    NonlinResNetParams net;
    net.block_depth = 2;

    // embedding
    net.w_e = Matrix(n, plan.h1.input_dim());
    net.b_e.assign(n, 0.0);
    if (plan.l1 == 0) {
        const FplfLayer& only = plan.h1.layers.front();
        for (std::size_t r = 0; r < plan.k; ++r) {
            for (std::size_t c = 0; c < only.w.cols(); ++c) {
                net.w_e(lay.t.offset + r, c) = s1 * only.w(r, c);
            }
            net.b_e[lay.t.offset + r] = s1 * only.b[r];
        }
    } else {
        for (std::size_t i = 0; i < plan.h1.input_dim(); ++i) {
            net.w_e(lay.h1_banks[0].offset + i, i) = s1;
        }
    }

    auto sim_block = [&](const FplfLayer& layer, const detail::Bank& in, const detail::Bank& out,
                         double bias_scale) {
        NonlinDepth2Block blk;
        blk.w1 = Matrix(n, n);
        blk.b1.assign(n, 0.0);
        blk.w2 = Matrix(n, n);
        blk.b2.assign(n, 0.0);
        for (std::size_t h = 0; h < out.width; ++h) {
            for (std::size_t c = 0; c < in.width; ++c) {
                blk.w1(h, in.offset + c) = layer.w(h, c);
            }
            blk.b1[h] = bias_scale * layer.b[h];
            blk.w2(out.offset + h, h) = 1.0;
        }
        return blk;
    };

    for (std::size_t i = 0; i < plan.l1; ++i) {
        net.blocks.push_back(sim_block(plan.h1.layers[i], lay.h1_banks[i], lay.h1_banks[i + 1], s1));
    }
    const double mid = std::sqrt(std::exp(std::log(plan.tau) / static_cast<double>(l_int)) - 1.0);
    for (std::size_t i = 0; i < l_int; ++i) {
        NonlinDepth2Block blk;
        blk.w1 = Matrix(n, n);
        blk.b1.assign(n, 0.0);
        blk.w2 = Matrix(n, n);
        blk.b2.assign(n, 0.0);
        for (std::size_t h = 0; h < plan.k; ++h) {
            blk.w1(h, lay.t.offset + h) = mid;
            blk.w2(lay.t.offset + h, h) = mid;
        }
        net.blocks.push_back(std::move(blk));
    }
    detail::Bank prev = lay.t;
    for (std::size_t j = 0; j < plan.l2; ++j) {
        net.blocks.push_back(sim_block(plan.h2.layers[j], prev, lay.h2_banks[j], s2));
        prev = lay.h2_banks[j];
    }

    // unembedding absorbs h2's final affine layer
    const FplfLayer& last = plan.h2.layers.back();
    net.w_u = Matrix(last.w.rows(), n);
    net.b_u = last.b;
    for (std::size_t r = 0; r < last.w.rows(); ++r) {
        for (std::size_t c = 0; c < last.w.cols(); ++c) {
            net.w_u(r, prev.offset + c) = last.w(r, c) / s2;
        }
    }
    return net;
}

/// Depth-1 construction (disjoint coordinate banks): since σ-outputs cannot be
/// erased, each simulated layer writes into a fresh bank and stale banks are
/// simply never read again. Every simulated layer is replicated m times with
/// weights V/m and biases (scale·a)/m, which composes additively to one full
/// layer by ReLU homogeneity; this spreads the depth-weighted λL Σ‖W‖² cost.
inline NonlinResNetParams build_bottleneck_depth1(const BottleneckPlan& plan, std::size_t depth,
                                                  std::size_t width, double lambda) {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("build_bottleneck_depth1: lambda must be positive");
    }
    const detail::BottleneckLayout lay = detail::bottleneck_layout(plan);
    if (width < lay.required_width) {
        throw WidthError("build_bottleneck_depth1: width " + std::to_string(width) +
                         " below required " + std::to_string(lay.required_width));
    }
    const std::size_t m = std::max<std::size_t>(1, plan.m);
    if (depth < m * (plan.l1 + plan.l2) + 1) {
        throw BudgetError("build_bottleneck_depth1: depth cannot host m simulation copies");
    }
    const std::size_t l_int = depth - m * (plan.l1 + plan.l2);
    const double s1 = 1.0 / plan.alpha;
    const double s2 = s1 * plan.tau;
    const std::size_t n = width;
    const double md = static_cast<double>(m);

    NonlinResNetParams net;
    net.block_depth = 1;

    net.w_e = Matrix(n, plan.h1.input_dim());
    net.b_e.assign(n, 0.0);
    if (plan.l1 == 0) {
        const FplfLayer& only = plan.h1.layers.front();
        for (std::size_t r = 0; r < plan.k; ++r) {
            for (std::size_t c = 0; c < only.w.cols(); ++c) {
                net.w_e(lay.t.offset + r, c) = s1 * only.w(r, c);
            }
            net.b_e[lay.t.offset + r] = s1 * only.b[r];
        }
    } else {
        for (std::size_t i = 0; i < plan.h1.input_dim(); ++i) {
            net.w_e(lay.h1_banks[0].offset + i, i) = s1;
        }
    }

    auto sim_block = [&](const FplfLayer& layer, const detail::Bank& in, const detail::Bank& out,
                         double bias_scale) {
        NonlinDepth1Block blk;
        blk.w = Matrix(n, n);
        blk.b.assign(n, 0.0);
        for (std::size_t h = 0; h < out.width; ++h) {
            for (std::size_t c = 0; c < in.width; ++c) {
                blk.w(out.offset + h, in.offset + c) = layer.w(h, c) / md;
            }
            blk.b[out.offset + h] = bias_scale * layer.b[h] / md;
        }
        return blk;
    };

    for (std::size_t i = 0; i < plan.l1; ++i) {
        for (std::size_t copy = 0; copy < m; ++copy) {
            net.blocks.push_back(sim_block(plan.h1.layers[i], lay.h1_banks[i], lay.h1_banks[i + 1], s1));
        }
    }
    const double mid = std::exp(std::log(plan.tau) / static_cast<double>(l_int)) - 1.0;
    for (std::size_t i = 0; i < l_int; ++i) {
        NonlinDepth1Block blk;
        blk.w = Matrix(n, n);
        blk.b.assign(n, 0.0);
        for (std::size_t h = 0; h < plan.k; ++h) {
            blk.w(lay.t.offset + h, lay.t.offset + h) = mid;
        }
        net.blocks.push_back(std::move(blk));
    }
    detail::Bank prev = lay.t;
    for (std::size_t j = 0; j < plan.l2; ++j) {
        for (std::size_t copy = 0; copy < m; ++copy) {
            net.blocks.push_back(sim_block(plan.h2.layers[j], prev, lay.h2_banks[j], s2));
        }
        prev = lay.h2_banks[j];
    }

    const FplfLayer& last = plan.h2.layers.back();
    net.w_u = Matrix(last.w.rows(), n);
    net.b_u = last.b;
    for (std::size_t r = 0; r < last.w.rows(); ++r) {
        for (std::size_t c = 0; c < last.w.cols(); ++c) {
            net.w_u(r, prev.offset + c) = last.w(r, c) / s2;
        }
    }
    return net;
}

struct RepresentationReport {
    double max_deviation = 0.0;
    std::size_t samples = 0;
    bool pass = false;
};

/// Max absolute deviation between the network and the target over the domain
/// samples; pass iff ≤ tol. Requires at least 100 samples.
inline RepresentationReport verify_representation(
    const NonlinResNetParams& p,
    const std::function<std::vector<double>(std::span<const double>)>& target,
    const DomainBox& domain, double tol) {
    if (domain.sample_points.size() < 100) {
        throw std::invalid_argument("verify_representation: needs at least 100 samples");
    }
    RepresentationReport report;
    for (const auto& pt : domain.sample_points) {
        const std::vector<double> got = forward_nonlin(p, pt);
        const std::vector<double> want = target(pt);
        if (got.size() != want.size()) {
            throw DimensionError("verify_representation: output dims differ");
        }
        for (std::size_t i = 0; i < got.size(); ++i) {
            report.max_deviation = std::max(report.max_deviation, std::abs(got[i] - want[i]));
        }
        ++report.samples;
    }
    report.pass = report.max_deviation <= tol;
    return report;
}

inline RepresentationReport verify_representation(const NonlinResNetParams& p,
                                                  const BottleneckPlan& plan,
                                                  const DomainBox& domain, double tol) {
    return verify_representation(
        p,
        [&](std::span<const double> x) { return eval_fplf(plan.h2, eval_fplf(plan.h1, x)); },
        domain, tol);
}

struct LowerBoundCheck {
    double max_linear_cost = 0.0;
    double penalty = 0.0;
    bool holds = false;
    std::size_t samples_used = 0;
};

/// The nonlinear cost dominates the linear cost of every Jacobian: checks
/// penalty_nonlin ≥ max over samples of matrix_cost(Jg(x)) − 1e-8·(1+penalty).
/// Boundary samples are replaced by fresh draws up to a retry budget.
inline LowerBoundCheck jacobian_lower_bound_check(const NonlinResNetParams& p, double lambda,
                                                  const DomainBox& domain,
                                                  std::size_t retry_budget = 64) {
    validate_shapes(p);
    if (p.depth() == 0) {
        throw std::invalid_argument("jacobian_lower_bound_check: needs at least one block");
    }
    CostParams cp;
    cp.lambda = lambda;
    cp.depth = p.depth();
    cp.block_depth = p.block_depth;
    cp.width = p.width();

    LowerBoundCheck out;
    Rng retry_rng(derive_seed(domain.seed, 0x9e37));
    std::size_t retries = 0;
    for (const auto& pt : domain.sample_points) {
        std::vector<double> point = pt;
        for (;;) {
            try {
                const Matrix jac = jacobian_at(p, point);
                out.max_linear_cost = std::max(out.max_linear_cost, matrix_cost(jac, cp).total);
                ++out.samples_used;
                break;
            } catch (const BoundaryError&) {
                if (++retries > retry_budget) {
                    break;
                }
                point = domain.random_point(retry_rng);
            }
        }
    }
    if (out.samples_used == 0) {
        throw DegenerateError("jacobian_lower_bound_check: no valid Jacobian sample");
    }
    out.penalty = penalty_nonlin(p, lambda);
    out.holds = out.penalty >= out.max_linear_cost - 1e-8 * (1.0 + out.penalty);
    return out;
}

}  // namespace rescost
