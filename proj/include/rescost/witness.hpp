#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rescost/matrix.hpp"
#include "rescost/spectral_cost.hpp"
#include "rescost/svd.hpp"

namespace rescost {

struct Depth1Block {
    Matrix w;  // n × n
};

struct Depth2Block {
    Matrix w1;  // n × n
    Matrix w2;  // n × n
};

using ResidualBlock = std::variant<Depth1Block, Depth2Block>;

/// Linear residual network W_u (I+B_1)(I+B_2)···(I+B_L) W_e, where a depth-1
/// block contributes B = W and a depth-2 block contributes B = W2·W1.
/// blocks[0] is the leftmost factor of the product.
struct LinearResNetParams {
    int block_depth = 1;
    Matrix w_u;  // d_out × n
    Matrix w_e;  // n × d_in
    std::vector<ResidualBlock> blocks;

    std::size_t depth() const { return blocks.size(); }
    std::size_t width() const { return w_e.rows(); }
    std::size_t out_dim() const { return w_u.rows(); }
    std::size_t in_dim() const { return w_e.cols(); }
};

inline int block_depth_of(const ResidualBlock& b) { return b.index() == 0 ? 1 : 2; }

inline void validate_shapes(const LinearResNetParams& p) {
    const std::size_t n = p.width();
    if (p.w_u.cols() != n) {
        throw DimensionError("LinearResNetParams: w_u columns must match width");
    }
    if (p.block_depth != 1 && p.block_depth != 2) {
        throw std::invalid_argument("LinearResNetParams: block_depth must be 1 or 2");
    }
    for (const ResidualBlock& b : p.blocks) {
        if (block_depth_of(b) != p.block_depth) {
            throw std::invalid_argument("LinearResNetParams: mixed block variants");
        }
        std::visit(
            [&](const auto& blk) {
                using T = std::decay_t<decltype(blk)>;
                if constexpr (std::is_same_v<T, Depth1Block>) {
                    if (blk.w.rows() != n || blk.w.cols() != n) {
                        throw DimensionError("LinearResNetParams: block shape mismatch");
                    }
                } else {
                    if (blk.w1.rows() != n || blk.w1.cols() != n || blk.w2.rows() != n ||
                        blk.w2.cols() != n) {
                        throw DimensionError("LinearResNetParams: block shape mismatch");
                    }
                }
            },
            b);
    }
}

/// I + W (depth-1) or I + W2·W1 (depth-2).
inline Matrix residual_map(const ResidualBlock& b) {
    return std::visit(
        [](const auto& blk) {
            using T = std::decay_t<decltype(blk)>;
            if constexpr (std::is_same_v<T, Depth1Block>) {
                return Matrix::identity(blk.w.rows()) + blk.w;
            } else {
                return Matrix::identity(blk.w1.rows()) + matmul(blk.w2, blk.w1);
            }
        },
        b);
}

inline Matrix forward_linear(const LinearResNetParams& p) {
    validate_shapes(p);
    Matrix acc = p.w_u;
    for (const ResidualBlock& b : p.blocks) {
        acc = matmul(acc, residual_map(b));
    }
    return matmul(acc, p.w_e);
}

/// Weight penalty:
///   depth-1:  ½‖W_u‖² + ½‖W_e‖² + λL Σ_i ‖W_i‖²
///   depth-2:  ½‖W_u‖² + ½‖W_e‖² + (λ/2) Σ_{i,j} ‖W_{i,j}‖²
inline double penalty(const LinearResNetParams& p, double lambda) {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("penalty: lambda must be positive");
    }
    double total = 0.5 * (frobenius_sq(p.w_u) + frobenius_sq(p.w_e));
    if (p.block_depth == 1) {
        double blocks = 0.0;
        for (const ResidualBlock& b : p.blocks) {
            blocks += frobenius_sq(std::get<Depth1Block>(b).w);
        }
        total += lambda * static_cast<double>(p.depth()) * blocks;
    } else {
        double blocks = 0.0;
        for (const ResidualBlock& b : p.blocks) {
            const auto& blk = std::get<Depth2Block>(b);
            blocks += frobenius_sq(blk.w1) + frobenius_sq(blk.w2);
        }
        total += 0.5 * lambda * blocks;
    }
    return total;
}

/// Partial products V_ℓ = (I+B_1)···(I+B_ℓ), ℓ = 0..L, with V_0 = I.
inline std::vector<Matrix> partial_products(const LinearResNetParams& p) {
    validate_shapes(p);
    std::vector<Matrix> v;
    v.reserve(p.depth() + 1);
    v.push_back(Matrix::identity(p.width()));
    for (const ResidualBlock& b : p.blocks) {
        v.push_back(matmul(v.back(), residual_map(b)));
    }
    return v;
}

/// Explicit minimum-cost parameters for a target map, plus the quantities a
/// caller wants to check: the realized product and both cost evaluations.
struct WitnessReport {
    LinearResNetParams params;
    Matrix realized;
    double penalty_value = 0.0;
    double formula_cost = 0.0;
};

/// Builds weights achieving the formula cost of A. Embeddings carry the SVD
/// factors scaled by √(σ_i/(1+α_i/L)^L) (depth-1) resp. √(σ_i/(1+α_i)^L)
/// (depth-2); residual blocks carry diag(α_i/L) resp. the balanced pair
/// W1 = W2 = diag(√α_i) on the top-left corner, zero elsewhere. Directions
/// beyond the spectrum are exactly zero.
inline WitnessReport build_min_cost(const Matrix& a, const CostParams& p) {
    validate(p);
    if (p.infinite_depth()) {
        throw std::invalid_argument("build_min_cost: finite depth required");
    }
    require_finite(a, "build_min_cost");
    const SvdResult dec = svd(a);
    const std::size_t rank = dec.s.numeric_rank();
    if (p.width < rank) {
        throw WidthError("build_min_cost: width " + std::to_string(p.width) +
                         " below numeric rank " + std::to_string(rank));
    }
    const std::size_t n = p.width;
    const std::size_t d_out = a.rows();
    const std::size_t d_in = a.cols();
    const std::size_t k_active = std::min(n, dec.s.values.size());
    const double l = static_cast<double>(p.depth);

    // per-direction block scale and embedding scale
    std::vector<double> block_diag(k_active, 0.0);   // depth-1: α/L, depth-2: √α
    std::vector<double> embed_scale(k_active, 0.0);  // √(σ/(1+α/L)^L) resp. √(σ/(1+α)^L)
    double formula_cost = 0.0;
    for (std::size_t i = 0; i < dec.s.values.size(); ++i) {
        const double sigma = dec.s.values[i];
        const ScalarCostResult sc = p.block_depth == 1
                                        ? scalar_cost_depth1(sigma, p.depth, p.lambda)
                                        : scalar_cost_depth2(sigma, p.depth, p.lambda);
        formula_cost += sc.cost;
        if (i >= k_active || sigma == 0.0) {
            continue;
        }
        if (p.block_depth == 1) {
            block_diag[i] = sc.alpha_star / l;
            embed_scale[i] = std::sqrt(sigma * std::exp(-l * std::log1p(sc.alpha_star / l)));
        } else {
            block_diag[i] = std::sqrt(sc.alpha_star);
            embed_scale[i] = std::sqrt(sigma * std::exp(-l * std::log1p(sc.alpha_star)));
        }
    }

    LinearResNetParams params;
    params.block_depth = p.block_depth;
    params.w_u = Matrix(d_out, n);
    params.w_e = Matrix(n, d_in);
    for (std::size_t j = 0; j < k_active; ++j) {
        for (std::size_t i = 0; i < d_out; ++i) {
            params.w_u(i, j) = dec.u(i, j) * embed_scale[j];
        }
        for (std::size_t i = 0; i < d_in; ++i) {
            params.w_e(j, i) = embed_scale[j] * dec.vt(j, i);
        }
    }
    Matrix block_mat(n, n);
    if (p.block_depth == 1) {
        for (std::size_t j = 0; j < k_active; ++j) {
            block_mat(j, j) = block_diag[j];
        }
        params.blocks.assign(p.depth, Depth1Block{block_mat});
    } else {
        for (std::size_t j = 0; j < k_active; ++j) {
            block_mat(j, j) = block_diag[j];
        }
        params.blocks.assign(p.depth, Depth2Block{block_mat, block_mat});
    }

    WitnessReport report;
    report.realized = forward_linear(params);
    report.penalty_value = penalty(params, p.lambda);
    report.formula_cost = formula_cost;
    report.params = std::move(params);
    return report;
}

}  // namespace rescost
