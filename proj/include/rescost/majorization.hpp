#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rescost/matrix.hpp"
#include "rescost/svd.hpp"
#include "rescost/witness.hpp"

namespace rescost {

// Ratios with denominators below this are rejected as degenerate rather than
// silently flushed.
inline constexpr double kDegenerateFloor = 1e-300;

/// Product inequality instance: does Π_j σ_{i_j}(ABC)/σ_{i_j}(B) stay below
/// Π_j σ_j(A)σ_j(C)? Indices are 0-based and strictly increasing; every
/// selected σ(B) must sit above the rank tolerance.
struct GelfandInstance {
    Matrix a;  // n0 × n
    Matrix b;  // n × n
    Matrix c;  // n × n1
    std::vector<std::size_t> indices;
};

struct InequalityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// Convex nondecreasing gauge on [0, ∞) with value 0 at 0. Limited to the four
/// shapes the cost decompositions use.
struct ConvexGauge {
    enum class Kind { square, linear, hinge, hinge_sq };

    Kind kind = Kind::square;
    double scale = 1.0;

    double operator()(double t) const {
        switch (kind) {
            case Kind::square:
                return 0.5 * t * t;
            case Kind::linear:
                return scale * t;
            case Kind::hinge:
                return scale * std::max(t - 1.0, 0.0);
            case Kind::hinge_sq: {
                const double h = std::max(t - 1.0, 0.0);
                return scale * h * h;
            }
        }
        return 0.0;
    }

    static ConvexGauge square() { return {Kind::square, 1.0}; }
    static ConvexGauge linear(double lambda) { return {Kind::linear, lambda}; }
    static ConvexGauge hinge(double s) { return {Kind::hinge, s}; }
    static ConvexGauge hinge_sq(double s) { return {Kind::hinge_sq, s}; }

    const char* name() const {
        switch (kind) {
            case Kind::square:
                return "square";
            case Kind::linear:
                return "linear";
            case Kind::hinge:
                return "hinge";
            case Kind::hinge_sq:
                return "hinge_sq";
        }
        return "?";
    }
};

/// Both sides evaluated in log-space (sums of logs) to avoid under/overflow.
/// holds = lhs ≤ rhs + 1e-8·(1+|rhs|). A zero singular value on the product
/// side sends the LHS to −∞ and the inequality holds trivially.
inline InequalityCheck gelfand_check(const GelfandInstance& inst) {
    const std::size_t n = inst.b.rows();
    if (inst.b.cols() != n || inst.a.cols() != n || inst.c.rows() != n) {
        throw DimensionError("gelfand_check: shapes must be (n0 x n)(n x n)(n x n1)");
    }
    if (inst.indices.empty()) {
        throw std::invalid_argument("gelfand_check: empty index set");
    }
    for (std::size_t j = 0; j < inst.indices.size(); ++j) {
        if (inst.indices[j] >= n || (j > 0 && inst.indices[j] <= inst.indices[j - 1])) {
            throw std::invalid_argument("gelfand_check: indices must be strictly increasing within [0, n)");
        }
    }
    const SingularSpectrum sb = singular_values(inst.b);
    for (std::size_t i : inst.indices) {
        if (!(sb.at(i) > sb.rank_tolerance * sb.sigma_max())) {
            throw DegenerateError("gelfand_check: selected sigma(B) below rank tolerance");
        }
    }
    const SingularSpectrum sa = singular_values(inst.a);
    const SingularSpectrum sc = singular_values(inst.c);
    const SingularSpectrum sabc = singular_values(matmul(matmul(inst.a, inst.b), inst.c));

    InequalityCheck out;
    bool lhs_zero = false;
    bool rhs_zero = false;
    for (std::size_t j = 0; j < inst.indices.size(); ++j) {
        const std::size_t i = inst.indices[j];
        const double num = sabc.at(i);
        if (num < kDegenerateFloor) {
            lhs_zero = true;
        } else {
            out.lhs += std::log(num) - std::log(sb.at(i));
        }
        const double ra = sa.at(j);
        const double rc = sc.at(j);
        if (ra < kDegenerateFloor || rc < kDegenerateFloor) {
            rhs_zero = true;
        } else {
            out.rhs += std::log(ra) + std::log(rc);
        }
    }
    if (lhs_zero) {
        out.lhs = -std::numeric_limits<double>::infinity();
        out.holds = true;
        return out;
    }
    if (rhs_zero) {
        // rank(ABC) would have to vanish first; a finite LHS here is a
        // genuine violation signal
        out.rhs = -std::numeric_limits<double>::infinity();
        out.holds = false;
        return out;
    }
    out.holds = out.lhs <= out.rhs + 1e-8 * (1.0 + std::abs(out.rhs));
    return out;
}

/// Σ_{i ≤ rank(AB)} g(σ_i(A)) ≥ Σ_{i ≤ rank(AB)} g(σ_i(AB)/σ_i(B)), singular
/// values sorted descending. holds = lhs ≥ rhs − 1e-8·(1+|lhs|).
inline InequalityCheck submajorization_check(const Matrix& a, const Matrix& b,
                                             const ConvexGauge& g) {
    if (a.cols() != b.rows()) {
        throw DimensionError("submajorization_check: products must conform");
    }
    const Matrix ab = matmul(a, b);
    const SingularSpectrum sab = singular_values(ab);
    const std::size_t k = sab.numeric_rank();
    const SingularSpectrum sa = singular_values(a);
    const SingularSpectrum sb = singular_values(b);

    InequalityCheck out;
    for (std::size_t i = 0; i < k; ++i) {
        if (sb.at(i) < kDegenerateFloor) {
            throw DegenerateError("submajorization_check: sigma(B) vanished below rank(AB)");
        }
        out.lhs += g(sa.at(i));
        out.rhs += g(sab.at(i) / sb.at(i));
    }
    out.holds = out.lhs >= out.rhs - 1e-8 * (1.0 + std::abs(out.lhs));
    return out;
}

struct ChainBound {
    double bound = 0.0;
    double penalty = 0.0;
};

/// Executable form of the cost lower-bound chain: through the partial products
/// V_ℓ, the penalty of any parameter assignment dominates
///   Σ_j ½(σ_j(A)/σ_j(W_u V_L))² + ½(σ_j(W_u V_L)/σ_j(V_L))²
///       + Σ_i f̃(σ_j(V_i)/σ_j(V_{i−1}))
/// with f̃(t) = λL·max(t−1,0)² for depth-1 blocks and λ·max(t−1,0) for
/// depth-2 blocks, j running over the rank of the realized map. Equality is
/// attained exactly on witness constructions.
inline ChainBound layer_chain_bound(const LinearResNetParams& p, double lambda) {
    const Matrix a = forward_linear(p);
    const SingularSpectrum sa = singular_values(a);
    const std::size_t k = sa.numeric_rank();
    if (k == 0) {
        throw DegenerateError("layer_chain_bound: realized map has rank 0");
    }
    const std::vector<Matrix> v = partial_products(p);
    const std::size_t depth = p.depth();
    const ConvexGauge gauge = p.block_depth == 1
                                  ? ConvexGauge::hinge_sq(lambda * static_cast<double>(depth))
                                  : ConvexGauge::hinge(lambda);

    std::vector<SingularSpectrum> sv;
    sv.reserve(v.size());
    for (const Matrix& m : v) {
        sv.push_back(singular_values(m));
    }
    const SingularSpectrum swuvl = singular_values(matmul(p.w_u, v.back()));

    ChainBound out;
    for (std::size_t j = 0; j < k; ++j) {
        const double wuvl = swuvl.at(j);
        const double vl = sv.back().at(j);
        if (wuvl < kDegenerateFloor || vl < kDegenerateFloor) {
            throw DegenerateError("layer_chain_bound: tracked singular value vanished");
        }
        const double t1 = sa.at(j) / wuvl;
        const double t2 = wuvl / vl;
        out.bound += 0.5 * t1 * t1 + 0.5 * t2 * t2;
        for (std::size_t i = 1; i <= depth; ++i) {
            const double denom = sv[i - 1].at(j);
            if (denom < kDegenerateFloor) {
                throw DegenerateError("layer_chain_bound: partial product singular value vanished");
            }
            out.bound += gauge(sv[i].at(j) / denom);
        }
    }
    out.penalty = penalty(p, lambda);
    return out;
}

}  // namespace rescost
