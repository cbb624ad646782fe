#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "rescost/matrix.hpp"

namespace rescost {

namespace detail {

// splitmix64 (Vigna); used for seeding and seed derivation
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace detail

/// Derive an independent stream seed from (seed, index); used to keep
/// per-case randomness stable under reordering and parallel evaluation.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x632be59bd9b4e019ULL * (index + 1));
    return detail::splitmix64(s);
}

/// xoshiro256** (Blackman/Vigna reference constants), seeded via splitmix64.
/// Deterministic per seed; not cryptographic.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            word = detail::splitmix64(sm);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl64(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::size_t uniform_index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

    /// Standard normal via Box-Muller (pairs cached).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) {
            u1 = uniform01();
        }
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::uint64_t state_[4] = {};
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline Matrix random_gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (double& v : m.entries()) {
        v = rng.gaussian();
    }
    return m;
}

inline Matrix random_gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    return random_gaussian(rows, cols, rng);
}

/// Random orthogonal matrix: QR of a Gaussian matrix by modified Gram-Schmidt
/// with one reorthogonalization pass. QᵀQ = I to ~1e-15 at desk sizes.
inline Matrix random_orthogonal(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Matrix q = random_gaussian(n, n, rng);
    for (std::size_t j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t prev = 0; prev < j; ++prev) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    dot += q(i, prev) * q(i, j);
                }
                for (std::size_t i = 0; i < n; ++i) {
                    q(i, j) -= dot * q(i, prev);
                }
            }
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            norm += q(i, j) * q(i, j);
        }
        norm = std::sqrt(norm);
        if (norm < 1e-150) {
            // Gaussian column collapsed onto the span of the previous ones
            // (probability zero); restart the column from a basis vector.
            for (std::size_t i = 0; i < n; ++i) {
                q(i, j) = (i == j % n) ? 1.0 : 0.0;
            }
            --j;
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            q(i, j) /= norm;
        }
    }
    return q;
}

/// rows×cols matrix with prescribed rank: Q_left · diag(σ) · Q_rightᵀ with
/// `rank` singular values drawn uniformly from [smin, smax], sorted descending.
inline Matrix random_rank_matrix(std::size_t rows, std::size_t cols, std::size_t rank, double smin,
                                 double smax, std::uint64_t seed) {
    rank = std::min(rank, std::min(rows, cols));
    Rng rng(derive_seed(seed, 2));
    std::vector<double> sigma(rank);
    for (double& s : sigma) {
        s = rng.uniform(smin, smax);
    }
    std::sort(sigma.rbegin(), sigma.rend());
    Matrix ql = random_orthogonal(rows, derive_seed(seed, 0));
    Matrix qr = random_orthogonal(cols, derive_seed(seed, 1));
    Matrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < rank; ++r) {
                s += ql(i, r) * sigma[r] * qr(j, r);
            }
            a(i, j) = s;
        }
    }
    return a;
}

/// Latin-hypercube samples over a box: per coordinate, one sample in each of
/// `count` strata, strata assignment permuted independently per coordinate.
inline std::vector<std::vector<double>> latin_hypercube(const std::vector<double>& lower,
                                                        const std::vector<double>& upper,
                                                        std::size_t count, std::uint64_t seed) {
    const std::size_t dim = lower.size();
    if (upper.size() != dim) {
        throw DimensionError("latin_hypercube: bound dimensions differ");
    }
    Rng rng(seed);
    std::vector<std::vector<double>> points(count, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> perm(count);
    for (std::size_t d = 0; d < dim; ++d) {
        for (std::size_t i = 0; i < count; ++i) {
            perm[i] = i;
        }
        for (std::size_t i = count; i > 1; --i) {
            std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
        }
        const double stride = (upper[d] - lower[d]) / static_cast<double>(count);
        for (std::size_t i = 0; i < count; ++i) {
            points[i][d] = lower[d] + (static_cast<double>(perm[i]) + rng.uniform01()) * stride;
        }
    }
    return points;
}

}  // namespace rescost
