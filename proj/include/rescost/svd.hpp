#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rescost/matrix.hpp"

namespace rescost {

/// Ordered nonnegative singular values plus the relative tolerance used to
/// count the numeric rank.
struct SingularSpectrum {
    std::vector<double> values;     // non-increasing
    double rank_tolerance = 1e-9;   // relative to the largest value

    double sigma_max() const { return values.empty() ? 0.0 : values.front(); }

    std::size_t numeric_rank() const {
        const double cutoff = rank_tolerance * sigma_max();
        std::size_t r = 0;
        for (double v : values) {
            if (v > cutoff && v > 0.0) {
                ++r;
            }
        }
        return r;
    }

    /// σ_i with the convention σ_i = 0 beyond min(rows, cols).
    double at(std::size_t i) const { return i < values.size() ? values[i] : 0.0; }
};

struct SvdResult {
    Matrix u;            // rows × k, orthonormal columns
    SingularSpectrum s;  // k values, non-increasing
    Matrix vt;           // k × cols, orthonormal rows
};

struct SvdOptions {
    double rotation_tolerance = 1e-14;  // relative off-diagonal threshold
    int max_sweeps = 100;
    double rank_tolerance = 1e-9;
};

namespace detail {

// One-sided Jacobi on a tall (m >= n) matrix: rotates column pairs of B until
// all columns are mutually orthogonal, accumulating the rotations into V.
// Then B = U * diag(s) with s the column norms.
inline void jacobi_orthogonalize(Matrix& b, Matrix& v, const SvdOptions& opt) {
    const std::size_t m = b.rows();
    const std::size_t n = b.cols();
    bool converged = false;
    for (int sweep = 0; sweep < opt.max_sweeps && !converged; ++sweep) {
        converged = true;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    app += b(i, p) * b(i, p);
                    aqq += b(i, q) * b(i, q);
                    apq += b(i, p) * b(i, q);
                }
                if (std::abs(apq) <= opt.rotation_tolerance * std::sqrt(app * aqq)) {
                    continue;
                }
                const double zeta = (aqq - app) / (2.0 * apq);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                // a rotation at the rounding floor cannot reduce the residual
                // any further; when column norms are far apart the cosine test
                // alone stalls there
                if (std::abs(t) <= 1e-15) {
                    continue;
                }
                converged = false;
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double bp = b(i, p), bq = b(i, q);
                    b(i, p) = c * bp - s * bq;
                    b(i, q) = s * bp + c * bq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
    }
    if (!converged) {
        throw ConvergenceError("svd: Jacobi sweeps did not converge within the iteration budget");
    }
}

// Fill zero-σ columns of U with an orthonormal completion (Gram-Schmidt
// against the already-present columns, seeded from canonical basis vectors).
inline void complete_orthonormal_columns(Matrix& u, const std::vector<bool>& needs_fill) {
    const std::size_t m = u.rows();
    const std::size_t k = u.cols();
    std::size_t candidate = 0;
    for (std::size_t j = 0; j < k; ++j) {
        if (!needs_fill[j]) {
            continue;
        }
        while (candidate < m) {
            std::vector<double> col(m, 0.0);
            col[candidate] = 1.0;
            ++candidate;
            // project out every other column; not-yet-filled columns are
            // still zero so they contribute nothing
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t prev = 0; prev < k; ++prev) {
                    if (prev == j) {
                        continue;
                    }
                    double dot = 0.0;
                    for (std::size_t i = 0; i < m; ++i) {
                        dot += u(i, prev) * col[i];
                    }
                    for (std::size_t i = 0; i < m; ++i) {
                        col[i] -= dot * u(i, prev);
                    }
                }
            }
            double norm = 0.0;
            for (double v : col) {
                norm += v * v;
            }
            norm = std::sqrt(norm);
            if (norm > 0.5) {
                for (std::size_t i = 0; i < m; ++i) {
                    u(i, j) = col[i] / norm;
                }
                break;
            }
        }
    }
}

inline SvdResult svd_tall(const Matrix& a, const SvdOptions& opt) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    Matrix b = a;
    Matrix v = Matrix::identity(n);
    jacobi_orthogonalize(b, v, opt);

    std::vector<double> sigma(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double norm = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            norm += b(i, j) * b(i, j);
        }
        sigma[j] = std::sqrt(norm);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

    // Columns at the rounding floor of the dominant one carry no usable
    // direction (their Jacobi angles sit below machine noise, so they were
    // never orthogonalized); report them as exact zeros and complete the
    // basis instead. The perturbation is far below the reconstruction
    // tolerance.
    const double junk_floor = 1e-12 * sigma[order[0]];

    SvdResult out;
    out.s.rank_tolerance = opt.rank_tolerance;
    out.s.values.resize(n);
    out.u = Matrix(m, n);
    out.vt = Matrix(n, n);
    std::vector<bool> needs_fill(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        const double s = sigma[src];
        if (s > junk_floor) {
            out.s.values[j] = s;
            for (std::size_t i = 0; i < m; ++i) {
                out.u(i, j) = b(i, src) / s;
            }
        } else {
            out.s.values[j] = 0.0;
            needs_fill[j] = true;
        }
        for (std::size_t i = 0; i < n; ++i) {
            out.vt(j, i) = v(i, src);
        }
    }
    complete_orthonormal_columns(out.u, needs_fill);
    return out;
}

}  // namespace detail

/// Thin SVD A = U diag(S) Vᵀ via one-sided Jacobi rotations. Deterministic for
/// a fixed input; wide inputs are handled by factoring the transpose.
inline SvdResult svd(const Matrix& a, const SvdOptions& opt = {}) {
    require_finite(a, "svd");
    if (a.rows() == 0 || a.cols() == 0) {
        throw DimensionError("svd: empty matrix");
    }
    if (a.rows() >= a.cols()) {
        return detail::svd_tall(a, opt);
    }
    SvdResult t = detail::svd_tall(transpose(a), opt);
    SvdResult out;
    out.u = transpose(t.vt);
    out.s = std::move(t.s);
    out.vt = transpose(t.u);
    return out;
}

inline SingularSpectrum singular_values(const Matrix& a, const SvdOptions& opt = {}) {
    return svd(a, opt).s;
}

/// Count of singular values above tol × σ_max; 0 for the zero matrix.
inline std::size_t numeric_rank(const Matrix& a, double tol = 1e-9) {
    if (tol <= 0.0) {
        throw std::invalid_argument("numeric_rank: tolerance must be positive");
    }
    SvdOptions opt;
    opt.rank_tolerance = tol;
    return singular_values(a, opt).numeric_rank();
}

/// Sum of singular values.
inline double nuclear_norm(const Matrix& a) {
    const SingularSpectrum s = singular_values(a);
    double sum = 0.0;
    for (double v : s.values) {
        sum += v;
    }
    return sum;
}

inline double spectral_norm(const Matrix& a) { return singular_values(a).sigma_max(); }

}  // namespace rescost
