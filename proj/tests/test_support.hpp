#pragma once

// Shared test utilities: random problem generators and independent reference
// solvers used as oracles. Everything here is deliberately written against
// the mathematical definitions, not the library's solution paths.

#include <algorithm>
#include <cmath>
#include <vector>

#include "fsvm/core.hpp"
#include "fsvm/symmat.hpp"

namespace testsupport {

using fsvm::Matrix;
using fsvm::Rng;
using fsvm::Vector;

inline fsvm::SymmetricMatrix random_symmetric(Rng& rng, int n, double scale = 1.0) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = scale * rng.normal();
    return fsvm::SymmetricMatrix(m);
}

inline fsvm::SpdMatrix random_spd(Rng& rng, int n, double lam_lo = 0.1, double lam_hi = 5.0) {
    fsvm::EigenDecomposition eig = fsvm::sym_eig(random_symmetric(rng, n));
    for (int k = 0; k < n; ++k) eig.values[k] = rng.uniform(lam_lo, lam_hi);
    std::sort(eig.values.begin(), eig.values.end(), std::greater<>());
    return fsvm::SpdMatrix::from_eigensystem(std::move(eig), 1e-12);
}

inline Matrix random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
    Matrix m(rows, cols);
    for (double& v : m.data) v = scale * rng.normal();
    return m;
}

/// Two Gaussian blobs separated along the first axis; labels alternate so
/// any contiguous split stays two-class.
inline std::pair<Matrix, Vector> two_blobs(Rng& rng, int n, int d, double separation = 2.0,
                                           double noise = 0.8) {
    Matrix x(n, d);
    Vector y(n);
    for (int i = 0; i < n; ++i) {
        y[i] = (i % 2 == 0) ? 1.0 : -1.0;
        x(i, 0) = 0.5 * separation * y[i] + noise * rng.normal();
        for (int j = 1; j < d; ++j) x(i, j) = rng.normal();
    }
    return {std::move(x), std::move(y)};
}

// ---------------------------------------------------------------------------
// Brute-force SVM dual oracle: projected gradient ascent on
//   D(a) = sum a  - 1/2 a^T Q a,   0 <= a <= C,  y^T a = 0,
// with the feasibility projection computed by bisection on the shift
// multiplier. Slow and dense on purpose.
// ---------------------------------------------------------------------------

struct DualOracleResult {
    Vector alpha;
    double dual_objective = 0.0;
};

inline Vector project_box_hyperplane(const Vector& v, const Vector& y, double C) {
    const int n = static_cast<int>(v.size());
    auto residual = [&](double mu) {
        double r = 0.0;
        for (int i = 0; i < n; ++i) r += y[i] * std::clamp(v[i] - mu * y[i], 0.0, C);
        return r;
    };
    double lo = -1.0, hi = 1.0;
    while (residual(lo) < 0.0 && lo > -1e12) lo *= 2.0;
    while (residual(hi) > 0.0 && hi < 1e12) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (residual(mid) > 0.0) lo = mid;
        else hi = mid;
    }
    const double mu = 0.5 * (lo + hi);
    Vector out(n);
    for (int i = 0; i < n; ++i) out[i] = std::clamp(v[i] - mu * y[i], 0.0, C);
    return out;
}

/// Q given densely; defaults to the iteration budget the acceptance suite
/// states. Stops early only at an exact fixed point.
inline DualOracleResult dual_oracle(const Matrix& Q, const Vector& y, double C,
                                    long max_iters = 1000000) {
    const int n = Q.rows;
    Vector alpha = project_box_hyperplane(Vector(n, std::min(C, 1.0) * 0.5), y, C);
    double lipschitz = 0.0;
    for (int i = 0; i < n; ++i) lipschitz += std::abs(Q(i, i));
    const double step = 1.0 / std::max(lipschitz, 1e-12);

    int still = 0;
    for (long it = 0; it < max_iters; ++it) {
        Vector grad(n, 1.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) grad[i] -= Q(i, j) * alpha[j];
        Vector next(n);
        for (int i = 0; i < n; ++i) next[i] = alpha[i] + step * grad[i];
        next = project_box_hyperplane(next, y, C);
        double delta = 0.0;
        for (int i = 0; i < n; ++i) delta = std::max(delta, std::abs(next[i] - alpha[i]));
        alpha = std::move(next);
        if (delta == 0.0) {
            if (++still > 50) break;
        } else {
            still = 0;
        }
    }

    DualOracleResult res;
    res.alpha = alpha;
    double quad = 0.0, lin = 0.0;
    for (int i = 0; i < n; ++i) {
        lin += alpha[i];
        for (int j = 0; j < n; ++j) quad += alpha[i] * Q(i, j) * alpha[j];
    }
    res.dual_objective = lin - 0.5 * quad;
    return res;
}

inline Matrix dual_q_from_features(const Matrix& Z, const Vector& y) {
    const int n = Z.rows;
    Matrix q(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            q(i, j) = y[i] * y[j] * fsvm::dot(Z.row(i), Z.row(j), Z.cols);
    return q;
}

// ---------------------------------------------------------------------------
// Gram-based kernel SVM reference: textbook SMO over a kernel matrix. An
// independent route for the kernel-PCA equivalence checks: it never touches
// feature coordinates.
// ---------------------------------------------------------------------------

struct KernelSvmReference {
    Vector alpha;
    double bias = 0.0;
    double dual_objective = 0.0;

    double score(const Vector& kernel_row, const Vector& y) const {
        double s = bias;
        for (size_t i = 0; i < alpha.size(); ++i) s += alpha[i] * y[i] * kernel_row[i];
        return s;
    }
};

inline KernelSvmReference kernel_svm_reference(const Matrix& K, const Vector& y, double C,
                                               double tol = 1e-8, long max_iters = 2000000) {
    const int n = K.rows;
    Vector alpha(n, 0.0);
    Vector grad(n, -1.0);  // gradient of 1/2 a^T Q a - sum a

    auto in_up = [&](int i) { return (y[i] > 0 && alpha[i] < C) || (y[i] < 0 && alpha[i] > 0); };
    auto in_low = [&](int i) { return (y[i] > 0 && alpha[i] > 0) || (y[i] < 0 && alpha[i] < C); };

    long it = 0;
    for (; it < max_iters; ++it) {
        int iu = -1, il = -1;
        double up = -1e300, low = 1e300;
        for (int k = 0; k < n; ++k) {
            const double v = -y[k] * grad[k];
            if (in_up(k) && v > up) { up = v; iu = k; }
            if (in_low(k) && v < low) { low = v; il = k; }
        }
        if (iu < 0 || il < 0 || up - low < tol) break;

        double eta = K(iu, iu) + K(il, il) - 2.0 * y[iu] * y[il] * K(iu, il);
        if (eta < 1e-12) eta = 1e-12;
        double t = (up - low) / eta;
        const double room_u = (y[iu] > 0) ? C - alpha[iu] : alpha[iu];
        const double room_l = (y[il] > 0) ? alpha[il] : C - alpha[il];
        t = std::min(t, std::min(room_u, room_l));
        if (t <= 0.0) break;

        alpha[iu] += y[iu] * t;
        alpha[il] -= y[il] * t;
        for (int k = 0; k < n; ++k)
            grad[k] += t * y[k] * (K(k, iu) - K(k, il));
    }

    KernelSvmReference ref;
    ref.alpha = alpha;
    // Bias from free vectors, else the midpoint rule.
    double free_sum = 0.0;
    int free_count = 0;
    double up = -1e300, low = 1e300;
    for (int i = 0; i < n; ++i) {
        const double v = -y[i] * grad[i];
        if (in_up(i)) up = std::max(up, v);
        if (in_low(i)) low = std::min(low, v);
        if (alpha[i] > 0.0 && alpha[i] < C) {
            free_sum += v;
            ++free_count;
        }
    }
    ref.bias = free_count > 0 ? free_sum / free_count : 0.5 * (up + low);
    double lin = 0.0, quad = 0.0;
    for (int i = 0; i < n; ++i) {
        lin += alpha[i];
        for (int j = 0; j < n; ++j) quad += alpha[i] * alpha[j] * y[i] * y[j] * K(i, j);
    }
    ref.dual_objective = lin - 0.5 * quad;
    return ref;
}

}  // namespace testsupport
