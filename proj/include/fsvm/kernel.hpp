#pragma once

// Kernels, Gram centering and kernel PCA. Kernel SVM is exactly linear SVM
// in the kernel PCA coordinates, so the kernel F-SVM pipeline is: project
// through a fitted KernelPcaMap, then run the linear trainer on the
// projections (whose scatter is sum_i f_i f_i^T since they are centered).

#include <algorithm>
#include <cmath>

#include "fsvm/core.hpp"
#include "fsvm/symmat.hpp"
#include "fsvm/train.hpp"

namespace fsvm {

struct KernelSpec {
    enum class Kind { linear, rbf };
    Kind kind = Kind::linear;
    double gamma = 1.0;  // rbf only: K = exp(-gamma |x - x'|^2)

    static KernelSpec linear() { return {Kind::linear, 0.0}; }
    static KernelSpec rbf(double gamma) {
        if (!(gamma > 0.0)) throw input_error("KernelSpec: gamma must be > 0");
        return {Kind::rbf, gamma};
    }
};

inline double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& xp) {
    if (x.size() != xp.size()) throw input_error("kernel_eval: dimension mismatch");
    switch (spec.kind) {
        case KernelSpec::Kind::linear:
            return dot(x, xp);
        case KernelSpec::Kind::rbf:
            return std::exp(-spec.gamma *
                            squared_distance(x.data(), xp.data(), static_cast<int>(x.size())));
    }
    throw input_error("kernel_eval: unknown kernel kind");
}

inline double kernel_eval(const KernelSpec& spec, const double* x, const double* xp, int d) {
    switch (spec.kind) {
        case KernelSpec::Kind::linear:
            return dot(x, xp, d);
        case KernelSpec::Kind::rbf:
            return std::exp(-spec.gamma * squared_distance(x, xp, d));
    }
    throw input_error("kernel_eval: unknown kernel kind");
}

inline SymmetricMatrix gram_matrix(const KernelSpec& spec, const Matrix& x) {
    const int n = x.rows;
    Matrix k(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = kernel_eval(spec, x.row(i), x.row(j), x.cols);
            k(i, j) = v;
            k(j, i) = v;
        }
    return SymmetricMatrix(k);
}

/// Double centering: K_c = K - row means - col means + grand mean. Every row
/// of the result sums to zero.
inline SymmetricMatrix center_gram(const SymmetricMatrix& k) {
    const int n = k.dim;
    Vector row_mean(n, 0.0);
    double grand = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) row_mean[i] += k(i, j);
        row_mean[i] /= n;
        grand += row_mean[i];
    }
    grand /= n;
    Matrix c(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c(i, j) = k(i, j) - row_mean[i] - row_mean[j] + grand;
    return SymmetricMatrix(c);
}

/// Fitted kernel-PCA projection: training points, the eigensystem of the
/// centered Gram (scaled into dual coefficients), and the centering
/// statistics needed to project new points.
struct KernelPcaMap {
    Matrix x_train;              // n x d_in
    KernelSpec spec;
    Matrix coefficients;         // n x d_out, column k = v_k / sqrt(lambda_k)
    Vector eigenvalues;          // retained, descending, > 0
    Vector gram_row_means;       // per training point
    double gram_grand_mean = 0.0;
    Matrix training_projections; // n x d_out (derived cache, not serialized)

    int input_dim() const { return x_train.cols; }
    int output_dim() const { return coefficients.cols; }
};

namespace detail_kpca {

/// Make the first coordinate of each coefficient column positive so
/// projections are deterministic across fits.
inline void fix_signs(Matrix& coeff) {
    for (int k = 0; k < coeff.cols; ++k) {
        double lead = 0.0;
        for (int i = 0; i < coeff.rows; ++i) {
            if (std::abs(coeff(i, k)) > 1e-12) {
                lead = coeff(i, k);
                break;
            }
        }
        if (lead < 0.0)
            for (int i = 0; i < coeff.rows; ++i) coeff(i, k) = -coeff(i, k);
    }
}

inline Matrix project_rows(const KernelPcaMap& map, const SymmetricMatrix& centered) {
    // F = K_c * A
    const int n = centered.dim;
    const int d = map.coefficients.cols;
    Matrix f(n, d);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += centered(i, j) * map.coefficients(j, k);
            f(i, k) = s;
        }
    return f;
}

}  // namespace detail_kpca

inline KernelPcaMap kernel_pca_fit(const Matrix& x, const KernelSpec& spec, int d) {
    if (x.rows < 2) throw input_error("kernel_pca_fit: need n >= 2");
    if (d < 1 || d > x.rows) throw input_error("kernel_pca_fit: d must satisfy 1 <= d <= n");
    if (!x.all_finite()) throw input_error("kernel_pca_fit: non-finite features");
    const int n = x.rows;

    SymmetricMatrix k = gram_matrix(spec, x);
    Vector row_means(n, 0.0);
    double grand = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) row_means[i] += k(i, j);
        row_means[i] /= n;
        grand += row_means[i];
    }
    grand /= n;

    SymmetricMatrix kc = center_gram(k);
    EigenDecomposition eig = sym_eig(kc);

    // The centered Gram is PSD up to roundoff; clamp small negatives.
    for (double& lam : eig.values) lam = std::max(lam, 0.0);
    const double eps_kpca = 1e-10 * std::max(eig.values.front(), 0.0);
    int effective = 0;
    while (effective < d && eig.values[effective] > eps_kpca) ++effective;
    if (effective == 0) throw degenerate_problem_error("kernel_pca_fit: centered Gram has no positive spectrum");

    KernelPcaMap map;
    map.x_train = x;
    map.spec = spec;
    map.eigenvalues.assign(eig.values.begin(), eig.values.begin() + effective);
    map.gram_row_means = std::move(row_means);
    map.gram_grand_mean = grand;
    map.coefficients = Matrix(n, effective);
    for (int kcol = 0; kcol < effective; ++kcol) {
        const double scale = 1.0 / std::sqrt(eig.values[kcol]);
        for (int i = 0; i < n; ++i) map.coefficients(i, kcol) = scale * eig.vectors(i, kcol);
    }
    detail_kpca::fix_signs(map.coefficients);
    map.training_projections = detail_kpca::project_rows(map, kc);
    return map;
}

/// Rebuild the derived training projections (after deserialization).
inline void refresh_training_projections(KernelPcaMap& map) {
    SymmetricMatrix kc = center_gram(gram_matrix(map.spec, map.x_train));
    map.training_projections = detail_kpca::project_rows(map, kc);
}

inline Vector kernel_pca_project(const KernelPcaMap& map, const Vector& x) {
    if (static_cast<int>(x.size()) != map.input_dim())
        throw input_error("kernel_pca_project: dimension mismatch");
    const int n = map.x_train.rows;
    Vector k(n);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
        k[i] = kernel_eval(map.spec, map.x_train.row(i), x.data(), map.input_dim());
        mean += k[i];
    }
    mean /= n;
    // Centered kernel row against the training set.
    for (int i = 0; i < n; ++i) k[i] = k[i] - mean - map.gram_row_means[i] + map.gram_grand_mean;

    Vector f(map.output_dim(), 0.0);
    for (int i = 0; i < n; ++i) {
        if (k[i] == 0.0) continue;
        for (int c = 0; c < map.output_dim(); ++c) f[c] += k[i] * map.coefficients(i, c);
    }
    return f;
}

struct KernelFsvmModel {
    KernelPcaMap map;
    FsvmModel linear;

    Prediction predict(const Vector& x) const {
        return fsvm::predict(linear, kernel_pca_project(map, x));
    }
};

/// Kernel F-SVM: kernel PCA lift, then the linear trainer on the projections.
inline std::tuple<KernelPcaMap, FsvmModel, TrainingTrace> train_kernel_fsvm(
    const Matrix& x, const Vector& y, const KernelSpec& spec, int d, const FsvmHyperParams& hyper) {
    KernelPcaMap map = kernel_pca_fit(x, spec, d);
    auto [model, trace] = train_fsvm(map.training_projections, y, hyper);
    return {std::move(map), std::move(model), std::move(trace)};
}

}  // namespace fsvm
