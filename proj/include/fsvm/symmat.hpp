#pragma once

// Dense symmetric-matrix kernel: eigendecomposition, positive-definite
// flooring, inversion, trace products. Everything is value-typed and pure;
// safe for concurrent use.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

#include "fsvm/core.hpp"

namespace fsvm {

/// Sink for non-fatal numerical warnings (ill-conditioning etc.).
/// Replaceable by tests; defaults to stderr.
inline std::function<void(const std::string&)>& warning_sink() {
    static std::function<void(const std::string&)> sink = [](const std::string& msg) {
        std::fprintf(stderr, "fsvm: warning: %s\n", msg.c_str());
    };
    return sink;
}

/// Square matrix stored dense row-major, kept exactly symmetric: the
/// constructor averages (i,j) and (j,i).
struct SymmetricMatrix {
    int dim = 0;
    Matrix m;

    SymmetricMatrix() = default;

    explicit SymmetricMatrix(const Matrix& a) : dim(a.rows), m(a.rows, a.cols) {
        if (a.rows != a.cols) throw input_error("SymmetricMatrix: matrix not square");
        if (a.rows < 1) throw input_error("SymmetricMatrix: dim must be >= 1");
        for (int i = 0; i < dim; ++i) {
            m(i, i) = a(i, i);
            for (int j = i + 1; j < dim; ++j) {
                const double v = 0.5 * (a(i, j) + a(j, i));
                m(i, j) = v;
                m(j, i) = v;
            }
        }
    }

    static SymmetricMatrix identity(int n) { return SymmetricMatrix(Matrix::identity(n)); }

    static SymmetricMatrix zeros(int n) {
        if (n < 1) throw input_error("SymmetricMatrix: dim must be >= 1");
        return SymmetricMatrix(Matrix(n, n));
    }

    double operator()(int i, int j) const { return m(i, j); }
    double& at(int i, int j) { return m.data[static_cast<size_t>(i) * dim + j]; }

    /// Symmetric rank-one accumulate: *this += scale * v v^T.
    void add_outer(const Vector& v, double scale) {
        if (static_cast<int>(v.size()) != dim) throw input_error("add_outer: dimension mismatch");
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) m.data[static_cast<size_t>(i) * dim + j] += scale * v[i] * v[j];
    }

    bool all_finite() const { return m.all_finite(); }
};

/// Eigensystem of a symmetric matrix: eigenvalues sorted descending,
/// eigenvector k in column k of `vectors`.
struct EigenDecomposition {
    Vector values;
    Matrix vectors;

    /// V diag(values) V^T.
    Matrix reconstruct() const {
        const int n = vectors.rows;
        Matrix out(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += values[k] * vectors(i, k) * vectors(j, k);
                out(i, j) = s;
                out(j, i) = s;
            }
        return out;
    }
};

/// Eigendecomposition by cyclic Jacobi rotations. Robust and deterministic;
/// plenty fast for the dense desk-scale matrices this library works with
/// (d up to a few hundred).
inline EigenDecomposition sym_eig(const SymmetricMatrix& a) {
    if (!a.all_finite()) throw input_error("sym_eig: non-finite entries");
    const int n = a.dim;
    Matrix w = a.m;              // working copy, diagonalized in place
    Matrix v = Matrix::identity(n);

    double frob = frobenius_norm(w);
    const double stop = 1e-15 * std::max(frob, 1.0) * 1e-2;

    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += w(p, q) * w(p, q);
        off = std::sqrt(2.0 * off);
        if (off <= stop) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = w(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double app = w(p, p);
                const double aqq = w(q, q);
                // Skip rotations that cannot change anything at double precision.
                if (std::abs(apq) < 1e-18 * (std::abs(app) + std::abs(aqq) + 1e-300)) continue;

                const double theta = (aqq - app) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                w(p, p) = app - t * apq;
                w(q, q) = aqq + t * apq;
                w(p, q) = 0.0;
                w(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k != p && k != q) {
                        const double akp = w(k, p);
                        const double akq = w(k, q);
                        w(k, p) = akp - s * (akq + tau * akp);
                        w(p, k) = w(k, p);
                        w(k, q) = akq + s * (akp - tau * akq);
                        w(q, k) = w(k, q);
                    }
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = vkp - s * (vkq + tau * vkp);
                    v(k, q) = vkq + s * (vkp - tau * vkq);
                }
            }
        }
    }

    // Sort eigenpairs descending; index tie-break keeps the order deterministic.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return w(i, i) > w(j, j); });

    EigenDecomposition eig;
    eig.values.resize(n);
    eig.vectors = Matrix(n, n);
    for (int k = 0; k < n; ++k) {
        eig.values[k] = w(order[k], order[k]);
        for (int i = 0; i < n; ++i) eig.vectors(i, k) = v(i, order[k]);
    }
    return eig;
}

/// Symmetric matrix certified positive definite: all eigenvalues >= eps_pd.
/// Carries its eigensystem so downstream transforms and inversions reuse it.
struct SpdMatrix {
    SymmetricMatrix mat;
    EigenDecomposition eig;  // values descending, all >= eps_pd
    double eps_pd = 0.0;

    int dim() const { return mat.dim; }
    double min_eigenvalue() const { return eig.values.empty() ? 0.0 : eig.values.back(); }
    double max_eigenvalue() const { return eig.values.empty() ? 0.0 : eig.values.front(); }

    static SpdMatrix identity(int n, double eps_pd = 1e-8) {
        SpdMatrix s;
        s.mat = SymmetricMatrix::identity(n);
        s.eig.values.assign(n, 1.0);
        s.eig.vectors = Matrix::identity(n);
        s.eps_pd = eps_pd;
        return s;
    }

    /// Build directly from an eigensystem whose values are already >= eps_pd.
    static SpdMatrix from_eigensystem(EigenDecomposition eig, double eps_pd) {
        SpdMatrix s;
        for (double& lam : eig.values) lam = std::max(lam, eps_pd);
        s.mat = SymmetricMatrix(eig.reconstruct());
        s.eig = std::move(eig);
        s.eps_pd = eps_pd;
        return s;
    }
};

/// Nearest (in eigenvalue terms) positive-definite matrix: eigenvalues of A
/// floored at eps_pd, eigenvectors kept. Returns A unchanged when its
/// smallest eigenvalue already clears the floor (up to roundoff of the
/// eigensolve), which makes repeated projection a fixed point.
inline SpdMatrix psd_project(const SymmetricMatrix& a, double eps_pd) {
    if (eps_pd <= 0.0) throw input_error("psd_project: eps_pd must be > 0");
    if (!a.all_finite()) throw input_error("psd_project: non-finite entries");
    EigenDecomposition eig = sym_eig(a);

    double scale = std::abs(eig.values.front());
    for (double lam : eig.values) scale = std::max(scale, std::abs(lam));
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * std::max(scale, eps_pd);

    const double lam_min = eig.values.back();
    SpdMatrix out;
    if (lam_min >= eps_pd - slack) {
        out.mat = a;  // already certified: pass through unchanged
        for (double& lam : eig.values) lam = std::max(lam, eps_pd);
        out.eig = std::move(eig);
    } else {
        for (double& lam : eig.values) lam = std::max(lam, eps_pd);
        out.mat = SymmetricMatrix(eig.reconstruct());
        out.eig = std::move(eig);
    }
    out.eps_pd = eps_pd;
    return out;
}

/// M^{-1} through the stored eigensystem. Warns (but proceeds) if the
/// condition number exceeds 1/eps_pd^2.
inline SpdMatrix spd_inverse(const SpdMatrix& m) {
    const double lam_max = m.max_eigenvalue();
    const double lam_min = m.min_eigenvalue();
    if (m.eps_pd > 0.0 && lam_min > 0.0 && lam_max / lam_min > 1.0 / (m.eps_pd * m.eps_pd)) {
        warning_sink()("spd_inverse: condition number " + std::to_string(lam_max / lam_min) +
                       " exceeds 1/eps_pd^2; inverse may be inaccurate");
    }
    EigenDecomposition inv_eig;
    const int n = m.dim();
    inv_eig.values.resize(n);
    inv_eig.vectors = Matrix(n, n);
    // Reciprocals sorted ascending-from-descending: reverse to keep order descending.
    for (int k = 0; k < n; ++k) {
        inv_eig.values[k] = 1.0 / m.eig.values[n - 1 - k];
        for (int i = 0; i < n; ++i) inv_eig.vectors(i, k) = m.eig.vectors(i, n - 1 - k);
    }
    SpdMatrix out;
    out.mat = SymmetricMatrix(inv_eig.reconstruct());
    out.eig = std::move(inv_eig);
    out.eps_pd = 0.0;  // floor certificate does not transfer through inversion
    return out;
}

/// tr(A B) for symmetric A, B: sum of elementwise products.
inline double trace_product(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    if (a.dim != b.dim) throw input_error("trace_product: dimension mismatch");
    double s = 0.0;
    const size_t n2 = a.m.data.size();
    for (size_t i = 0; i < n2; ++i) s += a.m.data[i] * b.m.data[i];
    return s;
}

inline double trace(const SymmetricMatrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.dim; ++i) s += a(i, i);
    return s;
}

/// x^T A y for symmetric A.
inline double quadratic_form(const SymmetricMatrix& a, const Vector& x, const Vector& y) {
    if (static_cast<int>(x.size()) != a.dim || static_cast<int>(y.size()) != a.dim)
        throw input_error("quadratic_form: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < a.dim; ++i) s += x[i] * dot(a.m.row(i), y.data(), a.dim);
    return s;
}

/// w^T M^{-1} w through M's eigensystem.
inline double inverse_quadratic_form(const SpdMatrix& m, const Vector& w) {
    if (static_cast<int>(w.size()) != m.dim()) throw input_error("inverse_quadratic_form: dimension mismatch");
    const int n = m.dim();
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
        double proj = 0.0;
        for (int i = 0; i < n; ++i) proj += m.eig.vectors(i, k) * w[i];
        s += proj * proj / m.eig.values[k];
    }
    return s;
}

}  // namespace fsvm
