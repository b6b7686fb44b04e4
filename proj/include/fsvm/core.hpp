#pragma once

// Shared primitives: dense row-major matrix, error types, deterministic RNG.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace fsvm {

using Vector = std::vector<double>;

/// Bad arguments: dimension mismatch, non-finite input, out-of-range options.
struct input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed or unreadable input files.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Problems with no well-defined solution (e.g. single-class training data).
struct degenerate_problem_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {
        if (r < 0 || c < 0) throw input_error("Matrix: negative dimension");
    }

    double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

    const double* row(int i) const { return data.data() + static_cast<size_t>(i) * cols; }
    double* row(int i) { return data.data() + static_cast<size_t>(i) * cols; }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline double dot(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

inline double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw input_error("dot: size mismatch");
    return dot(a.data(), b.data(), static_cast<int>(a.size()));
}

inline double norm2(const Vector& a) { return std::sqrt(dot(a.data(), a.data(), static_cast<int>(a.size()))); }

inline double squared_distance(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    for (double v : m.data) s += v * v;
    return std::sqrt(s);
}

/// y = A x  (A: r x c, x: c, y: r)
inline Vector matvec(const Matrix& a, const Vector& x) {
    if (static_cast<int>(x.size()) != a.cols) throw input_error("matvec: dimension mismatch");
    Vector y(a.rows, 0.0);
    for (int i = 0; i < a.rows; ++i) y[i] = dot(a.row(i), x.data(), a.cols);
    return y;
}

/// y = A^T x  (A: r x c, x: r, y: c)
inline Vector matvec_transposed(const Matrix& a, const Vector& x) {
    if (static_cast<int>(x.size()) != a.rows) throw input_error("matvec_transposed: dimension mismatch");
    Vector y(a.cols, 0.0);
    for (int i = 0; i < a.rows; ++i) {
        const double xi = x[i];
        const double* r = a.row(i);
        for (int j = 0; j < a.cols; ++j) y[j] += xi * r[j];
    }
    return y;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw input_error("matmul: dimension mismatch");
    Matrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* br = b.row(k);
            double* cr = c.row(i);
            for (int j = 0; j < b.cols; ++j) cr[j] += aik * br[j];
        }
    return c;
}

/// Deterministic RNG: mt19937 with explicit double/bounded-int derivations so
/// streams do not depend on the standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint32_t seed) : gen_(seed) {}

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() {
        const std::uint32_t a = gen_() >> 5;  // 27 bits
        const std::uint32_t b = gen_() >> 6;  // 26 bits
        return (a * 67108864.0 + b) / 9007199254740992.0;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint32_t below(std::uint32_t n) { return n <= 1 ? 0 : gen_() % n; }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::uint32_t i = static_cast<std::uint32_t>(v.size()); i > 1; --i) {
            const std::uint32_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace fsvm
