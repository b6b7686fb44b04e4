#pragma once

// Radius oracles for point clouds: exact minimum enclosing ball, centroid
// radius (max distance from the mean) and pairwise diameter, plus the
// sandwich-bound report  R_bar/2 <= R <= R_bar <= R_p <= 2R.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fsvm/core.hpp"

namespace fsvm {

struct PointCloud {
    Matrix points;  // n x d

    int n() const { return points.rows; }
    int d() const { return points.cols; }

    void validate() const {
        if (points.rows < 1) throw input_error("PointCloud: need at least one point");
        if (!points.all_finite()) throw input_error("PointCloud: non-finite coordinates");
    }
};

struct MebResult {
    double radius = 0.0;
    Vector center;
    std::vector<int> support;  // indices certifying minimality
};

namespace detail_meb {

// Smallest ball with all points of `support` on its boundary. The center is
// constrained to the affine hull of the support set; the Gram system is
// solved by Gaussian elimination with partial pivoting, dropping nearly
// dependent directions.
struct Circumball {
    Vector center;
    double r2 = 0.0;
};

inline Circumball circumball(const Matrix& pts, const std::vector<int>& support) {
    const int d = pts.cols;
    Circumball ball;
    ball.center.assign(d, 0.0);
    if (support.empty()) {
        ball.r2 = -1.0;  // empty ball contains nothing
        return ball;
    }
    const double* q0 = pts.row(support[0]);
    const int m = static_cast<int>(support.size()) - 1;
    if (m == 0) {
        ball.center.assign(q0, q0 + d);
        ball.r2 = 0.0;
        return ball;
    }

    // G beta = rhs with G_ij = <q_i - q0, q_j - q0>, rhs_i = |q_i - q0|^2 / 2.
    Matrix g(m, m);
    Vector rhs(m);
    for (int i = 0; i < m; ++i) {
        const double* qi = pts.row(support[i + 1]);
        for (int j = i; j < m; ++j) {
            const double* qj = pts.row(support[j + 1]);
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += (qi[k] - q0[k]) * (qj[k] - q0[k]);
            g(i, j) = s;
            g(j, i) = s;
        }
        rhs[i] = 0.5 * g(i, i);
    }

    double diag_scale = 0.0;
    for (int i = 0; i < m; ++i) diag_scale = std::max(diag_scale, g(i, i));
    const double pivot_floor = 1e-12 * std::max(diag_scale, 1e-300);

    // Row-pivoted Gaussian elimination; variable order is unchanged. Rank
    // deficiency (affinely dependent support) leaves trailing coefficients
    // at zero.
    Matrix gw = g;
    Vector rw = rhs;
    Vector beta(m, 0.0);
    int rank = 0;
    for (int step = 0; step < m; ++step) {
        int piv = -1;
        double best = pivot_floor;
        for (int r = step; r < m; ++r) {
            if (std::abs(gw(r, step)) > best) {
                best = std::abs(gw(r, step));
                piv = r;
            }
        }
        if (piv < 0) break;
        if (piv != step) {
            for (int c = 0; c < m; ++c) std::swap(gw.row(piv)[c], gw.row(step)[c]);
            std::swap(rw[piv], rw[step]);
        }
        for (int r = step + 1; r < m; ++r) {
            const double f = gw(r, step) / gw(step, step);
            if (f == 0.0) continue;
            for (int c = step; c < m; ++c) gw(r, c) -= f * gw(step, c);
            rw[r] -= f * rw[step];
        }
        rank = step + 1;
    }
    for (int r = rank - 1; r >= 0; --r) {
        double s = rw[r];
        for (int c = r + 1; c < rank; ++c) s -= gw(r, c) * beta[c];
        beta[r] = s / gw(r, r);
    }
    // One round of iterative refinement on the original system sharpens the
    // center at mixed coordinate scales.
    if (rank == m) {
        Vector resid(m);
        for (int i = 0; i < m; ++i) resid[i] = rhs[i] - dot(g.row(i), beta.data(), m);
        Matrix gw2 = g;
        Vector correction = resid;
        for (int step = 0; step < m; ++step) {
            int piv = step;
            for (int r = step + 1; r < m; ++r)
                if (std::abs(gw2(r, step)) > std::abs(gw2(piv, step))) piv = r;
            if (std::abs(gw2(piv, step)) <= pivot_floor) { correction.assign(m, 0.0); break; }
            if (piv != step) {
                for (int c = 0; c < m; ++c) std::swap(gw2.row(piv)[c], gw2.row(step)[c]);
                std::swap(correction[piv], correction[step]);
            }
            for (int r = step + 1; r < m; ++r) {
                const double f = gw2(r, step) / gw2(step, step);
                for (int c = step; c < m; ++c) gw2(r, c) -= f * gw2(step, c);
                correction[r] -= f * correction[step];
            }
        }
        for (int r = m - 1; r >= 0; --r) {
            for (int c = r + 1; c < m; ++c) correction[r] -= gw2(r, c) * correction[c];
            correction[r] /= gw2(r, r);
        }
        for (int i = 0; i < m; ++i) beta[i] += correction[i];
    }

    ball.center.assign(q0, q0 + d);
    for (int i = 0; i < m; ++i) {
        if (beta[i] == 0.0) continue;
        const double* qi = pts.row(support[i + 1]);
        for (int k = 0; k < d; ++k) ball.center[k] += beta[i] * (qi[k] - q0[k]);
    }
    ball.r2 = squared_distance(ball.center.data(), q0, d);
    return ball;
}

inline bool contains(const Circumball& ball, const double* p, int d, double scale2) {
    const double dist2 = squared_distance(ball.center.data(), p, d);
    return dist2 <= ball.r2 + 1e-13 * std::max(scale2, 1e-300);
}

// Welzl's move-to-front recursion. Recursion depth is bounded by the support
// size (<= d + 1), not by n.
struct WelzlState {
    const Matrix& pts;
    std::vector<int> order;
    std::vector<int> support;
    double scale2 = 0.0;  // squared coordinate scale for containment slack
};

inline Circumball welzl_mtf(WelzlState& st, int limit) {
    Circumball ball = circumball(st.pts, st.support);
    if (static_cast<int>(st.support.size()) == st.pts.cols + 1) return ball;
    for (int idx = 0; idx < limit; ++idx) {
        const int p = st.order[idx];
        if (!contains(ball, st.pts.row(p), st.pts.cols, st.scale2)) {
            st.support.push_back(p);
            ball = welzl_mtf(st, idx);
            st.support.pop_back();
            // Move-to-front keeps hard points early in subsequent passes.
            for (int k = idx; k > 0; --k) st.order[k] = st.order[k - 1];
            st.order[0] = p;
        }
    }
    return ball;
}

// Pairwise Frank-Wolfe on the dual of the enclosing-ball problem, for
// dimensions where Welzl's recursion degrades. Linearly convergent with the
// exact line search; stops on a relative duality gap of 1e-9.
inline MebResult meb_frank_wolfe(const PointCloud& cloud) {
    const int n = cloud.n(), d = cloud.d();
    const Matrix& pts = cloud.points;
    Vector u(n, 1.0 / n);
    Vector c(d, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k) c[k] += u[i] * pts(i, k);

    const int max_iters = 200000;
    for (int iter = 0; iter < max_iters; ++iter) {
        int s = -1, a = -1;
        double far2 = -1.0, near2 = std::numeric_limits<double>::infinity();
        double dual = 0.0;
        for (int i = 0; i < n; ++i) {
            const double dist2 = squared_distance(pts.row(i), c.data(), d);
            dual += u[i] * dist2;
            if (dist2 > far2) { far2 = dist2; s = i; }
            if (u[i] > 0.0 && dist2 < near2) { near2 = dist2; a = i; }
        }
        const double gap = far2 - dual;
        if (gap <= 1e-9 * std::max(far2, 1e-300) || a < 0 || s == a) break;

        // Shift weight from the closest active point to the farthest one.
        // Exact line search on t: the objective along c + t (p_s - p_a) is a
        // parabola with slope -(far2 - near2) at t = 0.
        double den = 0.0;
        for (int k = 0; k < d; ++k) {
            const double dir = pts(s, k) - pts(a, k);
            den += dir * dir;
        }
        if (den <= 0.0) break;
        double t = (far2 - near2) / (2.0 * den);
        t = std::min(t, u[a]);
        if (t <= 0.0) break;
        u[s] += t;
        u[a] -= t;
        if (u[a] < 1e-18) { u[s] += u[a]; u[a] = 0.0; }
        for (int k = 0; k < d; ++k) c[k] += t * (pts(s, k) - pts(a, k));
    }

    MebResult res;
    res.center = std::move(c);
    double far2 = 0.0;
    for (int i = 0; i < n; ++i)
        far2 = std::max(far2, squared_distance(pts.row(i), res.center.data(), d));
    res.radius = std::sqrt(far2);
    for (int i = 0; i < n; ++i)
        if (u[i] > 1e-10) res.support.push_back(i);
    return res;
}

}  // namespace detail_meb

/// Exact minimum enclosing ball. Welzl's move-to-front recursion up to
/// d = 15; the Frank-Wolfe dual solver beyond that.
inline MebResult meb_exact(const PointCloud& cloud) {
    cloud.validate();
    const int n = cloud.n(), d = cloud.d();
    if (n == 1) {
        MebResult res;
        res.center.assign(cloud.points.row(0), cloud.points.row(0) + d);
        res.radius = 0.0;
        res.support = {0};
        return res;
    }
    if (d > 15) return detail_meb::meb_frank_wolfe(cloud);

    detail_meb::WelzlState st{cloud.points, {}, {}, 0.0};
    st.order.resize(n);
    std::iota(st.order.begin(), st.order.end(), 0);
    Rng rng(42);
    rng.shuffle(st.order);
    for (double v : cloud.points.data) st.scale2 = std::max(st.scale2, v * v);

    detail_meb::Circumball ball = detail_meb::welzl_mtf(st, n);

    MebResult res;
    res.center = ball.center;
    // Certified containment: report the measured farthest distance.
    double far2 = 0.0;
    for (int i = 0; i < n; ++i)
        far2 = std::max(far2, squared_distance(cloud.points.row(i), res.center.data(), d));
    res.radius = std::sqrt(far2);
    for (int i = 0; i < n; ++i) {
        const double dist2 = squared_distance(cloud.points.row(i), res.center.data(), d);
        if (std::abs(dist2 - far2) <= 1e-9 * std::max(far2, 1.0)) res.support.push_back(i);
    }
    return res;
}

/// R_bar = max_i |p_i - mean|.
inline double radius_centroid(const PointCloud& cloud) {
    cloud.validate();
    const int n = cloud.n(), d = cloud.d();
    Vector mean(d, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k) mean[k] += cloud.points(i, k);
    for (double& m : mean) m /= n;
    double far2 = 0.0;
    for (int i = 0; i < n; ++i)
        far2 = std::max(far2, squared_distance(cloud.points.row(i), mean.data(), d));
    return std::sqrt(far2);
}

/// R_p = max_{i,j} |p_i - p_j|.
inline double radius_pairwise(const PointCloud& cloud) {
    cloud.validate();
    const int n = cloud.n(), d = cloud.d();
    double far2 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            far2 = std::max(far2, squared_distance(cloud.points.row(i), cloud.points.row(j), d));
    return std::sqrt(far2);
}

struct BoundReport {
    double radius = 0.0;           // R, exact MEB radius
    double radius_centroid = 0.0;  // R_bar
    double radius_pairwise = 0.0;  // R_p
    bool half_centroid_le_radius = false;   // R_bar / 2 <= R
    bool radius_le_centroid = false;        // R <= R_bar
    bool centroid_le_pairwise = false;      // R_bar <= R_p
    bool pairwise_le_twice_radius = false;  // R_p <= 2 R
    bool all_hold = false;
};

inline BoundReport verify_bounds(const PointCloud& cloud, double tol = 1e-9) {
    BoundReport report;
    report.radius = meb_exact(cloud).radius;
    report.radius_centroid = radius_centroid(cloud);
    report.radius_pairwise = radius_pairwise(cloud);
    report.half_centroid_le_radius = 0.5 * report.radius_centroid <= report.radius + tol;
    report.radius_le_centroid = report.radius <= report.radius_centroid + tol;
    report.centroid_le_pairwise = report.radius_centroid <= report.radius_pairwise + tol;
    report.pairwise_le_twice_radius = report.radius_pairwise <= 2.0 * report.radius + tol;
    report.all_hold = report.half_centroid_le_radius && report.radius_le_centroid &&
                      report.centroid_le_pairwise && report.pairwise_le_twice_radius;
    return report;
}

}  // namespace fsvm
