#pragma once

// Soft-margin linear SVM solved in the dual:
//
//   max_a  sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j <z_i, z_j>
//   s.t.   0 <= a_i <= C,  sum_i a_i y_i = 0
//
// by pairwise coordinate descent: each sweep walks a seeded random
// permutation and pairs the visited index with its maximal violating
// counterpart, so the equality constraint is preserved exactly. The bias is
// recovered from the KKT conditions after each sweep. Deterministic given
// the seed; no shared state between solves.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>

#include "fsvm/core.hpp"

namespace fsvm {

struct LinearSvmProblem {
    Matrix Z;            // n x d transformed samples
    Vector y;            // labels in {-1, +1}
    double C = 1.0;

    int n() const { return Z.rows; }
    int d() const { return Z.cols; }

    void validate() const {
        if (Z.rows < 2) throw input_error("LinearSvmProblem: need n >= 2");
        if (static_cast<int>(y.size()) != Z.rows) throw input_error("LinearSvmProblem: label count mismatch");
        if (!(C > 0.0)) throw input_error("LinearSvmProblem: C must be > 0");
        if (!Z.all_finite()) throw input_error("LinearSvmProblem: non-finite features");
        bool pos = false, neg = false;
        for (double yi : y) {
            if (yi == 1.0) pos = true;
            else if (yi == -1.0) neg = true;
            else throw input_error("LinearSvmProblem: labels must be -1 or +1");
        }
        if (!pos || !neg) throw degenerate_problem_error("LinearSvmProblem: single-class input");
    }
};

struct SvmSolution {
    Vector v;                 // weight vector in transformed space
    double b = 0.0;
    Vector xi;                // slacks, xi_i = max(0, 1 - y_i (v.z_i + b))
    Vector alpha;             // duals in [0, C]
    double dual_objective = 0.0;
    double primal_objective = 0.0;
    int sweeps = 0;
    bool converged = false;
};

struct SweepStats {
    int sweep = 0;
    double pair_gap = 0.0;        // maximal violating-pair value m - M
    double primal = 0.0;
    double dual = 0.0;
    int updates = 0;
};

struct SvmSolverOptions {
    double tol_pair = 1e-6;       // maximal violating-pair stop
    double gap_tol = 1e-8;        // relative duality-gap stop
    int max_sweeps = 10000;
    std::uint32_t seed = 42;      // sweep-permutation seed
    bool shrinking = false;       // optional bounded-variable skipping
    std::function<void(const SweepStats&)> observer;  // per-sweep hook (tests)
};

namespace detail {

// KKT bias: average of y_i - s_i over free support vectors; midpoint of the
// feasible interval when every dual variable sits on a bound.
inline double kkt_bias(const Vector& alpha, const Vector& y, const Vector& s, double C,
                       double* pair_gap_out = nullptr) {
    const int n = static_cast<int>(alpha.size());
    double free_sum = 0.0;
    int free_count = 0;
    double up_max = -std::numeric_limits<double>::infinity();   // m(a) = max over I_up of -E_i
    double low_min = std::numeric_limits<double>::infinity();   // M(a) = min over I_low of -E_i
    for (int i = 0; i < n; ++i) {
        const double neg_e = y[i] - s[i];
        const bool in_up = (y[i] > 0.0 && alpha[i] < C) || (y[i] < 0.0 && alpha[i] > 0.0);
        const bool in_low = (y[i] > 0.0 && alpha[i] > 0.0) || (y[i] < 0.0 && alpha[i] < C);
        if (in_up) up_max = std::max(up_max, neg_e);
        if (in_low) low_min = std::min(low_min, neg_e);
        if (alpha[i] > 0.0 && alpha[i] < C) {
            free_sum += neg_e;
            ++free_count;
        }
    }
    if (pair_gap_out) *pair_gap_out = up_max - low_min;
    if (free_count > 0) return free_sum / free_count;
    if (std::isfinite(up_max) && std::isfinite(low_min)) return 0.5 * (up_max + low_min);
    if (std::isfinite(up_max)) return up_max;
    if (std::isfinite(low_min)) return low_min;
    return 0.0;
}

inline void fill_scores(const Matrix& Z, const Vector& v, Vector& s) {
    const int n = Z.rows;
    s.resize(n);
    for (int i = 0; i < n; ++i) s[i] = dot(Z.row(i), v.data(), Z.cols);
}

inline Vector weights_from_alpha(const Matrix& Z, const Vector& y, const Vector& alpha) {
    Vector v(Z.cols, 0.0);
    for (int i = 0; i < Z.rows; ++i) {
        const double coef = y[i] * alpha[i];
        if (coef == 0.0) continue;
        const double* zi = Z.row(i);
        for (int j = 0; j < Z.cols; ++j) v[j] += coef * zi[j];
    }
    return v;
}

}  // namespace detail

/// Primal and dual objective values of a candidate solution. Slacks are
/// recomputed from (v, b), so the pair is consistent by construction.
inline std::pair<double, double> svm_objectives(const LinearSvmProblem& p, const SvmSolution& s) {
    if (static_cast<int>(s.v.size()) != p.d()) throw input_error("svm_objectives: weight dimension mismatch");
    if (static_cast<int>(s.alpha.size()) != p.n()) throw input_error("svm_objectives: alpha size mismatch");
    double slack_sum = 0.0;
    for (int i = 0; i < p.n(); ++i) {
        const double margin = p.y[i] * (dot(p.Z.row(i), s.v.data(), p.d()) + s.b);
        slack_sum += std::max(0.0, 1.0 - margin);
    }
    const double primal = 0.5 * dot(s.v, s.v) + p.C * slack_sum;

    const Vector u = detail::weights_from_alpha(p.Z, p.y, s.alpha);
    double alpha_sum = 0.0;
    for (double a : s.alpha) alpha_sum += a;
    const double dual = alpha_sum - 0.5 * dot(u, u);
    return {primal, dual};
}

inline SvmSolution solve_linear_svm(const LinearSvmProblem& p,
                                    const std::optional<SvmSolution>& warm_start = std::nullopt,
                                    const SvmSolverOptions& opts = {}) {
    p.validate();
    const int n = p.n();
    const int d = p.d();
    const double C = p.C;

    Vector alpha(n, 0.0);
    if (warm_start && static_cast<int>(warm_start->alpha.size()) == n) {
        alpha = warm_start->alpha;
        for (double& a : alpha) a = std::clamp(a, 0.0, C);
        // Repair any residual in sum(y a) = 0 introduced by clamping.
        double r = 0.0;
        for (int i = 0; i < n; ++i) r += p.y[i] * alpha[i];
        for (int i = 0; i < n && std::abs(r) > 0.0; ++i) {
            const double adjust = std::clamp(alpha[i] - p.y[i] * r, 0.0, C) - alpha[i];
            alpha[i] += adjust;
            r += p.y[i] * adjust;
        }
    }

    Vector u = detail::weights_from_alpha(p.Z, p.y, alpha);  // u = sum y_i a_i z_i
    Vector s;                                                // s_i = <u, z_i>
    detail::fill_scores(p.Z, u, s);

    Rng rng(opts.seed);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<char> active(n, 1);

    double pair_gap = std::numeric_limits<double>::infinity();
    double last_pair_gap = std::numeric_limits<double>::infinity();
    int sweep = 0;
    bool converged = false;

    auto in_up = [&](int i) { return (p.y[i] > 0.0 && alpha[i] < C) || (p.y[i] < 0.0 && alpha[i] > 0.0); };
    auto in_low = [&](int i) { return (p.y[i] > 0.0 && alpha[i] > 0.0) || (p.y[i] < 0.0 && alpha[i] < C); };

    // Squared norms of the rows, for second-order pair selection.
    Vector row_norm2(n);
    for (int i = 0; i < n; ++i) row_norm2[i] = dot(p.Z.row(i), p.Z.row(i), d);

    // One analytic step on the pair (i_up, i_low): a_up += y_up t, a_low -= y_low t.
    auto pair_step = [&](int iu, int il) -> bool {
        const double neg_e_u = p.y[iu] - s[iu];
        const double neg_e_l = p.y[il] - s[il];
        const double violation = neg_e_u - neg_e_l;
        if (violation <= 0.0) return false;

        double eta = squared_distance(p.Z.row(iu), p.Z.row(il), d);
        if (eta < 1e-12) eta = 1e-12;
        double t = violation / eta;

        const double room_u = (p.y[iu] > 0.0) ? C - alpha[iu] : alpha[iu];
        const double room_l = (p.y[il] > 0.0) ? alpha[il] : C - alpha[il];
        bool u_hits = false, l_hits = false;
        if (t >= room_u) { t = room_u; u_hits = true; }
        if (t >= room_l) { t = room_l; l_hits = true; u_hits = (room_u == room_l) && u_hits; }
        if (t <= 0.0) return false;

        alpha[iu] += p.y[iu] * t;
        alpha[il] -= p.y[il] * t;
        if (u_hits) alpha[iu] = (p.y[iu] > 0.0) ? C : 0.0;
        if (l_hits) alpha[il] = (p.y[il] > 0.0) ? 0.0 : C;
        alpha[iu] = std::clamp(alpha[iu], 0.0, C);
        alpha[il] = std::clamp(alpha[il], 0.0, C);

        const double* zu = p.Z.row(iu);
        const double* zl = p.Z.row(il);
        for (int j = 0; j < d; ++j) u[j] += t * (zu[j] - zl[j]);
        for (int k = 0; k < n; ++k) s[k] += t * (dot(p.Z.row(k), zu, d) - dot(p.Z.row(k), zl, d));
        return true;
    };

    // Second-order partner selection: among feasible partners of i, pick the
    // one maximizing violation^2 / eta, the analytic objective decrease.
    auto best_partner = [&](int i, bool i_is_up, double* violation_out) -> int {
        const double neg_e_i = p.y[i] - s[i];
        int best = -1;
        double best_gain = 0.0, best_viol = 0.0;
        for (int k = 0; k < n; ++k) {
            if (k == i) continue;
            if (i_is_up ? !in_low(k) : !in_up(k)) continue;
            const double neg_e_k = p.y[k] - s[k];
            const double viol = i_is_up ? neg_e_i - neg_e_k : neg_e_k - neg_e_i;
            if (viol <= 0.0) continue;
            double eta = row_norm2[i] + row_norm2[k] - 2.0 * dot(p.Z.row(i), p.Z.row(k), d);
            if (eta < 1e-12) eta = 1e-12;
            const double gain = viol * viol / eta;
            if (gain > best_gain) {
                best_gain = gain;
                best_viol = viol;
                best = k;
            }
        }
        if (violation_out) *violation_out = best_viol;
        return best;
    };

    const double step_floor = std::max(1e-12, 1e-3 * opts.tol_pair);

    while (sweep < opts.max_sweeps) {
        ++sweep;
        rng.shuffle(perm);
        int updates = 0;

        for (int idx = 0; idx < n; ++idx) {
            const int i = perm[idx];
            if (opts.shrinking && !active[i]) continue;

            int iu = -1, il = -1;
            double best_violation = 0.0;
            if (in_up(i)) {
                double viol = 0.0;
                const int j = best_partner(i, true, &viol);
                if (j >= 0 && viol > best_violation) { best_violation = viol; iu = i; il = j; }
            }
            if (in_low(i)) {
                double viol = 0.0;
                const int j = best_partner(i, false, &viol);
                if (j >= 0 && viol > best_violation) { best_violation = viol; iu = j; il = i; }
            }
            if (iu < 0 || best_violation <= step_floor) continue;
            if (pair_step(iu, il)) ++updates;
        }

        // Focused phase: drive the maximal violating pair down before the
        // next stirring pass.
        for (int focus = 0; focus < 8 * n; ++focus) {
            int im = -1, jm = -1;
            double up_max = -std::numeric_limits<double>::infinity();
            double low_min = std::numeric_limits<double>::infinity();
            for (int k = 0; k < n; ++k) {
                const double neg_e = p.y[k] - s[k];
                if (in_up(k) && neg_e > up_max) { up_max = neg_e; im = k; }
                if (in_low(k) && neg_e < low_min) { low_min = neg_e; jm = k; }
            }
            if (im < 0 || jm < 0 || up_max - low_min <= std::max(step_floor, 0.5 * opts.tol_pair)) break;
            double viol = 0.0;
            const int j = best_partner(im, true, &viol);
            if (j < 0 || viol <= step_floor) break;
            if (!pair_step(im, j)) break;
            ++updates;
        }

        // Drift control: rebuild u and the score cache from alpha each sweep.
        u = detail::weights_from_alpha(p.Z, p.y, alpha);
        detail::fill_scores(p.Z, u, s);

        const double b = detail::kkt_bias(alpha, p.y, s, C, &pair_gap);
        double slack_sum = 0.0, alpha_sum = 0.0;
        for (int i = 0; i < n; ++i) {
            slack_sum += std::max(0.0, 1.0 - p.y[i] * (s[i] + b));
            alpha_sum += alpha[i];
        }
        const double uu = dot(u, u);
        const double primal = 0.5 * uu + C * slack_sum;
        const double dual = alpha_sum - 0.5 * uu;

        if (opts.observer) opts.observer({sweep, pair_gap, primal, dual, updates});

        if (opts.shrinking) {
            // Bounded variables far from violating may sit out the next sweep.
            for (int i = 0; i < n; ++i) {
                const double neg_e = p.y[i] - s[i];
                const bool bounded_only_up = in_up(i) && !in_low(i);
                const bool bounded_only_low = in_low(i) && !in_up(i);
                active[i] = 1;
                if (bounded_only_up && neg_e < -last_pair_gap) active[i] = 0;
                if (bounded_only_low && neg_e > last_pair_gap) active[i] = 0;
            }
            last_pair_gap = std::max(pair_gap, opts.tol_pair);
        }

        const double rel_gap = (primal - dual) / std::max(1.0, std::abs(primal));
        if (pair_gap <= opts.tol_pair && rel_gap <= opts.gap_tol) {
            converged = true;
            break;
        }
        if (updates == 0) {
            // No movable pair left; the gap is as tight as this method gets.
            converged = pair_gap <= opts.tol_pair;
            break;
        }
    }

    SvmSolution sol;
    sol.alpha = std::move(alpha);
    sol.v = std::move(u);
    sol.b = detail::kkt_bias(sol.alpha, p.y, s, C, &pair_gap);
    sol.xi.resize(n);
    for (int i = 0; i < n; ++i) sol.xi[i] = std::max(0.0, 1.0 - p.y[i] * (s[i] + sol.b));
    const auto [primal, dual] = svm_objectives(p, sol);
    sol.primal_objective = primal;
    sol.dual_objective = dual;
    sol.sweeps = sweep;
    sol.converged = converged;
    return sol;
}

}  // namespace fsvm
