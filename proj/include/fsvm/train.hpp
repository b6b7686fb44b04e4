#pragma once

// F-SVM: joint learning of a full linear feature transformation M (an SPD
// metric) and a max-margin classifier (w, b) by minimizing
//
//   1/2 w^T M^{-1} w + C sum_i xi_i + rho tr(M S),    M > 0,
//
// where S is the scatter matrix of the training samples and the trace term
// is a convex surrogate for the squared radius of the enclosing ball in the
// transformed space. Training alternates between an exact SVM solve in
// transformed coordinates and projected gradient descent on M.

#include <chrono>
#include <cmath>
#include <optional>

#include "fsvm/core.hpp"
#include "fsvm/svm_solver.hpp"
#include "fsvm/symmat.hpp"

namespace fsvm {

struct FsvmHyperParams {
    double C = 1.0;           // slack tradeoff
    double rho = 0.0;         // radius (trace) regularizer
    double eps_pd = 1e-8;     // eigenvalue floor keeping M invertible
    double eps_eig = 1e-6;    // relative eigenvalue floor in the initializer
    double t0 = 1.0;          // initial gradient stepsize
    double beta = 0.5;        // stepsize decay on rejected steps
    int max_outer = 50;
    int max_inner = 50;
    double tol_outer = 1e-6;  // relative objective-change stop
    double tol_inner = 1e-8;  // relative objective-change stop, inner loop
    SvmSolverOptions solver;

    void validate() const {
        if (!(C > 0.0)) throw input_error("FsvmHyperParams: C must be > 0");
        if (rho < 0.0) throw input_error("FsvmHyperParams: rho must be >= 0");
        if (!(eps_pd > 0.0)) throw input_error("FsvmHyperParams: eps_pd must be > 0");
        if (!(eps_eig > 0.0)) throw input_error("FsvmHyperParams: eps_eig must be > 0");
        if (!(t0 > 0.0)) throw input_error("FsvmHyperParams: t0 must be > 0");
        if (!(beta > 0.0 && beta < 1.0)) throw input_error("FsvmHyperParams: beta must be in (0,1)");
        if (max_outer < 1 || max_inner < 1) throw input_error("FsvmHyperParams: iteration caps must be >= 1");
        if (!(tol_outer > 0.0) || !(tol_inner > 0.0)) throw input_error("FsvmHyperParams: tolerances must be > 0");
    }
};

struct FsvmModel {
    SpdMatrix M;       // learned metric
    Vector w;
    double b = 0.0;
    Vector centroid;   // training-sample mean
    FsvmHyperParams hyper;

    int dim() const { return M.dim(); }
};

struct ObjectiveParts {
    double margin = 0.0;  // 1/2 w^T M^{-1} w
    double slack = 0.0;   // C sum_i hinge_i
    double trace = 0.0;   // rho tr(M S)
    double total() const { return margin + slack + trace; }
};

struct TrainingTrace {
    struct OuterRecord {
        double objective = 0.0;
        double margin_term = 0.0;
        double slack_term = 0.0;
        double trace_term = 0.0;
        int inner_steps = 0;
        int svm_sweeps = 0;
        double wall_seconds = 0.0;
    };
    std::vector<OuterRecord> iterations;
    bool converged = false;
    std::string stop_reason;
};

/// Scatter matrix S = sum_i (x_i - mean)(x_i - mean)^T and the mean itself.
inline std::pair<SymmetricMatrix, Vector> compute_scatter(const Matrix& x) {
    if (x.rows < 1) throw input_error("compute_scatter: need at least one sample");
    const int n = x.rows, d = x.cols;
    Vector mean(d, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) mean[j] += x(i, j);
    for (double& m : mean) m /= n;

    SymmetricMatrix s = SymmetricMatrix::zeros(d);
    Vector centered(d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) centered[j] = x(i, j) - mean[j];
        s.add_outer(centered, 1.0);
    }
    return {std::move(s), std::move(mean)};
}

/// Semi-whitening initializer: M0 = sqrt(tau) U diag(max(lambda, floor)^(-1/2)) U^T
/// where S = U diag(lambda) U^T. `eps_eig` here is the absolute eigenvalue floor.
inline SpdMatrix init_m(const SymmetricMatrix& s, double tau, double eps_eig, double eps_pd = 1e-12) {
    if (!(tau > 0.0)) throw input_error("init_m: tau must be > 0");
    if (!(eps_eig > 0.0)) throw input_error("init_m: eps_eig must be > 0");
    EigenDecomposition eig = sym_eig(s);
    const double root_tau = std::sqrt(tau);
    for (double& lam : eig.values) lam = root_tau / std::sqrt(std::max(lam, eps_eig));
    // The map lambda -> lambda^(-1/2) reverses the ordering.
    std::reverse(eig.values.begin(), eig.values.end());
    const int n = s.dim;
    Matrix rev(n, n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) rev(i, k) = eig.vectors(i, n - 1 - k);
    eig.vectors = std::move(rev);
    return SpdMatrix::from_eigensystem(std::move(eig), eps_pd);
}

/// z_i = Sigma^{1/2} V^T x_i with M = V Sigma V^T, so <z_i, z_j> = x_i^T M x_j.
inline Matrix transform_samples(const SpdMatrix& m, const Matrix& x) {
    if (x.cols != m.dim()) throw input_error("transform_samples: dimension mismatch");
    const int n = x.rows, d = x.cols;
    Matrix z(n, d);
    Vector root(d);
    for (int k = 0; k < d; ++k) root[k] = std::sqrt(m.eig.values[k]);
    for (int i = 0; i < n; ++i) {
        const double* xi = x.row(i);
        double* zi = z.row(i);
        for (int k = 0; k < d; ++k) {
            double proj = 0.0;
            for (int j = 0; j < d; ++j) proj += m.eig.vectors(j, k) * xi[j];
            zi[k] = root[k] * proj;
        }
    }
    return z;
}

/// Pull the transformed-space weights back: w = V Sigma^{1/2} v, which gives
/// w^T x = v^T z and w^T M^{-1} w = v^T v.
inline Vector recover_w(const SpdMatrix& m, const Vector& v) {
    if (static_cast<int>(v.size()) != m.dim()) throw input_error("recover_w: dimension mismatch");
    const int d = m.dim();
    Vector w(d, 0.0);
    for (int k = 0; k < d; ++k) {
        const double coef = std::sqrt(m.eig.values[k]) * v[k];
        for (int i = 0; i < d; ++i) w[i] += m.eig.vectors(i, k) * coef;
    }
    return w;
}

inline ObjectiveParts fsvm_objective_parts(const SpdMatrix& m, const Vector& w, double b,
                                           const Matrix& x, const Vector& y,
                                           const SymmetricMatrix& s, double C, double rho) {
    if (x.cols != m.dim() || static_cast<int>(w.size()) != m.dim())
        throw input_error("fsvm_objective: dimension mismatch");
    ObjectiveParts parts;
    parts.margin = 0.5 * inverse_quadratic_form(m, w);
    double hinge_sum = 0.0;
    for (int i = 0; i < x.rows; ++i) {
        const double margin = y[i] * (dot(x.row(i), w.data(), x.cols) + b);
        hinge_sum += std::max(0.0, 1.0 - margin);
    }
    parts.slack = C * hinge_sum;
    parts.trace = rho * trace_product(m.mat, s);
    return parts;
}

inline std::pair<double, ObjectiveParts> fsvm_objective(const FsvmModel& model, const Matrix& x,
                                                        const Vector& y, const SymmetricMatrix& s) {
    ObjectiveParts parts = fsvm_objective_parts(model.M, model.w, model.b, x, y, s,
                                                model.hyper.C, model.hyper.rho);
    return {parts.total(), parts};
}

/// Gradient of f(M) = 1/2 w^T M^{-1} w + rho tr(M S):
///   grad f = -1/2 M^{-1} w w^T M^{-1} + rho S,  symmetrized.
inline SymmetricMatrix grad_m(const SpdMatrix& m, const Vector& w, const SymmetricMatrix& s, double rho) {
    if (static_cast<int>(w.size()) != m.dim() || s.dim != m.dim())
        throw input_error("grad_m: dimension mismatch");
    const int d = m.dim();
    // q = M^{-1} w through the eigensystem.
    Vector q(d, 0.0);
    for (int k = 0; k < d; ++k) {
        double proj = 0.0;
        for (int i = 0; i < d; ++i) proj += m.eig.vectors(i, k) * w[i];
        const double coef = proj / m.eig.values[k];
        for (int i = 0; i < d; ++i) q[i] += m.eig.vectors(i, k) * coef;
    }
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = -0.5 * q[i] * q[j] + rho * s(i, j);
    return SymmetricMatrix(g);
}

namespace detail {
inline double m_subproblem_objective(const SpdMatrix& m, const Vector& w,
                                     const SymmetricMatrix& s, double rho) {
    return 0.5 * inverse_quadratic_form(m, w) + rho * trace_product(m.mat, s);
}
}  // namespace detail

/// Projected gradient descent on the M-subproblem with backtracking: steps
/// that would increase the objective are rejected and the stepsize decayed by
/// beta. Every accepted step is a strict descent step, so the outer objective
/// stays monotone.
inline SpdMatrix update_m(const SpdMatrix& m0, const Vector& w, const SymmetricMatrix& s,
                          const FsvmHyperParams& hyper, int* steps_taken = nullptr) {
    SpdMatrix m = m0;
    double f_cur = detail::m_subproblem_objective(m, w, s, hyper.rho);
    double t = -1.0;  // set from the first gradient's scale
    int accepted = 0;

    for (int step = 0; step < hyper.max_inner; ++step) {
        const SymmetricMatrix g = grad_m(m, w, s, hyper.rho);
        // Scale-invariant step cap: t0 = 1 means "move M by about its own
        // magnitude". The working stepsize may regrow up to this after the
        // backtracking of earlier steps; the margin term is needle-sharp near
        // the eigenvalue floor, so a collapsed t must not be permanent.
        const double t_cap = hyper.t0 * frobenius_norm(m.mat.m) /
                             std::max(frobenius_norm(g.m), 1e-300);
        t = (t < 0.0) ? t_cap : std::min(t / hyper.beta, t_cap);

        bool took_step = false;
        double f_new = f_cur;
        SpdMatrix candidate;
        while (t >= 1e-18 * t_cap) {
            SymmetricMatrix moved = m.mat;
            for (size_t i = 0; i < moved.m.data.size(); ++i) moved.m.data[i] -= t * g.m.data[i];
            candidate = psd_project(moved, hyper.eps_pd);
            f_new = detail::m_subproblem_objective(candidate, w, s, hyper.rho);
            if (f_new <= f_cur) {
                took_step = true;
                break;
            }
            t *= hyper.beta;
        }
        if (!took_step) break;

        const double rel_change = (f_cur - f_new) / std::max(1.0, std::abs(f_cur));
        m = std::move(candidate);
        f_cur = f_new;
        ++accepted;
        if (rel_change < hyper.tol_inner) break;
    }
    if (steps_taken) *steps_taken = accepted;
    return m;
}

struct TrainingData {
    const Matrix& x;
    const Vector& y;
};

/// Alternating minimization: initialize M by semi-whitening PCA, then repeat
/// [SVM solve in transformed coordinates, projected gradient descent on M]
/// until the objective or M stops moving. The SVM solve is warm-started from
/// the previous duals, which stay feasible across metric updates.
inline std::pair<FsvmModel, TrainingTrace> train_fsvm(const Matrix& x, const Vector& y,
                                                      const FsvmHyperParams& hyper,
                                                      const SpdMatrix* initial_m = nullptr) {
    hyper.validate();
    if (x.rows < 2) throw input_error("train_fsvm: need n >= 2");
    if (static_cast<int>(y.size()) != x.rows) throw input_error("train_fsvm: label count mismatch");
    if (!x.all_finite()) throw input_error("train_fsvm: non-finite features");
    {
        bool pos = false, neg = false;
        for (double yi : y) {
            if (yi == 1.0) pos = true;
            else if (yi == -1.0) neg = true;
            else throw input_error("train_fsvm: labels must be -1 or +1");
        }
        if (!pos || !neg) throw degenerate_problem_error("train_fsvm: single-class data");
    }

    auto [scatter, centroid] = compute_scatter(x);

    SpdMatrix m;
    if (initial_m) {
        if (initial_m->dim() != x.cols) throw input_error("train_fsvm: initial M dimension mismatch");
        m = *initial_m;
    } else {
        const double tau = hyper.rho > 0.0 ? hyper.rho : 1.0;
        const double lam_max = std::max(sym_eig(scatter).values.front(), 0.0);
        const double floor = std::max(hyper.eps_eig * lam_max, 1e-12);
        m = init_m(scatter, tau, floor, hyper.eps_pd);
    }

    TrainingTrace trace;
    Vector w;
    double b = 0.0;
    std::optional<SvmSolution> warm;
    double obj_prev = std::numeric_limits<double>::infinity();

    for (int k = 1; k <= hyper.max_outer; ++k) {
        const auto t_start = std::chrono::steady_clock::now();

        Matrix z = transform_samples(m, x);
        LinearSvmProblem problem{std::move(z), y, hyper.C};
        SvmSolution sol = solve_linear_svm(problem, warm, hyper.solver);

        const int solve_sweeps = sol.sweeps;
        Vector w_new = recover_w(m, sol.v);
        const double b_new = sol.b;
        ObjectiveParts parts_new =
            fsvm_objective_parts(m, w_new, b_new, x, y, scatter, hyper.C, hyper.rho);
        bool accepted_new = true;
        if (k > 1) {
            // The solver works to finite tolerance: if the previous classifier
            // is still better under the current metric, keep it.
            ObjectiveParts parts_old =
                fsvm_objective_parts(m, w, b, x, y, scatter, hyper.C, hyper.rho);
            if (parts_old.total() < parts_new.total()) {
                parts_new = parts_old;
                accepted_new = false;
            }
        }
        if (accepted_new) {
            w = std::move(w_new);
            b = b_new;
            warm = std::move(sol);
        }

        const double obj_w = parts_new.total();
        TrainingTrace::OuterRecord rec;
        rec.svm_sweeps = solve_sweeps;

        if (std::abs(obj_prev - obj_w) < hyper.tol_outer * std::max(1.0, std::abs(obj_prev))) {
            rec.objective = obj_w;
            rec.margin_term = parts_new.margin;
            rec.slack_term = parts_new.slack;
            rec.trace_term = parts_new.trace;
            rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
            trace.iterations.push_back(rec);
            trace.converged = true;
            trace.stop_reason = "objective change below tol_outer";
            break;
        }

        // With rho = 0 the metric subproblem has no finite minimizer (any
        // growth of M lowers the margin term without a counterweight), so
        // the metric stays at its semi-whitening initializer and training
        // reduces to the SVM solve in that fixed geometry.
        int inner_steps = 0;
        SpdMatrix m_next = hyper.rho > 0.0 ? update_m(m, w, scatter, hyper, &inner_steps) : m;

        double m_change = 0.0;
        for (size_t i = 0; i < m.mat.m.data.size(); ++i) {
            const double d = m_next.mat.m.data[i] - m.mat.m.data[i];
            m_change += d * d;
        }
        const double rel_m_change = std::sqrt(m_change) / std::max(1.0, frobenius_norm(m.mat.m));
        m = std::move(m_next);

        ObjectiveParts parts_m = fsvm_objective_parts(m, w, b, x, y, scatter, hyper.C, hyper.rho);
        rec.objective = parts_m.total();
        rec.margin_term = parts_m.margin;
        rec.slack_term = parts_m.slack;
        rec.trace_term = parts_m.trace;
        rec.inner_steps = inner_steps;
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        trace.iterations.push_back(rec);
        obj_prev = rec.objective;

        if (rel_m_change < 1e-6) {
            trace.converged = true;
            trace.stop_reason = "metric change below tolerance";
            break;
        }
    }
    if (!trace.converged) trace.stop_reason = "max_outer reached";

    FsvmModel model;
    model.M = std::move(m);
    model.w = std::move(w);
    model.b = b;
    model.centroid = std::move(centroid);
    model.hyper = hyper;
    return {std::move(model), std::move(trace)};
}

struct Prediction {
    int label = 1;       // -1 or +1; a score of exactly 0 maps to +1
    double score = 0.0;  // w^T x + b
};

inline Prediction predict(const FsvmModel& model, const Vector& x) {
    if (static_cast<int>(x.size()) != model.dim()) throw input_error("predict: dimension mismatch");
    Prediction p;
    p.score = dot(model.w, x) + model.b;
    p.label = p.score >= 0.0 ? 1 : -1;
    return p;
}

inline double decision_score(const FsvmModel& model, const double* x, int d) {
    if (d != model.dim()) throw input_error("predict: dimension mismatch");
    return dot(model.w.data(), x, d) + model.b;
}

}  // namespace fsvm
