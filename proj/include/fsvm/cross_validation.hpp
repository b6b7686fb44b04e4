#pragma once

// Experiment harness: stratified k-fold assignment, one-vs-rest reduction
// for multi-class data, hyperparameter grid search over identical folds, and
// machine-readable cross-validation reports with radius diagnostics.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <variant>

#include "fsvm/dataset.hpp"
#include "fsvm/kernel.hpp"
#include "fsvm/radius.hpp"
#include "fsvm/svm_solver.hpp"
#include "fsvm/train.hpp"

namespace fsvm {

enum class ModelKind { svm, fsvm, kernel_svm, kernel_fsvm };

inline const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::svm: return "svm";
        case ModelKind::fsvm: return "fsvm";
        case ModelKind::kernel_svm: return "kernel-svm";
        case ModelKind::kernel_fsvm: return "kernel-fsvm";
    }
    return "?";
}

inline std::optional<ModelKind> model_kind_from_name(const std::string& s) {
    if (s == "svm") return ModelKind::svm;
    if (s == "fsvm") return ModelKind::fsvm;
    if (s == "kernel-svm") return ModelKind::kernel_svm;
    if (s == "kernel-fsvm") return ModelKind::kernel_fsvm;
    return std::nullopt;
}

inline bool is_kernel_kind(ModelKind k) {
    return k == ModelKind::kernel_svm || k == ModelKind::kernel_fsvm;
}

/// One grid point. Fields that a model kind does not use stay unset.
struct HyperPoint {
    double C = 1.0;
    std::optional<double> rho;
    std::optional<double> gamma;
    std::optional<int> d;  // kernel PCA dimension
};

/// Stratified fold assignment: per-class counts across folds differ by at
/// most one; deterministic under a fixed seed.
inline std::vector<int> stratified_kfold(const std::vector<long>& y, int k, std::uint32_t seed) {
    const int n = static_cast<int>(y.size());
    if (k < 2) throw input_error("stratified_kfold: need k >= 2");
    if (k > n) throw input_error("stratified_kfold: k exceeds sample count");

    std::map<long, std::vector<int>> by_class;
    for (int i = 0; i < n; ++i) by_class[y[i]].push_back(i);

    Rng rng(seed);
    std::vector<int> fold(n, -1);
    int offset = 0;
    for (auto& [cls, members] : by_class) {
        (void)cls;
        rng.shuffle(members);
        for (size_t j = 0; j < members.size(); ++j)
            fold[members[j]] = static_cast<int>((offset + j) % k);
        offset += static_cast<int>(members.size());
    }
    return fold;
}

/// A trained binary decision function, linear or kernelized.
struct BinaryModel {
    std::variant<FsvmModel, KernelFsvmModel> model;
    TrainingTrace trace;

    double score(const Vector& x) const {
        if (const auto* lin = std::get_if<FsvmModel>(&model)) return predict(*lin, x).score;
        return std::get<KernelFsvmModel>(model).predict(x).score;
    }
};

/// Trains one binary model at a hyperparameter point.
struct BinaryTrainer {
    ModelKind kind = ModelKind::svm;
    HyperPoint point;
    FsvmHyperParams base;  // tolerances / iteration caps / solver options

    FsvmHyperParams hyper_for_point() const {
        FsvmHyperParams h = base;
        h.C = point.C;
        h.rho = point.rho.value_or(0.0);
        return h;
    }

    BinaryModel train(const Matrix& x, const Vector& y) const {
        BinaryModel out;
        const FsvmHyperParams h = hyper_for_point();
        switch (kind) {
            case ModelKind::svm: {
                LinearSvmProblem p{x, y, h.C};
                SvmSolution sol = solve_linear_svm(p, std::nullopt, h.solver);
                FsvmModel m;
                m.M = SpdMatrix::identity(x.cols, h.eps_pd);
                m.w = sol.v;
                m.b = sol.b;
                m.centroid = compute_scatter(x).second;
                m.hyper = h;
                TrainingTrace tr;
                tr.converged = sol.converged;
                tr.stop_reason = "svm solve";
                TrainingTrace::OuterRecord rec;
                rec.objective = sol.primal_objective;
                rec.margin_term = 0.5 * dot(sol.v, sol.v);
                rec.slack_term = sol.primal_objective - rec.margin_term;
                rec.svm_sweeps = sol.sweeps;
                tr.iterations.push_back(rec);
                out.model = std::move(m);
                out.trace = std::move(tr);
                return out;
            }
            case ModelKind::fsvm: {
                auto [m, tr] = train_fsvm(x, y, h);
                out.model = std::move(m);
                out.trace = std::move(tr);
                return out;
            }
            case ModelKind::kernel_svm:
            case ModelKind::kernel_fsvm: {
                const KernelSpec spec = KernelSpec::rbf(point.gamma.value_or(1.0));
                const int d = std::clamp(point.d.value_or(x.rows), 1, x.rows);
                if (kind == ModelKind::kernel_fsvm) {
                    auto [map, m, tr] = train_kernel_fsvm(x, y, spec, d, h);
                    out.model = KernelFsvmModel{std::move(map), std::move(m)};
                    out.trace = std::move(tr);
                    return out;
                }
                KernelPcaMap map = kernel_pca_fit(x, spec, d);
                LinearSvmProblem p{map.training_projections, y, h.C};
                SvmSolution sol = solve_linear_svm(p, std::nullopt, h.solver);
                FsvmModel m;
                m.M = SpdMatrix::identity(map.output_dim(), h.eps_pd);
                m.w = sol.v;
                m.b = sol.b;
                m.centroid = compute_scatter(map.training_projections).second;
                m.hyper = h;
                TrainingTrace tr;
                tr.converged = sol.converged;
                tr.stop_reason = "svm solve";
                out.model = KernelFsvmModel{std::move(map), std::move(m)};
                out.trace = std::move(tr);
                return out;
            }
        }
        throw input_error("BinaryTrainer: unknown model kind");
    }
};

/// One-vs-rest composite: one binary model per class (that class mapped to
/// +1); prediction is the argmax score, ties broken by smallest class id.
struct MultiClassModel {
    std::vector<long> classes;  // ascending
    std::vector<BinaryModel> binaries;
    Scaler scaler;

    long predict(const Vector& raw_x) const {
        const Vector x = scaler.apply(raw_x);
        long best_class = classes.front();
        double best_score = -std::numeric_limits<double>::infinity();
        for (size_t c = 0; c < classes.size(); ++c) {
            const double s = binaries[c].score(x);
            if (s > best_score) {
                best_score = s;
                best_class = classes[c];
            }
        }
        return best_class;
    }
};

template <typename TrainerFn>
inline MultiClassModel one_vs_rest_train(const Matrix& x, const std::vector<long>& y,
                                         TrainerFn&& trainer) {
    MultiClassModel out;
    {
        std::vector<long> cs(y);
        std::sort(cs.begin(), cs.end());
        cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
        out.classes = std::move(cs);
    }
    if (out.classes.size() < 2) throw degenerate_problem_error("one_vs_rest_train: need >= 2 classes");
    out.scaler = Scaler::identity(x.cols);
    for (long cls : out.classes) {
        Vector y_bin(y.size());
        for (size_t i = 0; i < y.size(); ++i) y_bin[i] = (y[i] == cls) ? 1.0 : -1.0;
        out.binaries.push_back(trainer(x, y_bin));
    }
    return out;
}

struct ExperimentConfig {
    ModelKind model = ModelKind::svm;
    std::vector<double> c_grid;
    std::vector<double> rho_grid;
    std::vector<double> gamma_grid;
    std::vector<int> d_grid;  // resolved against the dataset if empty
    int folds = 10;
    int repeats = 1;
    std::uint32_t seed = 42;
    bool standardize = true;
    FsvmHyperParams base;

    void validate() const {
        if (folds < 2) throw input_error("ExperimentConfig: folds must be >= 2");
        if (repeats < 1) throw input_error("ExperimentConfig: repeats must be >= 1");
    }
};

inline std::vector<double> default_c_grid() {
    std::vector<double> g;
    for (int e = -5; e <= 15; e += 2) g.push_back(std::ldexp(1.0, e));
    return g;
}

inline std::vector<double> default_rho_grid() {
    std::vector<double> g{0.0};
    for (int e = -4; e <= 1; ++e) g.push_back(std::pow(10.0, e));
    return g;
}

inline std::vector<double> default_gamma_grid() {
    std::vector<double> g;
    for (int e = -15; e <= 3; e += 2) g.push_back(std::ldexp(1.0, e));
    return g;
}

inline std::vector<int> default_d_grid(int n, int dim, ModelKind kind) {
    // Kernel PCA dimension is bounded by the sample count; linear feature
    // dimension caps the useful rank otherwise.
    const int full = is_kernel_kind(kind) ? n : std::min(n, dim);
    std::vector<int> g{static_cast<int>(std::ceil(0.25 * full)),
                       static_cast<int>(std::ceil(0.5 * full)),
                       static_cast<int>(std::ceil(0.75 * full)), full};
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    std::vector<int> out;
    for (int v : g)
        if (v >= 1) out.push_back(v);
    return out;
}

struct FoldResult {
    int fold = 0;
    double accuracy_percent = 0.0;
    int n_train = 0;
    int n_test = 0;
    double train_seconds = 0.0;
    Scaler scaler;  // the statistics actually used (leakage checks)
    std::vector<TrainingTrace> traces;  // one per binary model
    MultiClassModel model;
};

namespace detail_cv {

inline void split_dataset(const Dataset& ds, const std::vector<int>& fold_of, int fold,
                          Matrix& x_train, std::vector<long>& y_train, Matrix& x_test,
                          std::vector<long>& y_test) {
    int n_test = 0;
    for (int f : fold_of)
        if (f == fold) ++n_test;
    const int n_train = ds.n() - n_test;
    x_train = Matrix(n_train, ds.d());
    x_test = Matrix(n_test, ds.d());
    y_train.clear();
    y_test.clear();
    int it = 0, iv = 0;
    for (int i = 0; i < ds.n(); ++i) {
        if (fold_of[i] == fold) {
            for (int j = 0; j < ds.d(); ++j) x_test(iv, j) = ds.X(i, j);
            y_test.push_back(ds.y[i]);
            ++iv;
        } else {
            for (int j = 0; j < ds.d(); ++j) x_train(it, j) = ds.X(i, j);
            y_train.push_back(ds.y[i]);
            ++it;
        }
    }
}

}  // namespace detail_cv

/// Train on all folds but `fold`, evaluate on `fold`. Standardization and any
/// kernel PCA fit see training rows only.
inline FoldResult run_fold(const Dataset& ds, const std::vector<int>& fold_of, int fold,
                           const ExperimentConfig& config, const HyperPoint& point) {
    Matrix x_train, x_test;
    std::vector<long> y_train, y_test;
    detail_cv::split_dataset(ds, fold_of, fold, x_train, y_train, x_test, y_test);

    FoldResult res;
    res.fold = fold;
    res.n_train = x_train.rows;
    res.n_test = x_test.rows;

    res.scaler = Scaler::identity(ds.d());
    if (config.standardize) res.scaler = standardize(x_train);

    HyperPoint local = point;
    if (local.d) local.d = std::min(*local.d, x_train.rows);
    BinaryTrainer trainer{config.model, local, config.base};

    const auto t0 = std::chrono::steady_clock::now();
    MultiClassModel model = one_vs_rest_train(
        x_train, y_train, [&](const Matrix& x, const Vector& y) { return trainer.train(x, y); });
    res.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    model.scaler = res.scaler;
    for (const BinaryModel& b : model.binaries) res.traces.push_back(b.trace);

    int correct = 0;
    Vector x(ds.d());
    for (int i = 0; i < x_test.rows; ++i) {
        // x_test is already standardized; bypass the model's scaler.
        x.assign(x_test.row(i), x_test.row(i) + ds.d());
        long best_class = model.classes.front();
        double best_score = -std::numeric_limits<double>::infinity();
        for (size_t c = 0; c < model.classes.size(); ++c) {
            const double s = model.binaries[c].score(x);
            if (s > best_score) {
                best_score = s;
                best_class = model.classes[c];
            }
        }
        if (best_class == y_test[i]) ++correct;
    }
    res.accuracy_percent = x_test.rows > 0 ? 100.0 * correct / x_test.rows : 0.0;
    res.model = std::move(model);
    return res;
}

struct GridEntry {
    HyperPoint point;
    double mean_accuracy_percent = 0.0;
};

struct RadiusDiagnostics {
    // Per binary model of the final full-data fit, in the learned metric.
    struct PerClass {
        long cls = 0;
        double radius = 0.0;            // exact MEB radius of transformed training data
        double radius_centroid = 0.0;   // R_bar
        double radius_pairwise = 0.0;   // R_p
        double margin_norm = 0.0;       // sqrt(w^T M^{-1} w)
        double radius_margin_product = 0.0;
    };
    std::vector<PerClass> per_class;
    double identity_radius = 0.0;  // MEB radius of the (standardized) inputs
};

struct CvReport {
    int format_version = 1;
    std::string dataset;
    std::string model;
    int folds = 0;
    int repeats = 0;
    std::uint32_t seed = 0;
    bool standardized = true;
    HyperPoint selected;
    std::vector<double> fold_accuracies;  // percent, repeats x folds entries
    double mean_accuracy = 0.0;           // percent
    double std_accuracy = 0.0;            // percent, population
    std::vector<double> fold_train_seconds;
    std::vector<std::vector<std::vector<double>>> objective_traces;  // [fold][class][iter]
    std::vector<GridEntry> grid;
    RadiusDiagnostics radius;
    double total_seconds = 0.0;
};

namespace detail_cv {

inline std::vector<HyperPoint> enumerate_grid(const Dataset& ds, const ExperimentConfig& cfg) {
    auto sorted_unique = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    const std::vector<double> cs = sorted_unique(cfg.c_grid.empty() ? default_c_grid() : cfg.c_grid);
    const bool uses_rho = cfg.model == ModelKind::fsvm || cfg.model == ModelKind::kernel_fsvm;
    const bool uses_kernel = is_kernel_kind(cfg.model);
    const std::vector<double> rhos =
        uses_rho ? sorted_unique(cfg.rho_grid.empty() ? default_rho_grid() : cfg.rho_grid)
                 : std::vector<double>{0.0};
    const std::vector<double> gammas =
        uses_kernel ? sorted_unique(cfg.gamma_grid.empty() ? default_gamma_grid() : cfg.gamma_grid)
                    : std::vector<double>{0.0};
    std::vector<int> ds_grid;
    if (uses_kernel) {
        ds_grid = cfg.d_grid.empty() ? default_d_grid(ds.n(), ds.d(), cfg.model) : cfg.d_grid;
        std::sort(ds_grid.begin(), ds_grid.end());
        ds_grid.erase(std::unique(ds_grid.begin(), ds_grid.end()), ds_grid.end());
    } else {
        ds_grid = {0};
    }

    // Ascending nested order (C, rho, gamma, d): with strictly-better
    // selection this realizes the smallest-value tie-breaking rule.
    std::vector<HyperPoint> points;
    for (double c : cs)
        for (double rho : rhos)
            for (double gamma : gammas)
                for (int d : ds_grid) {
                    HyperPoint p;
                    p.C = c;
                    if (uses_rho) p.rho = rho;
                    if (uses_kernel) {
                        p.gamma = gamma;
                        p.d = d;
                    }
                    points.push_back(p);
                }
    return points;
}

inline RadiusDiagnostics radius_diagnostics(const Dataset& ds, const ExperimentConfig& cfg,
                                            const MultiClassModel& model) {
    RadiusDiagnostics out;
    Matrix x = ds.X;
    model.scaler.apply(x);

    out.identity_radius = meb_exact(PointCloud{x}).radius;
    for (size_t c = 0; c < model.classes.size(); ++c) {
        RadiusDiagnostics::PerClass entry;
        entry.cls = model.classes[c];
        const BinaryModel& bin = model.binaries[c];
        const FsvmModel* lin = std::get_if<FsvmModel>(&bin.model);
        Matrix feats = x;
        if (const auto* km = std::get_if<KernelFsvmModel>(&bin.model)) {
            feats = Matrix(x.rows, km->map.output_dim());
            Vector xi(x.cols);
            for (int i = 0; i < x.rows; ++i) {
                xi.assign(x.row(i), x.row(i) + x.cols);
                Vector f = kernel_pca_project(km->map, xi);
                for (int j = 0; j < km->map.output_dim(); ++j) feats(i, j) = f[j];
            }
            lin = &km->linear;
        }
        Matrix transformed = transform_samples(lin->M, feats);
        PointCloud cloud{transformed};
        entry.radius = meb_exact(cloud).radius;
        entry.radius_centroid = radius_centroid(cloud);
        entry.radius_pairwise = radius_pairwise(cloud);
        entry.margin_norm = std::sqrt(std::max(0.0, inverse_quadratic_form(lin->M, lin->w)));
        entry.radius_margin_product = entry.radius * entry.margin_norm;
        out.per_class.push_back(entry);
    }
    (void)cfg;
    return out;
}

}  // namespace detail_cv

/// Full protocol: evaluate every grid point on identical folds, pick the
/// best mean accuracy (ties to the smallest hyperparameters), re-run the
/// selected point to collect traces and timings, and fit a final full-data
/// model for the radius diagnostics.
inline std::pair<HyperPoint, CvReport> grid_search_cv(const Dataset& ds,
                                                      const ExperimentConfig& config) {
    config.validate();
    if (config.folds > ds.n()) throw input_error("grid_search_cv: folds exceed sample count");
    const auto t_total = std::chrono::steady_clock::now();

    // Fold assignments per repeat, shared by every grid point.
    std::vector<std::vector<int>> folds_per_repeat;
    for (int r = 0; r < config.repeats; ++r)
        folds_per_repeat.push_back(stratified_kfold(ds.y, config.folds, config.seed + static_cast<std::uint32_t>(r)));

    const std::vector<HyperPoint> points = detail_cv::enumerate_grid(ds, config);

    CvReport report;
    report.dataset = ds.name;
    report.model = model_kind_name(config.model);
    report.folds = config.folds;
    report.repeats = config.repeats;
    report.seed = config.seed;
    report.standardized = config.standardize;

    HyperPoint best;
    double best_mean = -1.0;
    for (const HyperPoint& point : points) {
        double acc_sum = 0.0;
        int count = 0;
        for (int r = 0; r < config.repeats; ++r)
            for (int f = 0; f < config.folds; ++f) {
                FoldResult fr = run_fold(ds, folds_per_repeat[r], f, config, point);
                acc_sum += fr.accuracy_percent;
                ++count;
            }
        const double mean = acc_sum / count;
        report.grid.push_back({point, mean});
        if (mean > best_mean) {
            best_mean = mean;
            best = point;
        }
    }

    // Re-run the selected point for per-fold artifacts (deterministic, so the
    // accuracies match the grid pass).
    report.selected = best;
    for (int r = 0; r < config.repeats; ++r)
        for (int f = 0; f < config.folds; ++f) {
            FoldResult fr = run_fold(ds, folds_per_repeat[r], f, config, best);
            report.fold_accuracies.push_back(fr.accuracy_percent);
            report.fold_train_seconds.push_back(fr.train_seconds);
            std::vector<std::vector<double>> fold_traces;
            for (const TrainingTrace& tr : fr.traces) {
                std::vector<double> objs;
                for (const auto& rec : tr.iterations) objs.push_back(rec.objective);
                fold_traces.push_back(std::move(objs));
            }
            report.objective_traces.push_back(std::move(fold_traces));
        }

    double mean = 0.0;
    for (double a : report.fold_accuracies) mean += a;
    mean /= static_cast<double>(report.fold_accuracies.size());
    double var = 0.0;
    for (double a : report.fold_accuracies) var += (a - mean) * (a - mean);
    var /= static_cast<double>(report.fold_accuracies.size());
    report.mean_accuracy = mean;
    report.std_accuracy = std::sqrt(var);

    // Final full-data fit at the selected point drives the radius diagnostics.
    {
        Dataset full = ds;
        Scaler scaler = Scaler::identity(full.d());
        if (config.standardize) scaler = standardize(full.X);
        HyperPoint local = best;
        if (local.d) local.d = std::min(*local.d, full.n());
        BinaryTrainer trainer{config.model, local, config.base};
        MultiClassModel final_model = one_vs_rest_train(
            full.X, full.y, [&](const Matrix& x, const Vector& y) { return trainer.train(x, y); });
        final_model.scaler = Scaler::identity(full.d());  // full.X already standardized
        Dataset for_diag = full;
        report.radius = detail_cv::radius_diagnostics(for_diag, config, final_model);
        final_model.scaler = scaler;
    }

    report.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_total).count();
    return {best, report};
}

/// Train a deployable model on the full dataset at a fixed point.
inline MultiClassModel train_full(const Dataset& ds, const ExperimentConfig& config,
                                  const HyperPoint& point) {
    Dataset full = ds;
    Scaler scaler = Scaler::identity(full.d());
    if (config.standardize) scaler = standardize(full.X);
    HyperPoint local = point;
    if (local.d) local.d = std::min(*local.d, full.n());
    BinaryTrainer trainer{config.model, local, config.base};
    MultiClassModel model = one_vs_rest_train(
        full.X, full.y, [&](const Matrix& x, const Vector& y) { return trainer.train(x, y); });
    model.scaler = scaler;
    return model;
}

}  // namespace fsvm
