// fsvm: train/predict/cross-validate/benchmark the radius-margin SVM with a
// learned full feature transformation, plus enclosing-ball bound reports.
//
// Exit codes: 0 success, 2 input/parse error, 3 degenerate problem.

#include <iostream>

#include "CLI11.hpp"

#include "fsvm/bench.hpp"
#include "fsvm/model_io.hpp"

namespace {

using namespace fsvm;

struct CommonDataArgs {
    std::string data_path;
    std::string format = "libsvm";
    std::string label_col = "label";

    void attach(CLI::App* cmd, bool required = true) {
        auto* opt = cmd->add_option("--data", data_path, "input data file");
        if (required) opt->required();
        cmd->add_option("--format", format, "input format")->check(CLI::IsMember({"libsvm", "csv"}));
        cmd->add_option("--label-col", label_col, "label column name (csv)");
    }

    Dataset load() const {
        DatasetRef ref;
        ref.path = data_path;
        ref.format = format;
        ref.label_col = label_col;
        return load_dataset(ref);
    }
};

struct HyperArgs {
    std::string model = "fsvm";
    double C = 1.0;
    double rho = 0.1;
    double gamma = 1.0;
    int kpca_dim = 0;  // 0: full
    std::uint32_t seed = 42;
    bool no_standardize = false;
    int max_outer = 50;

    void attach(CLI::App* cmd) {
        cmd->add_option("--model", model, "model kind")
            ->check(CLI::IsMember({"svm", "fsvm", "kernel-svm", "kernel-fsvm"}));
        cmd->add_option("--C", C, "slack tradeoff");
        cmd->add_option("--rho", rho, "radius regularizer (fsvm models)");
        cmd->add_option("--gamma", gamma, "rbf kernel width (kernel models)");
        cmd->add_option("--kpca-dim", kpca_dim, "kernel PCA dimension, 0 = full");
        cmd->add_option("--seed", seed, "random seed");
        cmd->add_option("--max-outer", max_outer, "outer iteration cap");
        cmd->add_flag("--no-standardize", no_standardize, "skip z-score standardization");
    }

    ModelKind kind() const { return *model_kind_from_name(model); }

    HyperPoint point(const Dataset& ds) const {
        HyperPoint p;
        p.C = C;
        if (kind() == ModelKind::fsvm || kind() == ModelKind::kernel_fsvm) p.rho = rho;
        if (is_kernel_kind(kind())) {
            p.gamma = gamma;
            p.d = kpca_dim > 0 ? kpca_dim : ds.n();
        }
        return p;
    }

    ExperimentConfig config() const {
        ExperimentConfig cfg;
        cfg.model = kind();
        cfg.seed = seed;
        cfg.standardize = !no_standardize;
        cfg.base.solver.seed = seed;
        cfg.base.max_outer = max_outer;
        return cfg;
    }
};

int cmd_train(const CommonDataArgs& data, const HyperArgs& hyper, const std::string& out_path) {
    const Dataset ds = data.load();
    const ExperimentConfig cfg = hyper.config();
    MultiClassModel model = train_full(ds, cfg, hyper.point(ds));
    write_json_file(to_json(model), out_path);

    int correct = 0;
    Vector x(ds.d());
    for (int i = 0; i < ds.n(); ++i) {
        x.assign(ds.X.row(i), ds.X.row(i) + ds.d());
        if (model.predict(x) == ds.y[i]) ++correct;
    }
    std::cout << "trained " << model_kind_name(cfg.model) << " on " << ds.n() << " samples, "
              << ds.d() << " features; training accuracy " << 100.0 * correct / ds.n()
              << "%; model written to " << out_path << "\n";
    return 0;
}

int cmd_predict(const CommonDataArgs& data, const std::string& model_path, const std::string& out_path) {
    const Dataset ds = data.load();
    const MultiClassModel model = multiclass_model_from_json(read_json_file(model_path));

    json preds = json::array();
    int correct = 0;
    Vector x(ds.d());
    for (int i = 0; i < ds.n(); ++i) {
        x.assign(ds.X.row(i), ds.X.row(i) + ds.d());
        const long label = model.predict(x);
        preds.push_back(label);
        if (label == ds.y[i]) ++correct;
    }
    const double acc = 100.0 * correct / ds.n();
    json out{{"n", ds.n()}, {"predictions", preds}, {"accuracy", acc}};
    if (!out_path.empty()) write_json_file(out, out_path);
    else std::cout << out.dump(2) << "\n";
    if (!out_path.empty()) std::cout << "accuracy " << acc << "% on " << ds.n() << " samples\n";
    return 0;
}

int cmd_cv(const CommonDataArgs& data, const HyperArgs& hyper, int folds, int repeats,
           const std::string& out_path) {
    const Dataset ds = data.load();
    ExperimentConfig cfg = hyper.config();
    cfg.folds = folds;
    cfg.repeats = repeats;
    const HyperPoint p = hyper.point(ds);
    cfg.c_grid = {p.C};
    cfg.rho_grid = p.rho ? std::vector<double>{*p.rho} : std::vector<double>{};
    cfg.gamma_grid = p.gamma ? std::vector<double>{*p.gamma} : std::vector<double>{};
    cfg.d_grid = p.d ? std::vector<int>{*p.d} : std::vector<int>{};

    auto [best, report] = grid_search_cv(ds, cfg);
    (void)best;
    if (!out_path.empty()) write_json_file(to_json(report), out_path);
    std::cout << "cv: " << ds.name << " / " << report.model << ": mean accuracy "
              << report.mean_accuracy << "% +- " << report.std_accuracy << "% over "
              << report.fold_accuracies.size() << " folds\n";
    return 0;
}

BenchConfig bench_config_from_json(const json& j) {
    BenchConfig cfg;
    cfg.models.clear();
    for (const auto& m : j.value("models", std::vector<std::string>{"svm", "fsvm"})) {
        const auto kind = model_kind_from_name(m);
        if (!kind) throw parse_error("config: unknown model '" + m + "'");
        cfg.models.push_back(*kind);
    }
    cfg.base.folds = j.value("folds", 10);
    cfg.base.repeats = j.value("repeats", 1);
    cfg.base.seed = j.value("seed", 42u);
    cfg.base.standardize = j.value("standardize", true);
    if (j.contains("grids")) {
        const json& g = j.at("grids");
        if (g.contains("C")) cfg.base.c_grid = g.at("C").get<std::vector<double>>();
        if (g.contains("rho")) cfg.base.rho_grid = g.at("rho").get<std::vector<double>>();
        if (g.contains("gamma")) cfg.base.gamma_grid = g.at("gamma").get<std::vector<double>>();
        if (g.contains("d")) cfg.base.d_grid = g.at("d").get<std::vector<int>>();
    }
    if (j.contains("trainer")) {
        const FsvmHyperParams defaults;
        FsvmHyperParams h = hyper_from_json(j.at("trainer"));
        h.C = defaults.C;  // grid-controlled
        h.rho = defaults.rho;
        cfg.base.base = h;
    }
    cfg.base.base.solver.seed = cfg.base.seed;
    for (const auto& d : j.value("datasets", json::array())) {
        DatasetRef ref;
        ref.path = d.at("path").get<std::string>();
        ref.name = d.value("name", std::string());
        ref.format = d.value("format", std::string("libsvm"));
        ref.label_col = d.value("label_col", std::string("label"));
        cfg.datasets.push_back(ref);
    }
    return cfg;
}

int cmd_bench(const std::string& config_path, const std::vector<std::string>& data_paths,
              const std::string& out_dir) {
    BenchConfig cfg;
    if (!config_path.empty()) cfg = bench_config_from_json(read_json_file(config_path));
    for (const std::string& p : data_paths) {
        DatasetRef ref;
        ref.path = p;
        cfg.datasets.push_back(ref);
    }
    const std::vector<BenchResult> results = run_experiment(cfg, out_dir);
    print_reference_comparison(results, std::cout);
    std::cout << "reports written to " << out_dir << "\n";
    return 0;
}

int cmd_verify_bounds(const std::string& data_path, const std::string& out_path) {
    const Matrix pts = load_points_csv(data_path);
    const PointCloud cloud{pts};
    const BoundReport rep = verify_bounds(cloud);
    const json j{{"n", pts.rows},
                 {"d", pts.cols},
                 {"radius", rep.radius},
                 {"radius_centroid", rep.radius_centroid},
                 {"radius_pairwise", rep.radius_pairwise},
                 {"bounds",
                  json{{"half_centroid_le_radius", rep.half_centroid_le_radius},
                       {"radius_le_centroid", rep.radius_le_centroid},
                       {"centroid_le_pairwise", rep.centroid_le_pairwise},
                       {"pairwise_le_twice_radius", rep.pairwise_le_twice_radius}}},
                 {"all_hold", rep.all_hold}};
    if (!out_path.empty()) write_json_file(j, out_path);
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"F-SVM: joint feature-transformation and max-margin learning"};
    app.require_subcommand(1);

    CommonDataArgs train_data, predict_data, cv_data;
    HyperArgs train_hyper, cv_hyper;
    std::string train_out = "model.json";
    std::string predict_model, predict_out;
    std::string cv_out;
    int cv_folds = 10, cv_repeats = 1;
    std::string bench_config, bench_out = "reports";
    std::vector<std::string> bench_data;
    std::string bounds_data, bounds_out;

    CLI::App* train = app.add_subcommand("train", "fit a model on a full dataset");
    train_data.attach(train);
    train_hyper.attach(train);
    train->add_option("--out", train_out, "output model file");

    CLI::App* predict = app.add_subcommand("predict", "apply a trained model");
    predict_data.attach(predict);
    predict->add_option("--model-file", predict_model, "trained model document")->required();
    predict->add_option("--out", predict_out, "write predictions JSON here");

    CLI::App* cv = app.add_subcommand("cv", "k-fold cross-validation at fixed hyperparameters");
    cv_data.attach(cv);
    cv_hyper.attach(cv);
    cv->add_option("--folds", cv_folds, "number of folds");
    cv->add_option("--repeats", cv_repeats, "number of shuffled repeats");
    cv->add_option("--out", cv_out, "write report JSON here");

    CLI::App* bench = app.add_subcommand("bench", "grid-search benchmark over datasets");
    bench->add_option("--config", bench_config, "benchmark config JSON");
    bench->add_option("--data", bench_data, "dataset file(s) (libsvm format)");
    bench->add_option("--out", bench_out, "report output directory");

    CLI::App* bounds = app.add_subcommand("verify-bounds", "enclosing-ball bound report for a point file");
    bounds->add_option("--data", bounds_data, "points CSV file")->required();
    bounds->add_option("--out", bounds_out, "write report JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*train) return cmd_train(train_data, train_hyper, train_out);
        if (*predict) return cmd_predict(predict_data, predict_model, predict_out);
        if (*cv) return cmd_cv(cv_data, cv_hyper, cv_folds, cv_repeats, cv_out);
        if (*bench) return cmd_bench(bench_config, bench_data, bench_out);
        if (*bounds) return cmd_verify_bounds(bounds_data, bounds_out);
    } catch (const fsvm::degenerate_problem_error& e) {
        std::cerr << "fsvm: degenerate problem: " << e.what() << "\n";
        return 3;
    } catch (const fsvm::parse_error& e) {
        std::cerr << "fsvm: " << e.what() << "\n";
        return 2;
    } catch (const fsvm::input_error& e) {
        std::cerr << "fsvm: " << e.what() << "\n";
        return 2;
    } catch (const fsvm::json::exception& e) {
        std::cerr << "fsvm: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
