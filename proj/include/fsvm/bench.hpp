#pragma once

// Benchmark orchestration: load datasets, run the grid-search CV protocol
// per dataset x model, emit one report document each, and print a
// side-by-side table against previously published UCI accuracies when a
// dataset name matches the reference roster.

#include <filesystem>
#include <iostream>

#include "fsvm/model_io.hpp"

namespace fsvm {

struct DatasetRef {
    std::string name;
    std::string path;
    std::string format = "libsvm";  // libsvm | csv
    std::string label_col = "label";
};

struct BenchConfig {
    std::vector<ModelKind> models{ModelKind::svm, ModelKind::fsvm};
    std::vector<DatasetRef> datasets;
    ExperimentConfig base;  // grids, folds, seed, standardization, tolerances
};

/// Previously reported mean 10-fold accuracies (percent) on the UCI suite,
/// used purely for an informational side-by-side printout.
struct ReferenceAccuracy {
    const char* dataset;
    double linear_svm;
    double linear_fsvm;
    double kernel_svm;
    double kernel_fsvm;
};

inline const std::vector<ReferenceAccuracy>& reference_uci_accuracies() {
    static const std::vector<ReferenceAccuracy> table = {
        {"breast-cancer", 71.40, 71.68, 73.74, 73.95},
        {"diabetes", 76.57, 77.00, 76.83, 78.84},
        {"solar-flare", 67.66, 67.69, 67.64, 67.66},
        {"german", 75.58, 76.04, 76.36, 76.90},
        {"heart", 83.61, 84.02, 83.43, 84.25},
        {"image", 83.77, 84.32, 97.14, 96.93},
        {"ringnorm", 75.41, 77.05, 98.41, 98.58},
        {"splice", 84.54, 84.81, 90.16, 90.55},
        {"thyroid", 89.76, 86.81, 95.91, 96.13},
        {"twonorm", 96.92, 97.08, 97.59, 97.79},
        {"waveform", 86.95, 86.76, 89.75, 90.95},
    };
    return table;
}

inline std::string canonical_dataset_name(std::string name) {
    // Strip directory and extension, lowercase, spaces/underscores to dashes.
    const auto slash = name.find_last_of("/\\");
    if (slash != std::string::npos) name = name.substr(slash + 1);
    const auto dot = name.find('.');
    if (dot != std::string::npos) name = name.substr(0, dot);
    for (char& c : name) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (c == '_' || c == ' ') c = '-';
    }
    return name;
}

inline const ReferenceAccuracy* find_reference(const std::string& dataset_name) {
    const std::string canon = canonical_dataset_name(dataset_name);
    for (const auto& ref : reference_uci_accuracies())
        if (canon == ref.dataset) return &ref;
    return nullptr;
}

inline Dataset load_dataset(const DatasetRef& ref) {
    Dataset ds = ref.format == "csv" ? load_csv(ref.path, ref.label_col) : load_libsvm(ref.path);
    ds.name = ref.name.empty() ? canonical_dataset_name(ref.path) : ref.name;
    return ds;
}

struct BenchResult {
    std::string dataset;
    std::string model;
    std::string report_path;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    HyperPoint selected;
};

/// Runs every dataset x model pair, writes `<dataset>_<model>.report.json`
/// files into `out_dir`, and returns the summary rows.
inline std::vector<BenchResult> run_experiment(const BenchConfig& config, const std::string& out_dir,
                                               std::ostream& log = std::cout) {
    if (config.datasets.empty()) throw input_error("run_experiment: no datasets configured");
    if (config.models.empty()) throw input_error("run_experiment: no models configured");
    std::filesystem::create_directories(out_dir);

    std::vector<BenchResult> results;
    for (const DatasetRef& ref : config.datasets) {
        Dataset ds;
        try {
            ds = load_dataset(ref);
        } catch (const parse_error& e) {
            throw parse_error("dataset '" + (ref.name.empty() ? ref.path : ref.name) + "': " + e.what());
        }
        for (ModelKind model : config.models) {
            ExperimentConfig cfg = config.base;
            cfg.model = model;
            log << "bench: " << ds.name << " / " << model_kind_name(model) << " ..." << std::flush;
            auto [best, report] = grid_search_cv(ds, cfg);
            const std::string path =
                (std::filesystem::path(out_dir) / (ds.name + "_" + model_kind_name(model) + ".report.json"))
                    .string();
            write_json_file(to_json(report), path);
            log << " mean accuracy " << report.mean_accuracy << "% (" << report.total_seconds
                << " s)\n";
            results.push_back({ds.name, model_kind_name(model), path, report.mean_accuracy,
                               report.std_accuracy, best});
        }
    }
    return results;
}

/// Side-by-side table of measured vs previously published accuracies for any
/// benchmarked dataset present in the reference roster. Informational only.
inline void print_reference_comparison(const std::vector<BenchResult>& results, std::ostream& out) {
    bool any = false;
    for (const BenchResult& r : results)
        if (find_reference(r.dataset)) any = true;
    if (!any) return;

    out << "\nReference comparison (published mean accuracy, %):\n";
    out << "  dataset          model         measured   published\n";
    for (const BenchResult& r : results) {
        const ReferenceAccuracy* ref = find_reference(r.dataset);
        if (!ref) continue;
        double published = 0.0;
        if (r.model == "svm") published = ref->linear_svm;
        else if (r.model == "fsvm") published = ref->linear_fsvm;
        else if (r.model == "kernel-svm") published = ref->kernel_svm;
        else published = ref->kernel_fsvm;
        char line[160];
        std::snprintf(line, sizeof(line), "  %-16s %-12s %9.2f %11.2f\n", r.dataset.c_str(),
                      r.model.c_str(), r.mean_accuracy, published);
        out << line;
    }
}

}  // namespace fsvm
