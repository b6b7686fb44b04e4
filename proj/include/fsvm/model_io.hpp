#pragma once

// JSON documents for trained models and cross-validation reports. Doubles
// are emitted in shortest round-trip form, so serialize/deserialize is
// value-exact and report payloads are byte-stable for fixed inputs. All
// wall-clock measurements live under the single "timing" key so determinism
// checks can strip them.

#include <fstream>

#include "json.hpp"

#include "fsvm/cross_validation.hpp"

namespace fsvm {

using json = nlohmann::json;

inline constexpr int kModelFormatVersion = 1;
inline constexpr int kReportFormatVersion = 1;

// ---- low-level helpers ----

inline json to_json(const Matrix& m) {
    return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

inline Matrix matrix_from_json(const json& j) {
    Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
    const auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != m.data.size()) throw parse_error("matrix payload size mismatch");
    m.data = data;
    return m;
}

inline json to_json(const FsvmHyperParams& h) {
    return json{{"C", h.C},
                {"rho", h.rho},
                {"eps_pd", h.eps_pd},
                {"eps_eig", h.eps_eig},
                {"t0", h.t0},
                {"beta", h.beta},
                {"max_outer", h.max_outer},
                {"max_inner", h.max_inner},
                {"tol_outer", h.tol_outer},
                {"tol_inner", h.tol_inner},
                {"solver_tol_pair", h.solver.tol_pair},
                {"solver_gap_tol", h.solver.gap_tol},
                {"solver_max_sweeps", h.solver.max_sweeps},
                {"solver_seed", h.solver.seed}};
}

inline FsvmHyperParams hyper_from_json(const json& j) {
    FsvmHyperParams h;
    h.C = j.value("C", h.C);
    h.rho = j.value("rho", h.rho);
    h.eps_pd = j.value("eps_pd", h.eps_pd);
    h.eps_eig = j.value("eps_eig", h.eps_eig);
    h.t0 = j.value("t0", h.t0);
    h.beta = j.value("beta", h.beta);
    h.max_outer = j.value("max_outer", h.max_outer);
    h.max_inner = j.value("max_inner", h.max_inner);
    h.tol_outer = j.value("tol_outer", h.tol_outer);
    h.tol_inner = j.value("tol_inner", h.tol_inner);
    h.solver.tol_pair = j.value("solver_tol_pair", h.solver.tol_pair);
    h.solver.gap_tol = j.value("solver_gap_tol", h.solver.gap_tol);
    h.solver.max_sweeps = j.value("solver_max_sweeps", h.solver.max_sweeps);
    h.solver.seed = j.value("solver_seed", h.solver.seed);
    return h;
}

// ---- linear model ----

inline json to_json(const FsvmModel& m) {
    return json{{"format_version", kModelFormatVersion},
                {"kind", "fsvm-linear"},
                {"dim", m.dim()},
                {"M", m.M.mat.m.data},  // row-major dense
                {"w", m.w},
                {"b", m.b},
                {"centroid", m.centroid},
                {"hyper", to_json(m.hyper)}};
}

inline FsvmModel fsvm_model_from_json(const json& j) {
    if (j.at("kind").get<std::string>() != "fsvm-linear") throw parse_error("not a linear model document");
    FsvmModel m;
    m.hyper = hyper_from_json(j.at("hyper"));
    const int d = j.at("dim").get<int>();
    Matrix mat(d, d);
    mat.data = j.at("M").get<std::vector<double>>();
    if (static_cast<int>(mat.data.size()) != d * d) throw parse_error("metric payload size mismatch");
    m.M = psd_project(SymmetricMatrix(mat), m.hyper.eps_pd);
    m.w = j.at("w").get<Vector>();
    m.b = j.at("b").get<double>();
    m.centroid = j.at("centroid").get<Vector>();
    if (static_cast<int>(m.w.size()) != d || static_cast<int>(m.centroid.size()) != d)
        throw parse_error("model vector size mismatch");
    return m;
}

// ---- kernel model ----

inline json to_json(const KernelSpec& s) {
    json j{{"kind", s.kind == KernelSpec::Kind::rbf ? "rbf" : "linear"}};
    if (s.kind == KernelSpec::Kind::rbf) j["gamma"] = s.gamma;
    return j;
}

inline KernelSpec kernel_spec_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "linear") return KernelSpec::linear();
    if (kind == "rbf") return KernelSpec::rbf(j.at("gamma").get<double>());
    throw parse_error("unknown kernel kind: " + kind);
}

inline json to_json(const KernelPcaMap& m) {
    return json{{"x_train", to_json(m.x_train)},
                {"kernel", to_json(m.spec)},
                {"coefficients", to_json(m.coefficients)},
                {"eigenvalues", m.eigenvalues},
                {"gram_row_means", m.gram_row_means},
                {"gram_grand_mean", m.gram_grand_mean}};
}

inline KernelPcaMap kernel_pca_map_from_json(const json& j) {
    KernelPcaMap m;
    m.x_train = matrix_from_json(j.at("x_train"));
    m.spec = kernel_spec_from_json(j.at("kernel"));
    m.coefficients = matrix_from_json(j.at("coefficients"));
    m.eigenvalues = j.at("eigenvalues").get<Vector>();
    m.gram_row_means = j.at("gram_row_means").get<Vector>();
    m.gram_grand_mean = j.at("gram_grand_mean").get<double>();
    refresh_training_projections(m);
    return m;
}

inline json to_json(const KernelFsvmModel& m) {
    json inner = to_json(m.linear);
    inner.erase("format_version");
    return json{{"format_version", kModelFormatVersion},
                {"kind", "fsvm-kernel"},
                {"kpca", to_json(m.map)},
                {"model", inner}};
}

inline KernelFsvmModel kernel_model_from_json(const json& j) {
    if (j.at("kind").get<std::string>() != "fsvm-kernel") throw parse_error("not a kernel model document");
    KernelFsvmModel m;
    m.map = kernel_pca_map_from_json(j.at("kpca"));
    m.linear = fsvm_model_from_json(j.at("model"));
    return m;
}

// ---- composite (one-vs-rest) model ----

inline json to_json(const Scaler& s) { return json{{"mean", s.mean}, {"scale", s.scale}}; }

inline Scaler scaler_from_json(const json& j) {
    Scaler s;
    s.mean = j.at("mean").get<Vector>();
    s.scale = j.at("scale").get<Vector>();
    return s;
}

inline json to_json(const MultiClassModel& m) {
    json models = json::array();
    for (const BinaryModel& b : m.binaries) {
        if (const auto* lin = std::get_if<FsvmModel>(&b.model)) models.push_back(to_json(*lin));
        else models.push_back(to_json(std::get<KernelFsvmModel>(b.model)));
    }
    return json{{"format_version", kModelFormatVersion},
                {"kind", "one-vs-rest"},
                {"classes", m.classes},
                {"scaler", to_json(m.scaler)},
                {"models", models}};
}

inline MultiClassModel multiclass_model_from_json(const json& j) {
    if (j.at("kind").get<std::string>() != "one-vs-rest") throw parse_error("not a composite model document");
    MultiClassModel m;
    m.classes = j.at("classes").get<std::vector<long>>();
    m.scaler = scaler_from_json(j.at("scaler"));
    for (const json& mj : j.at("models")) {
        BinaryModel b;
        if (mj.at("kind").get<std::string>() == "fsvm-kernel") b.model = kernel_model_from_json(mj);
        else b.model = fsvm_model_from_json(mj);
        m.binaries.push_back(std::move(b));
    }
    if (m.classes.size() != m.binaries.size()) throw parse_error("class/model count mismatch");
    return m;
}

// ---- reports ----

inline json to_json(const HyperPoint& p) {
    json j{{"C", p.C}};
    j["rho"] = p.rho ? json(*p.rho) : json(nullptr);
    j["gamma"] = p.gamma ? json(*p.gamma) : json(nullptr);
    j["kpca_dim"] = p.d ? json(*p.d) : json(nullptr);
    return j;
}

inline json to_json(const RadiusDiagnostics& r) {
    json per = json::array();
    for (const auto& e : r.per_class)
        per.push_back(json{{"class", e.cls},
                           {"radius", e.radius},
                           {"radius_centroid", e.radius_centroid},
                           {"radius_pairwise", e.radius_pairwise},
                           {"margin_norm", e.margin_norm},
                           {"radius_margin_product", e.radius_margin_product}});
    return json{{"identity_radius", r.identity_radius}, {"per_class", per}};
}

inline json to_json(const CvReport& r) {
    json grid = json::array();
    for (const GridEntry& g : r.grid)
        grid.push_back(json{{"point", to_json(g.point)}, {"mean_accuracy", g.mean_accuracy_percent}});
    return json{{"format_version", kReportFormatVersion},
                {"dataset", r.dataset},
                {"model", r.model},
                {"folds", r.folds},
                {"repeats", r.repeats},
                {"seed", r.seed},
                {"standardized", r.standardized},
                {"selected", to_json(r.selected)},
                {"fold_accuracies", r.fold_accuracies},
                {"mean_accuracy", r.mean_accuracy},
                {"std_accuracy", r.std_accuracy},
                {"objective_traces", r.objective_traces},
                {"grid", grid},
                {"radius_diagnostics", to_json(r.radius)},
                {"timing",
                 json{{"per_fold_train_seconds", r.fold_train_seconds},
                      {"total_seconds", r.total_seconds}}}};
}

inline void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw parse_error(path + ": " + e.what());
    }
    return j;
}

/// Report payload with every timing field removed; two runs with the same
/// config and seed must agree byte-for-byte on this.
inline std::string report_payload_without_timing(json report) {
    report.erase("timing");
    return report.dump(2);
}

}  // namespace fsvm
