#pragma once

// Dataset container plus loaders for the two supported input formats:
// LIBSVM sparse text (`<label> <index>:<value> ...`, 1-based ascending
// indices) and CSV with a header row. Standardization fits on training data
// only and is applied to held-out data with the training statistics.

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "fsvm/core.hpp"

namespace fsvm {

struct Dataset {
    std::string name;
    Matrix X;                  // n x d dense features
    std::vector<long> y;       // integer class ids
    std::vector<std::string> feature_names;  // optional (CSV header)

    int n() const { return X.rows; }
    int d() const { return X.cols; }

    std::vector<long> classes() const {
        std::vector<long> cs(y);
        std::sort(cs.begin(), cs.end());
        cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
        return cs;
    }
};

namespace detail_io {

inline bool parse_double(const std::string& tok, double& out) {
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    if (begin != end && *begin == '+') ++begin;  // from_chars rejects a leading '+'
    if (begin == end) return false;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

inline bool parse_label(const std::string& tok, long& out) {
    double v;
    if (!parse_double(tok, v)) return false;
    if (!std::isfinite(v) || v != std::floor(v)) return false;
    out = static_cast<long>(v);
    return true;
}

inline std::string location(const std::string& path, int line) {
    return path + ":" + std::to_string(line);
}

}  // namespace detail_io

/// LIBSVM sparse text. Width of the dense output is the largest index seen;
/// missing indices are zero. Index 0 and non-ascending indices are rejected.
inline Dataset load_libsvm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open file: " + path);

    struct Row {
        long label;
        std::vector<std::pair<int, double>> entries;
    };
    std::vector<Row> rows;
    int max_index = 0;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;  // blank line

        Row row;
        if (!detail_io::parse_label(tok, row.label))
            throw parse_error(detail_io::location(path, line_no) + ": invalid label '" + tok + "'");

        int prev_index = 0;
        while (ls >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos)
                throw parse_error(detail_io::location(path, line_no) + ": expected index:value, got '" + tok + "'");
            int index = 0;
            {
                const std::string idx = tok.substr(0, colon);
                const char* b = idx.data();
                auto [ptr, ec] = std::from_chars(b, b + idx.size(), index);
                if (ec != std::errc() || ptr != b + idx.size())
                    throw parse_error(detail_io::location(path, line_no) + ": invalid feature index '" + idx + "'");
            }
            if (index < 1)
                throw parse_error(detail_io::location(path, line_no) + ": index must be >= 1, got " +
                                  std::to_string(index));
            if (index <= prev_index)
                throw parse_error(detail_io::location(path, line_no) + ": indices must be ascending (" +
                                  std::to_string(index) + " after " + std::to_string(prev_index) + ")");
            double value = 0.0;
            if (!detail_io::parse_double(tok.substr(colon + 1), value))
                throw parse_error(detail_io::location(path, line_no) + ": invalid feature value in '" + tok + "'");
            row.entries.emplace_back(index, value);
            prev_index = index;
            max_index = std::max(max_index, index);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw parse_error(path + ": no samples");

    Dataset ds;
    ds.name = path;
    ds.X = Matrix(static_cast<int>(rows.size()), max_index);
    ds.y.reserve(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        ds.y.push_back(rows[i].label);
        for (const auto& [idx, val] : rows[i].entries) ds.X(static_cast<int>(i), idx - 1) = val;
    }
    return ds;
}

/// CSV with a header row; the label column is named `label` unless overridden.
inline Dataset load_csv(const std::string& path, const std::string& label_col = "label") {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open file: " + path);

    auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                out.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur += c;
            }
        }
        out.push_back(cur);
        return out;
    };

    std::string line;
    if (!std::getline(in, line)) throw parse_error(path + ": empty file");
    const std::vector<std::string> header = split(line);
    int label_idx = -1;
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == label_col) label_idx = static_cast<int>(i);
    if (label_idx < 0) throw parse_error(path + ": no column named '" + label_col + "' in header");

    Dataset ds;
    ds.name = path;
    for (size_t i = 0; i < header.size(); ++i)
        if (static_cast<int>(i) != label_idx) ds.feature_names.push_back(header[i]);

    std::vector<std::vector<double>> feats;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> cells = split(line);
        if (cells.size() != header.size())
            throw parse_error(detail_io::location(path, line_no) + ": expected " +
                              std::to_string(header.size()) + " columns, got " + std::to_string(cells.size()));
        std::vector<double> row;
        row.reserve(cells.size() - 1);
        for (size_t i = 0; i < cells.size(); ++i) {
            if (static_cast<int>(i) == label_idx) {
                long lab;
                if (!detail_io::parse_label(cells[i], lab))
                    throw parse_error(detail_io::location(path, line_no) + ": invalid label '" + cells[i] + "'");
                ds.y.push_back(lab);
            } else {
                double v;
                if (!detail_io::parse_double(cells[i], v))
                    throw parse_error(detail_io::location(path, line_no) + ": invalid value '" + cells[i] + "'");
                row.push_back(v);
            }
        }
        feats.push_back(std::move(row));
    }
    if (feats.empty()) throw parse_error(path + ": no samples");

    ds.X = Matrix(static_cast<int>(feats.size()), static_cast<int>(feats[0].size()));
    for (int i = 0; i < ds.X.rows; ++i)
        for (int j = 0; j < ds.X.cols; ++j) ds.X(i, j) = feats[i][j];
    return ds;
}

/// Headerless numeric CSV (one point per row) for the bound-report command. A
/// non-numeric first line is treated as a header and skipped.
inline Matrix load_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open file: " + path);
    std::vector<std::vector<double>> pts;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::string cur;
        bool numeric = true;
        auto flush = [&]() {
            if (cur.empty()) return;
            double v;
            if (!detail_io::parse_double(cur, v)) numeric = false;
            row.push_back(v);
            cur.clear();
        };
        for (char c : line) {
            if (c == ',' || c == ' ' || c == '\t') flush();
            else if (c != '\r') cur += c;
        }
        flush();
        if (!numeric) {
            if (line_no == 1 && pts.empty()) continue;  // header row
            throw parse_error(detail_io::location(path, line_no) + ": non-numeric coordinate");
        }
        if (!row.empty()) pts.push_back(std::move(row));
    }
    if (pts.empty()) throw parse_error(path + ": no points");
    Matrix m(static_cast<int>(pts.size()), static_cast<int>(pts[0].size()));
    for (int i = 0; i < m.rows; ++i) {
        if (static_cast<int>(pts[i].size()) != m.cols)
            throw parse_error(path + ": inconsistent row widths");
        for (int j = 0; j < m.cols; ++j) m(i, j) = pts[i][j];
    }
    return m;
}

/// Per-feature affine transform fitted on training data: x -> (x - mean) / scale.
struct Scaler {
    Vector mean;
    Vector scale;  // 1.0 for (near-)constant features

    void apply(Matrix& x) const {
        if (x.cols != static_cast<int>(mean.size())) throw input_error("Scaler: dimension mismatch");
        for (int i = 0; i < x.rows; ++i)
            for (int j = 0; j < x.cols; ++j) x(i, j) = (x(i, j) - mean[j]) / scale[j];
    }

    Vector apply(const Vector& x) const {
        if (x.size() != mean.size()) throw input_error("Scaler: dimension mismatch");
        Vector out(x.size());
        for (size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
        return out;
    }

    static Scaler identity(int d) {
        Scaler s;
        s.mean.assign(d, 0.0);
        s.scale.assign(d, 1.0);
        return s;
    }
};

/// Fit a z-score scaler on `train` (population variance, floor 1e-12) and
/// apply it in place to `train` and every matrix in `others`. Held-out data
/// never contributes to the statistics.
inline Scaler standardize(Matrix& train, std::vector<Matrix*> others = {}) {
    if (train.rows < 1) throw input_error("standardize: empty training data");
    const int n = train.rows, d = train.cols;
    Scaler s;
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) s.mean[j] += train(i, j);
    for (double& m : s.mean) m /= n;
    Vector var(d, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) {
            const double c = train(i, j) - s.mean[j];
            var[j] += c * c;
        }
    for (int j = 0; j < d; ++j) {
        var[j] /= n;
        s.scale[j] = var[j] < 1e-12 ? 1.0 : std::sqrt(var[j]);
    }
    s.apply(train);
    for (Matrix* m : others)
        if (m) s.apply(*m);
    return s;
}

}  // namespace fsvm
