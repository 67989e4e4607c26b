#include "ltsa/csv.hpp"

#include "ltsa/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ltsa {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

double parse_cell(std::string_view cell, long row, long col) {
    cell = trim(cell);
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw CsvError(CsvError::Kind::NonNumeric,
                       "non-numeric cell at row " + std::to_string(row) + ", column " +
                           std::to_string(col),
                       row, col);
    return value;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Parses the whole table; `header` drops the first row. Row/column indices in
// errors are 1-based and count the header row.
Matrix parse_table(const std::string& text, const std::string& path, bool header) {
    std::vector<std::vector<double>> rows;
    std::size_t pos = 0;
    long line_no = 0;
    long expected_cols = -1;
    bool header_pending = header;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line(text.data() + pos, (eol == std::string::npos ? text.size() : eol) - pos);
        pos = (eol == std::string::npos) ? text.size() : eol + 1;
        ++line_no;
        if (trim(line).empty()) {
            // Tolerate blank trailing lines only.
            std::size_t rest = pos;
            while (rest < text.size() && (text[rest] == '\n' || text[rest] == '\r')) ++rest;
            if (rest >= text.size()) break;
            throw CsvError(CsvError::Kind::Ragged,
                           "empty row " + std::to_string(line_no) + " in " + path, line_no, 1);
        }
        if (header_pending) {
            header_pending = false;
            continue;
        }
        std::vector<double> cells;
        std::size_t start = 0;
        long col = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            std::string_view cell = line.substr(
                start, (comma == std::string_view::npos ? line.size() : comma) - start);
            ++col;
            cells.push_back(parse_cell(cell, line_no, col));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (expected_cols >= 0 && col != expected_cols)
            throw CsvError(CsvError::Kind::Ragged,
                           "ragged row " + std::to_string(line_no) + ": found " +
                               std::to_string(col) + " cells, expected " +
                               std::to_string(expected_cols),
                           line_no, col);
        expected_cols = col;
        rows.push_back(std::move(cells));
    }
    if (rows.empty())
        throw CsvError(CsvError::Kind::Empty, "empty CSV file: " + path);
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    return m;
}

void write_table(const std::string& path, const Matrix& m, bool header) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    if (header) {
        for (Index j = 0; j < m.cols(); ++j) out << (j ? ",c" : "c") << j;
        out << '\n';
    }
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

std::string stem_of(const std::string& stem_or_csv) {
    if (stem_or_csv.size() > 4 && stem_or_csv.ends_with(".csv"))
        return stem_or_csv.substr(0, stem_or_csv.size() - 4);
    return stem_or_csv;
}

}  // namespace

Matrix load_csv_matrix(const std::string& path, bool header) {
    return parse_table(read_file(path), path, header);
}

void save_csv_matrix(const std::string& path, const Matrix& m, bool header) {
    write_table(path, m, header);
}

DataMatrix load_csv(const std::string& path, const CsvOptions& opts) {
    Matrix m = load_csv_matrix(path, opts.header);
    if (opts.orientation == CsvOrientation::RowsArePoints) m.transposeInPlace();
    return DataMatrix(std::move(m));
}

void save_csv(const std::string& path, const DataMatrix& data, const CsvOptions& opts) {
    if (opts.orientation == CsvOrientation::RowsArePoints)
        write_table(path, data.values.transpose(), opts.header);
    else
        write_table(path, data.values, opts.header);
}

std::map<std::string, std::string> load_key_values(const std::string& path) {
    std::map<std::string, std::string> kv;
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw IoError("malformed key=value line in " + path + ": " + line);
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

void save_key_values(const std::string& path, const std::map<std::string, std::string>& kv) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
    if (!out) throw IoError("write failed: " + path);
}

void save_dataset(const std::string& stem, const DataMatrix& data, const GroundTruth* truth,
                  const std::vector<int>* labels,
                  const std::map<std::string, std::string>& extra_meta, const Matrix* transform) {
    save_csv(stem + ".csv", data, {CsvOrientation::RowsArePoints, false});
    std::map<std::string, std::string> meta = extra_meta;
    meta["m"] = std::to_string(data.m());
    meta["n"] = std::to_string(data.N());
    meta["orientation"] = "rows";
    if (truth != nullptr) {
        save_csv_matrix(stem + ".truth.csv", truth->params);
        meta["d"] = std::to_string(truth->d);
        meta["eta"] = format_double(truth->noise_level);
        meta["hessian"] = truth->hessian_analytic ? "analytic" : "fd";
    }
    if (labels != nullptr && !labels->empty()) {
        std::string joined;
        for (std::size_t i = 0; i < labels->size(); ++i) {
            if (i) joined += ',';
            joined += std::to_string((*labels)[i]);
        }
        meta["labels"] = joined;
    }
    if (transform != nullptr) save_csv_matrix(stem + ".transform.csv", *transform);
    save_key_values(stem + ".meta.txt", meta);
}

DatasetBundle load_dataset(const std::string& stem_or_csv) {
    const std::string stem = stem_of(stem_or_csv);
    namespace fs = std::filesystem;

    DatasetBundle bundle;
    if (fs::exists(stem + ".meta.txt")) bundle.meta = load_key_values(stem + ".meta.txt");

    CsvOptions opts;
    auto orient = bundle.meta.find("orientation");
    if (orient != bundle.meta.end() && orient->second == "columns")
        opts.orientation = CsvOrientation::ColumnsArePoints;
    bundle.data = load_csv(stem + ".csv", opts);

    if (auto it = bundle.meta.find("labels"); it != bundle.meta.end()) {
        std::istringstream in(it->second);
        std::string tok;
        while (std::getline(in, tok, ',')) bundle.labels.push_back(std::stoi(tok));
        if (static_cast<Index>(bundle.labels.size()) != bundle.data.N())
            throw IoError("label count in sidecar does not match point count");
    }

    if (fs::exists(stem + ".truth.csv")) {
        GroundTruth gt;
        gt.params = load_csv_matrix(stem + ".truth.csv");
        gt.d = static_cast<int>(gt.params.rows());
        if (gt.params.cols() != bundle.data.N())
            throw IoError("truth column count does not match data point count");
        if (auto it = bundle.meta.find("eta"); it != bundle.meta.end())
            gt.noise_level = std::stod(it->second);
        if (auto it = bundle.meta.find("generator"); it != bundle.meta.end()) {
            bind_evaluators(it->second, gt);
            if (fs::exists(stem + ".transform.csv")) {
                const Matrix transform = load_csv_matrix(stem + ".transform.csv");
                GroundTruth base = std::move(gt);
                gt = transformed_truth(base, transform);
            }
            // Recover the realized noise from the stored data.
            gt.noise.resize(bundle.data.m(), bundle.data.N());
            for (Index i = 0; i < bundle.data.N(); ++i)
                gt.noise.col(i) = bundle.data.values.col(i) - gt.f(gt.params.col(i));
        }
        bundle.truth = std::move(gt);
    }
    return bundle;
}

}  // namespace ltsa
