#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rampart/csv.hpp"
#include "rampart/error.hpp"

namespace rampart {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = std::int64_t;
using IndexList = std::vector<Index>;

enum class Task { Regression, Classification };

inline const char* to_string(Task task) {
    return task == Task::Regression ? "regression" : "classification";
}

/// Dense N x M design matrix (one observation per row) plus response.
///
/// Treated as immutable once validated; every ranking routine only reads it, so a
/// single instance can be shared by any number of workers.
struct Dataset {
    Matrix x;
    Vector y;
    Task task = Task::Regression;
    std::vector<std::string> feature_names;  // empty, or one name per column

    Index rows() const { return x.rows(); }
    Index cols() const { return x.cols(); }
};

// Ground-truth importance magnitudes and their 0-based ranks (ties share a rank).
struct TrueImportance {
    std::vector<double> phi;
    std::vector<Index> ranks;
};

inline void validate(const Dataset& d) {
    const Index n = d.x.rows();
    const Index m = d.x.cols();
    if (n < 1 || m < 1) {
        throw DataError("dataset must have at least one row and one column, got " +
                        std::to_string(n) + "x" + std::to_string(m));
    }
    if (d.y.size() != n) {
        throw DataError("response length " + std::to_string(d.y.size()) +
                        " does not match row count " + std::to_string(n));
    }
    if (!d.feature_names.empty() && static_cast<Index>(d.feature_names.size()) != m) {
        throw DataError("got " + std::to_string(d.feature_names.size()) + " feature names for " +
                        std::to_string(m) + " columns");
    }
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < m; ++j) {
            if (!std::isfinite(d.x(i, j))) {
                throw DataError("non-finite feature value at (row " + std::to_string(i) +
                                ", col " + std::to_string(j) + ")");
            }
        }
    }
    for (Index i = 0; i < n; ++i) {
        const double yi = d.y[i];
        if (!std::isfinite(yi)) throw DataError("non-finite response at row " + std::to_string(i));
        if (d.task == Task::Classification && yi != 0.0 && yi != 1.0) {
            throw DataError("classification label at row " + std::to_string(i) +
                            " is not in {0, 1}");
        }
    }
}

/// r_j = #{i : |phi_i| > |phi_j|}. O(M log M) via a sort of the magnitudes.
inline std::vector<Index> true_ranks(const std::vector<double>& phi) {
    const auto m = static_cast<Index>(phi.size());
    std::vector<double> mags(phi.size());
    for (Index j = 0; j < m; ++j) {
        if (!std::isfinite(phi[j])) {
            throw DataError("non-finite importance at index " + std::to_string(j));
        }
        mags[j] = std::abs(phi[j]);
    }
    std::vector<double> sorted = mags;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Index> ranks(phi.size());
    for (Index j = 0; j < m; ++j) {
        const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), mags[j]);
        ranks[j] = static_cast<Index>(above);
    }
    return ranks;
}

inline TrueImportance make_true_importance(std::vector<double> phi) {
    TrueImportance t;
    t.ranks = true_ranks(phi);
    t.phi = std::move(phi);
    return t;
}

struct CsvReadOptions {
    bool has_header = false;
    Task task = Task::Regression;
};

/// Reads one observation per row with the response in the last column.
/// Malformed rows raise DataError naming the 1-based line number.
inline Dataset read_dataset_csv(std::istream& in, const CsvReadOptions& opts) {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> names;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = csv::split_line(line);
        if (!fields) throw DataError("line " + std::to_string(line_no) + ": unterminated quote");
        if (opts.has_header && names.empty() && rows.empty()) {
            if (fields->size() < 2) {
                throw DataError("line " + std::to_string(line_no) +
                                ": need at least one feature and a response column");
            }
            names.assign(fields->begin(), fields->end() - 1);
            width = fields->size();
            continue;
        }
        if (width == 0) width = fields->size();
        if (width < 2) {
            throw DataError("line " + std::to_string(line_no) +
                            ": need at least one feature and a response column");
        }
        if (fields->size() != width) {
            throw DataError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(width) + " fields, got " +
                            std::to_string(fields->size()));
        }
        std::vector<double> values;
        values.reserve(width);
        for (std::size_t c = 0; c < fields->size(); ++c) {
            auto v = csv::parse_double((*fields)[c]);
            if (!v) {
                throw DataError("line " + std::to_string(line_no) + ", column " +
                                std::to_string(c + 1) + ": '" + (*fields)[c] +
                                "' is not a number");
            }
            values.push_back(*v);
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw DataError("CSV contains no data rows");

    Dataset d;
    d.task = opts.task;
    d.feature_names = std::move(names);
    const auto n = static_cast<Index>(rows.size());
    const auto m = static_cast<Index>(width - 1);
    d.x.resize(n, m);
    d.y.resize(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < m; ++j) d.x(i, j) = rows[i][j];
        d.y[i] = rows[i][m];
    }
    validate(d);
    return d;
}

inline Dataset read_dataset_csv(const std::string& path, const CsvReadOptions& opts) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_dataset_csv(in, opts);
}

inline std::string feature_label(const Dataset& d, Index j) {
    if (!d.feature_names.empty()) return d.feature_names[j];
    return "x" + std::to_string(j);
}

// Features then response, with a header row.
inline std::string to_csv(const Dataset& d) {
    std::ostringstream out;
    for (Index j = 0; j < d.cols(); ++j) out << csv::quote(feature_label(d, j)) << ',';
    out << "y\n";
    for (Index i = 0; i < d.rows(); ++i) {
        for (Index j = 0; j < d.cols(); ++j) out << csv::format_double(d.x(i, j)) << ',';
        out << csv::format_double(d.y[i]) << '\n';
    }
    return out.str();
}

// FNV-1a over the raw bytes of x and y; identifies a generated dataset in result logs.
inline std::uint64_t checksum(const Dataset& d) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](double v) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof(double));
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 0x100000001b3ULL;
        }
    };
    for (Index i = 0; i < d.rows(); ++i) {
        for (Index j = 0; j < d.cols(); ++j) mix(d.x(i, j));
    }
    for (Index i = 0; i < d.y.size(); ++i) mix(d.y[i]);
    return h;
}

}  // namespace rampart
