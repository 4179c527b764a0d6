#include "sketchls/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "sketchls/errors.hpp"

namespace sketchls {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, std::size_t line_no, std::size_t col_no) {
    std::string cell = trimmed(raw);
    if (cell.empty()) {
        throw ParseError(line_no, col_no, "blank cell");
    }
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw NonNumericCell(line_no, col_no, cell);
    }
    return value;
}

} // namespace

DataBundle ingest_csv(const std::string& path, const ColumnMapping& mapping) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("'" + path + "' is empty");
    }
    std::vector<std::string> header = split_row(line);
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) {
        index[trimmed(header[i])] = i;
    }
    auto column_of = [&](const std::string& name) {
        auto it = index.find(name);
        if (it == index.end()) {
            throw MissingColumn(name);
        }
        return it->second;
    };

    if (mapping.response.empty()) {
        throw ConfigError("no response column specified");
    }
    const std::size_t y_col = column_of(mapping.response);
    std::vector<std::size_t> x_cols;
    for (const auto& name : mapping.regressors) {
        x_cols.push_back(column_of(name));
    }
    std::vector<std::size_t> z_cols;
    for (const auto& name : mapping.instruments) {
        z_cols.push_back(column_of(name));
    }
    if (x_cols.empty() && !mapping.add_intercept) {
        throw ConfigError("no regressors specified");
    }

    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty()) {
            continue;
        }
        std::vector<std::string> cells = split_row(line);
        if (cells.size() != header.size()) {
            throw ParseError(line_no, cells.size(),
                             "expected " + std::to_string(header.size()) + " cells, got " +
                                 std::to_string(cells.size()));
        }
        std::vector<double> parsed(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            parsed[c] = parse_cell(cells[c], line_no, c + 1);
        }
        rows.push_back(std::move(parsed));
    }
    if (rows.empty()) {
        throw DataError("'" + path + "' has no data rows");
    }

    const std::size_t n = rows.size();
    const std::size_t intercept = mapping.add_intercept ? 1 : 0;
    DataBundle bundle;
    bundle.y = Vector(n);
    bundle.x = Matrix(n, intercept + x_cols.size());
    for (std::size_t r = 0; r < n; ++r) {
        bundle.y(static_cast<Eigen::Index>(r)) = rows[r][y_col];
        if (intercept) {
            bundle.x(static_cast<Eigen::Index>(r), 0) = 1.0;
        }
        for (std::size_t c = 0; c < x_cols.size(); ++c) {
            bundle.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(intercept + c)) =
                rows[r][x_cols[c]];
        }
    }
    if (!z_cols.empty()) {
        Matrix z(n, intercept + z_cols.size());
        for (std::size_t r = 0; r < n; ++r) {
            if (intercept) {
                z(static_cast<Eigen::Index>(r), 0) = 1.0;
            }
            for (std::size_t c = 0; c < z_cols.size(); ++c) {
                z(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(intercept + c)) =
                    rows[r][z_cols[c]];
            }
        }
        bundle.z = std::move(z);
    }
    bundle.validate();
    return bundle;
}

void write_bundle_csv(const std::string& path, const DataBundle& bundle) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write '" + path + "'");
    }
    out << "y";
    for (std::size_t j = 1; j <= bundle.p(); ++j) {
        out << ",x" << j;
    }
    for (std::size_t j = 1; j <= bundle.q(); ++j) {
        out << ",z" << j;
    }
    out << "\n";
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
    };
    for (std::size_t r = 0; r < bundle.n(); ++r) {
        put(bundle.y(static_cast<Eigen::Index>(r)));
        for (std::size_t j = 0; j < bundle.p(); ++j) {
            out << ",";
            put(bundle.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)));
        }
        for (std::size_t j = 0; j < bundle.q(); ++j) {
            out << ",";
            put((*bundle.z)(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)));
        }
        out << "\n";
    }
}

ColumnMapping canonical_mapping(std::size_t p, std::size_t q) {
    ColumnMapping mapping;
    mapping.response = "y";
    for (std::size_t j = 1; j <= p; ++j) {
        mapping.regressors.push_back("x" + std::to_string(j));
    }
    for (std::size_t j = 1; j <= q; ++j) {
        mapping.instruments.push_back("z" + std::to_string(j));
    }
    mapping.add_intercept = false;
    return mapping;
}

} // namespace sketchls
