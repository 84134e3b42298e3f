#include "nbhd/cell_table.hpp"

#include "nbhd/csv.hpp"
#include "nbhd/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

namespace nbhd {

namespace {

std::size_t require_column(const std::vector<std::string>& header, const std::string& name, const std::string& role,
                           const std::string& path) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw Error(ErrorKind::Schema, path + ": missing " + role + " column '" + name + "'");
    }
    if (std::find(std::next(it), header.end(), name) != header.end()) {
        throw Error(ErrorKind::Schema, path + ": column '" + name + "' appears more than once");
    }
    return static_cast<std::size_t>(it - header.begin());
}

std::vector<std::size_t> resolve_expression(const std::vector<std::string>& header, const ColumnSchema& schema,
                                            const std::vector<std::size_t>& reserved, const std::string& path) {
    std::vector<std::size_t> out;
    if (!schema.expression.empty()) {
        for (const auto& name : schema.expression) {
            out.push_back(require_column(header, name, "expression", path));
        }
    } else if (!schema.expression_first.empty() || !schema.expression_last.empty()) {
        auto first = require_column(header, schema.expression_first, "expression range start", path);
        auto last = require_column(header, schema.expression_last, "expression range end", path);
        if (first > last) {
            throw Error(ErrorKind::Schema, path + ": expression range '" + schema.expression_first + "'..'" +
                                               schema.expression_last + "' is reversed");
        }
        for (auto c = first; c <= last; ++c) {
            out.push_back(c);
        }
    } else {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (std::find(reserved.begin(), reserved.end(), c) == reserved.end()) {
                out.push_back(c);
            }
        }
    }
    for (auto c : out) {
        if (std::find(reserved.begin(), reserved.end(), c) != reserved.end()) {
            throw Error(ErrorKind::Schema, path + ": column '" + header[c] + "' cannot be both metadata and expression");
        }
    }
    if (out.empty()) {
        throw Error(ErrorKind::Schema, path + ": no expression columns selected");
    }
    return out;
}

std::string list_rows(const std::vector<std::size_t>& rows) {
    std::string out;
    const std::size_t shown = std::min<std::size_t>(rows.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) {
        if (i) {
            out += ", ";
        }
        out += std::to_string(rows[i]);
    }
    if (rows.size() > shown) {
        out += ", ... (" + std::to_string(rows.size()) + " rows total)";
    }
    return out;
}

}  // namespace

void CellTable::validate() const {
    const auto n = ids.size();
    if (n == 0) {
        throw Error(ErrorKind::Validation, "cell table has no rows");
    }
    if (coords.rows() != n || coords.cols() != 2 || cell_types.size() != n || expression.rows() != n) {
        throw Error(ErrorKind::Validation, "cell table collections have inconsistent lengths");
    }
    if (expression.cols() == 0) {
        throw Error(ErrorKind::Validation, "cell table has no expression features");
    }

    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second) {
            throw Error(ErrorKind::Validation, "duplicate cell id '" + id + "'");
        }
    }
    std::unordered_set<std::string> names;
    for (const auto& name : feature_names()) {
        if (!names.insert(name).second) {
            throw Error(ErrorKind::Validation, "duplicate feature name '" + name + "'");
        }
    }

    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < n; ++i) {
        bool ok = std::isfinite(coords(i, 0)) && std::isfinite(coords(i, 1));
        for (double v : expression.row(i)) {
            ok = ok && std::isfinite(v);
        }
        if (!ok) {
            bad.push_back(i + 1);
        }
    }
    if (!bad.empty()) {
        throw Error(ErrorKind::Validation, "non-finite coordinate or expression value in row(s) " + list_rows(bad));
    }
}

CellTable load_cells_csv(const std::string& path, const ColumnSchema& schema) {
    const auto table = csv::read_file(path);
    const auto& header = table.header;

    const auto id_col = require_column(header, schema.id, "id", path);
    const auto x_col = require_column(header, schema.x, "x", path);
    const auto y_col = require_column(header, schema.y, "y", path);
    const auto type_col = require_column(header, schema.cell_type, "cell type", path);
    const auto expr_cols = resolve_expression(header, schema, {id_col, x_col, y_col, type_col}, path);

    if (table.records.empty()) {
        throw Error(ErrorKind::Format, path + ": no data rows");
    }

    const std::size_t n = table.records.size();
    const std::size_t d = expr_cols.size();
    CellTable out;
    out.ids.reserve(n);
    out.cell_types.reserve(n);
    std::vector<double> coords(n * 2);
    std::vector<double> expr(n * d);
    std::vector<std::size_t> bad_rows;

    for (std::size_t r = 0; r < n; ++r) {
        const auto& rec = table.records[r];
        out.ids.push_back(rec[id_col]);
        out.cell_types.push_back(rec[type_col]);

        bool ok = csv::parse_double(rec[x_col], coords[r * 2]) && csv::parse_double(rec[y_col], coords[r * 2 + 1]);
        for (std::size_t j = 0; j < d; ++j) {
            ok = csv::parse_double(rec[expr_cols[j]], expr[r * d + j]) && ok;
        }
        ok = ok && std::isfinite(coords[r * 2]) && std::isfinite(coords[r * 2 + 1]);
        for (std::size_t j = 0; ok && j < d; ++j) {
            ok = std::isfinite(expr[r * d + j]);
        }
        if (!ok) {
            bad_rows.push_back(r + 1);
        }
    }
    if (!bad_rows.empty()) {
        throw Error(ErrorKind::Validation,
                    path + ": non-numeric or non-finite values in data row(s) " + list_rows(bad_rows));
    }

    std::vector<std::string> names;
    for (auto c : expr_cols) {
        names.push_back(header[c]);
    }
    out.coords = Matrix(n, 2, std::move(coords), {"x", "y"});
    out.expression = Matrix(n, d, std::move(expr), std::move(names));
    out.validate();
    return out;
}

void write_cells_csv(const CellTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write " + path);
    }
    std::vector<std::string> fields{"id", "x", "y", "cell_type"};
    fields.insert(fields.end(), table.feature_names().begin(), table.feature_names().end());
    csv::write_row(out, fields);

    for (std::size_t i = 0; i < table.size(); ++i) {
        fields.clear();
        fields.push_back(table.ids[i]);
        fields.push_back(csv::format_double(table.coords(i, 0)));
        fields.push_back(csv::format_double(table.coords(i, 1)));
        fields.push_back(table.cell_types[i]);
        for (double v : table.expression.row(i)) {
            fields.push_back(csv::format_double(v));
        }
        csv::write_row(out, fields);
    }
    if (!out) {
        throw Error(ErrorKind::Io, "write failed for " + path);
    }
}

void write_matrix_csv(const Matrix& m, const std::string& path, const std::vector<std::string>* ids) {
    if (m.cols() == 0) {
        throw Error(ErrorKind::Format, "refusing to write a matrix with no columns to " + path);
    }
    if (ids && ids->size() != m.rows()) {
        throw Error(ErrorKind::Validation, "id count does not match matrix rows for " + path);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write " + path);
    }

    std::vector<std::string> fields;
    if (ids) {
        fields.push_back("id");
    }
    fields.insert(fields.end(), m.col_names().begin(), m.col_names().end());
    csv::write_row(out, fields);

    for (std::size_t r = 0; r < m.rows(); ++r) {
        fields.clear();
        if (ids) {
            fields.push_back((*ids)[r]);
        }
        for (double v : m.row(r)) {
            fields.push_back(csv::format_double(v));
        }
        csv::write_row(out, fields);
    }
    if (!out) {
        throw Error(ErrorKind::Io, "write failed for " + path);
    }
}

LabeledMatrix read_matrix_csv(const std::string& path) {
    auto table = csv::read_file(path);
    const bool has_ids = !table.header.empty() && table.header.front() == "id";
    const std::size_t offset = has_ids ? 1 : 0;
    const std::size_t cols = table.header.size() - offset;
    if (cols == 0) {
        throw Error(ErrorKind::Format, path + ": matrix has no value columns");
    }

    LabeledMatrix out;
    std::vector<double> values(table.records.size() * cols);
    for (std::size_t r = 0; r < table.records.size(); ++r) {
        const auto& rec = table.records[r];
        if (has_ids) {
            out.ids.push_back(rec.front());
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (!csv::parse_double(rec[c + offset], values[r * cols + c])) {
                throw Error(ErrorKind::Format, path + ": non-numeric value in data row " + std::to_string(r + 1) +
                                                   ", column '" + table.header[c + offset] + "'");
            }
        }
    }
    std::vector<std::string> names(table.header.begin() + static_cast<std::ptrdiff_t>(offset), table.header.end());
    out.matrix = Matrix(table.records.size(), cols, std::move(values), std::move(names));
    return out;
}

}  // namespace nbhd
