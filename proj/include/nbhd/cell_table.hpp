#ifndef NBHD_CELL_TABLE_HPP
#define NBHD_CELL_TABLE_HPP

#include "nbhd/matrix.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace nbhd {

/**
 * Per-cell spatial omics table: identifiers, 2-D centers, categorical cell
 * types and an N x D expression matrix whose column names are the features.
 */
struct CellTable {
    std::vector<std::string> ids;
    Matrix coords;  // N x 2, columns x and y
    std::vector<std::string> cell_types;
    Matrix expression;  // N x D

    std::size_t size() const { return ids.size(); }
    const std::vector<std::string>& feature_names() const { return expression.col_names(); }

    /** Throws `Error(Validation)` if any table invariant is violated. */
    void validate() const;
};

/**
 * Names the columns of an input CSV.
 *
 * Expression columns are resolved in order of preference: the explicit list,
 * then the inclusive header range `[expression_first, expression_last]`, and
 * finally every column not claimed by id/x/y/cell type.
 */
struct ColumnSchema {
    std::string id = "id";
    std::string x = "x";
    std::string y = "y";
    std::string cell_type = "cell_type";
    std::vector<std::string> expression;
    std::string expression_first;
    std::string expression_last;

    bool operator==(const ColumnSchema&) const = default;
};

CellTable load_cells_csv(const std::string& path, const ColumnSchema& schema);

/** Writes `id,x,y,cell_type,<features...>`; reloadable with a default `ColumnSchema`. */
void write_cells_csv(const CellTable& table, const std::string& path);

/**
 * Writes `m` with a header of its column names. When `ids` is given an `id`
 * column is prepended. Values use shortest round-trip formatting, so re-reading
 * reproduces them exactly.
 */
void write_matrix_csv(const Matrix& m, const std::string& path, const std::vector<std::string>* ids = nullptr);

struct LabeledMatrix {
    std::vector<std::string> ids;
    Matrix matrix;
};

/** Reads a matrix CSV. If the first header is `id` that column becomes `ids`. */
LabeledMatrix read_matrix_csv(const std::string& path);

}  // namespace nbhd

#endif
