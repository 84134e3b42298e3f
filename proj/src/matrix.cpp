#include "nbhd/matrix.hpp"

#include "nbhd/error.hpp"

#include <algorithm>

namespace nbhd {

namespace {

std::vector<std::string> default_names(std::size_t cols) {
    std::vector<std::string> names;
    names.reserve(cols);
    for (std::size_t c = 0; c < cols; ++c) {
        names.push_back("V" + std::to_string(c + 1));
    }
    return names;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0), col_names_(default_names(cols)) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values, std::vector<std::string> col_names)
    : rows_(rows), cols_(cols), values_(std::move(values)), col_names_(std::move(col_names)) {
    if (values_.size() != rows_ * cols_) {
        throw Error(ErrorKind::Format, "matrix value count " + std::to_string(values_.size()) + " does not match " +
                                           std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    if (col_names_.empty() && cols_ > 0) {
        col_names_ = default_names(cols_);
    }
    if (col_names_.size() != cols_) {
        throw Error(ErrorKind::Format, "matrix has " + std::to_string(cols_) + " columns but " +
                                           std::to_string(col_names_.size()) + " column names");
    }
}

std::vector<double> Matrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        out[r] = (*this)(r, c);
    }
    return out;
}

void Matrix::set_col_names(std::vector<std::string> names) {
    if (names.size() != cols_) {
        throw Error(ErrorKind::Format, "column name count mismatch");
    }
    col_names_ = std::move(names);
}

Matrix hconcat(std::span<const Matrix> blocks) {
    if (blocks.empty()) {
        throw Error(ErrorKind::Validation, "cannot concatenate an empty block list");
    }
    const std::size_t rows = blocks.front().rows();
    std::size_t cols = 0;
    std::vector<std::string> names;
    for (const auto& b : blocks) {
        if (b.rows() != rows) {
            throw Error(ErrorKind::Validation, "row count mismatch in concatenation: " + std::to_string(b.rows()) +
                                                   " vs " + std::to_string(rows));
        }
        cols += b.cols();
        names.insert(names.end(), b.col_names().begin(), b.col_names().end());
    }

    std::vector<double> values(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
        auto out = values.begin() + static_cast<std::ptrdiff_t>(r * cols);
        for (const auto& b : blocks) {
            auto src = b.row(r);
            out = std::copy(src.begin(), src.end(), out);
        }
    }
    return Matrix(rows, cols, std::move(values), std::move(names));
}

Matrix select_rows(const Matrix& m, std::span<const std::size_t> indices) {
    std::vector<double> values;
    values.reserve(indices.size() * m.cols());
    for (auto i : indices) {
        auto src = m.row(i);
        values.insert(values.end(), src.begin(), src.end());
    }
    return Matrix(indices.size(), m.cols(), std::move(values), m.col_names());
}

}  // namespace nbhd
