#ifndef NBHD_MATRIX_HPP
#define NBHD_MATRIX_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace nbhd {

/**
 * Dense row-major real matrix with named columns.
 *
 * This is the interchange type between pipeline stages. Heavy linear algebra is
 * done on Eigen maps of `values()`; the class itself only guards the shape.
 */
class Matrix {
public:
    Matrix() = default;

    /** Zero-filled matrix. Column names default to `V1..Vcols`. */
    Matrix(std::size_t rows, std::size_t cols);

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values, std::vector<std::string> col_names);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

    std::vector<double> column(std::size_t c) const;

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    const std::vector<std::string>& col_names() const { return col_names_; }
    void set_col_names(std::vector<std::string> names);

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
    std::vector<std::string> col_names_;
};

/** Column-wise concatenation; all inputs must share the row count. */
Matrix hconcat(std::span<const Matrix> blocks);

/** Rows `indices` of `m`, in the given order. */
Matrix select_rows(const Matrix& m, std::span<const std::size_t> indices);

}  // namespace nbhd

#endif
