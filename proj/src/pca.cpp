#include "nbhd/pca.hpp"

#include "nbhd/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace nbhd {

std::vector<double> PcaModel::explained_fraction() const {
    std::vector<double> out(explained_variance.size(), 0.0);
    if (total_variance > 0) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = explained_variance[i] / total_variance;
        }
    }
    return out;
}

PcaModel fit_pca(const Matrix& expression, const PcaOptions& options) {
    const auto n = expression.rows();
    const auto d = expression.cols();
    if (n < 2) {
        throw Error(ErrorKind::Validation, "PCA needs at least 2 rows, got " + std::to_string(n));
    }
    if (d == 0) {
        throw Error(ErrorKind::Validation, "PCA needs at least one column");
    }
    if (!(options.variance_target > 0.0 && options.variance_target <= 1.0)) {
        throw Error(ErrorKind::Validation, "variance target must lie in (0, 1]");
    }
    if (options.fixed_components > d) {
        throw Error(ErrorKind::Validation, "cannot keep more components than columns");
    }

    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMajor> x(expression.values().data(), static_cast<Eigen::Index>(n),
                                 static_cast<Eigen::Index>(d));

    PcaModel model;
    model.standardized = options.standardize;
    Eigen::RowVectorXd mean = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - mean;

    Eigen::RowVectorXd scale = Eigen::RowVectorXd::Ones(static_cast<Eigen::Index>(d));
    if (options.standardize) {
        for (Eigen::Index j = 0; j < centered.cols(); ++j) {
            const double sd = std::sqrt(centered.col(j).squaredNorm() / static_cast<double>(n - 1));
            // Constant columns are centered but not scaled.
            if (sd > 0) {
                scale(j) = sd;
                centered.col(j) /= sd;
            }
        }
    }

    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::Validation, "covariance eigendecomposition failed");
    }

    // Eigen returns ascending eigenvalues.
    const auto dd = static_cast<Eigen::Index>(d);
    model.total_variance = cov.trace();
    model.all_variances.resize(d);
    for (Eigen::Index k = 0; k < dd; ++k) {
        model.all_variances[static_cast<std::size_t>(k)] = std::max(0.0, solver.eigenvalues()(dd - 1 - k));
    }

    std::size_t keep = options.fixed_components;
    if (keep == 0) {
        keep = d;
        if (model.total_variance > 0) {
            const double goal = options.variance_target * model.total_variance;
            const double slack = 1e-12 * model.total_variance;
            double cumulative = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                cumulative += model.all_variances[k];
                if (cumulative >= goal - slack) {
                    keep = k + 1;
                    break;
                }
            }
            model.target_missed = cumulative < goal - slack;
        } else {
            model.target_missed = true;
        }
    }

    model.loadings = Matrix(d, keep);
    std::vector<std::string> names;
    for (std::size_t k = 0; k < keep; ++k) {
        Eigen::VectorXd v = solver.eigenvectors().col(dd - 1 - static_cast<Eigen::Index>(k));
        Eigen::Index arg = 0;
        for (Eigen::Index j = 1; j < dd; ++j) {
            if (std::abs(v(j)) > std::abs(v(arg))) {
                arg = j;
            }
        }
        if (v(arg) < 0) {
            v = -v;
        }
        for (std::size_t j = 0; j < d; ++j) {
            model.loadings(j, k) = v(static_cast<Eigen::Index>(j));
        }
        names.push_back("PC_" + std::to_string(k + 1));
    }
    model.loadings.set_col_names(std::move(names));
    model.explained_variance.assign(model.all_variances.begin(),
                                    model.all_variances.begin() + static_cast<std::ptrdiff_t>(keep));

    model.means.resize(d);
    model.scales.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        model.means[j] = mean(static_cast<Eigen::Index>(j));
        model.scales[j] = scale(static_cast<Eigen::Index>(j));
    }
    return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& expression) {
    const auto d = model.means.size();
    if (expression.cols() != d) {
        throw Error(ErrorKind::Validation, "PCA model expects " + std::to_string(d) + " columns, got " +
                                               std::to_string(expression.cols()));
    }
    const auto p = model.components();
    Matrix scores(expression.rows(), p);
    scores.set_col_names(model.loadings.col_names());

    std::vector<double> z(d);
    for (std::size_t i = 0; i < expression.rows(); ++i) {
        auto row = expression.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            z[j] = (row[j] - model.means[j]) / model.scales[j];
        }
        for (std::size_t k = 0; k < p; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                acc += z[j] * model.loadings(j, k);
            }
            scores(i, k) = acc;
        }
    }
    return scores;
}

}  // namespace nbhd
