#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace rampart {

/// Least-squares slopes of y on the columns of x with an intercept (both sides are
/// centered first). Rank-deficient systems, including n <= columns, get the
/// minimum-norm solution from a complete orthogonal decomposition.
inline Eigen::VectorXd ols_coefficients(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const Eigen::RowVectorXd col_means = x.colwise().mean();
    const Eigen::MatrixXd xc = x.rowwise() - col_means;
    const Eigen::VectorXd yc = y.array() - y.mean();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xc);
    return cod.solve(yc);
}

struct LogisticOptions {
    int iterations = 200;
    double step = 0.1;
};

/// Unregularized logistic regression by full-batch gradient descent on per-column
/// standardized inputs. Returns the slopes on the standardized scale. Zero-variance
/// columns are held at zero.
inline Eigen::VectorXd logistic_coefficients(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                             const LogisticOptions& opts = {}) {
    const auto n = static_cast<double>(x.rows());
    Eigen::MatrixXd z = x.rowwise() - x.colwise().mean();
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        const double sd = std::sqrt(z.col(j).squaredNorm() / n);
        if (sd > 0.0) {
            z.col(j) /= sd;
        } else {
            z.col(j).setZero();
        }
    }
    Eigen::VectorXd w = Eigen::VectorXd::Zero(z.cols());
    double bias = 0.0;
    Eigen::VectorXd residual(z.rows());
    for (int it = 0; it < opts.iterations; ++it) {
        const Eigen::VectorXd eta = (z * w).array() + bias;
        residual = (1.0 / (1.0 + (-eta.array()).exp())).matrix() - y;
        w -= opts.step * (z.transpose() * residual) / n;
        bias -= opts.step * residual.mean();
    }
    return w;
}

}  // namespace rampart
