#pragma once

#include <cstdint>
#include <utility>

#include "ca/errors.hpp"
#include "ca/sensing.hpp"

// Least squares on matrix-masked data: the data owner releases (M X, M y)
// instead of (X, y) and the analyst fits the same linear model. A fit object
// never retains the raw rows it was computed from.

namespace ca {

struct RegressionProblem {
    Mat X; // N x p design, N > p, full column rank
    Vec y; // length N
};

inline RegressionProblem make_problem(Mat X, Vec y) {
    if (X.rows() != y.size()) throw dimension_error("design and response row counts differ");
    if (X.rows() <= X.cols()) throw parameter_error("regression requires N > p");
    if (!X.allFinite() || !y.allFinite()) throw parameter_error("regression data must be finite");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < X.cols()) throw solver_error("design matrix is rank deficient");
    return RegressionProblem{std::move(X), std::move(y)};
}

struct RegressionFit {
    Vec beta;
    double rss = 0.0; // residual sum of squares in the fitted space
    bool masked = false;
    int mask_rows = 0; // 0 for a raw fit
};

namespace detail {

inline RegressionFit solve_ols(const Mat& X, const Vec& y, bool masked, int mask_rows) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < X.cols()) throw solver_error("least-squares design is rank deficient");
    RegressionFit fit;
    fit.beta = qr.solve(y);
    fit.rss = (y - X * fit.beta).squaredNorm();
    fit.masked = masked;
    fit.mask_rows = mask_rows;
    return fit;
}

} // namespace detail

inline RegressionFit ols(const RegressionProblem& problem) {
    return detail::solve_ols(problem.X, problem.y, false, 0);
}

// OLS on (M X, M y). The mask must have as many columns as the problem has
// observations and strictly more rows than predictors.
inline RegressionFit masked_ols(const RegressionProblem& problem, const Mat& mask) {
    if (mask.cols() != problem.X.rows())
        throw dimension_error("mask columns must equal the number of observations");
    if (mask.rows() <= problem.X.cols())
        throw parameter_error("mask is under-determined: need more rows than predictors");
    if (mask.rows() > problem.X.rows())
        throw parameter_error("mask cannot have more rows than observations");
    const Mat mx = mask * problem.X;
    const Vec my = mask * problem.y;
    return detail::solve_ols(mx, my, true, static_cast<int>(mask.rows()));
}

inline RegressionFit masked_ols(const RegressionProblem& problem, const SensingMatrix& mask) {
    return masked_ols(problem, mask.entries);
}

// Square mask with orthonormal rows: Q factor of a seeded gaussian matrix.
// Masking with it leaves the normal equations untouched.
inline Mat orthonormal_mask(std::uint64_t seed, int n) {
    if (n < 1) throw parameter_error("mask size must be positive");
    Stream rng(seed);
    Eigen::MatrixXd g(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) g(r, c) = rng.gaussian();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    return Mat(q.transpose()); // rows orthonormal
}

} // namespace ca
