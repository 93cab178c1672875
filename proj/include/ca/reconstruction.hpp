#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "ca/errors.hpp"
#include "ca/sensing.hpp"

// Sparse-recovery solvers: the reconstruction attack an adversary holding
// the sensing matrix would mount, plus recovery-quality metrics.

namespace ca {

struct SparseEstimate {
    Vec values;               // length n
    std::vector<int> support; // ascending indices of nonzero values
    int iterations = 0;
    double residual_norm = 0.0; // ||y - Phi x_hat||_2
};

struct ReconMetrics {
    double relative_l2 = 0.0;
    std::optional<double> psnr_db; // present only when a peak value is declared
    bool support_recovered = false;
};

namespace detail {

inline std::vector<int> nonzero_support(const Vec& x) {
    std::vector<int> idx;
    for (int i = 0; i < x.size(); ++i)
        if (x[i] != 0.0) idx.push_back(i);
    return idx;
}

inline void require_conforming(const SensingMatrix& phi, const Measurement& y) {
    if (!(y.matrix_id == phi.id) || y.values.size() != phi.entries.rows())
        throw dimension_error("measurement does not conform to the sensing matrix");
}

} // namespace detail

// Largest eigenvalue of Phi^T Phi by power iteration: at most 100 iterations
// from the normalized all-ones vector, stopping when the Rayleigh estimate
// changes by less than 1e-10 relative.
inline double gram_spectral_norm(const SensingMatrix& phi) {
    const int n = phi.cols();
    Vec v = Vec::Ones(n) / std::sqrt(static_cast<double>(n));
    double lambda = 0.0;
    for (int it = 0; it < 100; ++it) {
        Vec w = phi.entries.transpose() * (phi.entries * v);
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        const bool converged = std::abs(norm - lambda) <= 1e-10 * std::max(1.0, norm);
        lambda = norm;
        v = w / norm;
        if (converged) break;
    }
    return lambda;
}

// Orthogonal matching pursuit. Each of the (at most) k iterations selects the
// column with the largest |correlation|/column-norm against the residual
// (ties broken by lowest column index, previously selected columns excluded)
// and refits by QR least squares on the accumulated support. Stops early once
// the residual norm drops below 1e-12.
inline SparseEstimate omp(const SensingMatrix& phi, const Measurement& y, int k) {
    detail::require_conforming(phi, y);
    const int m = phi.rows();
    const int n = phi.cols();
    if (k < 1 || k > m) throw parameter_error("omp sparsity k must satisfy 1 <= k <= m");

    const Vec col_norms = phi.entries.colwise().norm();
    std::vector<bool> selected(static_cast<std::size_t>(n), false);
    std::vector<int> picks;
    picks.reserve(static_cast<std::size_t>(k));

    Eigen::MatrixXd basis(m, k); // selected columns, in pick order
    Vec coef;
    Vec residual = y.values;
    int iterations = 0;

    for (int it = 0; it < k; ++it) {
        if (residual.norm() < 1e-12) break;

        const Vec corr = phi.entries.transpose() * residual;
        int best = -1;
        double best_score = -1.0;
        for (int j = 0; j < n; ++j) {
            if (selected[static_cast<std::size_t>(j)]) continue;
            const double score = col_norms[j] > 0.0 ? std::abs(corr[j]) / col_norms[j] : 0.0;
            if (score > best_score) {
                best_score = score;
                best = j;
            }
        }
        if (best < 0) break; // every column already selected

        selected[static_cast<std::size_t>(best)] = true;
        picks.push_back(best);
        basis.col(it) = phi.entries.col(best);
        ++iterations;

        auto qr = basis.leftCols(it + 1).colPivHouseholderQr();
        qr.setThreshold(1e-10);
        if (qr.rank() < it + 1)
            throw solver_error("omp: degenerate least-squares subproblem on selected support");
        coef = qr.solve(y.values);
        residual = y.values - basis.leftCols(it + 1) * coef;
    }

    SparseEstimate est;
    est.values = Vec::Zero(n);
    for (std::size_t i = 0; i < picks.size(); ++i)
        est.values[picks[i]] = coef[static_cast<Eigen::Index>(i)];
    est.support = detail::nonzero_support(est.values);
    est.iterations = iterations;
    est.residual_norm = (y.values - phi.entries * est.values).norm();
    return est;
}

inline double lasso_objective(const SensingMatrix& phi, const Vec& y, const Vec& x,
                              double lambda) {
    return 0.5 * (y - phi.entries * x).squaredNorm() + lambda * x.lpNorm<1>();
}

// Iterative soft thresholding on 0.5||y - Phi x||^2 + lambda ||x||_1 from
// x = 0 with step 1/L, L the Gram spectral norm. Terminates when the iterate
// change falls below tol in the infinity norm or after max_iters iterations.
inline SparseEstimate ista(const SensingMatrix& phi, const Measurement& y, double lambda,
                           int max_iters, double tol) {
    detail::require_conforming(phi, y);
    if (!(lambda > 0.0)) throw parameter_error("ista lambda must be positive");
    if (!(tol > 0.0)) throw parameter_error("ista tol must be positive");
    if (max_iters < 1) throw parameter_error("ista max_iters must be positive");

    const double lipschitz = gram_spectral_norm(phi);
    if (lipschitz <= 0.0) throw solver_error("ista: zero sensing operator");
    const double step = 1.0 / lipschitz;
    const double threshold = lambda * step;

    const int n = phi.cols();
    const int m = phi.rows();
    Vec x = Vec::Zero(n);
    Vec grad(n), next(n);
    int iterations = 0;
    for (int it = 0; it < max_iters; ++it) {
        // grad = Phi^T (Phi x - y), fused into one sweep over the matrix rows
        // so each row is consumed while still in cache.
        grad.setZero();
        for (int r = 0; r < m; ++r) {
            const double t = phi.entries.row(r).dot(x) - y.values[r];
            grad.noalias() += t * phi.entries.row(r).transpose();
        }
        next = x - step * grad;
        for (int i = 0; i < n; ++i) {
            const double z = next[i];
            next[i] = (z > threshold) ? z - threshold : (z < -threshold ? z + threshold : 0.0);
        }
        const double change = (next - x).lpNorm<Eigen::Infinity>();
        x.swap(next);
        ++iterations;
        if (change < tol) break;
    }

    SparseEstimate est;
    est.values = std::move(x);
    est.support = detail::nonzero_support(est.values);
    est.iterations = iterations;
    est.residual_norm = (y.values - phi.entries * est.values).norm();
    return est;
}

// Recovery quality of an estimate against ground truth. psnr_db is defined
// as 10 log10(peak^2 n / ||x_hat - x||^2) and present only when a peak is
// declared; exact recovery yields +infinity.
inline ReconMetrics evaluate_reconstruction(const Signal& truth, const SparseEstimate& estimate,
                                            std::optional<double> peak = std::nullopt) {
    if (truth.values.size() != estimate.values.size())
        throw dimension_error("estimate length does not match ground truth");
    const double truth_norm = truth.values.norm();
    if (truth_norm == 0.0)
        throw metric_error("relative error undefined for zero-norm ground truth");
    if (peak && !(*peak > 0.0)) throw parameter_error("peak must be positive");

    ReconMetrics metrics;
    const double err2 = (estimate.values - truth.values).squaredNorm();
    metrics.relative_l2 = std::sqrt(err2) / truth_norm;
    if (peak) {
        const double n = static_cast<double>(truth.values.size());
        metrics.psnr_db = err2 > 0.0
                              ? 10.0 * std::log10((*peak) * (*peak) * n / err2)
                              : std::numeric_limits<double>::infinity();
    }
    metrics.support_recovered = detail::nonzero_support(truth.values) == estimate.support;
    return metrics;
}

} // namespace ca
