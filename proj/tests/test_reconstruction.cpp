#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "ca/datasets.hpp"
#include "ca/reconstruction.hpp"
#include "ca/sensing.hpp"

#include "oracles.hpp"
#include "testutil.hpp"

using ca::Ensemble;

namespace {

ca::Measurement bind(const ca::SensingMatrix& phi, ca::Vec values) {
    ca::Measurement y;
    y.values = std::move(values);
    y.matrix_id = phi.id;
    return y;
}

} // namespace

TEST_CASE("omp on the identity recovers a spike in one step") {
    const ca::SensingMatrix phi = ca::generate_matrix(0, 4, 4, Ensemble::Identity);
    const ca::Measurement y = bind(phi, (ca::Vec(4) << 0, 3, 0, 0).finished());
    const ca::SparseEstimate est = ca::omp(phi, y, 1);
    REQUIRE(testutil::exact_equal(est.values, y.values));
    REQUIRE(est.support == std::vector<int>{1});
    REQUIRE(est.iterations == 1);
    REQUIRE(est.residual_norm < 1e-12);
}

TEST_CASE("omp stops immediately on a zero measurement") {
    const ca::SensingMatrix phi = ca::generate_matrix(3, 4, 8, Ensemble::Gaussian);
    const ca::SparseEstimate est = ca::omp(phi, bind(phi, ca::Vec::Zero(4)), 3);
    REQUIRE(testutil::exact_equal(est.values, ca::Vec::Zero(8)));
    REQUIRE(est.support.empty());
    REQUIRE(est.iterations == 0);
}

TEST_CASE("omp against exhaustive support enumeration on small instances") {
    // n=8, k=2, m=6: brute force over all 28 supports, least squares on each.
    // The oracle always finds the planted support on noiseless data; greedy
    // selection misses it on a minority of instances at this coherence, but
    // whenever it lands on the oracle support the estimate is exact.
    int qualifying = 0, agreed = 0;
    for (int t = 0; t < 25; ++t) {
        const ca::SensingMatrix phi =
            ca::generate_matrix(500 + static_cast<std::uint64_t>(t), 6, 8, Ensemble::Gaussian);
        const ca::Signal x = ca::gen_sparse(8, 2, 1.0, 9000 + static_cast<std::uint64_t>(t));
        const ca::Measurement y = ca::acquire(phi, x);

        const oracle::ExhaustiveResult best = oracle::exhaustive_sparse_fit(phi.entries, y.values, 2);
        std::vector<int> true_support;
        for (int i = 0; i < 8; ++i)
            if (x.values[i] != 0.0) true_support.push_back(i);
        REQUIRE(best.residual < 1e-10);
        REQUIRE(best.support == true_support);
        ++qualifying;

        const ca::SparseEstimate est = ca::omp(phi, y, 2);
        // Exhaustive search dominates any greedy fit of the same sparsity.
        REQUIRE(best.residual <= est.residual_norm + 1e-10);
        if (est.support == best.support) {
            REQUIRE(ca::evaluate_reconstruction(x, est).relative_l2 <= 1e-8);
            ++agreed;
        }
    }
    REQUIRE(qualifying == 25);
    REQUIRE(agreed >= 15); // regression canary on the measured agreement rate
}

TEST_CASE("omp recovers the support reliably in the standard regime") {
    // n=256, k=5, m=80, noiseless gaussian: >= 95% exact support recovery.
    int recovered = 0;
    for (int t = 0; t < 100; ++t) {
        const ca::SensingMatrix phi =
            ca::generate_matrix(100 + static_cast<std::uint64_t>(t), 80, 256, Ensemble::Gaussian);
        const ca::Signal x = ca::gen_sparse(256, 5, 1.0, 7000 + static_cast<std::uint64_t>(t));
        const ca::SparseEstimate est = ca::omp(phi, ca::acquire(phi, x), 5);
        REQUIRE(est.support.size() <= 80);
        if (ca::evaluate_reconstruction(x, est).support_recovered) ++recovered;
    }
    REQUIRE(recovered >= 95);
}

TEST_CASE("omp with k=1 always finds a single active column") {
    int recovered = 0;
    for (int t = 0; t < 200; ++t) {
        const ca::SensingMatrix phi =
            ca::generate_matrix(300 + static_cast<std::uint64_t>(t), 6, 32, Ensemble::Gaussian);
        const ca::Signal x = ca::gen_sparse(32, 1, 1.0, 40000 + static_cast<std::uint64_t>(t));
        const ca::SparseEstimate est = ca::omp(phi, ca::acquire(phi, x), 1);
        if (ca::evaluate_reconstruction(x, est).support_recovered) ++recovered;
    }
    REQUIRE(recovered == 200);
}

TEST_CASE("omp validates k and detects degenerate subproblems") {
    const ca::SensingMatrix phi = ca::generate_matrix(3, 4, 8, Ensemble::Gaussian);
    const ca::Measurement y = bind(phi, ca::Vec::Ones(4));
    REQUIRE_THROWS_AS(ca::omp(phi, y, 5), ca::parameter_error);
    REQUIRE_THROWS_AS(ca::omp(phi, y, 0), ca::parameter_error);

    ca::SensingMatrix degenerate;
    degenerate.id = ca::MatrixId{0, 2, 2, Ensemble::Bernoulli};
    degenerate.entries.resize(2, 2);
    degenerate.entries << 1, 1, 0, 0; // duplicate columns, y orthogonal to both
    const ca::Measurement bad = bind(degenerate, (ca::Vec(2) << 0, 1).finished());
    REQUIRE_THROWS_AS(ca::omp(degenerate, bad, 2), ca::solver_error);
}

TEST_CASE("omp rejects a measurement from a different matrix") {
    const ca::SensingMatrix phi = ca::generate_matrix(3, 4, 8, Ensemble::Gaussian);
    const ca::SensingMatrix other = ca::generate_matrix(4, 4, 8, Ensemble::Gaussian);
    const ca::Measurement y = ca::acquire(other, ca::make_signal(ca::Vec::Ones(8)));
    REQUIRE_THROWS_AS(ca::omp(phi, y, 2), ca::dimension_error);
}

TEST_CASE("ista with vanishing lambda on the identity returns the data") {
    const ca::SensingMatrix phi = ca::generate_matrix(0, 5, 5, Ensemble::Identity);
    ca::Vec target(5);
    target << 0.4, -1.2, 3.0, 0.0, 2.5;
    const ca::SparseEstimate est = ca::ista(phi, bind(phi, target), 1e-12, 100, 1e-9);
    REQUIRE((est.values - target).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("ista returns exactly zero when lambda dominates the correlation") {
    const ca::SensingMatrix phi = ca::generate_matrix(21, 4, 10, Ensemble::Gaussian);
    const ca::Measurement y = ca::acquire(phi, ca::make_signal(ca::Vec::Ones(10)));
    const double lambda = (phi.entries.transpose() * y.values).lpNorm<Eigen::Infinity>();
    const ca::SparseEstimate est = ca::ista(phi, y, lambda * 1.000001, 50, 1e-10);
    REQUIRE(testutil::exact_equal(est.values, ca::Vec::Zero(10)));
    REQUIRE(est.support.empty());
}

TEST_CASE("ista validates its parameters") {
    const ca::SensingMatrix phi = ca::generate_matrix(3, 4, 8, Ensemble::Gaussian);
    const ca::Measurement y = bind(phi, ca::Vec::Ones(4));
    REQUIRE_THROWS_AS(ca::ista(phi, y, 0.0, 10, 1e-6), ca::parameter_error);
    REQUIRE_THROWS_AS(ca::ista(phi, y, -1.0, 10, 1e-6), ca::parameter_error);
    REQUIRE_THROWS_AS(ca::ista(phi, y, 0.1, 0, 1e-6), ca::parameter_error);
    REQUIRE_THROWS_AS(ca::ista(phi, y, 0.1, 10, 0.0), ca::parameter_error);
}

TEST_CASE("ista matches a converged coordinate-descent lasso solver") {
    for (int t = 0; t < 5; ++t) {
        const ca::SensingMatrix phi =
            ca::generate_matrix(800 + static_cast<std::uint64_t>(t), 6, 10, Ensemble::Gaussian);
        const ca::Signal x = ca::gen_sparse(10, 3, 1.0, 600 + static_cast<std::uint64_t>(t));
        const ca::Measurement y = ca::acquire(phi, x);
        const double lambda = 0.1;

        const ca::SparseEstimate est = ca::ista(phi, y, lambda, 500000, 1e-12);
        const ca::Vec cd = oracle::coordinate_descent_lasso(phi.entries, y.values, lambda);
        const double obj_ista = ca::lasso_objective(phi, y.values, est.values, lambda);
        const double obj_cd = ca::lasso_objective(phi, y.values, cd, lambda);
        REQUIRE(std::abs(obj_ista - obj_cd) <= 1e-6);
    }
}

TEST_CASE("ista decreases the lasso objective every iteration") {
    const ca::SensingMatrix phi = ca::generate_matrix(77, 8, 12, Ensemble::Gaussian);
    const ca::Signal x = ca::gen_sparse(12, 4, 1.0, 55);
    const ca::Measurement y = ca::acquire_noisy(phi, x, 0.05, 9);
    const double lambda = 0.05;

    // The t-th call reproduces iterate t exactly (deterministic from x=0),
    // so the objective trajectory can be checked without touching the API.
    double previous = ca::lasso_objective(phi, y.values, ca::Vec::Zero(12), lambda);
    for (int t = 1; t <= 40; ++t) {
        const ca::SparseEstimate est = ca::ista(phi, y, lambda, t, 1e-300);
        const double obj = ca::lasso_objective(phi, y.values, est.values, lambda);
        REQUIRE(obj <= previous + 1e-12);
        previous = obj;
    }
}

TEST_CASE("reconstruction attack fails at extreme compression") {
    // Dense targets, m <= 1% of n: the best lasso estimate over a lambda grid
    // stays useless. Grid {1e-3..10}, 300 iterations, tol 1e-6 per point.
    const int n = 4096, m = 40, trials = 50;
    std::vector<double> grid;
    for (int i = 0; i < 9; ++i) grid.push_back(std::pow(10.0, -3.0 + 0.5 * i));

    std::vector<double> best_errors;
    for (int t = 0; t < trials; ++t) {
        const ca::SensingMatrix phi =
            ca::generate_matrix(2000 + static_cast<std::uint64_t>(t), m, n, Ensemble::Gaussian);
        ca::Stream rng(5000 + static_cast<std::uint64_t>(t));
        ca::Vec dense(n);
        for (int i = 0; i < n; ++i) dense[i] = rng.uniform01();
        const ca::Signal x = ca::make_signal(dense);
        const ca::Measurement y = ca::acquire(phi, x);

        double best = std::numeric_limits<double>::infinity();
        for (const double lambda : grid) {
            const ca::SparseEstimate est = ca::ista(phi, y, lambda, 300, 1e-6);
            best = std::min(best, ca::evaluate_reconstruction(x, est).relative_l2);
        }
        best_errors.push_back(best);
    }
    std::sort(best_errors.begin(), best_errors.end());
    REQUIRE(best_errors[trials / 2] >= 0.8);
}

TEST_CASE("reconstruction metrics match hand-computed values") {
    const ca::Signal truth = ca::make_signal(ca::Vec::Ones(4)); // norm 2

    ca::SparseEstimate exact;
    exact.values = truth.values;
    exact.support = {0, 1, 2, 3};
    REQUIRE(ca::evaluate_reconstruction(truth, exact).relative_l2 == 0.0);
    REQUIRE(*ca::evaluate_reconstruction(truth, exact, 1.0).psnr_db ==
            std::numeric_limits<double>::infinity());

    ca::SparseEstimate zero;
    zero.values = ca::Vec::Zero(4);
    REQUIRE(ca::evaluate_reconstruction(truth, zero).relative_l2 == 1.0);

    ca::SparseEstimate offset;
    offset.values = truth.values.array() + 0.1;
    offset.support = {0, 1, 2, 3};
    const ca::ReconMetrics metrics = ca::evaluate_reconstruction(truth, offset, 1.0);
    REQUIRE(metrics.relative_l2 == Catch::Approx(0.1).margin(1e-12));
    REQUIRE(*metrics.psnr_db == Catch::Approx(20.0).margin(1e-9));
    REQUIRE(metrics.support_recovered);
}

TEST_CASE("reconstruction metrics reject invalid inputs") {
    const ca::Signal truth = ca::make_signal(ca::Vec::Ones(4));
    ca::SparseEstimate est;
    est.values = ca::Vec::Zero(3);
    REQUIRE_THROWS_AS(ca::evaluate_reconstruction(truth, est), ca::dimension_error);

    const ca::Signal zero{ca::Vec::Zero(4), std::nullopt, std::nullopt};
    est.values = ca::Vec::Zero(4);
    REQUIRE_THROWS_AS(ca::evaluate_reconstruction(zero, est), ca::metric_error);
}

TEST_CASE("gram spectral norm is exact for the identity") {
    const ca::SensingMatrix phi = ca::generate_matrix(0, 6, 6, Ensemble::Identity);
    REQUIRE(ca::gram_spectral_norm(phi) == Catch::Approx(1.0).margin(1e-12));
}
