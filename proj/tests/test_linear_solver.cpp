#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "iilasso/linear_solver.hpp"
#include "oracles.hpp"

using namespace iilasso;

namespace {

SolverConfig tight()
{
    SolverConfig c;
    c.tol = 1e-12;
    c.max_sweeps = 100000;
    return c;
}

// n = 4 orthonormal design (X^T X / n = I) with a response.
Dataset orthonormal()
{
    Matrix X(4, 3);
    X << 1, 1, 1, -1, 1, -1, 1, -1, -1, -1, -1, 1;
    const Vector y = (Vector(4) << 3.0, -1.0, 0.5, -2.5).finished();
    return make_dataset(X, y, Task::regression, true);
}

Dataset duplicated_pair(std::uint64_t seed, Index n = 40)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Matrix X(n, 2);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        X(i, 0) = X(i, 1) = nd(rng);
        y[i] = X(i, 0) + 0.3 * nd(rng);
    }
    return make_dataset(X, y, Task::regression, true);
}

} // namespace

TEST_CASE("soft_threshold")
{
    CHECK(soft_threshold(3, 1) == 2);
    CHECK(soft_threshold(-3, 1) == -2);
    CHECK(soft_threshold(0.5, 1) == 0);
    CHECK(soft_threshold(1, 1) == 0);
    CHECK(soft_threshold(-1, 1) == 0);
}

TEST_CASE("coordinate_update with alpha = 0 is the Lasso step")
{
    const Dataset d = oracle::random_regression(30, 6, 1);
    Vector beta = Vector::LinSpaced(6, -1, 1);
    const PenaltySpec pen{0.2, 0.0, {}};
    CoordinateState st = CoordinateState::init(beta, d, pen);
    const Index j = 2;
    Vector others = beta;
    others[j] = 0.0;
    const double z = d.X.col(j).dot(d.y - d.X * others) / d.n();
    const double expected = soft_threshold(z, 0.2) / (d.X.col(j).squaredNorm() / d.n());
    CHECK(coordinate_update(j, beta, d, pen, st) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(st.consistent_with(beta, d, pen, 1e-12));
}

TEST_CASE("orthonormal design is solved in one sweep")
{
    const Dataset d = orthonormal();
    REQUIRE((d.X.transpose() * d.X / 4.0 - Matrix::Identity(3, 3)).norm() < 1e-12);
    const double lambda = 0.3;
    const PenaltySpec pen{lambda, 0.0, {}};
    Vector beta = Vector::Zero(3);
    CoordinateState st = CoordinateState::init(beta, d, pen);
    const Vector xty = d.X.transpose() * d.y / 4.0;
    for (Index j = 0; j < 3; ++j) coordinate_update(j, beta, d, pen, st);
    for (Index j = 0; j < 3; ++j) CHECK(beta[j] == doctest::Approx(soft_threshold(xty[j], lambda)));
    const Vector first = beta;
    for (Index j = 0; j < 3; ++j) coordinate_update(j, beta, d, pen, st);
    CHECK((beta - first).norm() < 1e-14);
    CHECK(check_kkt(beta, d, pen) <= 1e-10);
}

TEST_CASE("coordinate_update zeroes a duplicate under a huge cross threshold")
{
    const Dataset d = duplicated_pair(3);
    const SimilarityMatrix R = build_similarity(d, SimilarityVariant::ratio, 1e-4);
    REQUIRE(R(0, 1) == doctest::Approx(9999.0).epsilon(1e-6));
    const PenaltySpec pen{0.1, 1.0, R};
    Vector beta = (Vector(2) << 0.2, 0.5).finished();
    CoordinateState st = CoordinateState::init(beta, d, pen);
    CHECK(coordinate_update(0, beta, d, pen, st) == 0.0);

    // 1-D objective minimization over beta_1 agrees
    double best = 1e300, arg = 1.0;
    for (double b = -2.0; b <= 2.0; b += 1e-4) {
        Vector t = beta;
        t[0] = b;
        const double v = objective(t, d, pen);
        if (v < best) best = v, arg = b;
    }
    CHECK(std::abs(arg) < 1e-4);
}

TEST_CASE("every coordinate update is a descent step")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Dataset d = oracle::random_regression(30, 10, seed, 0.5);
        for (auto v : {SimilarityVariant::squared, SimilarityVariant::absolute, SimilarityVariant::ratio}) {
            const PenaltySpec pen{0.05, 2.0, build_similarity(d, v)};
            Vector beta = Vector::Zero(10);
            CoordinateState st = CoordinateState::init(beta, d, pen);
            double prev = objective(beta, d, pen);
            for (int sweep = 0; sweep < 20; ++sweep) {
                for (Index j = 0; j < 10; ++j) {
                    coordinate_update(j, beta, d, pen, st);
                    const double cur = objective(beta, d, pen);
                    CHECK(cur <= prev + 1e-12);
                    prev = cur;
                }
            }
            CHECK(st.consistent_with(beta, d, pen, 1e-10));
        }
    }
}

TEST_CASE("coordinate_update index check")
{
    const Dataset d = oracle::random_regression(10, 3, 1);
    const PenaltySpec pen{0.1, 0.0, {}};
    Vector beta = Vector::Zero(3);
    CoordinateState st = CoordinateState::init(beta, d, pen);
    CHECK_THROWS_AS(coordinate_update(3, beta, d, pen, st), InputError);
}

TEST_CASE("objective")
{
    const Dataset d = oracle::random_regression(25, 6, 4, 0.2);
    const PenaltySpec pen{0.3, 1.5, build_similarity(d, SimilarityVariant::absolute)};
    CHECK(objective(Vector::Zero(6), d, pen) == doctest::Approx(d.y.squaredNorm() / 50.0));
    const Vector b = Vector::LinSpaced(6, -1.2, 0.9);
    CHECK(std::abs(objective(b, d, pen) - oracle::naive_objective(d.X, d.y, b, pen.similarity.dense(), 0.3, 1.5)) <
          1e-12);

    Matrix X = d.X;
    const Vector truth = Vector::LinSpaced(6, 1, 2);
    const Dataset exact = make_dataset(X, X * truth, Task::regression, false);
    CHECK(objective(truth, exact, PenaltySpec{0.0, 0.0, {}}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(objective(Vector::Zero(5), d, pen), InputError);
}

TEST_CASE("check_kkt closed forms")
{
    const Dataset d = orthonormal();
    const Vector xty = d.X.transpose() * d.y / 4.0;
    const PenaltySpec pen{0.3, 0.0, {}};
    Vector exact(3);
    for (Index j = 0; j < 3; ++j) exact[j] = soft_threshold(xty[j], 0.3);
    CHECK(check_kkt(exact, d, pen) <= 1e-10);
    const PenaltySpec big{lambda_max(d), 0.0, {}};
    CHECK(check_kkt(Vector::Zero(3), d, big) == 0.0);
    CHECK(check_kkt(Vector::Zero(3), d, pen) > 0.0);
}

TEST_CASE("fit with alpha = 0 matches the textbook Lasso oracle")
{
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const Dataset d = oracle::random_regression(50, 20, 100 + seed, 0.3);
        const double top = lambda_max(d);
        for (double frac : {0.5, 0.1, 0.02}) {
            const FitResult res = fit(d, PenaltySpec{top * frac, 0.0, {}}, tight());
            const Vector ref = oracle::plain_lasso(d.X, d.y, top * frac);
            CHECK(res.converged);
            CHECK((res.beta - ref).lpNorm<Eigen::Infinity>() < 1e-8);
        }
    }
}

TEST_CASE("lambda >= lambda_max gives the zero solution for any alpha")
{
    const Dataset d = oracle::random_regression(40, 15, 9, 0.5);
    const SimilarityMatrix R = build_similarity(d, SimilarityVariant::ratio);
    for (double alpha : {0.0, 1.0, 100.0}) {
        const FitResult res = fit(d, PenaltySpec{lambda_max(d), alpha, R}, SolverConfig{});
        CHECK(res.beta.isZero(0.0));
        CHECK(res.model_size == 0);
        CHECK(res.converged);
    }
}

TEST_CASE("duplicated columns: at most one active, confirmed by grid search")
{
    const Dataset d = duplicated_pair(5);
    const SimilarityMatrix R = build_similarity(d, SimilarityVariant::ratio, 1e-4);
    const PenaltySpec pen{0.05, 10.0, R};
    const FitResult res = fit(d, pen, SolverConfig{});
    CHECK(res.converged);
    CHECK(res.model_size <= 1);

    double best = 1e300;
    Vector arg = Vector::Zero(2);
    for (double b1 = -0.2; b1 <= 1.4; b1 += 0.01) {
        for (double b2 = -0.2; b2 <= 1.4; b2 += 0.01) {
            const Vector b = (Vector(2) << b1, b2).finished();
            const double v = objective(b, d, pen);
            if (v < best) best = v, arg = b;
        }
    }
    CHECK(std::min(std::abs(arg[0]), std::abs(arg[1])) < 1e-9);
    CHECK(res.objective() <= best + 1e-6);
}

TEST_CASE("objective trace is non-increasing and converged fits are stationary")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Dataset d = oracle::random_regression(40, 25, seed, 0.6);
        for (auto v : {SimilarityVariant::squared, SimilarityVariant::absolute, SimilarityVariant::ratio}) {
            SolverConfig cfg;
            cfg.active_set = seed % 2 == 0;
            const FitResult res = fit(d, PenaltySpec{0.05 * lambda_max(d), 1.0, build_similarity(d, v)}, cfg);
            for (std::size_t t = 1; t < res.objective_trace.size(); ++t) {
                CHECK(res.objective_trace[t] <= res.objective_trace[t - 1] + 1e-10);
            }
            CHECK(res.converged);
            CHECK(res.kkt_residual <= 10 * cfg.tol);
            CHECK(res.model_size == static_cast<Index>(support_of(res.beta).size()));
        }
    }
}

TEST_CASE("active set and full sweeps reach the same convex solution")
{
    const Dataset d = oracle::random_regression(40, 30, 2, 0.4);
    const PenaltySpec pen{0.03 * lambda_max(d), 1.0, build_similarity(d, SimilarityVariant::squared)};
    SolverConfig a = tight(), b = tight();
    a.active_set = true;
    b.active_set = false;
    CHECK((fit(d, pen, a).beta - fit(d, pen, b).beta).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("permuting columns preserves the attained objective")
{
    const Dataset d = oracle::random_regression(40, 12, 17, 0.3);
    std::vector<Index> perm(12);
    std::iota(perm.begin(), perm.end(), Index{0});
    std::mt19937_64 rng(3);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix Xp(d.n(), 12);
    for (Index j = 0; j < 12; ++j) Xp.col(j) = d.X.col(perm[j]);
    const Dataset dp = make_dataset(Xp, d.y, Task::regression, true);
    const PenaltySpec pen{0.05 * lambda_max(d), 1.0, build_similarity(d, SimilarityVariant::squared)};
    const PenaltySpec penp{pen.lambda, 1.0, build_similarity(dp, SimilarityVariant::squared)};
    const FitResult a = fit(d, pen, tight());
    const FitResult b = fit(dp, penp, tight());
    CHECK(std::abs(a.objective() - b.objective()) < 1e-10);
    for (Index j = 0; j < 12; ++j) CHECK(std::abs(b.beta[j] - a.beta[perm[j]]) < 1e-7);
}

TEST_CASE("fit reports non-convergence at max_sweeps")
{
    const Dataset d = oracle::random_regression(40, 25, 1, 0.8);
    SolverConfig cfg;
    cfg.max_sweeps = 1;
    const FitResult res = fit(d, PenaltySpec{0.01 * lambda_max(d), 1.0, build_similarity(d, SimilarityVariant::ratio)}, cfg);
    CHECK_FALSE(res.converged);
    CHECK(res.sweeps_used == 1);
}

TEST_CASE("fit input validation")
{
    const Dataset d = oracle::random_regression(20, 4, 1);
    CHECK_THROWS_AS(fit(d, PenaltySpec{-1.0, 0.0, {}}, SolverConfig{}), InputError);
    CHECK_THROWS_AS(fit(d, PenaltySpec{0.1, 1.0, SimilarityMatrix::zeros(3)}, SolverConfig{}), InputError);
    SolverConfig bad;
    bad.tol = 0.0;
    CHECK_THROWS_AS(fit(d, PenaltySpec{0.1, 0.0, {}}, bad), InputError);
    CHECK_THROWS_AS(fit(d, PenaltySpec{0.1, 0.0, {}}, SolverConfig{}, Vector::Zero(3)), InputError);
}

TEST_CASE("default lambda grid")
{
    const Dataset tall = oracle::random_regression(50, 20, 1);
    const Vector g = default_lambda_grid(tall);
    CHECK(g.size() == 100);
    CHECK(g[0] == doctest::Approx(lambda_max(tall)));
    CHECK(g[99] == doctest::Approx(1e-3 * lambda_max(tall)));
    const Dataset wide = oracle::random_regression(20, 50, 1);
    CHECK(default_lambda_grid(wide)[99] == doctest::Approx(1e-2 * lambda_max(wide)));
    for (Index k = 1; k < g.size(); ++k) CHECK(g[k] < g[k - 1]);
}

TEST_CASE("lambda grid reaches deeper as alpha grows")
{
    const Dataset d = oracle::random_regression(50, 20, 2);
    const double top = lambda_max(d);
    CHECK(default_lambda_grid(d, 100, std::nullopt, 0.0) == default_lambda_grid(d));
    double previous = default_lambda_grid(d)[99];
    for (double alpha : {0.01, 1.0, 100.0}) {
        const Vector g = default_lambda_grid(d, 100, std::nullopt, alpha);
        CHECK(g[0] == doctest::Approx(top));
        CHECK(g[99] == doctest::Approx(1e-3 * top / (1.0 + kAlphaGridDepth * alpha * top)));
        CHECK(g[99] < previous);
        previous = g[99];
    }
    CHECK_THROWS_AS(default_lambda_grid(d, 100, std::nullopt, -1.0), InputError);
}

TEST_CASE("fit_path init strategies")
{
    const Dataset d = oracle::random_regression(40, 15, 21, 0.3);
    const SimilarityMatrix R = build_similarity(d, SimilarityVariant::squared);
    const Vector lambdas = default_lambda_grid(d, 20);

    SolverConfig warm = tight(), zeros = tight(), lasso = tight();
    zeros.init = InitStrategy::zeros;
    lasso.init = InitStrategy::lasso;
    const PathResult a = fit_path(d, 1.0, R, lambdas, warm);
    const PathResult b = fit_path(d, 1.0, R, lambdas, zeros);
    const PathResult c = fit_path(d, 1.0, R, lambdas, lasso);
    REQUIRE(a.fits.size() == 20);
    CHECK(a.fits.front().beta.isZero(0.0));
    for (std::size_t k = 0; k < 20; ++k) {
        // convex variant: every start reaches the same optimum
        CHECK((a.fits[k].beta - b.fits[k].beta).lpNorm<Eigen::Infinity>() < 1e-7);
        CHECK((a.fits[k].beta - c.fits[k].beta).lpNorm<Eigen::Infinity>() < 1e-7);
        CHECK(a.fits[k].lambda == lambdas[static_cast<Index>(k)]);
    }
    // warm starts need fewer sweeps in total
    int sw_warm = 0, sw_zero = 0;
    for (std::size_t k = 0; k < 20; ++k) sw_warm += a.fits[k].sweeps_used, sw_zero += b.fits[k].sweeps_used;
    CHECK(sw_warm < sw_zero);

    const Vector bad = (Vector(2) << 0.1, 0.2).finished();
    CHECK_THROWS_AS(fit_path(d, 1.0, R, bad, warm), InputError);
}
