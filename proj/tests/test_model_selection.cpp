#include <doctest.h>

#include <cmath>
#include <random>

#include "iilasso/model_selection.hpp"
#include "oracles.hpp"

using namespace iilasso;

namespace {

SelectionOptions small_options()
{
    SelectionOptions o;
    o.lambda_count = 15;
    return o;
}

} // namespace

TEST_CASE("evaluate regression")
{
    const Dataset base = oracle::random_regression(30, 5, 1);
    Vector truth = Vector::Zero(5);
    truth[0] = 2.0;
    truth[3] = -1.0;
    const Dataset noiseless = make_dataset(base.X, base.X * truth, Task::regression, false);
    FitResult exact;
    exact.beta = truth;
    exact.model_size = 2;
    const GroundTruth gt = GroundTruth::from_beta(truth);
    const Metrics m = evaluate(exact, noiseless, &gt);
    CHECK(m.prediction_error == doctest::Approx(0.0));
    CHECK(*m.estimation_error == doctest::Approx(0.0));
    CHECK(m.model_size == 2);

    FitResult null;
    null.beta = Vector::Zero(5);
    const Metrics z = evaluate(null, base);
    CHECK(z.prediction_error == doctest::Approx(base.y.squaredNorm() / 30.0));
    CHECK(z.model_size == 0);
    CHECK_FALSE(z.estimation_error);
}

TEST_CASE("evaluate classification null model")
{
    Matrix X(5, 1);
    X << 1, 2, 3, 4, 5;
    const Dataset d = make_dataset(X, (Vector(5) << 1, 0, 1, 1, 0).finished(), Task::classification, true);
    LogisticFitResult null;
    null.beta = Vector::Zero(1);
    null.intercept = 0.0;
    const Metrics m = evaluate(null, d);
    CHECK(*m.loglik == doctest::Approx(-std::log(2.0)));
    // probability 0.5 everywhere predicts class 0
    CHECK(*m.misclassification == doctest::Approx(0.6));
    CHECK_THROWS_AS(evaluate(null, oracle::random_regression(10, 1, 1)), InputError);
}

TEST_CASE("tie-breaking prefers larger lambda, then larger alpha")
{
    std::vector<GridScore> g{{1.0, 0.1, 2.0}, {10.0, 0.1, 2.0}, {1.0, 0.5, 2.0}, {10.0, 0.5, 2.0}, {5.0, 0.9, 3.0}};
    CHECK(best_grid_index(g, false) == 3);
    CHECK(best_grid_index(g, true) == 4);
}

TEST_CASE("validation on the training data drifts to the smallest lambda")
{
    const Dataset d = oracle::random_regression(40, 10, 3);
    SelectionOptions o = small_options();
    o.alpha_grid = {0.0};
    const SelectionResult r = select_validation(d, d, o);
    const Vector grid = default_lambda_grid(d, 15);
    CHECK(r.best_lambda == grid[14]);
    CHECK(r.metric == "mse");
    CHECK(r.grid_scores.size() == 15);
}

TEST_CASE("singleton grids return that point")
{
    const Dataset d = oracle::random_regression(40, 10, 3);
    const Dataset v = oracle::random_regression(40, 10, 4);
    SelectionOptions o;
    o.alpha_grid = {3.0};
    o.lambda_grid = Vector::Constant(1, 0.2);
    const SelectionResult r = select_validation(d, v, o);
    CHECK(r.best_alpha == 3.0);
    CHECK(r.best_lambda == 0.2);
    CHECK(std::get<FitResult>(r.refit).lambda == 0.2);
}

TEST_CASE("leave-one-out cross validation on a tiny dataset")
{
    const Dataset d = oracle::random_regression(10, 2, 6);
    SelectionOptions o = small_options();
    o.alpha_grid = {0.0, 1.0};
    const SelectionResult r = cross_validate(d, 10, o, 1);
    for (const auto& g : r.grid_scores) {
        CHECK(std::isfinite(g.mean));
        CHECK(std::isfinite(*g.se));
    }
    CHECK_THROWS_AS(cross_validate(d, 11, o, 1), InputError);
    CHECK_THROWS_AS(cross_validate(d, 1, o, 1), InputError);
}

TEST_CASE("cross validation is deterministic and thread-count independent")
{
    const Dataset d = oracle::random_regression(40, 12, 7, 0.5);
    SelectionOptions o = small_options();
    o.alpha_grid = {0.0, 1.0, 10.0};
    const SelectionResult a = cross_validate(d, 5, o, 42);
    const SelectionResult b = cross_validate(d, 5, o, 42);
    o.threads = 3;
    const SelectionResult c = cross_validate(d, 5, o, 42);
    CHECK(assign_folds(d, 5, 42) == assign_folds(d, 5, 42));
    REQUIRE(a.grid_scores.size() == c.grid_scores.size());
    for (std::size_t i = 0; i < a.grid_scores.size(); ++i) {
        CHECK(a.grid_scores[i].mean == b.grid_scores[i].mean);
        CHECK(a.grid_scores[i].mean == c.grid_scores[i].mean);
        CHECK(*a.grid_scores[i].se == *c.grid_scores[i].se);
    }
    CHECK(a.best_lambda == c.best_lambda);
    CHECK(a.best_alpha == c.best_alpha);
    CHECK(std::get<FitResult>(a.refit).beta == std::get<FitResult>(c.refit).beta);
}

TEST_CASE("alpha = 0 cross validation agrees with a Lasso-oracle CV harness")
{
    const Dataset d = oracle::random_regression(30, 6, 8, 0.3);
    SelectionOptions o;
    o.alpha_grid = {0.0};
    o.lambda_count = 6;
    o.solver.tol = 1e-12;
    const SelectionResult r = cross_validate(d, 5, o, 3);

    const std::vector<int> folds = assign_folds(d, 5, 3);
    const Vector lambdas = default_lambda_grid(d, 6);
    const Matrix X = d.raw_X();
    const Vector y = d.raw_y();
    std::vector<double> sums(6, 0.0);
    for (int f = 0; f < 5; ++f) {
        std::vector<Index> tr, te;
        for (Index i = 0; i < d.n(); ++i) (folds[static_cast<std::size_t>(i)] == f ? te : tr).push_back(i);
        Matrix Xtr = X(tr, Eigen::all), Xte = X(te, Eigen::all);
        Vector ytr = y(tr), yte = y(te);
        // standardize with training-fold statistics only
        const Eigen::RowVectorXd mean = Xtr.colwise().mean();
        Xtr.rowwise() -= mean;
        Xte.rowwise() -= mean;
        const Eigen::RowVectorXd scale = (Xtr.colwise().squaredNorm() / static_cast<double>(tr.size())).cwiseSqrt();
        for (Index j = 0; j < 6; ++j) Xtr.col(j) /= scale[j], Xte.col(j) /= scale[j];
        const double ym = ytr.mean();
        ytr.array() -= ym;
        yte.array() -= ym;
        for (Index l = 0; l < 6; ++l) {
            const Vector b = oracle::plain_lasso(Xtr, ytr, lambdas[l]);
            sums[static_cast<std::size_t>(l)] += (yte - Xte * b).squaredNorm() / static_cast<double>(te.size());
        }
    }
    for (Index l = 0; l < 6; ++l) CHECK(std::abs(r.grid_scores[static_cast<std::size_t>(l)].mean - sums[static_cast<std::size_t>(l)] / 5.0) < 1e-6);
}

TEST_CASE("held-out rows are transformed with training statistics")
{
    Matrix X(6, 2);
    X << 1, 0, 2, 1, 3, 0, 4, 1, 100, 0, 200, 1;
    const Vector y = Vector::LinSpaced(6, 0, 5);
    const Dataset train = make_dataset(X.topRows(4), y.head(4), Task::regression, true);
    const Dataset test = apply_standardization(X.bottomRows(2), y.tail(2), train);
    CHECK(test.X(0, 0) == doctest::Approx((100 - 2.5) / train.col_scales[0]));
    CHECK(test.y[0] == doctest::Approx(4 - 1.5));
}

TEST_CASE("classification cross validation")
{
    const Dataset d = oracle::random_classification(40, 5, 2, 2.0);
    const std::vector<int> folds = assign_folds(d, 4, 9);
    // stratified: each fold gets both classes in near-equal shares
    for (int f = 0; f < 4; ++f) {
        double ones = 0, total = 0;
        for (Index i = 0; i < d.n(); ++i) {
            if (folds[static_cast<std::size_t>(i)] != f) continue;
            total += 1;
            ones += d.y[i];
        }
        CHECK(total >= 9);
        CHECK(ones >= std::floor(d.y.sum() / 4) - 1);
    }
    SelectionOptions o = small_options();
    o.alpha_grid = {0.0, 1.0};
    const SelectionResult r = cross_validate(d, 4, o, 9);
    CHECK(r.metric == "loglik");
    CHECK(std::holds_alternative<LogisticFitResult>(r.refit));
    for (const auto& g : r.grid_scores) CHECK(g.mean < 0.0);

    Matrix X(6, 1);
    X << 1, 2, 3, 4, 5, 6;
    const Dataset rare = make_dataset(X, (Vector(6) << 0, 0, 0, 0, 0, 1).finished(), Task::classification, true);
    CHECK_THROWS_WITH_AS(cross_validate(rare, 6, o, 1), doctest::Contains("missing a class"), InputError);
}
