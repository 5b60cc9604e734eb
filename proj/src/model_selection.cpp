#include "iilasso/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <random>

namespace iilasso {

namespace {

double estimation_error(const Vector& beta, const Dataset& data, const GroundTruth& truth)
{
    if (truth.beta_star.size() != beta.size()) throw InputError("ground truth length does not match p");
    return (unstandardize_coefficients(beta, data).first - truth.beta_star).norm();
}

SimilarityMatrix similarity_for(const Dataset& train, double alpha, const SelectionOptions& options)
{
    if (alpha == 0.0) return SimilarityMatrix::zeros(train.p());
    return build_similarity(train, options.variant, options.clamp, options.partition);
}

// Per-(alpha, lambda) held-out scores for one training/evaluation split.
struct SplitScores {
    std::vector<double> score;
    std::vector<double> size;
};

SplitScores score_split(const Dataset& train, const Dataset& held_out, const std::vector<Vector>& grids,
                        const SelectionOptions& options, std::vector<AnyFit>* fits_out)
{
    SplitScores out;
    for (std::size_t a = 0; a < options.alpha_grid.size(); ++a) {
        const double alpha = options.alpha_grid[a];
        const Vector& lambdas = grids[a];
        const SimilarityMatrix R = similarity_for(train, alpha, options);
        if (train.task == Task::regression) {
            PathResult path = fit_path(train, alpha, R, lambdas, options.solver);
            for (auto& f : path.fits) {
                const Metrics m = evaluate(f, held_out);
                out.score.push_back(m.prediction_error);
                out.size.push_back(static_cast<double>(f.model_size));
                if (fits_out) fits_out->emplace_back(std::move(f));
            }
        } else {
            LogisticPathResult path = fit_logistic_path(train, alpha, R, lambdas, options.logistic);
            for (auto& f : path.fits) {
                const Metrics m = evaluate(f, held_out);
                out.score.push_back(*m.loglik);
                out.size.push_back(static_cast<double>(f.model_size));
                if (fits_out) fits_out->emplace_back(std::move(f));
            }
        }
    }
    return out;
}

// One lambda grid per alpha. A user grid is shared by every alpha; the
// default grid reaches deeper as alpha grows.
std::vector<Vector> lambda_grids_for(const Dataset& data, const SelectionOptions& options)
{
    std::vector<Vector> grids;
    for (double alpha : options.alpha_grid) {
        if (options.lambda_grid) {
            grids.push_back(*options.lambda_grid);
        } else if (data.task == Task::regression) {
            grids.push_back(default_lambda_grid(data, options.lambda_count, std::nullopt, alpha));
        } else {
            grids.push_back(default_lambda_grid_logistic(data, options.lambda_count, std::nullopt, alpha));
        }
    }
    return grids;
}

void check_options(const SelectionOptions& options)
{
    if (options.alpha_grid.empty()) throw InputError("alpha grid is empty");
    for (double a : options.alpha_grid) {
        if (!(a >= 0.0)) throw InputError("alpha values must be nonnegative");
    }
}

} // namespace

Metrics evaluate(const FitResult& fit, const Dataset& data, const GroundTruth* truth)
{
    if (data.task != Task::regression) throw InputError("linear fit evaluated on a classification dataset");
    if (fit.beta.size() != data.p()) throw InputError("fit and dataset disagree on p");
    Metrics m;
    m.prediction_error = (data.y - data.X * fit.beta).squaredNorm() / static_cast<double>(data.n());
    m.model_size = fit.model_size;
    if (truth) m.estimation_error = estimation_error(fit.beta, data, *truth);
    return m;
}

Metrics evaluate(const LogisticFitResult& fit, const Dataset& data, const GroundTruth* truth)
{
    if (data.task != Task::classification) throw InputError("logistic fit evaluated on a regression dataset");
    if (fit.beta.size() != data.p()) throw InputError("fit and dataset disagree on p");
    const Vector eta = (data.X * fit.beta).array() + fit.intercept;
    double sq = 0.0, ll = 0.0, wrong = 0.0;
    for (Index i = 0; i < data.n(); ++i) {
        const double e = eta[i];
        // log sigmoid(e) and log(1 - sigmoid(e)) without overflow
        const double log_p = -(std::max(-e, 0.0) + std::log1p(std::exp(-std::abs(e))));
        const double log_q = -(std::max(e, 0.0) + std::log1p(std::exp(-std::abs(e))));
        const double prob = std::exp(log_p);
        const double y = data.y[i];
        ll += y * log_p + (1.0 - y) * log_q;
        sq += (y - prob) * (y - prob);
        const double label = prob > 0.5 ? 1.0 : 0.0;
        wrong += label != y;
    }
    const double n = static_cast<double>(data.n());
    Metrics m;
    m.prediction_error = sq / n;
    m.loglik = ll / n;
    m.misclassification = wrong / n;
    m.model_size = fit.model_size;
    if (truth) m.estimation_error = estimation_error(fit.beta, data, *truth);
    return m;
}

std::size_t best_grid_index(const std::vector<GridScore>& scores, bool higher_is_better)
{
    if (scores.empty()) throw InputError("empty grid");
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        const GridScore& a = scores[i];
        const GridScore& b = scores[best];
        const bool better = higher_is_better ? a.mean > b.mean : a.mean < b.mean;
        const bool tie = a.mean == b.mean;
        if (better || (tie && (a.lambda > b.lambda || (a.lambda == b.lambda && a.alpha > b.alpha)))) best = i;
    }
    return best;
}

SelectionResult select_validation(const Dataset& train, const Dataset& valid, const SelectionOptions& options)
{
    check_options(options);
    if (train.p() != valid.p()) throw InputError("training and validation sets have different p");
    if (train.task != valid.task) throw InputError("training and validation sets have different tasks");

    const std::vector<Vector> grids = lambda_grids_for(train, options);
    std::vector<AnyFit> fits;
    const SplitScores split = score_split(train, valid, grids, options, &fits);

    SelectionResult res;
    res.metric = train.task == Task::regression ? "mse" : "loglik";
    std::size_t idx = 0;
    for (std::size_t a = 0; a < options.alpha_grid.size(); ++a) {
        for (Index k = 0; k < grids[a].size(); ++k, ++idx) {
            res.grid_scores.push_back({options.alpha_grid[a], grids[a][k], split.score[idx], std::nullopt,
                                       split.size[idx]});
        }
    }
    const std::size_t best = best_grid_index(res.grid_scores, train.task == Task::classification);
    res.best_alpha = res.grid_scores[best].alpha;
    res.best_lambda = res.grid_scores[best].lambda;
    res.refit = std::move(fits[best]);
    return res;
}

std::vector<int> assign_folds(const Dataset& data, int k, std::uint64_t seed)
{
    const Index n = data.n();
    if (k < 2) throw InputError("cross-validation needs k >= 2");
    if (n < k) throw InputError("cross-validation needs at least k rows");

    std::mt19937_64 engine(seed);
    std::vector<int> folds(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<Index>> strata(1);
    if (data.task == Task::classification) {
        strata.assign(2, {});
        for (Index i = 0; i < n; ++i) strata[data.y[i] == 1.0 ? 1 : 0].push_back(i);
    } else {
        strata[0].resize(static_cast<std::size_t>(n));
        std::iota(strata[0].begin(), strata[0].end(), Index{0});
    }
    int next = 0;
    for (auto& stratum : strata) {
        std::shuffle(stratum.begin(), stratum.end(), engine);
        for (Index i : stratum) {
            folds[static_cast<std::size_t>(i)] = next;
            next = (next + 1) % k;
        }
    }
    return folds;
}

SelectionResult cross_validate(const Dataset& data, int k, const SelectionOptions& options, std::uint64_t seed)
{
    check_options(options);
    const std::vector<int> folds = assign_folds(data, k, seed);
    const std::vector<Vector> grids = lambda_grids_for(data, options);

    auto run_fold = [&](int f) {
        IndexList train_rows, test_rows;
        for (Index i = 0; i < data.n(); ++i) (folds[static_cast<std::size_t>(i)] == f ? test_rows : train_rows).push_back(i);
        auto [X_tr, y_tr] = raw_rows(data, train_rows);
        auto [X_te, y_te] = raw_rows(data, test_rows);
        if (data.task == Task::classification) {
            const double ones = y_tr.sum();
            if (ones == 0.0 || ones == static_cast<double>(y_tr.size())) {
                throw InputError("training fold " + std::to_string(f) + " is missing a class");
            }
        }
        const Dataset train = make_dataset(std::move(X_tr), std::move(y_tr), data.task, true, data.feature_names,
                                           data.target_name);
        const Dataset test = apply_standardization(X_te, y_te, train);
        return score_split(train, test, grids, options, nullptr);
    };

    std::vector<SplitScores> per_fold(static_cast<std::size_t>(k));
    const unsigned threads = std::max(1u, options.threads);
    if (threads == 1) {
        for (int f = 0; f < k; ++f) per_fold[static_cast<std::size_t>(f)] = run_fold(f);
    } else {
        for (int start = 0; start < k; start += static_cast<int>(threads)) {
            std::vector<std::future<SplitScores>> jobs;
            const int stop = std::min(k, start + static_cast<int>(threads));
            for (int f = start; f < stop; ++f) jobs.push_back(std::async(std::launch::async, run_fold, f));
            for (int f = start; f < stop; ++f) per_fold[static_cast<std::size_t>(f)] = jobs[static_cast<std::size_t>(f - start)].get();
        }
    }

    SelectionResult res;
    res.metric = data.task == Task::regression ? "mse" : "loglik";
    std::size_t idx = 0;
    const double kk = static_cast<double>(k);
    std::vector<std::size_t> grid_of;  // alpha position of each grid_scores entry
    std::vector<Index> slot_of;        // lambda position within that alpha's grid
    for (std::size_t a = 0; a < options.alpha_grid.size(); ++a) {
        const double alpha = options.alpha_grid[a];
        const Vector& lambdas = grids[a];
        for (Index l = 0; l < lambdas.size(); ++l, ++idx) {
            grid_of.push_back(a);
            slot_of.push_back(l);
            double sum = 0.0, size = 0.0;
            for (const auto& fs : per_fold) {
                sum += fs.score[idx];
                size += fs.size[idx];
            }
            const double mean = sum / kk;
            double ss = 0.0;
            for (const auto& fs : per_fold) ss += (fs.score[idx] - mean) * (fs.score[idx] - mean);
            res.grid_scores.push_back({alpha, lambdas[l], mean, std::sqrt(ss / (kk - 1.0) / kk), size / kk});
        }
    }
    const std::size_t best = best_grid_index(res.grid_scores, data.task == Task::classification);
    res.best_alpha = res.grid_scores[best].alpha;
    res.best_lambda = res.grid_scores[best].lambda;

    const Vector head = grids[grid_of[best]].head(slot_of[best] + 1);
    const SimilarityMatrix R = similarity_for(data, res.best_alpha, options);
    if (data.task == Task::regression) {
        res.refit = std::move(fit_path(data, res.best_alpha, R, head, options.solver).fits.back());
    } else {
        res.refit = std::move(fit_logistic_path(data, res.best_alpha, R, head, options.logistic).fits.back());
    }
    return res;
}

} // namespace iilasso
