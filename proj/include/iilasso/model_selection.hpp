#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "iilasso/common.hpp"
#include "iilasso/data.hpp"
#include "iilasso/linear_solver.hpp"
#include "iilasso/logistic_solver.hpp"
#include "iilasso/similarity.hpp"

namespace iilasso {

struct Metrics {
    /// Regression: mean squared error. Classification: mean squared error of
    /// the fitted probabilities.
    double prediction_error = 0.0;
    std::optional<double> estimation_error;  ///< ||beta_raw - beta*||_2, when truth is known
    Index model_size = 0;
    std::optional<double> loglik;             ///< mean per-sample log-likelihood
    std::optional<double> misclassification;  ///< threshold 0.5, ties to class 0
};

/// `data` must carry the training standardization of the fit.
Metrics evaluate(const FitResult& fit, const Dataset& data, const GroundTruth* truth = nullptr);
Metrics evaluate(const LogisticFitResult& fit, const Dataset& data, const GroundTruth* truth = nullptr);

inline const std::vector<double> kDefaultAlphaGrid = {0.01, 0.1, 1, 10, 100, 1000};

struct SelectionOptions {
    std::vector<double> alpha_grid = kDefaultAlphaGrid;
    std::optional<Vector> lambda_grid;  ///< default: 100-point path from the training data
    int lambda_count = 100;
    SimilarityVariant variant = SimilarityVariant::ratio;
    double clamp = 1e-4;
    std::optional<GroupPartition> partition;  ///< group_indicator only
    SolverConfig solver;
    LogisticConfig logistic;
    unsigned threads = 1;  ///< folds evaluated concurrently in cross_validate
};

struct GridScore {
    double alpha = 0.0;
    double lambda = 0.0;
    double mean = 0.0;
    std::optional<double> se;  ///< absent for a single validation split
    double model_size = 0.0;   ///< mean over folds
};

using AnyFit = std::variant<FitResult, LogisticFitResult>;

struct SelectionResult {
    double best_lambda = 0.0;
    double best_alpha = 0.0;
    std::string metric;  ///< "mse" (minimized) or "loglik" (maximized)
    std::vector<GridScore> grid_scores;
    AnyFit refit;
};

/// Fits a path per alpha on `train` and scores every (lambda, alpha) on
/// `valid` (which must already carry train's standardization). The selected
/// fit is the path fit at the best point.
SelectionResult select_validation(const Dataset& train, const Dataset& valid, const SelectionOptions& options);

/// Seeded k-fold CV. Folds are stratified by class for classification;
/// each training fold is re-standardized and gets its own R. The best point
/// is refit on the full data.
SelectionResult cross_validate(const Dataset& data, int k, const SelectionOptions& options, std::uint64_t seed);

/// Fold label (0..k-1) per row. Depends only on (seed, labels, k).
std::vector<int> assign_folds(const Dataset& data, int k, std::uint64_t seed);

/// Index of the best grid entry: optimal mean, ties to larger lambda, then larger alpha.
std::size_t best_grid_index(const std::vector<GridScore>& scores, bool higher_is_better);

} // namespace iilasso
