#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iilasso/data.hpp"
#include "iilasso/model_selection.hpp"

namespace iilasso {

/// Methods compared by the correlated-design benchmark.
enum class BenchMethod { iilasso, lasso, eglasso };

std::string to_string(BenchMethod m);
BenchMethod bench_method_from_string(const std::string& name);

struct BenchOptions {
    SyntheticSpec design;  ///< seed field ignored; replicate seeds derive from `seed`
    int reps = 50;
    std::uint64_t seed = 0;
    std::vector<BenchMethod> methods = {BenchMethod::iilasso, BenchMethod::lasso, BenchMethod::eglasso};
    std::vector<double> alpha_grid = kDefaultAlphaGrid;
    /// EGLasso uses alpha = 2 * ratio so that its lambda_2 / lambda_1 equals `ratio`.
    std::vector<double> eglasso_ratio_grid = kDefaultAlphaGrid;
    SolverConfig solver;
    unsigned threads = 1;
};

struct ReplicateMetrics {
    double prediction_error = 0.0;
    double estimation_error = 0.0;
    double model_size = 0.0;
    double best_lambda = 0.0;
    double best_alpha = 0.0;
};

struct MethodSummary {
    BenchMethod method = BenchMethod::iilasso;
    double prediction_error = 0.0;
    double estimation_error = 0.0;
    double model_size = 0.0;
    std::optional<double> prediction_error_se;  ///< absent when reps == 1
    std::optional<double> estimation_error_se;
    std::optional<double> model_size_se;
    std::vector<ReplicateMetrics> replicates;
};

struct BenchSummary {
    int reps = 0;
    std::uint64_t seed = 0;
    std::vector<MethodSummary> methods;
};

/// One replicate: independent training, validation and test sets from the
/// design; each method is tuned on validation MSE and scored on the test set
/// (raw scale). Depends only on (options, rep).
std::vector<ReplicateMetrics> run_replicate(const BenchOptions& options, int rep);

BenchSummary run_benchmark(const BenchOptions& options);

} // namespace iilasso
