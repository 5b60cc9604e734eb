#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iilasso/common.hpp"
#include "iilasso/data.hpp"
#include "iilasso/linear_solver.hpp"
#include "iilasso/similarity.hpp"

namespace iilasso {

/// Fitted probabilities are clipped to [kProbClamp, 1 - kProbClamp].
inline constexpr double kProbClamp = 1e-5;

struct LogisticConfig {
    SolverConfig inner;          ///< tol doubles as the outer tolerance
    int max_outer = 50;
    int inner_max_sweeps = 1000;
    int max_halvings = 10;
};

struct LogisticFitResult {
    Vector beta;
    double intercept = 0.0;
    double lambda = 0.0;
    double alpha = 0.0;
    std::vector<double> neg_loglik_trace;  ///< penalized objective per accepted outer step
    int outer_iters = 0;
    bool converged = false;
    double kkt_residual = 0.0;
    IndexList support;
    Index model_size = 0;
    std::vector<std::string> warnings;

    double objective() const { return neg_loglik_trace.empty() ? 0.0 : neg_loglik_trace.back(); }
};

struct LogisticPathResult {
    Vector lambdas;
    std::vector<LogisticFitResult> fits;
    double alpha = 0.0;
};

/// -(1/n) sum_i (y_i eta_i - log(1 + exp(eta_i))) + penalty_value(beta),
/// eta = intercept + X beta. The intercept is not penalized.
double logistic_objective(const Vector& beta, double intercept, const Dataset& data,
                          const PenaltySpec& penalty);

struct WorkingResponse {
    Vector z;
    Vector w;
    Vector prob;
};

/// IRLS quadratic approximation at (intercept, beta):
///   p_i = clip(sigmoid(eta_i)), w_i = p_i (1 - p_i), z_i = eta_i + (y_i - p_i) / w_i.
WorkingResponse quadratic_working_response(const Vector& beta, double intercept, const Dataset& data);

/// Gradient, at the expansion point, of the weighted least-squares surrogate
///   (1/2n) sum_i w_i (z_i - eta_i)^2 + penalty
/// with respect to (intercept, beta). Element 0 is the intercept. Only
/// defined where every beta_j != 0 (the penalty is smooth there).
Vector working_gradient(const Vector& beta, double intercept, const Dataset& data,
                        const PenaltySpec& penalty);

/// Stationarity violation of the penalized logistic objective (same form as
/// check_kkt, with the logistic gradient; the intercept must be stationary too).
double check_kkt_logistic(const Vector& beta, double intercept, const Dataset& data,
                          const PenaltySpec& penalty);

/// Outer IRLS loop around weighted coordinate descent. Outer steps that
/// raise the penalized objective are halved (up to max_halvings times);
/// non-convergence is reported via the flag and a warning.
LogisticFitResult fit_logistic(const Dataset& data, const PenaltySpec& penalty, const LogisticConfig& config,
                               const std::optional<Vector>& init_beta = std::nullopt,
                               std::optional<double> init_intercept = std::nullopt);

/// ||X^T (y - ybar) / n||_inf
double lambda_max_logistic(const Dataset& data);

/// Same layout and alpha adjustment as default_lambda_grid, anchored at
/// lambda_max_logistic.
Vector default_lambda_grid_logistic(const Dataset& data, int count = 100,
                                    std::optional<double> min_ratio = std::nullopt, double alpha = 0.0);

LogisticPathResult fit_logistic_path(const Dataset& data, double alpha, const SimilarityMatrix& similarity,
                                     const std::optional<Vector>& lambdas, const LogisticConfig& config);

} // namespace iilasso
