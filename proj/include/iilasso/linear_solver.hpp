#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iilasso/common.hpp"
#include "iilasso/data.hpp"
#include "iilasso/similarity.hpp"

namespace iilasso {

/// How each fit along a path is started.
enum class InitStrategy {
    zeros,  ///< all-zero coefficients
    warm,   ///< solution at the previous (larger) lambda
    lasso,  ///< plain Lasso (alpha = 0) solution at the same lambda
};

std::string to_string(InitStrategy s);
InitStrategy init_strategy_from_string(const std::string& name);

struct SolverConfig {
    double tol = 1e-7;          ///< max absolute coefficient change per sweep
    int max_sweeps = 10000;
    InitStrategy init = InitStrategy::warm;
    std::optional<bool> active_set;  ///< unset: on when p > 1000

    void validate() const;
    bool use_active_set(Index p) const { return active_set.value_or(p > 1000); }
};

struct FitResult {
    Vector beta;
    double lambda = 0.0;
    double alpha = 0.0;
    std::vector<double> objective_trace;
    int sweeps_used = 0;
    bool converged = false;
    double kkt_residual = 0.0;
    IndexList support;
    Index model_size = 0;

    double objective() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
};

struct PathResult {
    Vector lambdas;
    std::vector<FitResult> fits;
    double alpha = 0.0;
};

/// sgn(z) * max(|z| - gamma, 0); returns 0 when |z| == gamma.
double soft_threshold(double z, double gamma);

/// Quantities kept in sync with beta during coordinate descent.
struct CoordinateState {
    Vector residual;         ///< y - X beta
    Vector penalty_weights;  ///< R |beta| (empty when alpha == 0)
    Vector col_sq_norms;     ///< ||X_j||^2 / n

    static CoordinateState init(const Vector& beta, const Dataset& data, const PenaltySpec& penalty);
    /// True when the caches match a fresh recomputation within `tol`.
    bool consistent_with(const Vector& beta, const Dataset& data, const PenaltySpec& penalty,
                         double tol = 1e-8) const;
};

/// Exact minimization of the objective over beta_j with the other
/// coordinates fixed:
///   beta_j <- S(X_j^T r / n + d_j beta_j, lambda (1 + alpha R_{j,-j}|beta_{-j}|))
///             / (d_j + lambda alpha R_jj)
/// with d_j = ||X_j||^2 / n (1 on standardized data). Updates beta and the
/// caches in `state`; returns the new beta_j.
double coordinate_update(Index j, Vector& beta, const Dataset& data, const PenaltySpec& penalty,
                         CoordinateState& state);

/// (1/2n) ||y - X beta||^2 + penalty_value(beta)
double objective(const Vector& beta, const Dataset& data, const PenaltySpec& penalty);

/// Largest stationarity violation over coordinates, using
/// g = -X^T (y - X beta) / n and w = lambda (1 + alpha (R|beta|)_j):
///   beta_j != 0:  |g_j + w_j sgn(beta_j)|
///   beta_j == 0:  max(|g_j| - w_j, 0)
double check_kkt(const Vector& beta, const Dataset& data, const PenaltySpec& penalty);

/// Cyclic coordinate descent until the largest coefficient change in a sweep
/// drops below tol (and the KKT residual is within 10 tol), or max_sweeps.
/// For the absolute and ratio variants the objective is non-convex and the
/// result is a stationary point that depends on the start.
FitResult fit(const Dataset& data, const PenaltySpec& penalty, const SolverConfig& config,
              const std::optional<Vector>& init_beta = std::nullopt);

/// ||X^T y / n||_inf: the smallest lambda whose solution is all zeros, for any alpha.
double lambda_max(const Dataset& data);

/// Scale of the extra depth the grid gets for alpha > 0. See default_lambda_grid.
inline constexpr double kAlphaGridDepth = 10.0;

/// `count` log-spaced values from lambda_max down to ratio * lambda_max, where
/// ratio defaults to 1e-3 (1e-2 when p > n).
///
/// With alpha > 0 the lower end is pushed further down, to
/// ratio * lambda_max / (1 + kAlphaGridDepth * alpha * lambda_max). The
/// interaction term charges lambda * alpha * (R|beta|)_j on top of lambda, and
/// |beta| is on the scale of lambda_max, so a fixed ratio stops short of the
/// useful part of the path once alpha is large. alpha = 0 gives the plain grid.
Vector default_lambda_grid(const Dataset& data, int count = 100,
                           std::optional<double> min_ratio = std::nullopt, double alpha = 0.0);

/// The lower-end ratio used by default_lambda_grid for a given lambda_max.
double alpha_adjusted_ratio(double base_ratio, double alpha, double lambda_max);

/// Fits in descending lambda order, starting each per config.init.
PathResult fit_path(const Dataset& data, double alpha, const SimilarityMatrix& similarity,
                    const std::optional<Vector>& lambdas, const SolverConfig& config);

} // namespace iilasso
