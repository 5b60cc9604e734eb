#pragma once

#include <cstdint>
#include <vector>

#include "iilasso/common.hpp"
#include "iilasso/data.hpp"
#include "iilasso/linear_solver.hpp"
#include "iilasso/similarity.hpp"

namespace iilasso {

/// Conditions under which a critical point with sgn(beta_hat) = sgn(beta*)
/// exists. The check characterizes stationary points, not global minima.
///
///   U = X_S^T X_S / n + lambda alpha D R_SS D,               D = Diag(sgn beta*_S)
///   V = lambda sgn(beta*_S) + lambda alpha D R_SS D beta*_S - X_S^T eps / n
///   cond_31: sgn(beta*_S - U^{-1} V) == sgn(beta*_S)
///   cond_32: |X_Sc^T X_S U^{-1} V / n + X_Sc^T eps / n|
///                <= lambda (1 + alpha R_ScS |beta*_S - U^{-1} V|)
struct SignRecoveryReport {
    IndexList support;
    Matrix U;
    Vector V;
    std::vector<bool> cond_31;
    std::vector<bool> cond_32;
    /// Left and right sides of cond_32, one entry per inactive feature.
    Vector cond_32_lhs;
    Vector cond_32_rhs;
    Vector beta_S_implied;
    double u_condition_number = 0.0;
    bool u_invertible = false;
    bool holds = false;
};

/// U is treated as singular above this condition number.
inline constexpr double kSingularConditionNumber = 1e12;

SignRecoveryReport sign_recovery_check(const Dataset& data, const Vector& beta_star, const Vector& noise,
                                       const PenaltySpec& penalty);

/// Draws eps ~ N(0, sigma^2) of length n from `seed`.
Vector draw_noise(Index n, double sigma, std::uint64_t seed);

struct ProbeStart {
    double estimation_error = 0.0;
    double objective = 0.0;
    Index model_size = 0;
    bool converged = false;
};

struct ProbeRow {
    double lambda = 0.0;
    double alpha = 0.0;
    std::vector<ProbeStart> starts;  ///< zeros first, then random starts
    double min_error = 0.0;
    double max_error = 0.0;
    double spread() const { return max_error - min_error; }
};

struct ProbeSetting {
    double lambda = 0.0;
    double alpha = 0.0;
};

/// Runs `fit` from the zero vector plus `n_starts` random sparse
/// initializations for each (lambda, alpha) on data drawn from `spec`, and
/// reports the estimation error ||beta_hat - beta*||_2 of each local optimum
/// (standardized scale, against beta* expressed on that scale).
std::vector<ProbeRow> local_optimum_error_probe(const SyntheticSpec& spec, const std::vector<ProbeSetting>& grid,
                                                SimilarityVariant variant, int n_starts, std::uint64_t seed,
                                                const SolverConfig& config = {});

/// Same probe on an existing dataset with known beta* (standardized scale).
std::vector<ProbeRow> local_optimum_error_probe(const Dataset& data, const Vector& beta_star_std,
                                                const SimilarityMatrix& similarity,
                                                const std::vector<ProbeSetting>& grid, int n_starts,
                                                std::uint64_t seed, const SolverConfig& config = {});

} // namespace iilasso
