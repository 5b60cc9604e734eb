#include "iilasso/linear_solver.hpp"

#include <algorithm>
#include <cmath>

namespace iilasso {

std::string to_string(InitStrategy s)
{
    switch (s) {
    case InitStrategy::zeros: return "zeros";
    case InitStrategy::warm: return "warm";
    case InitStrategy::lasso: return "lasso";
    }
    return "unknown";
}

InitStrategy init_strategy_from_string(const std::string& name)
{
    if (name == "zeros") return InitStrategy::zeros;
    if (name == "warm") return InitStrategy::warm;
    if (name == "lasso") return InitStrategy::lasso;
    throw InputError("unknown init strategy '" + name + "' (expected zeros|warm|lasso)");
}

void SolverConfig::validate() const
{
    if (!(tol > 0.0)) throw InputError("solver tol must be positive");
    if (max_sweeps < 1) throw InputError("solver max_sweeps must be at least 1");
}

double soft_threshold(double z, double gamma)
{
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

namespace {

void check_dims(const Vector& beta, const Dataset& data)
{
    if (beta.size() != data.p()) {
        throw InputError("coefficient length " + std::to_string(beta.size()) + " does not match p = " +
                         std::to_string(data.p()));
    }
}

bool uses_cross_term(const PenaltySpec& penalty) { return penalty.alpha != 0.0; }

double objective_from_state(const Vector& beta, const Dataset& data, const PenaltySpec& penalty,
                            const CoordinateState& state)
{
    const double loss = 0.5 * state.residual.squaredNorm() / static_cast<double>(data.n());
    double pen = beta.lpNorm<1>();
    if (uses_cross_term(penalty)) pen += 0.5 * penalty.alpha * beta.cwiseAbs().dot(state.penalty_weights);
    return loss + penalty.lambda * pen;
}

FitResult finish(Vector beta, const Dataset& data, const PenaltySpec& penalty)
{
    FitResult res;
    res.lambda = penalty.lambda;
    res.alpha = penalty.alpha;
    res.support = support_of(beta);
    res.model_size = static_cast<Index>(res.support.size());
    res.beta = std::move(beta);
    res.kkt_residual = check_kkt(res.beta, data, penalty);
    return res;
}

} // namespace

CoordinateState CoordinateState::init(const Vector& beta, const Dataset& data, const PenaltySpec& penalty)
{
    check_dims(beta, data);
    CoordinateState s;
    s.residual = data.y - data.X * beta;
    if (uses_cross_term(penalty)) s.penalty_weights = penalty.similarity.times_abs(beta);
    s.col_sq_norms = data.X.colwise().squaredNorm().transpose() / static_cast<double>(data.n());
    return s;
}

bool CoordinateState::consistent_with(const Vector& beta, const Dataset& data, const PenaltySpec& penalty,
                                      double tol) const
{
    const CoordinateState fresh = init(beta, data, penalty);
    if ((fresh.residual - residual).lpNorm<Eigen::Infinity>() > tol) return false;
    if (uses_cross_term(penalty) &&
        (fresh.penalty_weights - penalty_weights).lpNorm<Eigen::Infinity>() > tol) {
        return false;
    }
    return true;
}

double coordinate_update(Index j, Vector& beta, const Dataset& data, const PenaltySpec& penalty,
                         CoordinateState& state)
{
    if (j < 0 || j >= beta.size()) throw InputError("coordinate index " + std::to_string(j) + " out of range");
#ifdef IILASSO_CHECK_STATE
    if (!state.consistent_with(beta, data, penalty)) throw NumericalError("stale coordinate state");
#endif
    const double n = static_cast<double>(data.n());
    const double old = beta[j];
    const double d = state.col_sq_norms[j];
    const double z = data.X.col(j).dot(state.residual) / n + d * old;

    double threshold = penalty.lambda;
    double denom = d;
    double r_jj = 0.0;
    if (uses_cross_term(penalty)) {
        r_jj = penalty.similarity.diagonal(j);
        const double cross = state.penalty_weights[j] - r_jj * std::abs(old);
        threshold = penalty.lambda * (1.0 + penalty.alpha * std::max(cross, 0.0));
        denom += penalty.lambda * penalty.alpha * r_jj;
    }
    const double updated = soft_threshold(z, threshold) / denom;

    if (updated != old) {
        state.residual.noalias() -= (updated - old) * data.X.col(j);
        if (uses_cross_term(penalty)) {
            const double delta_abs = std::abs(updated) - std::abs(old);
            if (delta_abs != 0.0) penalty.similarity.add_scaled_column(j, delta_abs, state.penalty_weights);
        }
        beta[j] = updated;
    }
    return updated;
}

double objective(const Vector& beta, const Dataset& data, const PenaltySpec& penalty)
{
    check_dims(beta, data);
    const double loss = 0.5 * (data.y - data.X * beta).squaredNorm() / static_cast<double>(data.n());
    return loss + penalty_value(beta, penalty);
}

double check_kkt(const Vector& beta, const Dataset& data, const PenaltySpec& penalty)
{
    check_dims(beta, data);
    const Vector grad = -data.X.transpose() * (data.y - data.X * beta) / static_cast<double>(data.n());
    Vector weight = Vector::Constant(beta.size(), penalty.lambda);
    if (uses_cross_term(penalty)) {
        weight.array() *= 1.0 + penalty.alpha * penalty.similarity.times_abs(beta).array();
    }
    double worst = 0.0;
    for (Index j = 0; j < beta.size(); ++j) {
        const double v = beta[j] != 0.0 ? std::abs(grad[j] + weight[j] * sign(beta[j]))
                                        : std::max(std::abs(grad[j]) - weight[j], 0.0);
        worst = std::max(worst, v);
    }
    return worst;
}

FitResult fit(const Dataset& data, const PenaltySpec& penalty, const SolverConfig& config,
              const std::optional<Vector>& init_beta)
{
    config.validate();
    penalty.validate(data.p());
    if (!data.standardized) throw InputError("fit requires a standardized dataset");

    const Index p = data.p();
    Vector beta = init_beta ? *init_beta : Vector::Zero(p);
    check_dims(beta, data);
    CoordinateState state = CoordinateState::init(beta, data, penalty);

    const bool active_set = config.use_active_set(p);
    std::vector<double> trace;
    int sweeps = 0;
    bool converged = false;

    auto sweep = [&](const IndexList* subset) {
        double max_change = 0.0;
        const Index count = subset ? static_cast<Index>(subset->size()) : p;
        for (Index t = 0; t < count; ++t) {
            const Index j = subset ? (*subset)[static_cast<std::size_t>(t)] : t;
            const double old = beta[j];
            const double updated = coordinate_update(j, beta, data, penalty, state);
            max_change = std::max(max_change, std::abs(updated - old));
        }
        ++sweeps;
        const double obj = objective_from_state(beta, data, penalty, state);
        if (!std::isfinite(obj) || !std::isfinite(max_change)) {
            throw NumericalError("non-finite value encountered in sweep " + std::to_string(sweeps));
        }
        trace.push_back(obj);
        return max_change;
    };

    while (sweeps < config.max_sweeps) {
        const double change = sweep(nullptr);
        if (change < config.tol) {
            if (check_kkt(beta, data, penalty) <= 10.0 * config.tol) {
                converged = true;
                break;
            }
            continue;
        }
        if (!active_set) continue;
        const IndexList support = support_of(beta);
        while (sweeps < config.max_sweeps && !support.empty()) {
            if (sweep(&support) < config.tol) break;
        }
    }

    FitResult res = finish(std::move(beta), data, penalty);
    res.objective_trace = std::move(trace);
    res.sweeps_used = sweeps;
    res.converged = converged;
    return res;
}

double lambda_max(const Dataset& data)
{
    return (data.X.transpose() * data.y).lpNorm<Eigen::Infinity>() / static_cast<double>(data.n());
}

double alpha_adjusted_ratio(double base_ratio, double alpha, double lambda_max)
{
    if (!(alpha >= 0.0)) throw InputError("alpha must be nonnegative");
    return base_ratio / (1.0 + kAlphaGridDepth * alpha * lambda_max);
}

Vector default_lambda_grid(const Dataset& data, int count, std::optional<double> min_ratio, double alpha)
{
    if (count < 1) throw InputError("lambda grid needs at least one point");
    const double top = lambda_max(data);
    if (!(top > 0.0)) throw InputError("lambda_max is zero: response is orthogonal to every feature");
    const double base = min_ratio.value_or(data.p() > data.n() ? 1e-2 : 1e-3);
    if (!(base > 0.0 && base < 1.0)) throw InputError("lambda min ratio must lie in (0, 1)");
    const double ratio = alpha_adjusted_ratio(base, alpha, top);
    Vector grid(count);
    if (count == 1) {
        grid[0] = top;
        return grid;
    }
    const double step = std::log(ratio) / static_cast<double>(count - 1);
    for (int k = 0; k < count; ++k) grid[k] = top * std::exp(step * k);
    return grid;
}

PathResult fit_path(const Dataset& data, double alpha, const SimilarityMatrix& similarity,
                    const std::optional<Vector>& lambdas, const SolverConfig& config)
{
    PathResult path;
    path.alpha = alpha;
    path.lambdas = lambdas ? *lambdas : default_lambda_grid(data);
    for (Index k = 0; k < path.lambdas.size(); ++k) {
        if (!(path.lambdas[k] >= 0.0)) throw InputError("lambda values must be nonnegative");
        if (k > 0 && !(path.lambdas[k] < path.lambdas[k - 1])) {
            throw InputError("lambda values must be strictly decreasing");
        }
    }

    const Index p = data.p();
    Vector previous = Vector::Zero(p);
    Vector lasso_previous = Vector::Zero(p);
    for (Index k = 0; k < path.lambdas.size(); ++k) {
        PenaltySpec penalty{path.lambdas[k], alpha, similarity};
        std::optional<Vector> start;
        switch (config.init) {
        case InitStrategy::zeros: break;
        case InitStrategy::warm: start = previous; break;
        case InitStrategy::lasso: {
            PenaltySpec plain{path.lambdas[k], 0.0, similarity};
            lasso_previous = fit(data, plain, config, lasso_previous).beta;
            start = lasso_previous;
            break;
        }
        }
        FitResult res = fit(data, penalty, config, start);
        previous = res.beta;
        path.fits.push_back(std::move(res));
    }
    return path;
}

} // namespace iilasso
