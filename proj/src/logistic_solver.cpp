#include "iilasso/logistic_solver.hpp"

#include <algorithm>
#include <cmath>

namespace iilasso {

namespace {

void require_classification(const Dataset& data)
{
    if (data.task != Task::classification) {
        throw InputError("logistic model requires a classification dataset");
    }
}

double softplus(double eta) { return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta))); }

double sigmoid(double eta)
{
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

double clipped_logit(double p)
{
    p = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
    return std::log(p / (1.0 - p));
}

struct Candidate {
    Vector beta;
    double intercept;
};

// Weighted coordinate descent on the quadratic surrogate, starting from `start`.
Candidate solve_surrogate(const Dataset& data, const PenaltySpec& penalty, const WorkingResponse& wr,
                          const Candidate& start, const LogisticConfig& config)
{
    const double n = static_cast<double>(data.n());
    const bool cross = penalty.alpha != 0.0;
    Candidate c = start;
    Vector residual = wr.z - data.X * c.beta;
    residual.array() -= c.intercept;
    Vector weights_abs = cross ? penalty.similarity.times_abs(c.beta) : Vector();
    const double w_sum = wr.w.sum();
    const Vector curvature = (data.X.array().square().colwise() * wr.w.array()).colwise().sum().transpose() / n;

    for (int sweep = 0; sweep < config.inner_max_sweeps; ++sweep) {
        double max_change = 0.0;

        const double shift = wr.w.dot(residual) / w_sum;
        c.intercept += shift;
        residual.array() -= shift;
        max_change = std::abs(shift);

        for (Index j = 0; j < data.p(); ++j) {
            const double old = c.beta[j];
            const double num = (data.X.col(j).array() * wr.w.array() * residual.array()).sum() / n +
                               curvature[j] * old;
            double threshold = penalty.lambda;
            double denom = curvature[j];
            if (cross) {
                const double r_jj = penalty.similarity.diagonal(j);
                const double others = std::max(weights_abs[j] - r_jj * std::abs(old), 0.0);
                threshold = penalty.lambda * (1.0 + penalty.alpha * others);
                denom += penalty.lambda * penalty.alpha * r_jj;
            }
            const double updated = denom > 0.0 ? soft_threshold(num, threshold) / denom : 0.0;
            if (updated != old) {
                residual.noalias() -= (updated - old) * data.X.col(j);
                if (cross) {
                    penalty.similarity.add_scaled_column(j, std::abs(updated) - std::abs(old), weights_abs);
                }
                c.beta[j] = updated;
                max_change = std::max(max_change, std::abs(updated - old));
            }
        }
        if (!std::isfinite(max_change) || !std::isfinite(c.intercept)) {
            throw NumericalError("non-finite value in weighted coordinate descent");
        }
        if (max_change < config.inner.tol) break;
    }
    return c;
}

} // namespace

double logistic_objective(const Vector& beta, double intercept, const Dataset& data, const PenaltySpec& penalty)
{
    require_classification(data);
    if (beta.size() != data.p()) throw InputError("coefficient length does not match p");
    const Vector eta = (data.X * beta).array() + intercept;
    double loss = 0.0;
    for (Index i = 0; i < data.n(); ++i) loss += softplus(eta[i]) - data.y[i] * eta[i];
    return loss / static_cast<double>(data.n()) + penalty_value(beta, penalty);
}

WorkingResponse quadratic_working_response(const Vector& beta, double intercept, const Dataset& data)
{
    require_classification(data);
    const Vector eta = (data.X * beta).array() + intercept;
    WorkingResponse wr;
    wr.prob.resize(data.n());
    wr.w.resize(data.n());
    wr.z.resize(data.n());
    for (Index i = 0; i < data.n(); ++i) {
        const double p = std::clamp(sigmoid(eta[i]), kProbClamp, 1.0 - kProbClamp);
        wr.prob[i] = p;
        wr.w[i] = p * (1.0 - p);
        wr.z[i] = eta[i] + (data.y[i] - p) / wr.w[i];
    }
    return wr;
}

Vector working_gradient(const Vector& beta, double intercept, const Dataset& data, const PenaltySpec& penalty)
{
    const WorkingResponse wr = quadratic_working_response(beta, intercept, data);
    const double n = static_cast<double>(data.n());
    const Vector eta = (data.X * beta).array() + intercept;
    const Vector weighted = (wr.w.array() * (wr.z - eta).array()).matrix();

    Vector grad(data.p() + 1);
    grad[0] = -weighted.sum() / n;
    grad.tail(data.p()) = -data.X.transpose() * weighted / n;

    Vector scale = Vector::Ones(data.p());
    if (penalty.alpha != 0.0) scale.array() += penalty.alpha * penalty.similarity.times_abs(beta).array();
    for (Index j = 0; j < data.p(); ++j) grad[j + 1] += penalty.lambda * scale[j] * sign(beta[j]);
    return grad;
}

double check_kkt_logistic(const Vector& beta, double intercept, const Dataset& data, const PenaltySpec& penalty)
{
    require_classification(data);
    const double n = static_cast<double>(data.n());
    const Vector eta = (data.X * beta).array() + intercept;
    Vector resid(data.n());
    for (Index i = 0; i < data.n(); ++i) resid[i] = data.y[i] - sigmoid(eta[i]);
    const Vector grad = -data.X.transpose() * resid / n;

    Vector weight = Vector::Constant(data.p(), penalty.lambda);
    if (penalty.alpha != 0.0) weight.array() *= 1.0 + penalty.alpha * penalty.similarity.times_abs(beta).array();
    double worst = std::abs(resid.sum() / n);
    for (Index j = 0; j < data.p(); ++j) {
        const double v = beta[j] != 0.0 ? std::abs(grad[j] + weight[j] * sign(beta[j]))
                                        : std::max(std::abs(grad[j]) - weight[j], 0.0);
        worst = std::max(worst, v);
    }
    return worst;
}

LogisticFitResult fit_logistic(const Dataset& data, const PenaltySpec& penalty, const LogisticConfig& config,
                               const std::optional<Vector>& init_beta, std::optional<double> init_intercept)
{
    require_classification(data);
    config.inner.validate();
    penalty.validate(data.p());
    if (config.max_outer < 1 || config.inner_max_sweeps < 1 || config.max_halvings < 0) {
        throw InputError("invalid logistic iteration limits");
    }

    Candidate current{init_beta ? *init_beta : Vector::Zero(data.p()),
                      init_intercept.value_or(clipped_logit(data.y.mean()))};
    if (current.beta.size() != data.p()) throw InputError("initial coefficient length does not match p");
    double current_obj = logistic_objective(current.beta, current.intercept, data, penalty);

    LogisticFitResult res;
    res.lambda = penalty.lambda;
    res.alpha = penalty.alpha;

    for (int outer = 1; outer <= config.max_outer; ++outer) {
        res.outer_iters = outer;
        const WorkingResponse wr = quadratic_working_response(current.beta, current.intercept, data);
        const Candidate proposal = solve_surrogate(data, penalty, wr, current, config);

        Vector step_beta = proposal.beta - current.beta;
        double step_b0 = proposal.intercept - current.intercept;
        Candidate trial = proposal;
        double trial_obj = logistic_objective(trial.beta, trial.intercept, data, penalty);
        int halvings = 0;
        const double slack = 1e-12 * std::max(1.0, std::abs(current_obj));
        while (!(trial_obj <= current_obj + slack) && halvings < config.max_halvings) {
            step_beta *= 0.5;
            step_b0 *= 0.5;
            trial.beta = current.beta + step_beta;
            trial.intercept = current.intercept + step_b0;
            trial_obj = logistic_objective(trial.beta, trial.intercept, data, penalty);
            ++halvings;
        }
        if (!std::isfinite(trial_obj)) throw NumericalError("non-finite logistic objective at outer iteration " +
                                                            std::to_string(outer));

        const double change = std::max(step_beta.lpNorm<Eigen::Infinity>(), std::abs(step_b0));
        if (!(trial_obj <= current_obj + slack)) {
            // No acceptable step along the surrogate direction.
            res.converged = change < config.inner.tol;
            if (!res.converged) res.warnings.push_back("step halving failed to decrease the objective");
            break;
        }
        current = std::move(trial);
        current_obj = trial_obj;
        res.neg_loglik_trace.push_back(current_obj);
        if (change < config.inner.tol) {
            res.converged = true;
            break;
        }
    }
    if (!res.converged && res.warnings.empty()) {
        res.warnings.push_back("reached " + std::to_string(config.max_outer) +
                               " outer iterations without convergence");
    }
    if (res.neg_loglik_trace.empty()) res.neg_loglik_trace.push_back(current_obj);

    res.support = support_of(current.beta);
    res.model_size = static_cast<Index>(res.support.size());
    res.kkt_residual = check_kkt_logistic(current.beta, current.intercept, data, penalty);
    res.beta = std::move(current.beta);
    res.intercept = current.intercept;
    return res;
}

double lambda_max_logistic(const Dataset& data)
{
    require_classification(data);
    const Vector centered = (data.y.array() - data.y.mean()).matrix();
    return (data.X.transpose() * centered).lpNorm<Eigen::Infinity>() / static_cast<double>(data.n());
}

Vector default_lambda_grid_logistic(const Dataset& data, int count, std::optional<double> min_ratio, double alpha)
{
    if (count < 1) throw InputError("lambda grid needs at least one point");
    const double top = lambda_max_logistic(data);
    if (!(top > 0.0)) throw InputError("lambda_max is zero: labels are uncorrelated with every feature");
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

LogisticPathResult fit_logistic_path(const Dataset& data, double alpha, const SimilarityMatrix& similarity,
                                     const std::optional<Vector>& lambdas, const LogisticConfig& config)
{
    LogisticPathResult path;
    path.alpha = alpha;
    path.lambdas = lambdas ? *lambdas : default_lambda_grid_logistic(data);
    for (Index k = 1; k < path.lambdas.size(); ++k) {
        if (!(path.lambdas[k] < path.lambdas[k - 1])) throw InputError("lambda values must be strictly decreasing");
    }
    std::optional<Vector> beta;
    std::optional<double> b0;
    for (Index k = 0; k < path.lambdas.size(); ++k) {
        PenaltySpec penalty{path.lambdas[k], alpha, similarity};
        const bool warm = config.inner.init != InitStrategy::zeros;
        LogisticFitResult res = fit_logistic(data, penalty, config, warm ? beta : std::nullopt,
                                             warm ? b0 : std::nullopt);
        beta = res.beta;
        b0 = res.intercept;
        path.fits.push_back(std::move(res));
    }
    return path;
}

} // namespace iilasso
