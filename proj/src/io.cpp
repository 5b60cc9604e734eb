#include "iilasso/io.hpp"

#include <iomanip>

namespace iilasso {

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

json matrix_rows(const Matrix& m)
{
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void write_csv_value(std::ostream& out, const std::optional<double>& v)
{
    if (v) out << *v;
}

} // namespace

json to_json(const FitResult& fit)
{
    return {
        {"schema_version", kSchemaVersion},
        {"kind", "fit"},
        {"lambda", fit.lambda},
        {"alpha", fit.alpha},
        {"beta", to_std(fit.beta)},
        {"support", fit.support},
        {"model_size", fit.model_size},
        {"objective", fit.objective()},
        {"objective_trace", fit.objective_trace},
        {"sweeps", fit.sweeps_used},
        {"converged", fit.converged},
        {"kkt_residual", fit.kkt_residual},
    };
}

json to_json(const LogisticFitResult& fit)
{
    return {
        {"schema_version", kSchemaVersion},
        {"kind", "logistic_fit"},
        {"lambda", fit.lambda},
        {"alpha", fit.alpha},
        {"beta", to_std(fit.beta)},
        {"intercept", fit.intercept},
        {"support", fit.support},
        {"model_size", fit.model_size},
        {"objective", fit.objective()},
        {"objective_trace", fit.neg_loglik_trace},
        {"sweeps", fit.outer_iters},
        {"converged", fit.converged},
        {"kkt_residual", fit.kkt_residual},
        {"warnings", fit.warnings},
    };
}

json to_json(const PathResult& path)
{
    json fits = json::array();
    for (const auto& f : path.fits) fits.push_back(to_json(f));
    return {{"schema_version", kSchemaVersion}, {"kind", "path"}, {"alpha", path.alpha},
            {"lambdas", to_std(path.lambdas)}, {"fits", std::move(fits)}};
}

json to_json(const LogisticPathResult& path)
{
    json fits = json::array();
    for (const auto& f : path.fits) fits.push_back(to_json(f));
    return {{"schema_version", kSchemaVersion}, {"kind", "logistic_path"}, {"alpha", path.alpha},
            {"lambdas", to_std(path.lambdas)}, {"fits", std::move(fits)}};
}

json to_json(const SignRecoveryReport& r)
{
    auto nan_safe = [](const Vector& v) {
        json a = json::array();
        for (Index i = 0; i < v.size(); ++i) a.push_back(std::isfinite(v[i]) ? json(v[i]) : json(nullptr));
        return a;
    };
    return {
        {"schema_version", kSchemaVersion},
        {"kind", "sign_recovery"},
        {"scope", "conditions for a critical point with correct signs; not a statement about the global minimum"},
        {"support", r.support},
        {"U", matrix_rows(r.U)},
        {"V", to_std(r.V)},
        {"cond_31", r.cond_31},
        {"cond_32", r.cond_32},
        {"cond_32_lhs", to_std(r.cond_32_lhs)},
        {"cond_32_rhs", to_std(r.cond_32_rhs)},
        {"beta_S_implied", nan_safe(r.beta_S_implied)},
        {"u_condition_number", std::isfinite(r.u_condition_number) ? json(r.u_condition_number) : json(nullptr)},
        {"u_invertible", r.u_invertible},
        {"holds", r.holds},
    };
}

json to_json(const Metrics& m)
{
    return {
        {"prediction_error", m.prediction_error},
        {"estimation_error", optional_number(m.estimation_error)},
        {"model_size", m.model_size},
        {"loglik", optional_number(m.loglik)},
        {"misclassification", optional_number(m.misclassification)},
    };
}

json to_json(const SelectionResult& s)
{
    json grid = json::array();
    for (const auto& g : s.grid_scores) {
        grid.push_back({{"alpha", g.alpha}, {"lambda", g.lambda}, {"mean", g.mean}, {"se", optional_number(g.se)},
                        {"model_size", g.model_size}});
    }
    json refit = std::visit([](const auto& f) { return to_json(f); }, s.refit);
    return {{"schema_version", kSchemaVersion}, {"kind", "selection"}, {"best_lambda", s.best_lambda},
            {"best_alpha", s.best_alpha}, {"metric", s.metric}, {"grid_scores", std::move(grid)},
            {"refit", std::move(refit)}};
}

json to_json(const BenchSummary& b)
{
    json methods = json::array();
    for (const auto& m : b.methods) {
        methods.push_back({
            {"method", to_string(m.method)},
            {"prediction_error", m.prediction_error},
            {"prediction_error_se", optional_number(m.prediction_error_se)},
            {"estimation_error", m.estimation_error},
            {"estimation_error_se", optional_number(m.estimation_error_se)},
            {"model_size", m.model_size},
            {"model_size_se", optional_number(m.model_size_se)},
        });
    }
    return {{"schema_version", kSchemaVersion}, {"kind", "bench"}, {"reps", b.reps}, {"seed", b.seed},
            {"methods", std::move(methods)}};
}

json to_json(const SyntheticSpec& s)
{
    return {{"n", s.n},   {"p", s.p},     {"b", s.b},           {"q", s.q},
            {"rho", s.rho}, {"coef", s.coef}, {"noise_sd", s.noise_sd}, {"seed", s.seed}};
}

json to_json(const GroundTruth& t)
{
    return {{"schema_version", kSchemaVersion}, {"kind", "ground_truth"}, {"beta_star", to_std(t.beta_star)},
            {"support", t.support}, {"s", t.s}};
}

void update_from_json(const json& j, SyntheticSpec& spec)
{
    if (!j.is_object()) throw InputError("synthetic spec must be a JSON object");
    try {
        if (j.contains("n")) spec.n = j.at("n").get<Index>();
        if (j.contains("p")) spec.p = j.at("p").get<Index>();
        if (j.contains("b")) spec.b = j.at("b").get<Index>();
        if (j.contains("q")) spec.q = j.at("q").get<Index>();
        if (j.contains("rho")) spec.rho = j.at("rho").get<double>();
        if (j.contains("coef")) spec.coef = j.at("coef").get<std::vector<double>>();
        if (j.contains("noise_sd")) spec.noise_sd = j.at("noise_sd").get<double>();
        if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw InputError(std::string("invalid synthetic spec: ") + e.what());
    }
}

GroundTruth ground_truth_from_json(const json& j)
{
    try {
        const auto values = j.at("beta_star").get<std::vector<double>>();
        return GroundTruth::from_beta(Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size())));
    } catch (const json::exception& e) {
        throw InputError(std::string("invalid ground truth file: ") + e.what());
    }
}

namespace {

template <class PathT>
void write_any_path_csv(std::ostream& out, const PathT& path)
{
    out << std::setprecision(17) << "lambda";
    const Index p = path.fits.empty() ? 0 : path.fits.front().beta.size();
    for (Index j = 0; j < p; ++j) out << ",beta" << j + 1;
    out << '\n';
    for (const auto& f : path.fits) {
        out << f.lambda;
        for (Index j = 0; j < p; ++j) out << ',' << f.beta[j];
        out << '\n';
    }
}

} // namespace

void write_path_csv(std::ostream& out, const PathResult& path) { write_any_path_csv(out, path); }
void write_path_csv(std::ostream& out, const LogisticPathResult& path) { write_any_path_csv(out, path); }

void write_grid_csv(std::ostream& out, const SelectionResult& s)
{
    out << std::setprecision(17) << "alpha,lambda,mean,se,model_size\n";
    for (const auto& g : s.grid_scores) {
        out << g.alpha << ',' << g.lambda << ',' << g.mean << ',';
        write_csv_value(out, g.se);
        out << ',' << g.model_size << '\n';
    }
}

void write_bench_csv(std::ostream& out, const BenchSummary& b)
{
    out << std::setprecision(10)
        << "method,prediction_error,prediction_error_se,estimation_error,estimation_error_se,model_size,model_size_se\n";
    for (const auto& m : b.methods) {
        out << to_string(m.method) << ',' << m.prediction_error << ',';
        write_csv_value(out, m.prediction_error_se);
        out << ',' << m.estimation_error << ',';
        write_csv_value(out, m.estimation_error_se);
        out << ',' << m.model_size << ',';
        write_csv_value(out, m.model_size_se);
        out << '\n';
    }
}

void write_matrix_csv(std::ostream& out, const Matrix& m)
{
    out << std::setprecision(17);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
        out << '\n';
    }
}

} // namespace iilasso
