#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iilasso/benchmark.hpp"
#include "iilasso/io.hpp"

namespace iilasso::cli {

namespace {

// Reads --config files as a flat JSON object whose keys are long flag names
// of the chosen subcommand (underscores accepted in place of dashes). A nested
// object keyed by a subcommand name applies to that subcommand only. CLI11
// gives command-line values precedence over these.
class JsonConfig : public CLI::Config {
public:
    explicit JsonConfig(const CLI::App* root) : root_(root) {}

    std::string to_config(const CLI::App*, bool, bool, std::string) const override
    {
        return "{}";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override
    {
        json j;
        try {
            j = json::parse(input);
        } catch (const json::exception& e) {
            throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
        std::vector<CLI::ConfigItem> items;
        std::vector<std::string> parents;
        const auto active = root_->get_subcommands();
        if (!active.empty()) parents = {active.front()->get_name()};
        collect(j, parents, items);
        return items;
    }

private:
    const CLI::App* root_;

    static std::string scalar(const json& v)
    {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }

    void collect(const json& j, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& items) const
    {
        for (const auto& [key, value] : j.items()) {
            std::string name = key;
            std::replace(name.begin(), name.end(), '_', '-');
            if (value.is_object()) {
                if (root_->get_subcommand_no_throw(name) == nullptr) continue;
                if (!parents.empty() && parents.front() != name) continue;
                collect(value, {name}, items);
                continue;
            }
            if (value.is_null()) continue;
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = name;
            if (value.is_array()) {
                for (const auto& v : value) item.inputs.push_back(scalar(v));
            } else {
                item.inputs.push_back(scalar(value));
            }
            items.push_back(std::move(item));
        }
    }
};

// Raised for flag combinations CLI11 cannot express; maps to exit 1.
struct UsageError : InputError {
    using InputError::InputError;
};

struct DataArgs {
    std::string path;
    std::string target;
    std::string task = "regression";
};

struct PenaltyArgs {
    double alpha = 1.0;
    std::string similarity = "ratio";
    double clamp = 1e-4;
    Index group_size = 0;
    std::string export_r;
};

struct SolverArgs {
    double tol = 1e-7;
    int max_sweeps = 10000;
    std::string init = "warm";
    std::string active_set = "auto";
    int max_outer = 50;
    int inner_max_sweeps = 1000;
};

struct DesignArgs {
    SyntheticSpec spec;
    std::string spec_file;
};

void add_data_options(CLI::App& app, DataArgs& a)
{
    app.add_option("--data", a.path, "CSV file with a header row")->required();
    app.add_option("--target", a.target, "name of the response column")->required();
    app.add_option("--task", a.task, "regression or classification")
        ->check(CLI::IsMember({"regression", "classification"}))
        ->capture_default_str();
}

void add_penalty_options(CLI::App& app, PenaltyArgs& a, bool with_alpha)
{
    if (with_alpha) app.add_option("--alpha", a.alpha, "interaction weight alpha >= 0")->capture_default_str();
    app.add_option("--similarity", a.similarity, "squared, absolute, ratio or group_indicator")
        ->check(CLI::IsMember({"squared", "absolute", "ratio", "group_indicator"}))
        ->capture_default_str();
    app.add_option("--clamp", a.clamp, "ratio variant: |r| is clipped to 1 - clamp")->capture_default_str();
    app.add_option("--group-size", a.group_size, "group_indicator: consecutive groups of this many columns");
    app.add_option("--export-r", a.export_r, "write the similarity matrix to this CSV file");
}

void add_solver_options(CLI::App& app, SolverArgs& a)
{
    app.add_option("--tol", a.tol, "coefficient-change tolerance")->capture_default_str();
    app.add_option("--max-sweeps", a.max_sweeps, "coordinate sweeps per fit")->capture_default_str();
    app.add_option("--init", a.init, "zeros, warm or lasso")
        ->check(CLI::IsMember({"zeros", "warm", "lasso"}))
        ->capture_default_str();
    app.add_option("--active-set", a.active_set, "on, off or auto (on when p > 1000)")
        ->check(CLI::IsMember({"on", "off", "auto"}))
        ->capture_default_str();
    app.add_option("--max-outer", a.max_outer, "logistic: outer IRLS iterations")->capture_default_str();
    app.add_option("--inner-max-sweeps", a.inner_max_sweeps, "logistic: sweeps per inner solve")
        ->capture_default_str();
}

void add_design_options(CLI::App& app, DesignArgs& a)
{
    app.add_option("--spec-file", a.spec_file, "JSON object with SyntheticSpec fields; flags override it");
    app.add_option("--n", a.spec.n, "rows");
    app.add_option("--p", a.spec.p, "columns (must equal b * q)");
    app.add_option("--b", a.spec.b, "number of correlated blocks");
    app.add_option("--q", a.spec.q, "columns per block");
    app.add_option("--rho", a.spec.rho, "within-block correlation");
    app.add_option("--coef", a.spec.coef, "coefficients on block leads")->delimiter(',');
    app.add_option("--noise-sd", a.spec.noise_sd, "noise standard deviation");
}

SolverConfig solver_config(const SolverArgs& a)
{
    SolverConfig c;
    c.tol = a.tol;
    c.max_sweeps = a.max_sweeps;
    c.init = init_strategy_from_string(a.init);
    if (a.active_set == "on") c.active_set = true;
    if (a.active_set == "off") c.active_set = false;
    c.validate();
    return c;
}

LogisticConfig logistic_config(const SolverArgs& a)
{
    LogisticConfig c;
    c.inner = solver_config(a);
    c.max_outer = a.max_outer;
    c.inner_max_sweeps = a.inner_max_sweeps;
    if (c.max_outer < 1 || c.inner_max_sweeps < 1) throw UsageError("--max-outer and --inner-max-sweeps must be >= 1");
    return c;
}

Dataset load_data(const DataArgs& a)
{
    return load_csv(a.path, a.target, task_from_string(a.task), true);
}

std::optional<GroupPartition> partition_for(const PenaltyArgs& a, Index p)
{
    if (a.similarity != "group_indicator") return std::nullopt;
    if (a.group_size < 1) throw UsageError("--similarity group_indicator needs --group-size");
    return GroupPartition::contiguous(p, a.group_size);
}

SimilarityMatrix similarity_for(const Dataset& data, const PenaltyArgs& a)
{
    return build_similarity(data, similarity_variant_from_string(a.similarity), a.clamp,
                            partition_for(a, data.p()));
}

void maybe_export_r(const PenaltyArgs& a, const SimilarityMatrix& R, std::ostream& err)
{
    if (a.export_r.empty()) return;
    std::ofstream f(a.export_r);
    if (!f) throw InputError("cannot write '" + a.export_r + "'");
    write_matrix_csv(f, R.dense());
    err << "wrote similarity matrix to " << a.export_r << '\n';
}

// Writes `text` to the --out file, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw InputError("cannot write '" + path + "'");
    f << text;
}

void emit_json(const std::string& path, const json& j, std::ostream& out)
{
    emit(path, j.dump(2) + "\n", out);
}

std::string csv_text(const std::function<void(std::ostream&)>& writer)
{
    std::ostringstream s;
    writer(s);
    return s.str();
}

json raw_scale(const Vector& beta, double intercept, const Dataset& data)
{
    const auto [raw, b0] = unstandardize_coefficients(beta, data, intercept);
    return {{"beta", std::vector<double>(raw.data(), raw.data() + raw.size())}, {"intercept", b0}};
}

Vector read_vector_csv(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw InputError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(f, line)) throw InputError("'" + path + "' is empty");
    std::vector<double> values;
    int row = 1;
    while (std::getline(f, line)) {
        ++row;
        if (line.empty()) continue;
        try {
            std::size_t used = 0;
            values.push_back(std::stod(line, &used));
            if (line.find_first_not_of(" \r", used) != std::string::npos) throw std::invalid_argument(line);
        } catch (const std::exception&) {
            throw InputError("'" + path + "' row " + std::to_string(row) + ": expected one number");
        }
    }
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

json read_json_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw InputError("cannot open '" + path + "'");
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw InputError("'" + path + "' is not valid JSON: " + e.what());
    }
}

SyntheticSpec resolve_spec(const DesignArgs& a, const CLI::App& app)
{
    SyntheticSpec spec;
    if (!a.spec_file.empty()) update_from_json(read_json_file(a.spec_file), spec);
    auto given = [&](const char* flag) { return app.count(flag) > 0; };
    if (given("--n")) spec.n = a.spec.n;
    if (given("--p")) spec.p = a.spec.p;
    if (given("--b")) spec.b = a.spec.b;
    if (given("--q")) spec.q = a.spec.q;
    if (given("--rho")) spec.rho = a.spec.rho;
    if (given("--coef")) spec.coef = a.spec.coef;
    if (given("--noise-sd")) spec.noise_sd = a.spec.noise_sd;
    spec.validate();
    return spec;
}

// ---- commands --------------------------------------------------------------

int cmd_fit(const DataArgs& d, const PenaltyArgs& pa, const SolverArgs& sa, double lambda, const std::string& out_path,
            std::ostream& out, std::ostream& err)
{
    const Dataset data = load_data(d);
    const SimilarityMatrix R = similarity_for(data, pa);
    maybe_export_r(pa, R, err);
    const PenaltySpec penalty{lambda, pa.alpha, R};
    penalty.validate(data.p());

    bool converged = false;
    json payload;
    if (data.task == Task::regression) {
        const SolverConfig config = solver_config(sa);
        std::optional<Vector> start;
        if (config.init == InitStrategy::lasso && pa.alpha > 0.0) {
            start = fit(data, {lambda, 0.0, SimilarityMatrix::zeros(data.p())}, config).beta;
        }
        const FitResult res = fit(data, penalty, config, start);
        converged = res.converged;
        payload = to_json(res);
        payload["raw_scale"] = raw_scale(res.beta, 0.0, data);
    } else {
        const LogisticFitResult res = fit_logistic(data, penalty, logistic_config(sa));
        converged = res.converged;
        for (const auto& w : res.warnings) err << "warning: " << w << '\n';
        payload = to_json(res);
        payload["raw_scale"] = raw_scale(res.beta, res.intercept, data);
    }
    emit_json(out_path, payload, out);
    if (!converged) {
        err << "fit did not converge; result written anyway\n";
        return kNotConverged;
    }
    return kOk;
}

int cmd_path(const DataArgs& d, const PenaltyArgs& pa, const SolverArgs& sa, const std::vector<double>& lambdas,
             int nlambda, std::optional<double> min_ratio, const std::string& out_path, const std::string& csv_path,
             std::ostream& out, std::ostream& err)
{
    const Dataset data = load_data(d);
    const SimilarityMatrix R = similarity_for(data, pa);
    maybe_export_r(pa, R, err);

    Vector grid;
    if (!lambdas.empty()) {
        grid = Eigen::Map<const Vector>(lambdas.data(), static_cast<Index>(lambdas.size()));
    } else if (data.task == Task::regression) {
        grid = default_lambda_grid(data, nlambda, min_ratio, pa.alpha);
    } else {
        grid = default_lambda_grid_logistic(data, nlambda, min_ratio, pa.alpha);
    }

    std::size_t unconverged = 0;
    json payload;
    std::string csv;
    if (data.task == Task::regression) {
        const PathResult path = fit_path(data, pa.alpha, R, grid, solver_config(sa));
        for (const auto& f : path.fits) unconverged += !f.converged;
        payload = to_json(path);
        csv = csv_text([&](std::ostream& s) { write_path_csv(s, path); });
    } else {
        const LogisticPathResult path = fit_logistic_path(data, pa.alpha, R, grid, logistic_config(sa));
        for (const auto& f : path.fits) unconverged += !f.converged;
        payload = to_json(path);
        csv = csv_text([&](std::ostream& s) { write_path_csv(s, path); });
    }
    emit_json(out_path, payload, out);
    if (!csv_path.empty()) emit(csv_path, csv, out);
    if (unconverged > 0) {
        err << unconverged << " of " << grid.size() << " path fits did not converge\n";
        return kNotConverged;
    }
    return kOk;
}

bool refit_converged(const AnyFit& fit)
{
    return std::visit([](const auto& f) { return f.converged; }, fit);
}

int cmd_cv(const DataArgs& d, const PenaltyArgs& pa, const SolverArgs& sa, const std::string& valid_path, int folds,
           const std::vector<double>& alpha_grid, const std::vector<double>& lambdas, int nlambda, std::uint64_t seed,
           unsigned threads, const std::string& out_path, const std::string& grid_csv, std::ostream& out,
           std::ostream& err)
{
    const Dataset data = load_data(d);
    SelectionOptions options;
    options.alpha_grid = alpha_grid;
    if (!lambdas.empty()) options.lambda_grid = Eigen::Map<const Vector>(lambdas.data(), static_cast<Index>(lambdas.size()));
    options.lambda_count = nlambda;
    options.variant = similarity_variant_from_string(pa.similarity);
    options.clamp = pa.clamp;
    options.partition = partition_for(pa, data.p());
    options.solver = solver_config(sa);
    options.logistic = logistic_config(sa);
    options.threads = threads;

    SelectionResult res;
    if (!valid_path.empty()) {
        const Dataset raw_valid = load_csv(valid_path, d.target, data.task, false);
        const Dataset valid = apply_standardization(raw_valid.X, raw_valid.y, data);
        err << "tuning on validation file " << valid_path << '\n';
        res = select_validation(data, valid, options);
    } else {
        err << folds << "-fold cross-validation, seed " << seed << '\n';
        res = cross_validate(data, folds, options, seed);
    }
    emit_json(out_path, to_json(res), out);
    if (!grid_csv.empty()) emit(grid_csv, csv_text([&](std::ostream& s) { write_grid_csv(s, res); }), out);
    if (!refit_converged(res.refit)) {
        err << "refit at the selected penalty did not converge\n";
        return kNotConverged;
    }
    return kOk;
}

int cmd_simulate(const SyntheticSpec& spec, const std::string& task, double logit_scale, const std::string& out_path,
                 const std::string& truth_path, std::ostream& out, std::ostream& err)
{
    const Task t = task_from_string(task);
    const SyntheticSample sample =
        t == Task::regression ? generate_synthetic(spec) : generate_synthetic_classification(spec, logit_scale);
    // The file carries raw values so that beta* applies to it directly.
    const Dataset raw = make_dataset(sample.data.raw_X(), sample.data.raw_y(), t, false);
    emit(out_path, csv_text([&](std::ostream& s) { write_csv(s, raw); }), out);
    if (!truth_path.empty()) {
        json truth = to_json(sample.truth);
        truth["spec"] = to_json(spec);
        truth["task"] = to_string(t);
        emit_json(truth_path, truth, out);
    }
    err << "simulated " << spec.n << " x " << spec.p << " " << to_string(t) << " data, seed " << spec.seed << '\n';
    return kOk;
}

int cmd_check_sign(const DataArgs& d, const PenaltyArgs& pa, double lambda, const std::string& truth_path,
                   const std::string& noise_path, std::optional<std::uint64_t> noise_seed, double sigma,
                   const std::string& out_path, std::ostream& out, std::ostream& err)
{
    const Dataset data = load_data(d);
    if (data.task != Task::regression) throw InputError("check-sign needs a regression dataset");
    const GroundTruth truth = ground_truth_from_json(read_json_file(truth_path));
    if (truth.beta_star.size() != data.p()) {
        throw InputError("ground truth has " + std::to_string(truth.beta_star.size()) + " coefficients but the data has " +
                         std::to_string(data.p()) + " features");
    }
    // beta* is given for the raw columns; the checker works on the standardized ones.
    const Vector beta_std = (truth.beta_star.array() * data.col_scales.array()).matrix();

    Vector noise;
    if (!noise_path.empty()) {
        noise = read_vector_csv(noise_path);
        if (noise.size() != data.n()) throw InputError("noise file length does not match the number of rows");
    } else if (noise_seed) {
        noise = draw_noise(data.n(), sigma, *noise_seed);
    } else {
        noise = data.y - data.X * beta_std;
        err << "no noise given; using the residual y - X beta*\n";
    }

    const SimilarityMatrix R = similarity_for(data, pa);
    maybe_export_r(pa, R, err);
    const SignRecoveryReport report = sign_recovery_check(data, beta_std, noise, {lambda, pa.alpha, R});
    emit_json(out_path, to_json(report), out);
    if (!report.u_invertible) err << "U is singular (condition number " << report.u_condition_number << ")\n";
    return report.holds ? kOk : kConditionFailed;
}

int cmd_bench(const SyntheticSpec& spec, int reps, std::uint64_t seed, const std::vector<std::string>& methods,
              const std::vector<double>& alpha_grid, const SolverArgs& sa, unsigned threads,
              const std::string& out_path, const std::string& csv_path, std::ostream& out, std::ostream& err)
{
    if (reps < 1) throw UsageError("--reps must be >= 1");
    BenchOptions options;
    options.design = spec;
    options.reps = reps;
    options.seed = seed;
    options.methods.clear();
    for (const auto& m : methods) options.methods.push_back(bench_method_from_string(m));
    options.alpha_grid = alpha_grid;
    options.eglasso_ratio_grid = alpha_grid;
    options.solver = solver_config(sa);
    options.threads = threads;
    err << "benchmark: " << reps << " replicates, seed " << seed << '\n';
    const BenchSummary summary = run_benchmark(options);
    emit_json(out_path, to_json(summary), out);
    if (!csv_path.empty()) emit(csv_path, csv_text([&](std::ostream& s) { write_bench_csv(s, summary); }), out);
    return kOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Independently Interpretable Lasso: fits, paths, model selection and diagnostics"};
    app.config_formatter(std::make_shared<JsonConfig>(&app));
    app.set_config("--config", "", "JSON file of flag values; command-line flags take precedence");
    app.fallthrough();
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    DataArgs data_args;
    PenaltyArgs penalty_args;
    SolverArgs solver_args;
    DesignArgs design_args;
    std::string out_path;
    double lambda = 0.0;


    CLI::App* fit_cmd = app.add_subcommand("fit", "fit one (lambda, alpha) and write the FitResult JSON");
    add_data_options(*fit_cmd, data_args);
    add_penalty_options(*fit_cmd, penalty_args, true);
    add_solver_options(*fit_cmd, solver_args);
    fit_cmd->add_option("--lambda", lambda, "penalty level lambda >= 0")->required();
    fit_cmd->add_option("--out", out_path, "output file (default stdout)");

    std::vector<double> lambdas;
    int nlambda = 100;
    double min_ratio = 0.0;
    std::string csv_path;
    CLI::App* path_cmd = app.add_subcommand("path", "fit a regularization path over lambda");
    add_data_options(*path_cmd, data_args);
    add_penalty_options(*path_cmd, penalty_args, true);
    add_solver_options(*path_cmd, solver_args);
    path_cmd->add_option("--lambdas", lambdas, "explicit lambda values, in the order given")->delimiter(',');
    path_cmd->add_option("--nlambda", nlambda, "points on the default grid")->capture_default_str();
    path_cmd->add_option("--lambda-min-ratio", min_ratio, "smallest lambda as a fraction of lambda_max");
    path_cmd->add_option("--out", out_path, "JSON output file (default stdout)");
    path_cmd->add_option("--csv", csv_path, "also write coefficients per lambda as CSV");

    std::string valid_path;
    int folds = 10;
    std::vector<double> alpha_grid = kDefaultAlphaGrid;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string grid_csv;
    CLI::App* cv_cmd = app.add_subcommand("cv", "select (lambda, alpha) by k-fold CV or a validation file");
    add_data_options(*cv_cmd, data_args);
    add_penalty_options(*cv_cmd, penalty_args, false);
    add_solver_options(*cv_cmd, solver_args);
    cv_cmd->add_option("--valid", valid_path, "validation CSV; replaces k-fold CV");
    cv_cmd->add_option("--folds", folds, "number of folds")->capture_default_str();
    cv_cmd->add_option("--alpha-grid", alpha_grid, "alpha values")->delimiter(',');
    cv_cmd->add_option("--lambdas", lambdas, "lambda values shared by every alpha")->delimiter(',');
    cv_cmd->add_option("--nlambda", nlambda, "points on each default grid")->capture_default_str();
    cv_cmd->add_option("--seed", seed, "fold assignment seed")->capture_default_str();
    cv_cmd->add_option("--threads", threads, "folds evaluated concurrently")->capture_default_str();
    cv_cmd->add_option("--out", out_path, "JSON output file (default stdout)");
    cv_cmd->add_option("--grid-csv", grid_csv, "also write per-grid-point scores as CSV");

    std::string sim_task = "regression";
    double logit_scale = 1.0;
    std::string truth_out;
    std::uint64_t sim_seed = 0;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "draw a correlated block design and write it as CSV");
    add_design_options(*sim_cmd, design_args);
    sim_cmd->add_option("--seed", sim_seed, "generator seed");
    sim_cmd->add_option("--task", sim_task, "regression or classification (Bernoulli labels)")
        ->check(CLI::IsMember({"regression", "classification"}))
        ->capture_default_str();
    sim_cmd->add_option("--logit-scale", logit_scale, "classification: logits are X (scale * beta*)")
        ->capture_default_str();
    sim_cmd->add_option("--out", out_path, "CSV output file (default stdout)");
    sim_cmd->add_option("--truth-out", truth_out, "write beta* and the spec as JSON");

    std::string truth_path, noise_path;
    std::uint64_t noise_seed = 0;
    double sigma = 1.0;
    CLI::App* sign_cmd = app.add_subcommand("check-sign", "evaluate the sign-recovery conditions for beta*");
    add_data_options(*sign_cmd, data_args);
    add_penalty_options(*sign_cmd, penalty_args, true);
    sign_cmd->add_option("--lambda", lambda, "penalty level lambda >= 0")->required();
    sign_cmd->add_option("--truth", truth_path, "JSON with beta_star on the raw column scale")->required();
    auto* noise_opt = sign_cmd->add_option("--noise", noise_path, "CSV with a header and one noise value per row");
    auto* noise_seed_opt = sign_cmd->add_option("--noise-seed", noise_seed, "draw noise N(0, sigma^2) from this seed");
    noise_opt->excludes(noise_seed_opt);
    sign_cmd->add_option("--sigma", sigma, "noise standard deviation for --noise-seed")->capture_default_str();
    sign_cmd->add_option("--out", out_path, "JSON output file (default stdout)");

    int reps = 50;
    std::vector<std::string> methods = {"iilasso", "lasso", "eglasso"};
    CLI::App* bench_cmd = app.add_subcommand("bench", "run the correlated-design benchmark");
    add_design_options(*bench_cmd, design_args);
    add_solver_options(*bench_cmd, solver_args);
    bench_cmd->add_option("--reps", reps, "replicates")->capture_default_str();
    bench_cmd->add_option("--seed", seed, "base seed")->capture_default_str();
    bench_cmd->add_option("--methods", methods, "iilasso, lasso, eglasso")->delimiter(',');
    bench_cmd->add_option("--alpha-grid", alpha_grid, "alpha grid (also the EGLasso ratio grid)")->delimiter(',');
    bench_cmd->add_option("--threads", threads, "replicates run concurrently")->capture_default_str();
    bench_cmd->add_option("--out", out_path, "JSON output file (default stdout)");
    bench_cmd->add_option("--csv", csv_path, "also write the summary table as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    try {
        if (fit_cmd->parsed()) {
            return cmd_fit(data_args, penalty_args, solver_args, lambda, out_path, out, err);
        }
        if (path_cmd->parsed()) {
            std::optional<double> ratio;
            if (path_cmd->count("--lambda-min-ratio") > 0) ratio = min_ratio;
            return cmd_path(data_args, penalty_args, solver_args, lambdas, nlambda, ratio, out_path, csv_path, out, err);
        }
        if (cv_cmd->parsed()) {
            return cmd_cv(data_args, penalty_args, solver_args, valid_path, folds, alpha_grid, lambdas, nlambda, seed,
                          threads, out_path, grid_csv, out, err);
        }
        if (sim_cmd->parsed()) {
            SyntheticSpec spec = resolve_spec(design_args, *sim_cmd);
            if (sim_cmd->count("--seed") > 0) spec.seed = sim_seed;
            return cmd_simulate(spec, sim_task, logit_scale, out_path, truth_out, out, err);
        }
        if (sign_cmd->parsed()) {
            std::optional<std::uint64_t> seed_opt;
            if (sign_cmd->count("--noise-seed") > 0) seed_opt = noise_seed;
            return cmd_check_sign(data_args, penalty_args, lambda, truth_path, noise_path, seed_opt, sigma, out_path,
                                  out, err);
        }
        if (bench_cmd->parsed()) {
            const SyntheticSpec spec = resolve_spec(design_args, *bench_cmd);
            return cmd_bench(spec, reps, seed, methods, alpha_grid, solver_args, threads, out_path, csv_path, out, err);
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNotConverged;
    }
    return kInputError;
}

} // namespace iilasso::cli
