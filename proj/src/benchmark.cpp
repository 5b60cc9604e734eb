#include "iilasso/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <future>

namespace iilasso {

std::string to_string(BenchMethod m)
{
    switch (m) {
    case BenchMethod::iilasso: return "iilasso";
    case BenchMethod::lasso: return "lasso";
    case BenchMethod::eglasso: return "eglasso";
    }
    return "unknown";
}

BenchMethod bench_method_from_string(const std::string& name)
{
    if (name == "iilasso") return BenchMethod::iilasso;
    if (name == "lasso") return BenchMethod::lasso;
    if (name == "eglasso") return BenchMethod::eglasso;
    throw InputError("unknown method '" + name + "' (expected iilasso|lasso|eglasso)");
}

std::vector<ReplicateMetrics> run_replicate(const BenchOptions& options, int rep)
{
    const auto base = static_cast<std::uint64_t>(rep) * 3;
    SyntheticSpec spec = options.design;
    spec.seed = derive_seed(options.seed, base);
    const SyntheticSample train = generate_synthetic(spec);
    spec.seed = derive_seed(options.seed, base + 1);
    const SyntheticSample valid_raw = generate_synthetic(spec);
    spec.seed = derive_seed(options.seed, base + 2);
    const SyntheticSample test_raw = generate_synthetic(spec);

    const Dataset valid = apply_standardization(valid_raw.data.raw_X(), valid_raw.data.raw_y(), train.data);
    const Dataset test = apply_standardization(test_raw.data.raw_X(), test_raw.data.raw_y(), train.data);

    std::vector<ReplicateMetrics> out;
    for (BenchMethod method : options.methods) {
        SelectionOptions sel;
        sel.solver = options.solver;
        switch (method) {
        case BenchMethod::iilasso:
            sel.variant = SimilarityVariant::ratio;
            sel.alpha_grid = options.alpha_grid;
            break;
        case BenchMethod::lasso:
            sel.alpha_grid = {0.0};
            break;
        case BenchMethod::eglasso:
            sel.variant = SimilarityVariant::group_indicator;
            sel.partition = GroupPartition::contiguous(spec.p, spec.q);
            sel.alpha_grid.clear();
            for (double r : options.eglasso_ratio_grid) sel.alpha_grid.push_back(2.0 * r);
            break;
        }
        const SelectionResult chosen = select_validation(train.data, valid, sel);
        const auto& fit = std::get<FitResult>(chosen.refit);
        const Metrics m = evaluate(fit, test, &train.truth);
        out.push_back({m.prediction_error, *m.estimation_error, static_cast<double>(m.model_size),
                       chosen.best_lambda, chosen.best_alpha});
    }
    return out;
}

namespace {

std::pair<double, std::optional<double>> mean_se(const std::vector<double>& v)
{
    const double n = static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / n;
    if (v.size() < 2) return {mean, std::nullopt};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

} // namespace

BenchSummary run_benchmark(const BenchOptions& options)
{
    if (options.reps < 1) throw InputError("benchmark needs at least one replicate");
    if (options.methods.empty()) throw InputError("benchmark needs at least one method");
    options.design.validate();

    std::vector<std::vector<ReplicateMetrics>> results(static_cast<std::size_t>(options.reps));
    const int threads = static_cast<int>(std::max(1u, options.threads));
    for (int start = 0; start < options.reps; start += threads) {
        const int stop = std::min(options.reps, start + threads);
        if (threads == 1) {
            results[static_cast<std::size_t>(start)] = run_replicate(options, start);
            continue;
        }
        std::vector<std::future<std::vector<ReplicateMetrics>>> jobs;
        for (int r = start; r < stop; ++r) jobs.push_back(std::async(std::launch::async, run_replicate, std::cref(options), r));
        for (int r = start; r < stop; ++r) results[static_cast<std::size_t>(r)] = jobs[static_cast<std::size_t>(r - start)].get();
    }

    BenchSummary summary;
    summary.reps = options.reps;
    summary.seed = options.seed;
    for (std::size_t m = 0; m < options.methods.size(); ++m) {
        MethodSummary ms;
        ms.method = options.methods[m];
        std::vector<double> pe, ee, size;
        for (const auto& rep : results) {
            ms.replicates.push_back(rep[m]);
            pe.push_back(rep[m].prediction_error);
            ee.push_back(rep[m].estimation_error);
            size.push_back(rep[m].model_size);
        }
        std::tie(ms.prediction_error, ms.prediction_error_se) = mean_se(pe);
        std::tie(ms.estimation_error, ms.estimation_error_se) = mean_se(ee);
        std::tie(ms.model_size, ms.model_size_se) = mean_se(size);
        summary.methods.push_back(std::move(ms));
    }
    return summary;
}

} // namespace iilasso
