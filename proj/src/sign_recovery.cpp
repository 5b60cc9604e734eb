#include "iilasso/sign_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace iilasso {

SignRecoveryReport sign_recovery_check(const Dataset& data, const Vector& beta_star, const Vector& noise,
                                       const PenaltySpec& penalty)
{
    const Index n = data.n();
    const Index p = data.p();
    if (beta_star.size() != p) throw InputError("true coefficient length does not match p");
    if (noise.size() != n) throw InputError("noise length does not match n");
    if (!(penalty.lambda > 0.0)) throw InputError("sign recovery check requires lambda > 0");
    penalty.validate(p);

    SignRecoveryReport rep;
    rep.support = support_of(beta_star);
    if (rep.support.empty()) throw InputError("true support is empty");
    IndexList inactive;
    for (Index j = 0, k = 0; j < p; ++j) {
        if (k < static_cast<Index>(rep.support.size()) && rep.support[static_cast<std::size_t>(k)] == j) ++k;
        else inactive.push_back(j);
    }
    const Index s = static_cast<Index>(rep.support.size());
    const Index m = static_cast<Index>(inactive.size());
    const double inv_n = 1.0 / static_cast<double>(n);
    const double la = penalty.lambda * penalty.alpha;

    const Matrix X_S = data.X(Eigen::all, rep.support);
    const Matrix X_Sc = data.X(Eigen::all, inactive);
    const Vector b_S = beta_star(rep.support);
    const Vector sgn_S = b_S.unaryExpr([](double v) { return sign(v); });

    Matrix R_SS = Matrix::Zero(s, s);
    Matrix R_ScS = Matrix::Zero(m, s);
    if (penalty.alpha != 0.0) {
        for (Index a = 0; a < s; ++a) {
            for (Index c = 0; c < s; ++c) R_SS(a, c) = penalty.similarity(rep.support[a], rep.support[c]);
            for (Index c = 0; c < m; ++c) R_ScS(c, a) = penalty.similarity(inactive[c], rep.support[a]);
        }
    }
    const Matrix DRD = sgn_S.asDiagonal() * R_SS * sgn_S.asDiagonal();

    rep.U = inv_n * X_S.transpose() * X_S + la * DRD;
    rep.V = penalty.lambda * sgn_S + la * DRD * b_S - inv_n * X_S.transpose() * noise;

    Eigen::JacobiSVD<Matrix> svd(rep.U);
    const auto& sv = svd.singularValues();
    rep.u_condition_number = sv[s - 1] > 0.0 ? sv[0] / sv[s - 1] : std::numeric_limits<double>::infinity();
    rep.u_invertible = rep.u_condition_number <= kSingularConditionNumber;
    rep.cond_31.assign(static_cast<std::size_t>(s), false);
    rep.cond_32.assign(static_cast<std::size_t>(m), false);
    rep.cond_32_lhs = Vector::Zero(m);
    rep.cond_32_rhs = Vector::Zero(m);
    if (!rep.u_invertible) {
        rep.beta_S_implied = Vector::Constant(s, std::numeric_limits<double>::quiet_NaN());
        return rep;
    }

    const Vector u_inv_v = rep.U.partialPivLu().solve(rep.V);
    rep.beta_S_implied = b_S - u_inv_v;

    bool all = true;
    for (Index a = 0; a < s; ++a) {
        const bool ok = sign(rep.beta_S_implied[a]) == sgn_S[a];
        rep.cond_31[static_cast<std::size_t>(a)] = ok;
        all = all && ok;
    }
    rep.cond_32_lhs = (inv_n * X_Sc.transpose() * (X_S * u_inv_v) + inv_n * X_Sc.transpose() * noise).cwiseAbs();
    rep.cond_32_rhs = penalty.lambda * (Vector::Ones(m) + penalty.alpha * R_ScS * rep.beta_S_implied.cwiseAbs());
    for (Index c = 0; c < m; ++c) {
        const bool ok = rep.cond_32_lhs[c] <= rep.cond_32_rhs[c];
        rep.cond_32[static_cast<std::size_t>(c)] = ok;
        all = all && ok;
    }
    rep.holds = all;
    return rep;
}

Vector draw_noise(Index n, double sigma, std::uint64_t seed)
{
    std::mt19937_64 engine(seed);
    boost::random::normal_distribution<double> normal(0.0, sigma);
    Vector eps(n);
    for (Index i = 0; i < n; ++i) eps[i] = normal(engine);
    return eps;
}

std::vector<ProbeRow> local_optimum_error_probe(const Dataset& data, const Vector& beta_star_std,
                                                const SimilarityMatrix& similarity,
                                                const std::vector<ProbeSetting>& grid, int n_starts,
                                                std::uint64_t seed, const SolverConfig& config)
{
    if (n_starts < 2) throw InputError("local optimum probe needs at least 2 random starts");
    const Index p = data.p();
    const Index sparsity = std::max<Index>(1, static_cast<Index>(support_of(beta_star_std).size()));
    const double scale = std::max(lambda_max(data), 1e-12);

    std::mt19937_64 engine(seed);
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vector> starts{Vector::Zero(p)};
    std::vector<Index> order(static_cast<std::size_t>(p));
    for (int k = 0; k < n_starts; ++k) {
        std::iota(order.begin(), order.end(), Index{0});
        std::shuffle(order.begin(), order.end(), engine);
        Vector b = Vector::Zero(p);
        for (Index t = 0; t < std::min(sparsity, p); ++t) b[order[static_cast<std::size_t>(t)]] = scale * normal(engine);
        starts.push_back(std::move(b));
    }

    std::vector<ProbeRow> rows;
    for (const auto& setting : grid) {
        ProbeRow row;
        row.lambda = setting.lambda;
        row.alpha = setting.alpha;
        PenaltySpec penalty{setting.lambda, setting.alpha, similarity};
        for (const auto& start : starts) {
            const FitResult res = fit(data, penalty, config, start);
            row.starts.push_back({(res.beta - beta_star_std).norm(), res.objective(), res.model_size, res.converged});
        }
        const auto [lo, hi] = std::minmax_element(row.starts.begin(), row.starts.end(),
                                                  [](const ProbeStart& a, const ProbeStart& b) {
                                                      return a.estimation_error < b.estimation_error;
                                                  });
        row.min_error = lo->estimation_error;
        row.max_error = hi->estimation_error;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ProbeRow> local_optimum_error_probe(const SyntheticSpec& spec, const std::vector<ProbeSetting>& grid,
                                                SimilarityVariant variant, int n_starts, std::uint64_t seed,
                                                const SolverConfig& config)
{
    const SyntheticSample sample = generate_synthetic(spec);
    const Vector beta_std = (sample.truth.beta_star.array() * sample.data.col_scales.array()).matrix();
    std::optional<GroupPartition> partition;
    if (variant == SimilarityVariant::group_indicator) partition = GroupPartition::contiguous(spec.p, spec.q);
    const SimilarityMatrix R = build_similarity(sample.data, variant, 1e-4, partition);
    return local_optimum_error_probe(sample.data, beta_std, R, grid, n_starts, seed, config);
}

} // namespace iilasso
