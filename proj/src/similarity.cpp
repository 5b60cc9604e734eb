#include "iilasso/similarity.hpp"

#include <algorithm>
#include <cmath>

namespace iilasso {

std::string to_string(SimilarityVariant v)
{
    switch (v) {
    case SimilarityVariant::squared: return "squared";
    case SimilarityVariant::absolute: return "absolute";
    case SimilarityVariant::ratio: return "ratio";
    case SimilarityVariant::group_indicator: return "group_indicator";
    }
    return "unknown";
}

SimilarityVariant similarity_variant_from_string(const std::string& name)
{
    if (name == "squared") return SimilarityVariant::squared;
    if (name == "absolute") return SimilarityVariant::absolute;
    if (name == "ratio") return SimilarityVariant::ratio;
    if (name == "group_indicator" || name == "group") return SimilarityVariant::group_indicator;
    throw InputError("unknown similarity variant '" + name +
                     "' (expected squared|absolute|ratio|group_indicator)");
}

void GroupPartition::validate(Index p) const
{
    std::vector<int> seen(static_cast<std::size_t>(p), 0);
    for (const auto& g : groups) {
        if (g.empty()) throw InputError("group partition contains an empty group");
        for (Index j : g) {
            if (j < 0 || j >= p) throw InputError("group index " + std::to_string(j) + " out of range");
            if (seen[static_cast<std::size_t>(j)]++) {
                throw InputError("feature " + std::to_string(j) + " appears in more than one group");
            }
        }
    }
    for (Index j = 0; j < p; ++j) {
        if (!seen[static_cast<std::size_t>(j)]) {
            throw InputError("feature " + std::to_string(j) + " is not covered by the partition");
        }
    }
}

GroupPartition GroupPartition::contiguous(Index p, Index size)
{
    if (size < 1) throw InputError("group size must be positive");
    GroupPartition part;
    for (Index start = 0; start < p; start += size) {
        IndexList g;
        for (Index j = start; j < std::min(p, start + size); ++j) g.push_back(j);
        part.groups.push_back(std::move(g));
    }
    return part;
}

SimilarityMatrix SimilarityMatrix::from_dense(Matrix R, SimilarityVariant variant, double clamp)
{
    if (R.rows() != R.cols()) throw InputError("similarity matrix must be square");
    if (!R.allFinite()) throw InputError("similarity matrix has non-finite entries");
    if ((R.array() < 0.0).any()) throw InputError("similarity matrix has negative entries");
    if (R != R.transpose()) throw InputError("similarity matrix is not symmetric");
    SimilarityMatrix s;
    s.p_ = R.rows();
    s.variant_ = variant;
    s.clamp_ = clamp;
    s.dense_ = std::make_shared<const Matrix>(std::move(R));
    return s;
}

SimilarityMatrix SimilarityMatrix::zeros(Index p)
{
    return from_dense(Matrix::Zero(p, p), SimilarityVariant::squared);
}

double SimilarityMatrix::from_correlation(double r, bool diagonal) const
{
    const double a = std::abs(r);
    switch (variant_) {
    case SimilarityVariant::squared: return diagonal ? 1.0 : r * r;
    case SimilarityVariant::absolute: return diagonal ? 1.0 : a;
    case SimilarityVariant::ratio: {
        if (diagonal) return 0.0;
        const double t = std::min(a, 1.0 - clamp_);
        return t / (1.0 - t);
    }
    case SimilarityVariant::group_indicator: break;
    }
    return 0.0;
}

double SimilarityMatrix::operator()(Index j, Index k) const
{
    if (dense_) return (*dense_)(j, k);
    if (!design_) return 0.0;
    const auto& X = *design_;
    const double r = X.col(j).dot(X.col(k)) / static_cast<double>(X.rows());
    return from_correlation(r, j == k);
}

void SimilarityMatrix::add_scaled_column(Index j, double scale, Vector& out) const
{
    if (dense_) {
        out.noalias() += scale * dense_->col(j);
        return;
    }
    if (!design_) return;
    const auto& X = *design_;
    const Vector r = X.transpose() * X.col(j) / static_cast<double>(X.rows());
    for (Index k = 0; k < p_; ++k) out[k] += scale * from_correlation(r[k], j == k);
}

Vector SimilarityMatrix::times_abs(const Vector& beta) const
{
    if (dense_) return *dense_ * beta.cwiseAbs();
    Vector out = Vector::Zero(p_);
    for (Index j = 0; j < p_; ++j) {
        if (beta[j] != 0.0) add_scaled_column(j, std::abs(beta[j]), out);
    }
    return out;
}

double SimilarityMatrix::quadratic_form_abs(const Vector& beta) const
{
    return beta.cwiseAbs().dot(times_abs(beta));
}

Matrix SimilarityMatrix::dense() const
{
    if (dense_) return *dense_;
    Matrix out = Matrix::Zero(p_, p_);
    if (!design_) return out;
    for (Index j = 0; j < p_; ++j) {
        Vector col = Vector::Zero(p_);
        add_scaled_column(j, 1.0, col);
        out.col(j) = col;
    }
    return out;
}

SimilarityMatrix build_similarity(const Dataset& data, SimilarityVariant variant, double clamp,
                                  const std::optional<GroupPartition>& partition,
                                  Index on_demand_threshold)
{
    if (!data.standardized) throw InputError("similarity requires a standardized dataset");
    if (!(clamp > 0.0 && clamp < 1.0)) throw InputError("similarity clamp must lie in (0, 1)");
    const Index p = data.p();

    if (variant == SimilarityVariant::group_indicator) {
        if (!partition) throw InputError("group_indicator similarity requires a group partition");
        partition->validate(p);
        Matrix R = Matrix::Zero(p, p);
        for (const auto& g : partition->groups) {
            for (Index j : g) {
                for (Index k : g) R(j, k) = 1.0;
            }
        }
        return SimilarityMatrix::from_dense(std::move(R), variant, clamp);
    }
    if (partition) throw InputError("a group partition is only valid for the group_indicator variant");

    SimilarityMatrix s;
    s.p_ = p;
    s.variant_ = variant;
    s.clamp_ = clamp;
    if (p > on_demand_threshold) {
        s.design_ = std::make_shared<const Matrix>(data.X);
        return s;
    }

    const double n = static_cast<double>(data.n());
    Matrix R(p, p);
    // Only the upper triangle is computed and mirrored, so R is exactly symmetric.
    for (Index k = 0; k < p; ++k) {
        for (Index j = 0; j <= k; ++j) {
            const double r = data.X.col(j).dot(data.X.col(k)) / n;
            R(j, k) = R(k, j) = s.from_correlation(r, j == k);
        }
    }
    s.dense_ = std::make_shared<const Matrix>(std::move(R));
    return s;
}

void PenaltySpec::validate(Index p) const
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError("lambda must be a finite value >= 0");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InputError("alpha must be a finite value >= 0");
    if (alpha > 0.0 && similarity.size() != p) {
        throw InputError("similarity matrix size " + std::to_string(similarity.size()) +
                         " does not match p = " + std::to_string(p));
    }
}

double penalty_value(const Vector& beta, const PenaltySpec& penalty)
{
    const double l1 = beta.lpNorm<1>();
    if (penalty.alpha == 0.0) return penalty.lambda * l1;
    if (penalty.similarity.size() != beta.size()) {
        throw InputError("coefficient length does not match similarity matrix");
    }
    return penalty.lambda * (l1 + 0.5 * penalty.alpha * penalty.similarity.quadratic_form_abs(beta));
}

} // namespace iilasso
