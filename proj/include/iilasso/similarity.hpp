#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "iilasso/common.hpp"
#include "iilasso/data.hpp"

namespace iilasso {

enum class SimilarityVariant { squared, absolute, ratio, group_indicator };

std::string to_string(SimilarityVariant v);
SimilarityVariant similarity_variant_from_string(const std::string& name);

/// Disjoint, covering, nonempty index groups over {0..p-1}.
struct GroupPartition {
    std::vector<IndexList> groups;

    void validate(Index p) const;
    /// Consecutive groups of `size` columns.
    static GroupPartition contiguous(Index p, Index size);
};

/// Symmetric nonnegative p x p matrix R of pairwise feature similarities.
///
/// Entries are stored densely unless the matrix was built in row-on-demand
/// mode (large p), in which case they are recomputed from the standardized
/// design when needed. Copies share the underlying storage.
class SimilarityMatrix {
public:
    SimilarityMatrix() = default;

    /// Wraps an explicit matrix; it must be symmetric, finite and nonnegative.
    static SimilarityMatrix from_dense(Matrix R, SimilarityVariant variant, double clamp = 1e-4);
    /// The all-zero matrix (plain Lasso).
    static SimilarityMatrix zeros(Index p);

    Index size() const { return p_; }
    SimilarityVariant variant() const { return variant_; }
    double clamp() const { return clamp_; }
    bool on_demand() const { return dense_ == nullptr && design_ != nullptr; }

    double operator()(Index j, Index k) const;
    double diagonal(Index j) const { return (*this)(j, j); }

    /// out += scale * R[:, j]
    void add_scaled_column(Index j, double scale, Vector& out) const;
    /// R |beta|
    Vector times_abs(const Vector& beta) const;
    /// |beta|^T R |beta|
    double quadratic_form_abs(const Vector& beta) const;
    /// Materialized copy of R (p x p).
    Matrix dense() const;

private:
    friend SimilarityMatrix build_similarity(const Dataset&, SimilarityVariant, double,
                                             const std::optional<GroupPartition>&, Index);
    double from_correlation(double r, bool diagonal) const;

    Index p_ = 0;
    SimilarityVariant variant_ = SimilarityVariant::squared;
    double clamp_ = 1e-4;
    std::shared_ptr<const Matrix> dense_;
    std::shared_ptr<const Matrix> design_;  // standardized X, on-demand mode only
};

/// Builds R from the standardized design: r_jk = X_j^T X_k / n, then
///   squared:          r_jk^2
///   absolute:         |r_jk|
///   ratio:            t / (1 - t) off the diagonal with t = min(|r_jk|, 1 - clamp), 0 on it
///   group_indicator:  1 when j and k share a group of `partition`, else 0
/// Above `on_demand_threshold` features, entries are computed lazily.
SimilarityMatrix build_similarity(const Dataset& data, SimilarityVariant variant, double clamp = 1e-4,
                                  const std::optional<GroupPartition>& partition = std::nullopt,
                                  Index on_demand_threshold = 5000);

/// Regularizer parameters (lambda, alpha, R).
struct PenaltySpec {
    double lambda = 0.0;
    double alpha = 0.0;
    SimilarityMatrix similarity;

    void validate(Index p) const;
};

/// lambda * (||beta||_1 + alpha/2 * |beta|^T R |beta|)
double penalty_value(const Vector& beta, const PenaltySpec& penalty);

} // namespace iilasso
