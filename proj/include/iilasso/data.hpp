#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "iilasso/common.hpp"

namespace iilasso {

/// Design matrix and response with the factors used to standardize them.
///
/// When `standardized` is set, every column of X has mean zero and
/// population scale one (sum x^2 / n == 1, within 1e-10). For regression y is centered
/// (`y_mean` holds the removed mean); for classification y holds the raw
/// {0,1} labels. Instances are treated as immutable once built.
struct Dataset {
    Matrix X;
    Vector y;
    Vector col_means;
    Vector col_scales;
    double y_mean = 0.0;
    Task task = Task::regression;
    bool standardized = false;
    std::vector<std::string> feature_names;
    std::string target_name = "y";

    Index n() const { return X.rows(); }
    Index p() const { return X.cols(); }

    /// X on the original scale.
    Matrix raw_X() const;
    /// y on the original scale.
    Vector raw_y() const;
};

/// Builds a dataset from raw values. With `standardize` unset the values are
/// kept as given; the result is still flagged standardized when every column
/// already has mean 0 and unit population scale. Rejects zero-variance
/// columns, n < 2, p < 1, and (for classification) labels outside {0,1}.
Dataset make_dataset(Matrix X, Vector y, Task task, bool standardize,
                     std::vector<std::string> feature_names = {},
                     std::string target_name = "y");

/// Transforms raw (X, y) with the centering/scaling factors of `reference`
/// (e.g. a held-out fold standardized with training statistics).
Dataset apply_standardization(const Matrix& X_raw, const Vector& y_raw,
                              const Dataset& reference);

/// Rows `rows` of `data`, in raw units (no standardization applied).
std::pair<Matrix, Vector> raw_rows(const Dataset& data, const IndexList& rows);

Dataset load_csv(const std::filesystem::path& path, const std::string& target,
                 Task task, bool standardize);

/// Writes data.X and data.y as stored (standardized values if the dataset is).
void write_csv(const std::filesystem::path& path, const Dataset& data);
void write_csv(std::ostream& out, const Dataset& data);

/// Settings of the correlated block design: b blocks of q features each,
/// within-block correlation rho, coef[l] placed on the leading column of
/// block l.
struct SyntheticSpec {
    Index n = 50;
    Index p = 100;
    Index b = 10;
    Index q = 10;
    double rho = 0.95;
    std::vector<double> coef = {10, -9, 8, -7, 6, -5, 4, -3, 2, -1};
    double noise_sd = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct GroundTruth {
    Vector beta_star;
    IndexList support;
    Index s = 0;

    static GroundTruth from_beta(Vector beta_star);
};

struct SyntheticSample {
    Dataset data;
    GroundTruth truth;
    /// Noise realisation added to X beta* (raw scale).
    Vector noise;
};

/// Draws rows i.i.d. from N(0, Sigma) with block-equicorrelated Sigma, sets
/// y = X beta* + noise and standardizes the result. Bit-reproducible for a
/// fixed seed.
SyntheticSample generate_synthetic(const SyntheticSpec& spec);

/// Classification counterpart: same design, logits X (logit_scale * beta*)
/// and Bernoulli labels; noise_sd is unused and `noise` is left empty. Only X
/// is standardized. Throws InputError if every label lands in one class.
SyntheticSample generate_synthetic_classification(const SyntheticSpec& spec, double logit_scale = 1.0);

/// Coefficients and intercept on the original data scale, such that
/// raw_X * beta_raw + intercept reproduces the standardized-scale predictions
/// (plus y_mean for regression).
std::pair<Vector, double> unstandardize_coefficients(const Vector& beta,
                                                     const Dataset& data,
                                                     double intercept = 0.0);

} // namespace iilasso
