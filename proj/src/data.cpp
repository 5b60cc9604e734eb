#include "iilasso/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace iilasso {

namespace {

std::vector<std::string> split_commas(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string column_label(const std::vector<std::string>& names, Index j)
{
    if (j < static_cast<Index>(names.size()) && !names[j].empty()) return "'" + names[j] + "'";
    return "#" + std::to_string(j + 1);
}

} // namespace

Matrix Dataset::raw_X() const
{
    Matrix out = X;
    for (Index j = 0; j < p(); ++j) {
        out.col(j) = (X.col(j).array() * col_scales[j] + col_means[j]).matrix();
    }
    return out;
}

Vector Dataset::raw_y() const
{
    if (task == Task::classification) return y;
    return (y.array() + y_mean).matrix();
}

Dataset make_dataset(Matrix X, Vector y, Task task, bool standardize,
                     std::vector<std::string> feature_names, std::string target_name)
{
    const Index n = X.rows();
    const Index p = X.cols();
    if (n < 2) throw InputError("dataset needs at least 2 rows, got " + std::to_string(n));
    if (p < 1) throw InputError("dataset needs at least 1 feature column");
    if (y.size() != n) throw InputError("response length does not match number of rows");
    if (!X.allFinite() || !y.allFinite()) throw InputError("dataset contains non-finite values");
    if (!feature_names.empty() && static_cast<Index>(feature_names.size()) != p) {
        throw InputError("feature name count does not match column count");
    }
    if (task == Task::classification) {
        for (Index i = 0; i < n; ++i) {
            if (y[i] != 0.0 && y[i] != 1.0) {
                throw InputError("classification target must be 0 or 1 (row " + std::to_string(i + 1) +
                                 " has " + std::to_string(y[i]) + ")");
            }
        }
    }

    Dataset d;
    d.task = task;
    d.feature_names = std::move(feature_names);
    d.target_name = std::move(target_name);
    d.col_means = Vector::Zero(p);
    d.col_scales = Vector::Ones(p);

    for (Index j = 0; j < p; ++j) {
        const double mean = X.col(j).mean();
        const double ss = (X.col(j).array() - mean).square().sum() / static_cast<double>(n);
        const double scale = std::sqrt(ss);
        if (!(scale > 0.0) || scale <= 1e-12 * std::max(1.0, std::abs(mean))) {
            throw InputError("column " + column_label(d.feature_names, j) + " has zero variance");
        }
        if (standardize) {
            d.col_means[j] = mean;
            d.col_scales[j] = scale;
            X.col(j) = ((X.col(j).array() - mean) / scale).matrix();
        }
    }
    if (standardize && task == Task::regression) {
        d.y_mean = y.mean();
        y.array() -= d.y_mean;
    }
    d.standardized = standardize;
    if (!standardize) {
        // Already-standardized input counts as standardized.
        const double nn = static_cast<double>(n);
        d.standardized = true;
        for (Index j = 0; j < p && d.standardized; ++j) {
            d.standardized = std::abs(X.col(j).sum()) <= 1e-10 * nn &&
                             std::abs(X.col(j).squaredNorm() / nn - 1.0) <= 1e-10;
        }
    }
    d.X = std::move(X);
    d.y = std::move(y);
    return d;
}

Dataset apply_standardization(const Matrix& X_raw, const Vector& y_raw, const Dataset& reference)
{
    if (X_raw.cols() != reference.p()) throw InputError("column count does not match reference dataset");
    if (X_raw.rows() != y_raw.size()) throw InputError("response length does not match number of rows");
    Dataset d;
    d.task = reference.task;
    d.feature_names = reference.feature_names;
    d.target_name = reference.target_name;
    d.col_means = reference.col_means;
    d.col_scales = reference.col_scales;
    d.y_mean = reference.y_mean;
    d.standardized = reference.standardized;
    d.X = X_raw;
    for (Index j = 0; j < d.p(); ++j) {
        d.X.col(j) = ((X_raw.col(j).array() - d.col_means[j]) / d.col_scales[j]).matrix();
    }
    d.y = y_raw;
    if (d.task == Task::regression) d.y.array() -= d.y_mean;
    return d;
}

std::pair<Matrix, Vector> raw_rows(const Dataset& data, const IndexList& rows)
{
    const Matrix X = data.raw_X();
    const Vector y = data.raw_y();
    Matrix Xs(static_cast<Index>(rows.size()), data.p());
    Vector ys(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Xs.row(static_cast<Index>(i)) = X.row(rows[i]);
        ys[static_cast<Index>(i)] = y[rows[i]];
    }
    return {std::move(Xs), std::move(ys)};
}

Dataset load_csv(const std::filesystem::path& path, const std::string& target, Task task,
                 bool standardize)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open data file '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) throw InputError("data file '" + path.string() + "' is empty");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    std::vector<std::string> header = split_commas(line);
    for (auto& h : header) h = trim(h);

    Index target_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == target) target_col = static_cast<Index>(c);
    }
    if (target_col < 0) throw InputError("target column '" + target + "' not found in header");

    std::vector<std::string> features;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (static_cast<Index>(c) != target_col) features.push_back(header[c]);
    }

    std::vector<double> values;
    std::vector<double> response;
    Index row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        const auto cells = split_commas(line);
        if (cells.size() != header.size()) {
            throw InputError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                             " cells, header has " + std::to_string(header.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::string cell = trim(cells[c]);
            double v = 0.0;
            const char* first = cell.data();
            const char* last = first + cell.size();
            if (!cell.empty() && *first == '+') ++first;
            const auto [ptr, ec] = std::from_chars(first, last, v);
            if (cell.empty() || ec != std::errc() || ptr != last) {
                throw InputError("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                                 ", column '" + header[c] + "'");
            }
            if (static_cast<Index>(c) == target_col) response.push_back(v);
            else values.push_back(v);
        }
    }

    const Index n = row;
    const Index p = static_cast<Index>(features.size());
    Matrix X(n, p);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < p; ++j) X(i, j) = values[static_cast<std::size_t>(i * p + j)];
    }
    Vector y = Eigen::Map<Vector>(response.data(), n);
    return make_dataset(std::move(X), std::move(y), task, standardize, std::move(features), target);
}

void write_csv(const std::filesystem::path& path, const Dataset& data)
{
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    write_csv(out, data);
}

void write_csv(std::ostream& out, const Dataset& data)
{
    const auto precision = out.precision(17);
    for (Index j = 0; j < data.p(); ++j) {
        out << (j < static_cast<Index>(data.feature_names.size()) ? data.feature_names[j]
                                                                  : "X" + std::to_string(j + 1))
            << ',';
    }
    out << data.target_name << '\n';
    for (Index i = 0; i < data.n(); ++i) {
        for (Index j = 0; j < data.p(); ++j) out << data.X(i, j) << ',';
        out << data.y[i] << '\n';
    }
    out.precision(precision);
}

void SyntheticSpec::validate() const
{
    if (n < 2) throw InputError("synthetic n must be at least 2");
    if (b < 1 || q < 1) throw InputError("synthetic b and q must be positive");
    if (p != b * q) throw InputError("synthetic p must equal b*q");
    if (!(rho >= 0.0 && rho < 1.0)) throw InputError("synthetic rho must lie in [0, 1)");
    if (!(noise_sd >= 0.0)) throw InputError("synthetic noise_sd must be nonnegative");
    if (static_cast<Index>(coef.size()) != b) throw InputError("synthetic coef needs exactly b entries");
}

GroundTruth GroundTruth::from_beta(Vector beta_star)
{
    GroundTruth t;
    t.support = support_of(beta_star);
    t.s = static_cast<Index>(t.support.size());
    t.beta_star = std::move(beta_star);
    return t;
}

namespace {

Matrix draw_block_design(const SyntheticSpec& spec, std::mt19937_64& engine,
                         boost::random::normal_distribution<double>& normal)
{
    Matrix block = Matrix::Constant(spec.q, spec.q, spec.rho);
    block.diagonal().setOnes();
    const Matrix L = block.llt().matrixL();

    Matrix X(spec.n, spec.p);
    Vector z(spec.q);
    for (Index i = 0; i < spec.n; ++i) {
        for (Index l = 0; l < spec.b; ++l) {
            for (Index k = 0; k < spec.q; ++k) z[k] = normal(engine);
            X.row(i).segment(l * spec.q, spec.q) = (L * z).transpose();
        }
    }
    return X;
}

Vector block_lead_coefficients(const SyntheticSpec& spec)
{
    Vector beta_star = Vector::Zero(spec.p);
    for (Index l = 0; l < spec.b; ++l) beta_star[l * spec.q] = spec.coef[static_cast<std::size_t>(l)];
    return beta_star;
}

} // namespace

SyntheticSample generate_synthetic(const SyntheticSpec& spec)
{
    spec.validate();
    std::mt19937_64 engine(spec.seed);
    boost::random::normal_distribution<double> normal(0.0, 1.0);

    Matrix X = draw_block_design(spec, engine, normal);
    Vector beta_star = block_lead_coefficients(spec);

    Vector noise(spec.n);
    for (Index i = 0; i < spec.n; ++i) noise[i] = spec.noise_sd * normal(engine);
    Vector y = X * beta_star + noise;

    SyntheticSample out;
    out.data = make_dataset(std::move(X), std::move(y), Task::regression, true);
    out.truth = GroundTruth::from_beta(std::move(beta_star));
    out.noise = std::move(noise);
    return out;
}

SyntheticSample generate_synthetic_classification(const SyntheticSpec& spec, double logit_scale)
{
    spec.validate();
    if (!(logit_scale > 0.0) || !std::isfinite(logit_scale)) throw InputError("logit_scale must be positive");
    std::mt19937_64 engine(spec.seed);
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    boost::random::uniform_01<double> uniform;

    Matrix X = draw_block_design(spec, engine, normal);
    Vector beta_star = logit_scale * block_lead_coefficients(spec);
    const Vector eta = X * beta_star;

    Vector y(spec.n);
    for (Index i = 0; i < spec.n; ++i) {
        const double prob = 1.0 / (1.0 + std::exp(-eta[i]));
        y[i] = uniform(engine) < prob ? 1.0 : 0.0;
    }
    const double ones = y.sum();
    if (ones == 0.0 || ones == static_cast<double>(spec.n)) {
        throw InputError("synthetic labels contain a single class; try another seed or a smaller logit_scale");
    }

    SyntheticSample out;
    out.data = make_dataset(std::move(X), std::move(y), Task::classification, true);
    out.truth = GroundTruth::from_beta(std::move(beta_star));
    return out;
}

std::pair<Vector, double> unstandardize_coefficients(const Vector& beta, const Dataset& data,
                                                     double intercept)
{
    if (beta.size() != data.p()) {
        throw InputError("coefficient length " + std::to_string(beta.size()) + " does not match p = " +
                         std::to_string(data.p()));
    }
    Vector raw = (beta.array() / data.col_scales.array()).matrix();
    double b0 = intercept - raw.dot(data.col_means);
    if (data.task == Task::regression) b0 += data.y_mean;
    return {std::move(raw), b0};
}

} // namespace iilasso
