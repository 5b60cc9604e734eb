#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "iilasso/io.hpp"
#include "oracles.hpp"

using namespace iilasso;

namespace {

namespace fs = std::filesystem;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args)
{
    args.insert(args.begin(), "iilasso");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir()
{
    const fs::path dir = fs::temp_directory_path() / "iilasso_cli_tests";
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const std::string& name, const std::string& text)
{
    const fs::path path = scratch_dir() / name;
    std::ofstream(path) << text;
    return path;
}

fs::path write_dataset(const std::string& name, const Matrix& X, const Vector& y)
{
    std::ostringstream s;
    s.precision(17);
    for (Index j = 0; j < X.cols(); ++j) s << "x" << j + 1 << ',';
    s << "y\n";
    for (Index i = 0; i < X.rows(); ++i) {
        for (Index j = 0; j < X.cols(); ++j) s << X(i, j) << ',';
        s << y[i] << '\n';
    }
    return write_file(name, s.str());
}

// 4 x 3 design with X^T X / n = I and y = X (2, -1, 0).
fs::path orthonormal_files(fs::path& truth)
{
    Matrix X(4, 3);
    X << 1, 1, 1, -1, 1, -1, 1, -1, -1, -1, -1, 1;
    const Vector beta = (Vector(3) << 2.0, -1.0, 0.0).finished();
    truth = write_file("ortho_truth.json", R"({"beta_star": [2, -1, 0]})");
    return write_dataset("ortho.csv", X, X * beta);
}

} // namespace

TEST_CASE("fit writes the FitResult payload")
{
    const auto sim = run({"simulate", "--seed", "3", "--out", (scratch_dir() / "sim.csv").string()});
    REQUIRE(sim.code == cli::kOk);
    CHECK(sim.out.empty());

    const auto r = run({"fit", "--data", (scratch_dir() / "sim.csv").string(), "--target", "y", "--lambda", "0.1",
                        "--alpha", "1", "--similarity", "ratio"});
    REQUIRE(r.code == cli::kOk);
    const json j = json::parse(r.out);
    CHECK(j.at("schema_version") == kSchemaVersion);
    CHECK(j.at("kind") == "fit");
    for (const char* key : {"lambda", "alpha", "beta", "support", "model_size", "objective", "sweeps", "converged",
                            "kkt_residual"}) {
        CHECK_MESSAGE(j.contains(key), key);
    }
    CHECK(j.at("beta").size() == 100);
}

TEST_CASE("fit with alpha 0 matches the plain Lasso oracle")
{
    const Dataset d = oracle::random_regression(40, 8, 5);
    const fs::path path = write_dataset("lasso.csv", d.X, d.y);
    const auto r = run({"fit", "--data", path.string(), "--target", "y", "--lambda", "0.05", "--alpha", "0",
                        "--tol", "1e-12"});
    REQUIRE(r.code == cli::kOk);
    const auto beta = json::parse(r.out).at("beta").get<std::vector<double>>();
    const Vector expected = oracle::plain_lasso(d.X, d.y, 0.05);
    for (Index j = 0; j < d.p(); ++j) CHECK(std::abs(beta[static_cast<std::size_t>(j)] - expected[j]) <= 1e-8);
}

TEST_CASE("input errors exit 1 and name the problem")
{
    const fs::path data = scratch_dir() / "sim.csv";
    run({"simulate", "--seed", "3", "--out", data.string()});

    auto r = run({"fit", "--data", data.string(), "--lambda", "0.1"});
    CHECK(r.code == cli::kInputError);
    CHECK(r.err.find("--target") != std::string::npos);
    CHECK(r.out.empty());

    r = run({"fit", "--data", (scratch_dir() / "missing.csv").string(), "--target", "y", "--lambda", "0.1"});
    CHECK(r.code == cli::kInputError);

    r = run({"fit", "--data", data.string(), "--target", "nope", "--lambda", "0.1"});
    CHECK(r.code == cli::kInputError);
    CHECK(r.err.find("nope") != std::string::npos);

    r = run({"fit", "--data", data.string(), "--target", "y", "--lambda", "-1"});
    CHECK(r.code == cli::kInputError);

    r = run({"fit", "--data", data.string(), "--target", "y", "--lambda", "0.1", "--similarity", "group_indicator"});
    CHECK(r.code == cli::kInputError);
    CHECK(r.err.find("--group-size") != std::string::npos);

    r = run({"nonsense"});
    CHECK(r.code == cli::kInputError);
}

TEST_CASE("non-convergence exits 2 and still writes the result")
{
    const fs::path data = scratch_dir() / "sim.csv";
    run({"simulate", "--seed", "3", "--out", data.string()});
    const auto r = run({"fit", "--data", data.string(), "--target", "y", "--lambda", "0.01", "--alpha", "1",
                        "--max-sweeps", "1"});
    CHECK(r.code == cli::kNotConverged);
    CHECK(json::parse(r.out).at("converged") == false);
}

TEST_CASE("check-sign exit codes on an orthonormal design")
{
    fs::path truth;
    const fs::path data = orthonormal_files(truth);
    auto r = run({"check-sign", "--data", data.string(), "--target", "y", "--truth", truth.string(), "--lambda", "0.5",
                  "--alpha", "0"});
    CHECK(r.code == cli::kOk);
    CHECK(json::parse(r.out).at("holds") == true);

    r = run({"check-sign", "--data", data.string(), "--target", "y", "--truth", truth.string(), "--lambda", "3",
             "--alpha", "0"});
    CHECK(r.code == cli::kConditionFailed);
    const json j = json::parse(r.out);
    CHECK(j.at("holds") == false);
    CHECK(j.at("cond_31")[0] == false);

    r = run({"check-sign", "--data", data.string(), "--target", "y", "--truth", truth.string(), "--lambda", "0.5",
             "--noise", "a.csv", "--noise-seed", "1"});
    CHECK(r.code == cli::kInputError);
}

TEST_CASE("config file values yield to command-line flags")
{
    const fs::path data = scratch_dir() / "sim.csv";
    run({"simulate", "--seed", "3", "--out", data.string()});
    const fs::path config = write_file("config.json", R"({"target": "y", "lambda": 0.5, "alpha": 10,
                                                          "path": {"nlambda": 3}})");
    auto r = run({"fit", "--config", config.string(), "--data", data.string(), "--alpha", "0"});
    REQUIRE(r.code == cli::kOk);
    json j = json::parse(r.out);
    CHECK(j.at("lambda") == 0.5);
    CHECK(j.at("alpha") == 0.0);

    r = run({"path", "--config", config.string(), "--data", data.string()});
    REQUIRE(r.code == cli::kOk);
    CHECK(json::parse(r.out).at("lambdas").size() == 3);

    const fs::path broken = write_file("broken.json", "{not json");
    r = run({"fit", "--config", broken.string(), "--data", data.string(), "--target", "y", "--lambda", "1"});
    CHECK(r.code == cli::kInputError);
}

TEST_CASE("simulate accepts a spec file and flags override it")
{
    const fs::path spec = write_file("spec.json", R"({"n": 30, "noise_sd": 2, "seed": 5, "rho": 0.9})");
    const fs::path truth = scratch_dir() / "truth.json";
    const auto a = run({"simulate", "--spec-file", spec.string(), "--rho", "0.5", "--truth-out", truth.string()});
    REQUIRE(a.code == cli::kOk);
    std::ifstream f(truth);
    const json j = json::parse(f);
    CHECK(j.at("spec").at("n") == 30);
    CHECK(j.at("spec").at("rho") == 0.5);
    CHECK(j.at("spec").at("seed") == 5);
    CHECK(j.at("beta_star").size() == 100);

    const auto b = run({"simulate", "--spec-file", spec.string(), "--rho", "0.5"});
    CHECK(a.out == b.out);
    CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 31);

    CHECK(run({"simulate", "--p", "99"}).code == cli::kInputError);
}

TEST_CASE("cv is reproducible for a fixed seed")
{
    const fs::path data = scratch_dir() / "sim.csv";
    run({"simulate", "--seed", "3", "--out", data.string()});
    const std::vector<std::string> args = {"cv",      "--data",       data.string(), "--target", "y",
                                           "--folds", "5",            "--alpha-grid", "0,1",     "--nlambda",
                                           "10",      "--seed",       "9"};
    const auto a = run(args);
    const auto b = run(args);
    REQUIRE(a.code == cli::kOk);
    CHECK(a.out == b.out);
    CHECK(json::parse(a.out).at("grid_scores").size() == 20);
}

TEST_CASE("bench with one replicate reports null standard errors")
{
    const auto r = run({"bench", "--reps", "1", "--seed", "7", "--n", "30", "--p", "20", "--b", "4", "--q", "5",
                        "--coef", "3,-2,1,-1", "--alpha-grid", "1,10"});
    REQUIRE(r.code == cli::kOk);
    const json j = json::parse(r.out);
    REQUIRE(j.at("methods").size() == 3);
    for (const auto& m : j.at("methods")) {
        CHECK(m.at("prediction_error_se").is_null());
        CHECK(m.at("estimation_error_se").is_null());
        CHECK(m.at("model_size_se").is_null());
    }
}
