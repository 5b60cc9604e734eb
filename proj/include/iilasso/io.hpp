#pragma once

#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "iilasso/benchmark.hpp"
#include "iilasso/data.hpp"
#include "iilasso/linear_solver.hpp"
#include "iilasso/logistic_solver.hpp"
#include "iilasso/model_selection.hpp"
#include "iilasso/sign_recovery.hpp"

namespace iilasso {

using json = nlohmann::json;

/// Version stamped into every JSON payload; matches schemas/*.schema.json.
inline constexpr const char* kSchemaVersion = "1.0";

json to_json(const FitResult& fit);
json to_json(const LogisticFitResult& fit);
json to_json(const PathResult& path);
json to_json(const LogisticPathResult& path);
json to_json(const SignRecoveryReport& report);
json to_json(const SelectionResult& selection);
json to_json(const BenchSummary& summary);
json to_json(const Metrics& metrics);
json to_json(const SyntheticSpec& spec);
json to_json(const GroundTruth& truth);

/// Reads any subset of SyntheticSpec fields; absent fields keep their value.
void update_from_json(const json& j, SyntheticSpec& spec);
/// Accepts {"beta_star": [...]}.
GroundTruth ground_truth_from_json(const json& j);

/// Rows = lambda, columns = lambda followed by one column per coefficient.
void write_path_csv(std::ostream& out, const PathResult& path);
void write_path_csv(std::ostream& out, const LogisticPathResult& path);
/// Long format: alpha,lambda,mean,se,model_size.
void write_grid_csv(std::ostream& out, const SelectionResult& selection);
/// One row per method: means and standard errors.
void write_bench_csv(std::ostream& out, const BenchSummary& summary);
void write_matrix_csv(std::ostream& out, const Matrix& m);

} // namespace iilasso
