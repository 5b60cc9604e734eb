#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace iilasso {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;
using IndexList = std::vector<Index>;

enum class Task { regression, classification };

/// Bad user input: malformed files, flags, or violated preconditions.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Non-finite values produced during optimization.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string to_string(Task task);
Task task_from_string(const std::string& name);

/// Indices of the nonzero entries of `beta`, ascending.
IndexList support_of(const Vector& beta);

inline double sign(double x) { return (x > 0.0) - (x < 0.0); }

/// Mixes a base seed with a stream index (splitmix64 finalizer). Used to
/// derive per-fold and per-replicate seeds that do not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace iilasso
