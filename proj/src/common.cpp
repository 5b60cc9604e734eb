#include "iilasso/common.hpp"

namespace iilasso {

std::string to_string(Task task)
{
    return task == Task::regression ? "regression" : "classification";
}

Task task_from_string(const std::string& name)
{
    if (name == "regression") return Task::regression;
    if (name == "classification") return Task::classification;
    throw InputError("unknown task '" + name + "' (expected regression|classification)");
}

IndexList support_of(const Vector& beta)
{
    IndexList out;
    for (Index j = 0; j < beta.size(); ++j) {
        if (beta[j] != 0.0) out.push_back(j);
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace iilasso
