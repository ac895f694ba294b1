#include "tsc/agent/policies.hpp"

#include <stdexcept>

namespace tsc::agent {

std::size_t fixed_time_policy(std::size_t decision_index, std::size_t roads_count)
{
    if (roads_count < 2) {
        throw std::invalid_argument("fixed_time_policy: at least two roads are required");
    }
    return decision_index % roads_count;
}

}  // namespace tsc::agent
