#pragma once

#include <cstddef>

namespace tsc::agent {

// Round-robin signal timing with equal green shares.
std::size_t fixed_time_policy(std::size_t decision_index, std::size_t roads_count);

}  // namespace tsc::agent
