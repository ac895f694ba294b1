#include "tsc/rl/value_support.hpp"

#include <cmath>
#include <stdexcept>

namespace tsc::rl {

void ValueSupport::validate() const
{
    if (!(v_min < v_max) || !std::isfinite(v_min) || !std::isfinite(v_max)) {
        throw std::invalid_argument("value support requires finite v_min < v_max");
    }
    if (n_atoms < 1) {
        throw std::invalid_argument("value support requires at least one atom");
    }
}

std::vector<double> ValueSupport::atoms() const
{
    std::vector<double> z(n_atoms);
    for (std::size_t i = 0; i < n_atoms; ++i) {
        z[i] = atom(i);
    }
    return z;
}

}  // namespace tsc::rl
