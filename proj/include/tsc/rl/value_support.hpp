#pragma once

#include <cstddef>
#include <vector>

namespace tsc::rl {

// Fixed categorical support: n_atoms equally spaced points on [v_min, v_max].
struct ValueSupport {
    double v_min = -600.0;
    double v_max = 100.0;
    std::size_t n_atoms = 51;

    void validate() const;
    double delta() const { return n_atoms > 1 ? (v_max - v_min) / static_cast<double>(n_atoms - 1) : 0.0; }
    double atom(std::size_t i) const { return v_min + static_cast<double>(i) * delta(); }
    std::vector<double> atoms() const;

    friend bool operator==(const ValueSupport&, const ValueSupport&) = default;
};

}  // namespace tsc::rl
