#pragma once

#include "tsc/sim/reward.hpp"
#include "tsc/sim/sim_config.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace tsc::sim {

// Layout: [remaining green fraction | one-hot green road (R) | queue (R)
//          | avg waiting (R) | in counts (R) | out counts (R)], each entry
// normalized and clamped to [0, kObservationClamp].
struct Observation {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    friend bool operator==(const Observation&, const Observation&) = default;
};

inline constexpr double kObservationClamp = 5.0;

constexpr std::size_t observation_size(std::size_t roads) { return 1 + 5 * roads; }

Observation observe(std::span<const RoadState> roads, const SignalState& signal, const SimConfig& config);

}  // namespace tsc::sim
