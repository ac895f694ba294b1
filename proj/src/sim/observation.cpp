#include "tsc/sim/observation.hpp"

#include <algorithm>
#include <cmath>

namespace tsc::sim {

namespace {

double clamp_entry(double v)
{
    if (!std::isfinite(v)) {
        return v > 0 ? kObservationClamp : 0.0;
    }
    return std::clamp(v, 0.0, kObservationClamp);
}

}  // namespace

Observation observe(std::span<const RoadState> roads, const SignalState& signal, const SimConfig& config)
{
    const std::size_t n = roads.size();
    Observation obs;
    obs.values.assign(observation_size(n), 0.0);
    auto& v = obs.values;
    v[0] = clamp_entry(signal.remaining_green_s / config.green_duration_s);
    v[1 + signal.green_road] = 1.0;
    for (std::size_t r = 0; r < n; ++r) {
        v[1 + n + r] = clamp_entry(static_cast<double>(roads[r].queue.size()) / config.scale.queue);
        v[1 + 2 * n + r] = clamp_entry(roads[r].avg_waiting_s / config.scale.waiting_s);
        v[1 + 3 * n + r] = clamp_entry(static_cast<double>(roads[r].in_count) / config.scale.count);
        v[1 + 4 * n + r] = clamp_entry(static_cast<double>(roads[r].out_count) / config.scale.count);
    }
    return obs;
}

}  // namespace tsc::sim
