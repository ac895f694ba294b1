#include "tsc/sim/sim_config.hpp"

#include <cmath>

namespace tsc::sim {

namespace {

void require_positive(const char* key, double value)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ConfigError(key, "must be a positive finite number");
    }
}

}  // namespace

void SimConfig::validate() const
{
    if (roads_count < 2) {
        throw ConfigError("roads_count", "must be at least 2, got " + std::to_string(roads_count));
    }
    require_positive("green_duration_s", green_duration_s);
    require_positive("inter_green_s", inter_green_s);
    require_positive("saturation_headway_s", saturation_headway_s);
    require_positive("episode_length_s", episode_length_s);
    if (arrival_rates.size() != roads_count) {
        throw ConfigError("arrival_rates", "expected " + std::to_string(roads_count) + " entries, got " +
                                               std::to_string(arrival_rates.size()));
    }
    for (double rate : arrival_rates) {
        if (!(rate >= 0.0) || !std::isfinite(rate)) {
            throw ConfigError("arrival_rates", "rates must be finite and nonnegative");
        }
    }
    if (!(fairness_weight >= 0.0) || !std::isfinite(fairness_weight)) {
        throw ConfigError("fairness_weight", "must be finite and nonnegative");
    }
    if (!(stuck_probability >= 0.0 && stuck_probability <= 1.0)) {
        throw ConfigError("stuck_probability", "must lie in [0, 1]");
    }
    if (queue_capacity && *queue_capacity == 0) {
        throw ConfigError("queue_capacity", "must be at least 1 when set");
    }
    require_positive("observation_scale.queue", scale.queue);
    require_positive("observation_scale.waiting_s", scale.waiting_s);
    require_positive("observation_scale.count", scale.count);
}

std::size_t SimConfig::green_capacity() const
{
    return static_cast<std::size_t>(std::floor(green_duration_s / saturation_headway_s));
}

}  // namespace tsc::sim
