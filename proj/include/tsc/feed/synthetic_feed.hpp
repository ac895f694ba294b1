#pragma once

#include "tsc/feed/detection_event.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tsc::feed {

struct SyntheticFeedOptions {
    std::string intersection_id = "x0";
    double service_delay_s = 5.0;  // enter-to-exit delay of each vehicle
    double speed_min_mps = 6.0;
    double speed_max_mps = 14.0;
};

// Poisson enter events per road over [0, duration_s), each followed by a
// matching exit; sorted by (t_ms, event, road, track).
std::vector<DetectionEvent> gen_synthetic_feed(std::span<const double> rates, double duration_s,
                                               std::uint64_t seed, const SyntheticFeedOptions& options = {});

}  // namespace tsc::feed
