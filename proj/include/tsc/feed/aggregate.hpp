#pragma once

#include "tsc/feed/detection_event.hpp"
#include "tsc/sim/arrivals.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tsc::feed {

struct Window {
    double start_s = 0.0;
    double end_s = 0.0;  // exclusive
};

struct IntervalAggregate {
    Window window;
    std::vector<std::size_t> in_count;
    std::vector<std::size_t> out_count;
    std::vector<double> mean_speed_mps;  // over enter events carrying a speed; 0 if none
    std::size_t unmatched_exits = 0;     // exits with no earlier enter for the same track
};

// Stateful across windows so exits can be matched to enters seen earlier.
class FeedAggregator {
public:
    explicit FeedAggregator(std::size_t roads_count);

    // Events must be time-ordered and fall inside the window.
    IntervalAggregate aggregate(std::span<const DetectionEvent> events, Window window);

    std::size_t unmatched_exits() const { return unmatched_exits_; }

private:
    std::size_t roads_count_;
    std::set<std::pair<std::string, std::int64_t>> open_tracks_;  // (intersection, track)
    std::size_t unmatched_exits_ = 0;
};

IntervalAggregate aggregate_interval(std::span<const DetectionEvent> events, Window window, std::size_t roads_count);

// Enter events of one intersection as simulator arrivals (time in seconds).
std::shared_ptr<const sim::RoadArrivals> arrivals_from_events(std::span<const DetectionEvent> events,
                                                              const std::string& intersection_id,
                                                              std::size_t roads_count);

}  // namespace tsc::feed
