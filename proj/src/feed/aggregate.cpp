#include "tsc/feed/aggregate.hpp"

#include <algorithm>
#include <stdexcept>

namespace tsc::feed {

FeedAggregator::FeedAggregator(std::size_t roads_count) : roads_count_(roads_count) {}

IntervalAggregate FeedAggregator::aggregate(std::span<const DetectionEvent> events, Window window)
{
    if (!(window.end_s > window.start_s)) {
        throw std::invalid_argument("aggregate_interval: window end must be after its start");
    }
    IntervalAggregate agg;
    agg.window = window;
    agg.in_count.assign(roads_count_, 0);
    agg.out_count.assign(roads_count_, 0);
    agg.mean_speed_mps.assign(roads_count_, 0.0);
    std::vector<std::size_t> speed_samples(roads_count_, 0);

    const double start_ms = window.start_s * 1000.0;
    const double end_ms = window.end_s * 1000.0;
    std::int64_t previous = events.empty() ? 0 : events.front().t_ms;
    for (const DetectionEvent& e : events) {
        const auto t = static_cast<double>(e.t_ms);
        if (t < start_ms || t >= end_ms) {
            throw std::invalid_argument("aggregate_interval: event at t_ms=" + std::to_string(e.t_ms) +
                                        " lies outside the window");
        }
        if (e.t_ms < previous) {
            throw std::invalid_argument("aggregate_interval: events are not time-ordered");
        }
        previous = e.t_ms;
        if (e.road_id < 0 || static_cast<std::size_t>(e.road_id) >= roads_count_) {
            throw std::invalid_argument("aggregate_interval: road_id " + std::to_string(e.road_id) +
                                        " out of range");
        }
        const auto road = static_cast<std::size_t>(e.road_id);
        const auto key = std::make_pair(e.intersection_id, e.track_id);
        if (e.event == EventKind::enter) {
            ++agg.in_count[road];
            open_tracks_.insert(key);
            if (e.speed_mps) {
                agg.mean_speed_mps[road] += *e.speed_mps;
                ++speed_samples[road];
            }
        } else {
            ++agg.out_count[road];
            if (open_tracks_.erase(key) == 0) {
                ++agg.unmatched_exits;
                ++unmatched_exits_;
            }
        }
    }
    for (std::size_t r = 0; r < roads_count_; ++r) {
        if (speed_samples[r] > 0) {
            agg.mean_speed_mps[r] /= static_cast<double>(speed_samples[r]);
        }
    }
    return agg;
}

IntervalAggregate aggregate_interval(std::span<const DetectionEvent> events, Window window, std::size_t roads_count)
{
    FeedAggregator aggregator(roads_count);
    return aggregator.aggregate(events, window);
}

std::shared_ptr<const sim::RoadArrivals> arrivals_from_events(std::span<const DetectionEvent> events,
                                                              const std::string& intersection_id,
                                                              std::size_t roads_count)
{
    auto arrivals = std::make_shared<sim::RoadArrivals>(roads_count);
    for (const DetectionEvent& e : events) {
        if (e.event != EventKind::enter || e.intersection_id != intersection_id) {
            continue;
        }
        if (e.road_id < 0 || static_cast<std::size_t>(e.road_id) >= roads_count) {
            throw std::invalid_argument("feed event on road " + std::to_string(e.road_id) + " but the intersection has " +
                                        std::to_string(roads_count) + " roads");
        }
        (*arrivals)[static_cast<std::size_t>(e.road_id)].push_back(
            sim::Arrival{static_cast<double>(e.t_ms) / 1000.0, e.speed_mps});
    }
    for (auto& road : *arrivals) {
        std::stable_sort(road.begin(), road.end(),
                         [](const sim::Arrival& a, const sim::Arrival& b) { return a.time_s < b.time_s; });
    }
    return arrivals;
}

}  // namespace tsc::feed
