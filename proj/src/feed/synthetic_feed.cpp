#include "tsc/feed/synthetic_feed.hpp"

#include "tsc/util/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace tsc::feed {

std::vector<DetectionEvent> gen_synthetic_feed(std::span<const double> rates, double duration_s,
                                               std::uint64_t seed, const SyntheticFeedOptions& options)
{
    if (!(duration_s >= 0.0) || !std::isfinite(duration_s)) {
        throw std::invalid_argument("gen_synthetic_feed: duration must be finite and nonnegative");
    }
    if (!(options.service_delay_s >= 0.0) || !(options.speed_min_mps >= 0.0) ||
        !(options.speed_max_mps >= options.speed_min_mps)) {
        throw std::invalid_argument("gen_synthetic_feed: invalid service delay or speed range");
    }
    for (double rate : rates) {
        if (!(rate >= 0.0) || !std::isfinite(rate)) {
            throw std::invalid_argument("gen_synthetic_feed: rates must be finite and nonnegative");
        }
    }

    struct Enter {
        std::int64_t t_ms;
        std::size_t road;
        double speed;
    };
    std::vector<Enter> enters;
    for (std::size_t r = 0; r < rates.size(); ++r) {
        if (rates[r] == 0.0) {
            continue;
        }
        Rng arrivals(derive_seed(seed, 0xfeed, r));
        Rng speeds(derive_seed(seed, 0x5eed, r));
        std::exponential_distribution<double> gap(rates[r]);
        std::uniform_real_distribution<double> speed(options.speed_min_mps, options.speed_max_mps);
        for (double t = gap(arrivals); t < duration_s; t += gap(arrivals)) {
            const double v = std::round(speed(speeds) * 100.0) / 100.0;
            enters.push_back(Enter{std::llround(t * 1000.0), r, v});
        }
    }
    std::stable_sort(enters.begin(), enters.end(), [](const Enter& a, const Enter& b) {
        return std::tie(a.t_ms, a.road) < std::tie(b.t_ms, b.road);
    });

    const std::int64_t delay_ms = std::llround(options.service_delay_s * 1000.0);
    std::vector<DetectionEvent> events;
    events.reserve(2 * enters.size());
    std::int64_t track = 1;
    for (const Enter& e : enters) {
        const auto road = static_cast<std::int64_t>(e.road);
        events.push_back(DetectionEvent{e.t_ms, options.intersection_id, road, track, EventKind::enter, e.speed});
        events.push_back(
            DetectionEvent{e.t_ms + delay_ms, options.intersection_id, road, track, EventKind::exit, std::nullopt});
        ++track;
    }
    std::stable_sort(events.begin(), events.end(), [](const DetectionEvent& a, const DetectionEvent& b) {
        return std::make_tuple(a.t_ms, static_cast<int>(a.event), a.road_id, a.track_id) <
               std::make_tuple(b.t_ms, static_cast<int>(b.event), b.road_id, b.track_id);
    });
    return events;
}

}  // namespace tsc::feed
