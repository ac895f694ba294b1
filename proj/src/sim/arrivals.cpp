#include "tsc/sim/arrivals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tsc::sim {

PoissonArrivals::PoissonArrivals(std::vector<double> rates, std::uint64_t seed) : rates_(std::move(rates))
{
    streams_.reserve(rates_.size());
    next_.assign(rates_.size(), 0.0);
    for (std::size_t r = 0; r < rates_.size(); ++r) {
        if (!(rates_[r] >= 0.0) || !std::isfinite(rates_[r])) {
            throw std::invalid_argument("arrival rate must be finite and nonnegative");
        }
        streams_.emplace_back(derive_seed(seed, 0xa771, r));
        draw_next(r);
    }
}

void PoissonArrivals::draw_next(std::size_t road)
{
    if (rates_[road] == 0.0) {
        next_[road] = std::numeric_limits<double>::infinity();
        return;
    }
    std::exponential_distribution<double> gap(rates_[road]);
    next_[road] += gap(streams_[road]);
}

RoadArrivals PoissonArrivals::spawn(double dt)
{
    if (!(dt > 0.0)) {
        throw std::invalid_argument("spawn: dt must be positive");
    }
    return take_until(now_ + dt, std::numeric_limits<double>::infinity());
}

RoadArrivals PoissonArrivals::take_until(double t_end, double horizon)
{
    RoadArrivals out(rates_.size());
    const double limit = std::min(t_end, horizon);
    for (std::size_t r = 0; r < rates_.size(); ++r) {
        while (next_[r] < limit) {
            out[r].push_back(Arrival{next_[r], std::nullopt});
            draw_next(r);
        }
    }
    now_ = std::max(now_, t_end);
    return out;
}

std::vector<std::size_t> spawn_arrivals(double dt, std::span<const double> rates, std::uint64_t seed)
{
    PoissonArrivals process(std::vector<double>(rates.begin(), rates.end()), seed);
    const RoadArrivals batch = process.spawn(dt);
    std::vector<std::size_t> counts(batch.size());
    std::transform(batch.begin(), batch.end(), counts.begin(), [](const auto& v) { return v.size(); });
    return counts;
}

ScheduledArrivals::ScheduledArrivals(std::shared_ptr<const RoadArrivals> schedule) : schedule_(std::move(schedule))
{
    if (!schedule_) {
        throw std::invalid_argument("ScheduledArrivals: null schedule");
    }
    for (const auto& road : *schedule_) {
        const bool sorted = std::is_sorted(road.begin(), road.end(),
                                           [](const Arrival& a, const Arrival& b) { return a.time_s < b.time_s; });
        if (!sorted) {
            throw std::invalid_argument("ScheduledArrivals: per-road arrivals must be time-ordered");
        }
    }
    cursor_.assign(schedule_->size(), 0);
}

RoadArrivals ScheduledArrivals::take_until(double t_end, double horizon)
{
    RoadArrivals out(roads());
    const double limit = std::min(t_end, horizon);
    for (std::size_t r = 0; r < roads(); ++r) {
        const auto& road = (*schedule_)[r];
        while (cursor_[r] < road.size() && road[cursor_[r]].time_s < limit) {
            out[r].push_back(road[cursor_[r]]);
            ++cursor_[r];
        }
    }
    return out;
}

}  // namespace tsc::sim
