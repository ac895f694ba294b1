#pragma once

#include "tsc/util/seeding.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace tsc::sim {

struct Arrival {
    double time_s = 0.0;
    std::optional<double> speed_mps;
};

using RoadArrivals = std::vector<std::vector<Arrival>>;

// Per-road Poisson arrival processes. Each road draws exponential gaps from
// its own stream, so the arrival timestamps do not depend on how the caller
// slices time into intervals.
class PoissonArrivals {
public:
    PoissonArrivals(std::vector<double> rates, std::uint64_t seed);

    // Arrivals with timestamps in [now, now + dt); advances now by dt.
    RoadArrivals spawn(double dt);

    // Arrivals with timestamps in [now, t_end) and strictly before horizon.
    RoadArrivals take_until(double t_end, double horizon);

    double now() const { return now_; }

private:
    std::vector<double> rates_;
    std::vector<Rng> streams_;
    std::vector<double> next_;
    double now_ = 0.0;

    void draw_next(std::size_t road);
};

// Counts per road of one spawn call.
std::vector<std::size_t> spawn_arrivals(double dt, std::span<const double> rates, std::uint64_t seed);

// A fixed, externally supplied arrival timeline (e.g. from a detection feed).
class ScheduledArrivals {
public:
    ScheduledArrivals() = default;
    explicit ScheduledArrivals(std::shared_ptr<const RoadArrivals> schedule);

    RoadArrivals take_until(double t_end, double horizon);
    std::size_t roads() const { return schedule_ ? schedule_->size() : 0; }

private:
    std::shared_ptr<const RoadArrivals> schedule_;
    std::vector<std::size_t> cursor_;
};

}  // namespace tsc::sim
