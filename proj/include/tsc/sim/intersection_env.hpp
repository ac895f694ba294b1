#pragma once

#include "tsc/sim/arrivals.hpp"
#include "tsc/sim/observation.hpp"
#include "tsc/sim/reward.hpp"
#include "tsc/sim/sim_config.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <queue>
#include <stdexcept>
#include <variant>
#include <vector>

namespace tsc::sim {

class EnvError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct StepResult {
    Observation observation;
    RewardBreakdown reward;
    bool done = false;
};

struct Departure {
    std::size_t road = 0;
    double time_s = 0.0;
};

// One decision interval as seen by the log.
struct IntervalRecord {
    double start_s = 0.0;
    double end_s = 0.0;
    std::size_t action = 0;
    bool switched = false;
    std::vector<std::size_t> in_counts;
    std::vector<std::size_t> out_counts;
};

// Cumulative per-road counters over the current episode.
struct FlowTotals {
    std::vector<std::size_t> arrived;   // includes injected vehicles
    std::vector<std::size_t> injected;
    std::vector<std::size_t> departed;
    std::vector<std::size_t> dropped;
    double departed_wait_s = 0.0;  // summed queueing delay of departed vehicles
};

// Single intersection with R approach roads and one green road at a time.
// An action selects the road to serve for the next decision interval:
// inter_green_s of all-red when it differs from the current green, followed
// by green_duration_s of green.
class IntersectionEnv {
public:
    explicit IntersectionEnv(SimConfig config);

    // Synthetic Poisson arrivals seeded by `seed`.
    Observation reset(std::uint64_t seed);
    // Arrivals replayed from a fixed schedule; `seed` drives the remaining
    // stochastic elements (stalled vehicles).
    Observation reset(std::uint64_t seed, std::shared_ptr<const RoadArrivals> schedule);

    StepResult step(std::size_t action);

    // Schedules an externally routed vehicle onto `road` at `time_s`.
    void inject_arrival(std::size_t road, double time_s);

    Observation observation() const;

    const SimConfig& config() const { return config_; }
    std::size_t roads_count() const { return config_.roads_count; }
    double now() const { return now_; }
    bool done() const { return done_; }
    const std::vector<RoadState>& roads() const { return roads_; }
    const SignalState& signal() const { return signal_; }
    const FlowTotals& totals() const { return totals_; }
    const std::vector<IntervalRecord>& log() const { return log_; }
    const std::vector<Departure>& last_departures() const { return last_departures_; }
    std::size_t pending_injections() const;
    std::size_t late_injections() const { return late_injections_; }

    std::size_t queued_total() const;
    // Order-independent digest of the arrival timestamps seen so far.
    std::uint64_t arrival_checksum() const;
    // Vehicle-seconds spent queueing (including vehicles still queued) per arrival.
    double mean_vehicle_wait() const;

private:
    struct Pending {
        double time_s;
        std::uint64_t order;
        bool operator>(const Pending& o) const { return time_s != o.time_s ? time_s > o.time_s : order > o.order; }
    };
    using PendingQueue = std::priority_queue<Pending, std::vector<Pending>, std::greater<>>;

    SimConfig config_;
    std::variant<PoissonArrivals, ScheduledArrivals> source_;
    Rng stuck_rng_;
    std::vector<RoadState> roads_;
    SignalState signal_;
    FlowTotals totals_;
    std::vector<IntervalRecord> log_;
    std::vector<Departure> last_departures_;
    std::vector<PendingQueue> injected_;
    std::vector<std::uint64_t> arrival_digest_;
    std::uint64_t injection_order_ = 0;
    std::size_t late_injections_ = 0;
    std::size_t final_headway_departures_ = 0;
    double now_ = 0.0;
    bool done_ = true;
    bool started_ = false;

    Observation reset_common(std::uint64_t seed);
    RoadArrivals collect_arrivals(double t_end);
    void admit(std::size_t road, const Arrival& arrival, std::vector<double>& speeds);
};

}  // namespace tsc::sim
