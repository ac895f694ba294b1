#include "tsc/sim/intersection_env.hpp"

#include "tsc/sim/queue_model.hpp"

#include <bit>
#include <limits>
#include <numeric>
#include <string>

namespace tsc::sim {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv_mix(std::uint64_t h, std::uint64_t word)
{
    for (int i = 0; i < 8; ++i) {
        h ^= (word >> (8 * i)) & 0xffULL;
        h *= kFnvPrime;
    }
    return h;
}

}  // namespace

IntersectionEnv::IntersectionEnv(SimConfig config)
    : config_(std::move(config)), source_(ScheduledArrivals{})
{
    config_.validate();
}

Observation IntersectionEnv::reset(std::uint64_t seed)
{
    source_ = PoissonArrivals(config_.arrival_rates, seed);
    return reset_common(seed);
}

Observation IntersectionEnv::reset(std::uint64_t seed, std::shared_ptr<const RoadArrivals> schedule)
{
    ScheduledArrivals scheduled(std::move(schedule));
    if (scheduled.roads() != config_.roads_count) {
        throw EnvError("arrival schedule has " + std::to_string(scheduled.roads()) + " roads, expected " +
                       std::to_string(config_.roads_count));
    }
    source_ = std::move(scheduled);
    return reset_common(seed);
}

Observation IntersectionEnv::reset_common(std::uint64_t seed)
{
    const std::size_t n = config_.roads_count;
    stuck_rng_.seed(derive_seed(seed, 0x57c4));
    roads_.assign(n, RoadState{});
    signal_ = SignalState{0, config_.green_duration_s, false, 0};
    totals_ = FlowTotals{std::vector<std::size_t>(n, 0), std::vector<std::size_t>(n, 0),
                         std::vector<std::size_t>(n, 0), std::vector<std::size_t>(n, 0), 0.0};
    log_.clear();
    last_departures_.clear();
    injected_.assign(n, PendingQueue{});
    arrival_digest_.assign(n, kFnvOffset);
    injection_order_ = 0;
    late_injections_ = 0;
    final_headway_departures_ = 0;
    now_ = 0.0;
    done_ = false;
    started_ = true;
    return observation();
}

void IntersectionEnv::inject_arrival(std::size_t road, double time_s)
{
    if (road >= config_.roads_count) {
        throw EnvError("inject_arrival: road " + std::to_string(road) + " out of range");
    }
    injected_[road].push(Pending{time_s, injection_order_++});
}

RoadArrivals IntersectionEnv::collect_arrivals(double t_end)
{
    RoadArrivals external = std::visit(
        [&](auto& source) { return source.take_until(t_end, config_.episode_length_s); }, source_);
    RoadArrivals merged(config_.roads_count);
    for (std::size_t r = 0; r < config_.roads_count; ++r) {
        for (const Arrival& a : external[r]) {
            arrival_digest_[r] = fnv_mix(arrival_digest_[r], std::bit_cast<std::uint64_t>(a.time_s));
        }
        std::vector<Arrival> routed;
        auto& pending = injected_[r];
        while (!pending.empty() && pending.top().time_s < t_end) {
            if (pending.top().time_s < now_) {
                ++late_injections_;
            }
            routed.push_back(Arrival{pending.top().time_s, std::nullopt});
            pending.pop();
        }
        totals_.injected[r] += routed.size();
        auto& out = merged[r];
        out.reserve(external[r].size() + routed.size());
        std::size_t i = 0;
        std::size_t j = 0;
        while (i < external[r].size() || j < routed.size()) {
            // Ties go to the external stream.
            if (j == routed.size() || (i < external[r].size() && external[r][i].time_s <= routed[j].time_s)) {
                out.push_back(external[r][i++]);
            } else {
                out.push_back(routed[j++]);
            }
        }
    }
    return merged;
}

void IntersectionEnv::admit(std::size_t road, const Arrival& arrival, std::vector<double>& speeds)
{
    RoadState& state = roads_[road];
    ++state.in_count;
    ++totals_.arrived[road];
    if (arrival.speed_mps) {
        speeds.push_back(*arrival.speed_mps);
    }
    if (config_.queue_capacity && state.queue.size() >= *config_.queue_capacity) {
        ++totals_.dropped[road];
        return;
    }
    state.queue.push_back(arrival.time_s);
}

StepResult IntersectionEnv::step(std::size_t action)
{
    if (!started_) {
        throw EnvError("step called before reset");
    }
    if (done_) {
        throw EnvError("step called after the episode finished");
    }
    if (action >= config_.roads_count) {
        throw EnvError("action " + std::to_string(action) + " out of range [0, " +
                       std::to_string(config_.roads_count) + ")");
    }

    const std::size_t n = config_.roads_count;
    const double t0 = now_;
    const bool switching = action != signal_.green_road;
    const double green_start = t0 + (switching ? config_.inter_green_s : 0.0);
    const double green_end = green_start + config_.green_duration_s;

    for (RoadState& road : roads_) {
        road.in_count = 0;
        road.out_count = 0;
    }
    last_departures_.clear();
    signal_.stuck_count = 0;

    if (switching) {
        if (config_.enable_stuck_term) {
            std::bernoulli_distribution stall(config_.stuck_probability);
            for (std::size_t k = 0; k < final_headway_departures_; ++k) {
                signal_.stuck_count += stall(stuck_rng_) ? 1 : 0;
            }
        }
        signal_.in_inter_green = true;
        signal_.green_road = action;
    }
    final_headway_departures_ = 0;

    const RoadArrivals arrivals = collect_arrivals(green_end);
    std::vector<std::vector<double>> speeds(n);

    const std::size_t capacity = config_.green_capacity();
    for (std::size_t r = 0; r < n; ++r) {
        const auto& incoming = arrivals[r];
        std::size_t next = 0;
        if (r == action) {
            RoadState& road = roads_[r];
            for (std::size_t k = 1; k <= capacity; ++k) {
                const double slot = green_start + static_cast<double>(k) * config_.saturation_headway_s;
                while (next < incoming.size() && incoming[next].time_s <= slot) {
                    admit(r, incoming[next++], speeds[r]);
                }
                if (road.queue.empty()) {
                    continue;
                }
                totals_.departed_wait_s += slot - road.queue.front();
                road.queue.pop_front();
                ++road.out_count;
                ++totals_.departed[r];
                last_departures_.push_back(Departure{r, slot});
                if (slot > green_end - config_.saturation_headway_s) {
                    ++final_headway_departures_;
                }
            }
        }
        while (next < incoming.size()) {
            admit(r, incoming[next++], speeds[r]);
        }
    }

    now_ = green_end;
    signal_.in_inter_green = false;
    signal_.remaining_green_s = 0.0;
    roads_[action].remaining_after_green = roads_[action].queue.size();
    for (std::size_t r = 0; r < n; ++r) {
        RoadState& road = roads_[r];
        road.avg_waiting_s = avg_waiting(road.queue, now_);
        road.mean_speed_mps = speeds[r].empty()
                                  ? 0.0
                                  : std::accumulate(speeds[r].begin(), speeds[r].end(), 0.0) /
                                        static_cast<double>(speeds[r].size());
    }

    IntervalRecord record{t0, now_, action, switching, std::vector<std::size_t>(n), std::vector<std::size_t>(n)};
    for (std::size_t r = 0; r < n; ++r) {
        record.in_counts[r] = roads_[r].in_count;
        record.out_counts[r] = roads_[r].out_count;
    }
    log_.push_back(std::move(record));

    done_ = now_ >= config_.episode_length_s;
    return StepResult{observation(), compute_reward(roads_, signal_, config_), done_};
}

Observation IntersectionEnv::observation() const
{
    return observe(roads_, signal_, config_);
}

std::size_t IntersectionEnv::queued_total() const
{
    std::size_t total = 0;
    for (const RoadState& road : roads_) {
        total += road.queue.size();
    }
    return total;
}

std::size_t IntersectionEnv::pending_injections() const
{
    std::size_t total = 0;
    for (const PendingQueue& q : injected_) {
        total += q.size();
    }
    return total;
}

std::uint64_t IntersectionEnv::arrival_checksum() const
{
    std::uint64_t h = kFnvOffset;
    for (std::uint64_t digest : arrival_digest_) {
        h = fnv_mix(h, digest);
    }
    return h;
}

double IntersectionEnv::mean_vehicle_wait() const
{
    std::size_t admitted = 0;
    double wait = totals_.departed_wait_s;
    for (std::size_t r = 0; r < roads_.size(); ++r) {
        admitted += totals_.arrived[r] - totals_.dropped[r];
        for (double t : roads_[r].queue) {
            wait += now_ - t;
        }
    }
    return admitted == 0 ? 0.0 : wait / static_cast<double>(admitted);
}

}  // namespace tsc::sim
