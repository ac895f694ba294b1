#include "tsc/sim/network_env.hpp"

#include <map>
#include <string>
#include <utility>

namespace tsc::sim {

void NetworkConfig::validate() const
{
    if (intersections.empty()) {
        throw ConfigError("network.intersections", "at least one intersection is required");
    }
    for (const SimConfig& c : intersections) {
        c.validate();
    }
    std::map<std::pair<std::size_t, std::size_t>, double> share;
    for (std::size_t k = 0; k < links.size(); ++k) {
        const Link& l = links[k];
        const std::string key = "network.links[" + std::to_string(k) + "]";
        if (l.from_intersection >= intersections.size() || l.to_intersection >= intersections.size()) {
            throw ConfigError(key, "references an unknown intersection");
        }
        if (l.from_road >= intersections[l.from_intersection].roads_count ||
            l.to_road >= intersections[l.to_intersection].roads_count) {
            throw ConfigError(key, "references an unknown road");
        }
        if (!(l.travel_time_s >= 0.0)) {
            throw ConfigError(key + ".travel_time_s", "must be nonnegative");
        }
        if (!(l.turn_fraction >= 0.0 && l.turn_fraction <= 1.0)) {
            throw ConfigError(key + ".turn_fraction", "must lie in [0, 1]");
        }
        share[{l.from_intersection, l.from_road}] += l.turn_fraction;
    }
    for (const auto& [source, total] : share) {
        if (total > 1.0 + 1e-12) {
            throw ConfigError("network.links", "turn fractions of intersection " + std::to_string(source.first) +
                                                   " road " + std::to_string(source.second) + " exceed 1");
        }
    }
}

RoutingResult route_outflow(const NetworkConfig& network, std::size_t from_intersection,
                            std::span<const Departure> departures, Rng& rng)
{
    if (from_intersection >= network.intersections.size()) {
        throw ConfigError("network", "unknown intersection " + std::to_string(from_intersection));
    }
    RoutingResult result;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<const Link*> candidates;
    for (const Departure& d : departures) {
        if (d.road >= network.intersections[from_intersection].roads_count) {
            throw ConfigError("network", "departure from unknown road " + std::to_string(d.road));
        }
        candidates.clear();
        for (const Link& l : network.links) {
            if (l.from_intersection == from_intersection && l.from_road == d.road) {
                candidates.push_back(&l);
            }
        }
        if (candidates.empty()) {
            ++result.exited;
            continue;
        }
        const double u = unit(rng);
        double cumulative = 0.0;
        const Link* chosen = nullptr;
        for (const Link* l : candidates) {
            cumulative += l->turn_fraction;
            if (u < cumulative) {
                chosen = l;
                break;
            }
        }
        if (chosen == nullptr) {
            ++result.exited;
            continue;
        }
        result.routed.push_back(RoutedVehicle{from_intersection, d.road, chosen->to_intersection, chosen->to_road,
                                              d.time_s, d.time_s + chosen->travel_time_s});
    }
    return result;
}

NetworkEnv::NetworkEnv(NetworkConfig config) : config_(std::move(config))
{
    config_.validate();
    envs_.reserve(config_.intersections.size());
    for (const SimConfig& c : config_.intersections) {
        envs_.emplace_back(c);
    }
}

std::vector<Observation> NetworkEnv::reset(std::span<const std::uint64_t> seeds, std::uint64_t routing_seed)
{
    if (seeds.size() != envs_.size()) {
        throw EnvError("NetworkEnv::reset: expected " + std::to_string(envs_.size()) + " seeds");
    }
    routing_rng_.seed(routing_seed);
    routing_log_.clear();
    exited_ = 0;
    std::vector<Observation> obs;
    obs.reserve(envs_.size());
    for (std::size_t i = 0; i < envs_.size(); ++i) {
        obs.push_back(envs_[i].reset(seeds[i]));
    }
    return obs;
}

std::vector<Observation> NetworkEnv::reset(std::uint64_t seed)
{
    std::vector<std::uint64_t> seeds(envs_.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        seeds[i] = derive_seed(seed, 0x1e7, i);
    }
    return reset(seeds, derive_seed(seed, 0x5017));
}

std::optional<std::size_t> NetworkEnv::next_to_act() const
{
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < envs_.size(); ++i) {
        if (envs_[i].done()) {
            continue;
        }
        if (!best || envs_[i].now() < envs_[*best].now()) {
            best = i;
        }
    }
    return best;
}

StepResult NetworkEnv::step(std::size_t intersection, std::size_t action)
{
    const auto expected = next_to_act();
    if (!expected) {
        throw EnvError("NetworkEnv::step: all intersections are done");
    }
    if (intersection != *expected) {
        throw EnvError("NetworkEnv::step: intersection " + std::to_string(intersection) +
                       " is ahead of the barrier; next to act is " + std::to_string(*expected));
    }
    StepResult result = envs_[intersection].step(action);
    RoutingResult routing =
        route_outflow(config_, intersection, envs_[intersection].last_departures(), routing_rng_);
    exited_ += routing.exited;
    for (const RoutedVehicle& v : routing.routed) {
        envs_[v.to_intersection].inject_arrival(v.to_road, v.arrival_s);
        routing_log_.push_back(v);
    }
    return result;
}

bool NetworkEnv::done() const
{
    return !next_to_act().has_value();
}

NetworkTotals NetworkEnv::totals() const
{
    NetworkTotals t;
    t.exited = exited_;
    for (const IntersectionEnv& env : envs_) {
        const FlowTotals& f = env.totals();
        for (std::size_t r = 0; r < env.roads_count(); ++r) {
            t.entered += f.arrived[r] - f.injected[r];
            t.dropped += f.dropped[r];
        }
        t.queued += env.queued_total();
        t.in_transit += env.pending_injections();
    }
    return t;
}

}  // namespace tsc::sim
