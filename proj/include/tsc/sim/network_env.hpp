#pragma once

#include "tsc/sim/intersection_env.hpp"
#include "tsc/sim/sim_config.hpp"
#include "tsc/util/seeding.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tsc::sim {

struct Link {
    std::size_t from_intersection = 0;
    std::size_t from_road = 0;
    std::size_t to_intersection = 0;
    std::size_t to_road = 0;
    double travel_time_s = 0.0;
    double turn_fraction = 0.0;  // share of the source road's outflow routed onto this link
};

struct NetworkConfig {
    std::vector<SimConfig> intersections;
    std::vector<Link> links;

    void validate() const;
};

struct RoutedVehicle {
    std::size_t from_intersection = 0;
    std::size_t from_road = 0;
    std::size_t to_intersection = 0;
    std::size_t to_road = 0;
    double departure_s = 0.0;
    double arrival_s = 0.0;
};

struct RoutingResult {
    std::vector<RoutedVehicle> routed;
    std::size_t exited = 0;
};

// Each departure follows at most one outgoing link of its source road,
// chosen by a categorical draw over turn fractions; the unassigned share
// leaves the network.
RoutingResult route_outflow(const NetworkConfig& network, std::size_t from_intersection,
                            std::span<const Departure> departures, Rng& rng);

struct NetworkTotals {
    std::size_t entered = 0;  // external arrivals
    std::size_t exited = 0;
    std::size_t in_transit = 0;
    std::size_t queued = 0;
    std::size_t dropped = 0;
};

// Decentralized network of intersections. Intersections advance on their
// own decision clocks; the one with the earliest clock acts next (ties by
// lowest index). Routed vehicles are exchanged after every step.
class NetworkEnv {
public:
    explicit NetworkEnv(NetworkConfig config);

    // One seed per intersection plus one for routing.
    std::vector<Observation> reset(std::span<const std::uint64_t> seeds, std::uint64_t routing_seed);
    std::vector<Observation> reset(std::uint64_t seed);

    std::optional<std::size_t> next_to_act() const;
    StepResult step(std::size_t intersection, std::size_t action);

    bool done() const;
    std::size_t size() const { return envs_.size(); }
    const IntersectionEnv& intersection(std::size_t i) const { return envs_.at(i); }
    const NetworkConfig& config() const { return config_; }
    const std::vector<RoutedVehicle>& routing_log() const { return routing_log_; }
    NetworkTotals totals() const;

private:
    NetworkConfig config_;
    std::vector<IntersectionEnv> envs_;
    Rng routing_rng_;
    std::vector<RoutedVehicle> routing_log_;
    std::size_t exited_ = 0;
};

}  // namespace tsc::sim
