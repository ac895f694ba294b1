#pragma once

#include "tsc/agent/agent.hpp"
#include "tsc/sim/intersection_env.hpp"
#include "tsc/sim/network_env.hpp"
#include "tsc/sim/reward.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tsc::agent {

struct EpisodeStats {
    std::size_t episode = 0;
    double total_reward = 0.0;
    double mean_waiting_s = 0.0;  // queueing delay per admitted vehicle
    std::size_t throughput = 0;   // departures over the episode
    sim::RewardBreakdown reward_terms;
    double fairness_mean = 0.0;   // mean fairness penalty per decision
    std::optional<double> loss_mean;
    std::size_t decisions = 0;
    std::uint64_t arrival_checksum = 0;

    friend bool operator==(const EpisodeStats&, const EpisodeStats&) = default;
};

// Both overloads require a freshly reset environment and run it to the end.
EpisodeStats run_episode(Agent& agent, sim::IntersectionEnv& env, bool train, std::size_t episode_index = 0);
EpisodeStats run_fixed_time_episode(sim::IntersectionEnv& env, std::size_t episode_index = 0);

// Per-episode environment seed shared by every method under the same
// experiment seed.
std::uint64_t episode_seed(std::uint64_t base_seed, std::size_t episode);

// Decisions per episode assuming no switches; used as the schedule horizon.
std::size_t max_decisions_per_episode(const sim::SimConfig& config);

// Independent agents, one per intersection, each acting on its own
// intersection only. Returns stats[intersection][episode].
std::vector<std::vector<EpisodeStats>> run_multi_agent(sim::NetworkEnv& env, std::span<Agent> agents,
                                                       std::size_t episodes,
                                                       std::span<const std::uint64_t> intersection_seeds,
                                                       std::uint64_t routing_seed, bool train);

}  // namespace tsc::agent
