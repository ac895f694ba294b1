#pragma once

#include "tsc/sim/sim_config.hpp"

#include <cstddef>
#include <deque>
#include <span>

namespace tsc::sim {

struct RoadState {
    std::deque<double> queue;  // arrival timestamps, FIFO
    std::size_t in_count = 0;
    std::size_t out_count = 0;
    std::size_t remaining_after_green = 0;
    double avg_waiting_s = 0.0;
    double mean_speed_mps = 0.0;
};

struct SignalState {
    std::size_t green_road = 0;
    double remaining_green_s = 0.0;
    bool in_inter_green = false;
    std::size_t stuck_count = 0;
};

struct RewardBreakdown {
    double waiting_penalty = 0.0;
    double remaining_penalty = 0.0;
    double fairness_penalty = 0.0;
    double in_reward = 0.0;
    double out_reward = 0.0;
    double speed_reward = 0.0;
    double stuck_penalty = 0.0;
    double total = 0.0;

    RewardBreakdown& operator+=(const RewardBreakdown& other);
    friend bool operator==(const RewardBreakdown&, const RewardBreakdown&) = default;
};

// Signed sum of the itemized terms, in a fixed evaluation order.
double signed_total(const RewardBreakdown& r);

//   waiting   = sum(avg_waiting) / (R - 1)
//   remaining = sum(remaining_after_green)
//   fairness  = (max - min avg_waiting) * fairness_weight
//   in, out   = per-interval arrival / departure counts
// Speed and stuck terms only contribute when enabled in the config.
RewardBreakdown compute_reward(std::span<const RoadState> roads, const SignalState& signal, const SimConfig& config);

}  // namespace tsc::sim
