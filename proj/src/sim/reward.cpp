#include "tsc/sim/reward.hpp"

#include <algorithm>

namespace tsc::sim {

RewardBreakdown& RewardBreakdown::operator+=(const RewardBreakdown& other)
{
    waiting_penalty += other.waiting_penalty;
    remaining_penalty += other.remaining_penalty;
    fairness_penalty += other.fairness_penalty;
    in_reward += other.in_reward;
    out_reward += other.out_reward;
    speed_reward += other.speed_reward;
    stuck_penalty += other.stuck_penalty;
    total += other.total;
    return *this;
}

double signed_total(const RewardBreakdown& r)
{
    return -r.waiting_penalty - r.remaining_penalty - r.fairness_penalty - r.stuck_penalty + r.in_reward +
           r.out_reward + r.speed_reward;
}

RewardBreakdown compute_reward(std::span<const RoadState> roads, const SignalState& signal, const SimConfig& config)
{
    RewardBreakdown r;
    if (roads.empty()) {
        return r;
    }
    double wait_sum = 0.0;
    double wait_max = roads.front().avg_waiting_s;
    double wait_min = roads.front().avg_waiting_s;
    for (const RoadState& road : roads) {
        wait_sum += road.avg_waiting_s;
        wait_max = std::max(wait_max, road.avg_waiting_s);
        wait_min = std::min(wait_min, road.avg_waiting_s);
        r.remaining_penalty += static_cast<double>(road.remaining_after_green);
        r.in_reward += static_cast<double>(road.in_count);
        r.out_reward += static_cast<double>(road.out_count);
        if (config.enable_speed_term) {
            r.speed_reward += road.mean_speed_mps;
        }
    }
    r.waiting_penalty = wait_sum / static_cast<double>(roads.size() - 1);
    r.fairness_penalty = (wait_max - wait_min) * config.fairness_weight;
    if (config.enable_stuck_term) {
        r.stuck_penalty = static_cast<double>(signal.stuck_count);
    }
    r.total = signed_total(r);
    return r;
}

}  // namespace tsc::sim
