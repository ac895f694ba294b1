#include "tsc/agent/runner.hpp"

#include "tsc/agent/policies.hpp"
#include "tsc/util/seeding.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace tsc::agent {

namespace {

struct EpisodeAccumulator {
    EpisodeStats stats;
    double loss_sum = 0.0;
    std::size_t loss_count = 0;

    void on_step(const sim::StepResult& result)
    {
        stats.reward_terms += result.reward;
        stats.total_reward += result.reward.total;
        ++stats.decisions;
    }

    void on_loss(double loss)
    {
        loss_sum += loss;
        ++loss_count;
    }

    EpisodeStats finish(const sim::IntersectionEnv& env)
    {
        const auto& departed = env.totals().departed;
        stats.throughput = std::accumulate(departed.begin(), departed.end(), std::size_t{0});
        stats.mean_waiting_s = env.mean_vehicle_wait();
        stats.fairness_mean =
            stats.decisions == 0 ? 0.0 : stats.reward_terms.fairness_penalty / static_cast<double>(stats.decisions);
        if (loss_count > 0) {
            stats.loss_mean = loss_sum / static_cast<double>(loss_count);
        }
        stats.arrival_checksum = env.arrival_checksum();
        return stats;
    }
};

// One decision of a learning agent; shared by the single and network runners
// so both produce the same call sequence.
template <typename StepFn>
sim::Observation agent_turn(Agent& agent, const sim::Observation& obs, bool train, EpisodeAccumulator& acc,
                            StepFn&& step)
{
    const std::size_t action = agent.select_action(obs, train ? Mode::train : Mode::eval);
    sim::StepResult result = step(action);
    acc.on_step(result);
    if (train) {
        agent.observe(obs, action, result.reward.total, result.observation, result.done);
        if (agent.ready_to_train()) {
            acc.on_loss(agent.train_step().loss);
        }
    }
    return std::move(result.observation);
}

}  // namespace

std::uint64_t episode_seed(std::uint64_t base_seed, std::size_t episode)
{
    return derive_seed(base_seed, 0xe915, episode);
}

std::size_t max_decisions_per_episode(const sim::SimConfig& config)
{
    return static_cast<std::size_t>(std::ceil(config.episode_length_s / config.green_duration_s));
}

EpisodeStats run_episode(Agent& agent, sim::IntersectionEnv& env, bool train, std::size_t episode_index)
{
    EpisodeAccumulator acc;
    acc.stats.episode = episode_index;
    sim::Observation obs = env.observation();
    while (!env.done()) {
        obs = agent_turn(agent, obs, train, acc, [&](std::size_t a) { return env.step(a); });
    }
    return acc.finish(env);
}

EpisodeStats run_fixed_time_episode(sim::IntersectionEnv& env, std::size_t episode_index)
{
    EpisodeAccumulator acc;
    acc.stats.episode = episode_index;
    std::size_t decision = 0;
    while (!env.done()) {
        acc.on_step(env.step(fixed_time_policy(decision++, env.roads_count())));
    }
    return acc.finish(env);
}

std::vector<std::vector<EpisodeStats>> run_multi_agent(sim::NetworkEnv& env, std::span<Agent> agents,
                                                       std::size_t episodes,
                                                       std::span<const std::uint64_t> intersection_seeds,
                                                       std::uint64_t routing_seed, bool train)
{
    const std::size_t n = env.size();
    if (agents.size() != n || intersection_seeds.size() != n) {
        throw AgentError("run_multi_agent: " + std::to_string(n) + " intersections but " +
                         std::to_string(agents.size()) + " agents and " + std::to_string(intersection_seeds.size()) +
                         " seeds");
    }
    std::vector<std::vector<EpisodeStats>> stats(n);
    std::vector<std::uint64_t> seeds(n);
    for (std::size_t e = 0; e < episodes; ++e) {
        for (std::size_t i = 0; i < n; ++i) {
            seeds[i] = episode_seed(intersection_seeds[i], e);
        }
        std::vector<sim::Observation> obs = env.reset(seeds, episode_seed(routing_seed, e));
        std::vector<EpisodeAccumulator> acc(n);
        for (EpisodeAccumulator& a : acc) {
            a.stats.episode = e;
        }
        while (const auto next = env.next_to_act()) {
            const std::size_t i = *next;
            obs[i] = agent_turn(agents[i], obs[i], train, acc[i], [&](std::size_t a) { return env.step(i, a); });
        }
        for (std::size_t i = 0; i < n; ++i) {
            stats[i].push_back(acc[i].finish(env.intersection(i)));
        }
    }
    return stats;
}

}  // namespace tsc::agent
