#include "oracles.hpp"

#include "tsc/agent/agent.hpp"
#include "tsc/agent/policies.hpp"
#include "tsc/agent/runner.hpp"
#include "tsc/rl/distribution.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace tsc;
using namespace tsc::agent;

namespace {

constexpr std::size_t kRoads = 3;
constexpr std::size_t kInput = sim::observation_size(kRoads);

rl::NetSpec small_net()
{
    rl::NetSpec s;
    s.hidden = {16, 12};
    s.support = rl::ValueSupport{-10.0, 10.0, 11};
    return s;
}

AgentConfig small_config(Variant v)
{
    AgentConfig c;
    c.variant = v;
    c.batch_size = 8;
    c.train_start = 16;
    c.buffer_capacity = 256;
    c.target_sync_interval = 5;
    c.reward_scale = 1.0;
    return c;
}

sim::Observation random_obs(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 2.0);
    sim::Observation o;
    o.values.resize(kInput);
    for (double& v : o.values) {
        v = u(rng);
    }
    return o;
}

void fill(Agent& agent, std::size_t steps, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> r(-3.0, 3.0);
    sim::Observation s = random_obs(rng);
    for (std::size_t k = 0; k < steps; ++k) {
        const sim::Observation next = random_obs(rng);
        agent.observe(s, k % kRoads, r(rng), next, k % 10 == 9);
        s = next;
    }
}

sim::SimConfig small_sim(double rate)
{
    sim::SimConfig c = sim::SimConfig::with_roads(kRoads, rate);
    c.episode_length_s = 300.0;
    return c;
}

std::vector<double> column(const sim::Observation& o)
{
    return o.values;
}

}  // namespace

TEST(FixedTime, CyclesRoads)
{
    EXPECT_EQ(fixed_time_policy(0, 4), 0u);
    EXPECT_EQ(fixed_time_policy(5, 4), 1u);
    EXPECT_EQ(fixed_time_policy(3, 4), 3u);
    EXPECT_EQ(fixed_time_policy(4, 4), 0u);
    EXPECT_THROW(fixed_time_policy(0, 1), std::invalid_argument);
}

TEST(Agent, IdenticalRowsSelectFirstAction)
{
    Agent agent(small_config(Variant::rainbow), small_net(), kInput, kRoads, 3);
    const rl::NetSpec& s = agent.online().spec();
    const auto tail = static_cast<Eigen::Index>(2 * (s.hidden.back() * s.head_dim() + s.head_dim()));
    agent.online().parameters().tail(tail).setZero();
    std::mt19937_64 rng(1);
    for (int k = 0; k < 10; ++k) {
        EXPECT_EQ(agent.select_action(random_obs(rng), Mode::train), 0u);
        EXPECT_EQ(agent.select_action(random_obs(rng), Mode::eval), 0u);
    }
}

TEST(Agent, GreedyOverExpectedValue)
{
    rl::NetSpec base = small_net();
    base.support = rl::ValueSupport{-1.0, 1.0, 3};
    for (std::size_t favoured : {0u, 1u, 2u}) {
        Agent agent(small_config(Variant::rainbow), base, kInput, kRoads, 4);
        const rl::NetSpec& s = agent.online().spec();
        Eigen::VectorXd& p = agent.online().parameters();
        // Head layer of a dueling noisy net: mu_w, mu_b, sigma_w, sigma_b.
        const auto head = static_cast<Eigen::Index>(s.head_dim());
        const auto in = static_cast<Eigen::Index>(s.hidden.back());
        const Eigen::Index start = p.size() - 2 * (in * head + head);
        p.tail(2 * (in * head + head)).setZero();
        // advantage rows follow the N value atoms; push the favoured action to the top atom
        p(start + in * head + 3 * (1 + static_cast<Eigen::Index>(favoured)) + 2) = 4.0;
        std::mt19937_64 rng(favoured);
        const sim::Observation o = random_obs(rng);
        EXPECT_EQ(agent.select_action(o, Mode::eval), favoured);
        const std::vector<double> q = agent.action_values(o, {});
        EXPECT_GT(q[favoured], 0.5);
    }
}

TEST(Agent, EvalModeIsDeterministic)
{
    Agent agent(small_config(Variant::rainbow), small_net(), kInput, kRoads, 5);
    std::mt19937_64 rng(9);
    for (int k = 0; k < 20; ++k) {
        const sim::Observation o = random_obs(rng);
        EXPECT_EQ(agent.select_action(o, Mode::eval), agent.select_action(o, Mode::eval));
    }
    EXPECT_EQ(agent.decisions(), 0u);
}

TEST(Agent, TrainBeforeStartThrows)
{
    Agent agent(small_config(Variant::rainbow), small_net(), kInput, kRoads, 1);
    fill(agent, 10, 1);
    EXPECT_FALSE(agent.ready_to_train());
    EXPECT_THROW(agent.train_step(), AgentError);
}

TEST(Agent, RainbowLossMatchesStraightLineOracle)
{
    Agent agent(small_config(Variant::rainbow), small_net(), kInput, kRoads, 7);
    agent.set_planned_steps(100);
    fill(agent, 60, 2);
    const rl::ValueSupport& support = agent.online().spec().support;
    const std::size_t n = support.n_atoms;
    for (int round = 0; round < 8; ++round) {
        const rl::Network online = agent.online();
        const rl::Network target = agent.target();
        const PrioritizedBuffer buffer = agent.buffer();
        const double beta = agent.beta();
        const TrainReport report = agent.train_step();
        ASSERT_EQ(report.indices.size(), 8u);

        double loss = 0.0;
        for (std::size_t i = 0; i < report.indices.size(); ++i) {
            const Transition& t = buffer.at(report.indices[i]);
            const std::vector<double> next_online = oracle::forward_oracle(online, column(t.next_state), report.online_next_noise);
            const std::vector<double> next_target = oracle::forward_oracle(target, column(t.next_state), report.target_noise);
            std::size_t best = 0;
            double best_q = -1e300;
            for (std::size_t a = 0; a < kRoads; ++a) {
                const std::vector<double> p = oracle::softmax_oracle(
                    std::vector<double>(next_online.begin() + a * n, next_online.begin() + (a + 1) * n));
                double q = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    q += p[j] * support.atom(j);
                }
                if (q > best_q) {
                    best_q = q;
                    best = a;
                }
            }
            const std::vector<double> next_p = oracle::softmax_oracle(
                std::vector<double>(next_target.begin() + best * n, next_target.begin() + (best + 1) * n));
            const std::vector<double> m =
                oracle::projection_oracle(t.return_n, t.done, t.gamma_n, next_p, support.v_min, support.v_max);
            const std::vector<double> logits = oracle::forward_oracle(online, column(t.state), report.online_noise);
            const double l = oracle::cross_entropy_oracle(
                std::vector<double>(logits.begin() + t.action * n, logits.begin() + (t.action + 1) * n), m);
            EXPECT_NEAR(report.sample_losses[i], l, 1e-9);

            const double p_i = buffer.probability(report.indices[i]);
            double max_w = 0.0;
            for (std::size_t k : report.indices) {
                max_w = std::max(max_w, std::pow(static_cast<double>(buffer.size()) * buffer.probability(k), -beta));
            }
            const double w = std::pow(static_cast<double>(buffer.size()) * p_i, -beta) / max_w;
            EXPECT_NEAR(report.weights[i], w, 1e-12);
            loss += w * l;
        }
        EXPECT_NEAR(report.loss, loss / 8.0, 1e-9);
        EXPECT_GE(report.loss, 0.0);
        for (std::size_t i = 0; i < report.indices.size(); ++i) {
            EXPECT_NEAR(agent.buffer().priority(report.indices[i]),
                        report.new_priorities[i] + agent.config().priority_eps, 1e-12);
        }
    }
}

TEST(Agent, VanillaLossMatchesOracle)
{
    Agent agent(small_config(Variant::vanilla_dqn), small_net(), kInput, kRoads, 8);
    EXPECT_EQ(agent.online().spec().support.n_atoms, 1u);
    EXPECT_FALSE(agent.online().spec().dueling);
    EXPECT_FALSE(agent.online().spec().noisy);
    EXPECT_EQ(agent.config().effective().n_step, 1u);
    fill(agent, 40, 3);
    for (int round = 0; round < 4; ++round) {
        const rl::Network online = agent.online();
        const rl::Network target = agent.target();
        const PrioritizedBuffer buffer = agent.buffer();
        const TrainReport report = agent.train_step();
        EXPECT_TRUE(report.online_noise.empty());
        double loss = 0.0;
        for (std::size_t i = 0; i < report.indices.size(); ++i) {
            const Transition& t = buffer.at(report.indices[i]);
            EXPECT_DOUBLE_EQ(report.weights[i], 1.0);
            const std::vector<double> q = oracle::forward_oracle(online, column(t.state), {});
            const std::vector<double> nq = oracle::forward_oracle(target, column(t.next_state), {});
            const double y = t.return_n + (t.done ? 0.0 : t.gamma_n * *std::max_element(nq.begin(), nq.end()));
            const double td = q[t.action] - y;
            EXPECT_NEAR(report.sample_losses[i], 0.5 * td * td, 1e-9);
            loss += 0.5 * td * td;
        }
        EXPECT_NEAR(report.loss, loss / 8.0, 1e-9);
    }
}

TEST(Agent, TargetSyncIsBitwiseCopy)
{
    for (Variant v : {Variant::rainbow, Variant::vanilla_dqn}) {
        Agent agent(small_config(v), small_net(), kInput, kRoads, 11);
        fill(agent, 40, 4);
        for (int k = 0; k < 4; ++k) {
            agent.train_step();
        }
        EXPECT_NE(agent.target().parameters(), agent.online().parameters());
        agent.train_step();
        EXPECT_EQ(agent.train_steps(), 5u);
        EXPECT_EQ(agent.target().parameters(), agent.online().parameters());
    }
}

TEST(Agent, VanillaWithoutExplorationIsGreedy)
{
    AgentConfig c = small_config(Variant::vanilla_dqn);
    c.epsilon_start = 0.0;
    c.epsilon_end = 0.0;
    Agent agent(c, small_net(), kInput, kRoads, 12);
    agent.set_planned_steps(100);
    std::mt19937_64 rng(6);
    for (int k = 0; k < 30; ++k) {
        const sim::Observation o = random_obs(rng);
        EXPECT_EQ(agent.select_action(o, Mode::train), rl::argmax_lowest(agent.action_values(o, {})));
    }
}

TEST(Agent, EpsilonAndBetaSchedules)
{
    Agent agent(small_config(Variant::vanilla_dqn), small_net(), kInput, kRoads, 12);
    agent.set_planned_steps(100);
    EXPECT_DOUBLE_EQ(agent.epsilon(), 1.0);
    EXPECT_DOUBLE_EQ(agent.beta(), 0.4);
    std::mt19937_64 rng(6);
    for (int k = 0; k < 10; ++k) {
        agent.select_action(random_obs(rng), Mode::train);
    }
    EXPECT_NEAR(agent.epsilon(), 1.0 - 0.95 * 0.5, 1e-12);
    for (int k = 0; k < 20; ++k) {
        agent.select_action(random_obs(rng), Mode::train);
    }
    EXPECT_NEAR(agent.epsilon(), 0.05, 1e-12);
}

TEST(Runner, ZeroArrivalsGiveZeroReward)
{
    const sim::SimConfig c = small_sim(0.0);
    sim::IntersectionEnv env(c);
    Agent agent(small_config(Variant::rainbow), small_net(), kInput, kRoads, 1);
    env.reset(5);
    const EpisodeStats s = run_episode(agent, env, true);
    EXPECT_EQ(s.total_reward, 0.0);
    EXPECT_EQ(s.throughput, 0u);
    EXPECT_EQ(s.mean_waiting_s, 0.0);
    EXPECT_GT(s.decisions, 0u);
}

TEST(Runner, ThroughputMatchesIntervalLog)
{
    const sim::SimConfig c = small_sim(0.3);
    sim::IntersectionEnv env(c);
    Agent agent(small_config(Variant::rainbow), small_net(), kInput, kRoads, 2);
    env.reset(6);
    const EpisodeStats s = run_episode(agent, env, true);
    std::size_t out = 0;
    double reward = 0.0;
    for (const sim::IntervalRecord& r : env.log()) {
        out += std::accumulate(r.out_counts.begin(), r.out_counts.end(), std::size_t{0});
    }
    EXPECT_EQ(s.throughput, out);
    EXPECT_EQ(s.decisions, env.log().size());
    EXPECT_NEAR(s.reward_terms.total, s.total_reward, 1e-9);
    EXPECT_TRUE(s.loss_mean.has_value());
    (void)reward;
}

TEST(Runner, FixedTimeEpisodeCyclesAndHasNoLoss)
{
    sim::IntersectionEnv env(small_sim(0.2));
    env.reset(3);
    const EpisodeStats s = run_fixed_time_episode(env);
    EXPECT_FALSE(s.loss_mean.has_value());
    for (std::size_t k = 0; k < env.log().size(); ++k) {
        EXPECT_EQ(env.log()[k].action, k % kRoads);
    }
}

TEST(Runner, TrainingIsDeterministic)
{
    const sim::SimConfig c = small_sim(0.25);
    std::vector<std::vector<EpisodeStats>> runs;
    for (int rep = 0; rep < 2; ++rep) {
        sim::IntersectionEnv env(c);
        Agent agent(small_config(Variant::rainbow), small_net(), kInput, kRoads, 21);
        runs.emplace_back();
        for (std::size_t e = 0; e < 3; ++e) {
            env.reset(episode_seed(21, e));
            runs.back().push_back(run_episode(agent, env, true, e));
        }
    }
    EXPECT_EQ(runs[0], runs[1]);
}

TEST(Runner, OneNodeNetworkMatchesSingleIntersection)
{
    const sim::SimConfig c = small_sim(0.25);
    std::vector<EpisodeStats> single;
    {
        sim::IntersectionEnv env(c);
        Agent agent(small_config(Variant::rainbow), small_net(), kInput, kRoads, 31);
        for (std::size_t e = 0; e < 3; ++e) {
            env.reset(episode_seed(77, e));
            single.push_back(run_episode(agent, env, true, e));
        }
    }
    sim::NetworkEnv net(sim::NetworkConfig{{c}, {}});
    std::vector<Agent> agents;
    agents.emplace_back(small_config(Variant::rainbow), small_net(), kInput, kRoads, 31);
    const std::vector<std::uint64_t> seeds{77};
    const auto multi = run_multi_agent(net, agents, 3, seeds, 5, true);
    ASSERT_EQ(multi.size(), 1u);
    EXPECT_EQ(multi[0], single);
}

TEST(Runner, UnlinkedNodesAreIndependent)
{
    const sim::SimConfig c = small_sim(0.25);
    sim::NetworkEnv net(sim::NetworkConfig{{c, c}, {}});
    std::vector<Agent> agents;
    agents.emplace_back(small_config(Variant::rainbow), small_net(), kInput, kRoads, 41);
    agents.emplace_back(small_config(Variant::rainbow), small_net(), kInput, kRoads, 41);
    const std::vector<std::uint64_t> seeds{9, 9};
    const auto multi = run_multi_agent(net, agents, 2, seeds, 5, true);
    EXPECT_EQ(multi[0], multi[1]);
    EXPECT_THROW(run_multi_agent(net, std::span<Agent>(agents).first(1), 1, seeds, 5, true), AgentError);
}
