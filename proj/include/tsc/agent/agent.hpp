#pragma once

#include "tsc/agent/agent_config.hpp"
#include "tsc/agent/nstep.hpp"
#include "tsc/agent/prioritized_buffer.hpp"
#include "tsc/rl/adam.hpp"
#include "tsc/rl/network.hpp"
#include "tsc/sim/observation.hpp"
#include "tsc/util/seeding.hpp"

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace tsc::agent {

enum class Mode { train, eval };

class AgentError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct TrainReport {
    double loss = 0.0;  // importance-weighted batch mean
    std::vector<std::size_t> indices;
    std::vector<double> weights;
    std::vector<double> sample_losses;
    std::vector<double> new_priorities;  // |td error| fed back to the buffer (before priority_eps)
    // Noise draws used by the update (empty for the vanilla variant):
    // online net on states, online net on next states, target net on next states.
    rl::NetworkNoise online_noise;
    rl::NetworkNoise online_next_noise;
    rl::NetworkNoise target_noise;
};

// Distributional Rainbow learner (or the vanilla DQN baseline, depending on
// AgentConfig::variant) over a fixed-size observation and discrete actions.
class Agent {
public:
    Agent(AgentConfig config, const rl::NetSpec& base_spec, std::size_t input_dim, std::size_t n_actions,
          std::uint64_t seed);

    std::size_t select_action(const sim::Observation& obs, Mode mode);

    // Feeds one environment step (raw reward) through the n-step window.
    void observe(const sim::Observation& state, std::size_t action, double reward, const sim::Observation& next,
                 bool episode_end);

    bool ready_to_train() const { return buffer_.size() >= config_.train_start && buffer_.size() >= config_.batch_size; }
    TrainReport train_step();

    // Horizon for the beta and epsilon schedules, in decisions.
    void set_planned_steps(std::size_t steps) { planned_steps_ = steps; }
    double beta() const;
    double epsilon() const;

    const AgentConfig& config() const { return config_; }
    const rl::Network& online() const { return online_; }
    const rl::Network& target() const { return target_; }
    rl::Network& online() { return online_; }
    rl::Network& target() { return target_; }
    const PrioritizedBuffer& buffer() const { return buffer_; }
    PrioritizedBuffer& buffer() { return buffer_; }
    std::size_t train_steps() const { return train_steps_; }
    std::size_t decisions() const { return decisions_; }

    // Scalar action values: expected value of each action's distribution, or
    // the raw Q head for the single-atom baseline.
    std::vector<double> action_values(const sim::Observation& obs, const rl::NetworkNoise& noise) const;

private:
    AgentConfig config_;
    rl::Network online_;
    rl::Network target_;
    rl::OptimState optim_;
    PrioritizedBuffer buffer_;
    NStepAccumulator nstep_;
    Rng rng_;
    std::size_t planned_steps_ = 0;
    std::size_t train_steps_ = 0;
    std::size_t decisions_ = 0;

    bool distributional() const { return config_.variant == Variant::rainbow; }
    TrainReport train_distributional(const SampledBatch& batch);
    TrainReport train_scalar(const SampledBatch& batch);
    void apply_gradient(Eigen::VectorXd grads);
};

// Packs observations column-wise into an input matrix.
Eigen::MatrixXd stack_states(const std::vector<Transition>& batch, bool next);

}  // namespace tsc::agent
