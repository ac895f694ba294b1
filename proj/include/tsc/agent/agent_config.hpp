#pragma once

#include "tsc/rl/adam.hpp"
#include "tsc/rl/network.hpp"

#include <cstddef>
#include <string>
#include <string_view>

namespace tsc::agent {

enum class Variant { rainbow, vanilla_dqn };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

struct AgentConfig {
    Variant variant = Variant::rainbow;
    double gamma = 0.99;
    std::size_t n_step = 3;
    std::size_t batch_size = 64;
    std::size_t buffer_capacity = 50000;
    std::size_t target_sync_interval = 500;  // train steps
    std::size_t train_start = 1000;          // transitions
    double beta_start = 0.4;
    double beta_end = 1.0;
    double alpha = 0.5;
    double priority_eps = 1e-3;
    // Vanilla variant only: linear decay over the first fraction of decisions.
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    double epsilon_fraction = 0.2;
    // Multiplier applied to environment rewards before they enter the
    // learning targets. Puts discounted returns at default load around -450,
    // inside the default support.
    double reward_scale = 0.05;
    double max_grad_norm = 10.0;  // <= 0 disables clipping
    // Treat the episode time limit as truncation (bootstrap) rather than a
    // terminal state.
    bool bootstrap_on_time_limit = true;
    rl::AdamConfig adam{2.5e-4};

    void validate() const;

    // Settings that actually take effect: the vanilla baseline forces n = 1
    // and uniform replay (alpha = 0).
    AgentConfig effective() const;
};

// Network shape for a variant: the vanilla baseline uses a single atom (a
// scalar Q head) without dueling or noisy layers.
rl::NetSpec net_spec_for(Variant variant, const rl::NetSpec& base, std::size_t input_dim, std::size_t n_actions);

}  // namespace tsc::agent
