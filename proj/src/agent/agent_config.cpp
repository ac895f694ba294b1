#include "tsc/agent/agent_config.hpp"

#include "tsc/sim/sim_config.hpp"

#include <cmath>
#include <string>

namespace tsc::agent {

using sim::ConfigError;

std::string_view to_string(Variant v)
{
    switch (v) {
    case Variant::rainbow:
        return "rainbow";
    case Variant::vanilla_dqn:
        return "vanilla_dqn";
    }
    return "unknown";
}

Variant parse_variant(std::string_view name)
{
    if (name == "rainbow") {
        return Variant::rainbow;
    }
    if (name == "vanilla_dqn") {
        return Variant::vanilla_dqn;
    }
    throw ConfigError("agent.variant", "unknown variant '" + std::string(name) + "' (rainbow | vanilla_dqn)");
}

void AgentConfig::validate() const
{
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw ConfigError("agent.gamma", "must lie in (0, 1)");
    }
    if (n_step < 1) {
        throw ConfigError("agent.n_step", "must be at least 1");
    }
    if (batch_size < 1) {
        throw ConfigError("agent.batch_size", "must be at least 1");
    }
    if (batch_size > buffer_capacity) {
        throw ConfigError("agent.batch_size", "must not exceed agent.buffer_capacity");
    }
    if (target_sync_interval < 1) {
        throw ConfigError("agent.target_sync_interval", "must be at least 1");
    }
    if (!(beta_start >= 0.0 && beta_start <= 1.0) || !(beta_end >= 0.0 && beta_end <= 1.0)) {
        throw ConfigError("agent.beta_start", "beta schedule endpoints must lie in [0, 1]");
    }
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw ConfigError("agent.alpha", "must be finite and nonnegative");
    }
    if (!(priority_eps > 0.0)) {
        throw ConfigError("agent.priority_eps", "must be positive");
    }
    if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 && epsilon_end <= 1.0)) {
        throw ConfigError("agent.epsilon_start", "epsilon endpoints must lie in [0, 1]");
    }
    if (!(epsilon_fraction > 0.0 && epsilon_fraction <= 1.0)) {
        throw ConfigError("agent.epsilon_fraction", "must lie in (0, 1]");
    }
    if (!(reward_scale > 0.0) || !std::isfinite(reward_scale)) {
        throw ConfigError("agent.reward_scale", "must be positive and finite");
    }
    if (!(adam.lr > 0.0)) {
        throw ConfigError("agent.lr", "must be positive");
    }
}

AgentConfig AgentConfig::effective() const
{
    AgentConfig c = *this;
    if (variant == Variant::vanilla_dqn) {
        c.n_step = 1;
        c.alpha = 0.0;
    }
    return c;
}

rl::NetSpec net_spec_for(Variant variant, const rl::NetSpec& base, std::size_t input_dim, std::size_t n_actions)
{
    rl::NetSpec spec = base;
    spec.input_dim = input_dim;
    spec.n_actions = n_actions;
    if (variant == Variant::vanilla_dqn) {
        spec.support.n_atoms = 1;
        spec.dueling = false;
        spec.noisy = false;
    }
    return spec;
}

}  // namespace tsc::agent
