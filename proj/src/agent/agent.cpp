#include "tsc/agent/agent.hpp"

#include "tsc/rl/distribution.hpp"

#include <algorithm>
#include <cmath>

namespace tsc::agent {

namespace {

AgentConfig checked(const AgentConfig& config)
{
    config.validate();
    return config.effective();
}

}  // namespace

Eigen::MatrixXd stack_states(const std::vector<Transition>& batch, bool next)
{
    const std::size_t dim = next ? batch.front().next_state.size() : batch.front().state.size();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(batch.size()));
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& values = next ? batch[i].next_state.values : batch[i].state.values;
        for (std::size_t d = 0; d < dim; ++d) {
            out(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(i)) = values[d];
        }
    }
    return out;
}

Agent::Agent(AgentConfig config, const rl::NetSpec& base_spec, std::size_t input_dim, std::size_t n_actions,
             std::uint64_t seed)
    : config_(checked(config)),
      online_(net_spec_for(config_.variant, base_spec, input_dim, n_actions), derive_seed(seed, 0x0e71)),
      target_(online_),
      optim_(online_.parameter_count(), config_.adam),
      buffer_(config_.buffer_capacity, config_.alpha, config_.priority_eps),
      nstep_(config_.gamma, config_.n_step),
      rng_(derive_seed(seed, 0xa6e7))
{
}

double Agent::beta() const
{
    const double progress =
        planned_steps_ == 0 ? 1.0
                            : std::min(1.0, static_cast<double>(train_steps_) / static_cast<double>(planned_steps_));
    return config_.beta_start + (config_.beta_end - config_.beta_start) * progress;
}

double Agent::epsilon() const
{
    const double horizon = config_.epsilon_fraction * static_cast<double>(planned_steps_);
    const double progress = horizon <= 0.0 ? 1.0 : std::min(1.0, static_cast<double>(decisions_) / horizon);
    return config_.epsilon_start + (config_.epsilon_end - config_.epsilon_start) * progress;
}

std::vector<double> Agent::action_values(const sim::Observation& obs, const rl::NetworkNoise& noise) const
{
    if (distributional()) {
        return rl::expected_values(online_.forward_dist(obs.values, noise), online_.spec().support);
    }
    const Eigen::Map<const Eigen::MatrixXd> x(obs.values.data(), static_cast<Eigen::Index>(obs.size()), 1);
    const Eigen::MatrixXd q = online_.forward_logits(x, noise);
    return {q.data(), q.data() + q.size()};
}

std::size_t Agent::select_action(const sim::Observation& obs, Mode mode)
{
    std::size_t action = 0;
    if (distributional()) {
        const rl::NetworkNoise noise = mode == Mode::train ? online_.sample_noise(rng_) : rl::NetworkNoise{};
        action = rl::argmax_lowest(action_values(obs, noise));
    } else {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        if (mode == Mode::train && unit(rng_) < epsilon()) {
            std::uniform_int_distribution<std::size_t> pick(0, online_.spec().n_actions - 1);
            action = pick(rng_);
        } else {
            action = rl::argmax_lowest(action_values(obs, {}));
        }
    }
    if (mode == Mode::train) {
        ++decisions_;
    }
    return action;
}

void Agent::observe(const sim::Observation& state, std::size_t action, double reward, const sim::Observation& next,
                    bool episode_end)
{
    const bool terminal = episode_end && !config_.bootstrap_on_time_limit;
    std::vector<Transition> emitted =
        nstep_.push(StepRecord{state, action, reward * config_.reward_scale, next, terminal});
    if (episode_end && !terminal) {
        std::vector<Transition> rest = nstep_.flush_truncated();
        std::move(rest.begin(), rest.end(), std::back_inserter(emitted));
    }
    for (Transition& t : emitted) {
        buffer_.push(std::move(t));
    }
}

TrainReport Agent::train_step()
{
    if (!ready_to_train()) {
        throw AgentError("train_step called with " + std::to_string(buffer_.size()) +
                         " stored transitions; training starts at " + std::to_string(config_.train_start));
    }
    const SampledBatch batch = buffer_.sample(config_.batch_size, beta(), rng_);
    TrainReport report = distributional() ? train_distributional(batch) : train_scalar(batch);
    buffer_.update_priorities(report.indices, report.new_priorities);
    ++train_steps_;
    if (train_steps_ % config_.target_sync_interval == 0) {
        target_.parameters() = online_.parameters();
    }
    return report;
}

TrainReport Agent::train_distributional(const SampledBatch& batch)
{
    const rl::ValueSupport& support = online_.spec().support;
    const std::size_t n_atoms = support.n_atoms;
    const std::size_t n_actions = online_.spec().n_actions;
    const std::size_t b = batch.transitions.size();
    const auto atoms = static_cast<Eigen::Index>(n_atoms);

    TrainReport report;
    report.indices = batch.indices;
    report.weights = batch.weights;
    report.online_noise = online_.sample_noise(rng_);
    report.online_next_noise = online_.sample_noise(rng_);
    report.target_noise = target_.sample_noise(rng_);

    const Eigen::MatrixXd states = stack_states(batch.transitions, false);
    const Eigen::MatrixXd next_states = stack_states(batch.transitions, true);
    rl::Network::Cache cache;
    const Eigen::MatrixXd logits = online_.forward_logits(states, report.online_noise, &cache);
    const Eigen::MatrixXd next_online = online_.forward_logits(next_states, report.online_next_noise);
    const Eigen::MatrixXd next_target = target_.forward_logits(next_states, report.target_noise);

    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(logits.rows(), logits.cols());
    std::vector<double> row(n_atoms);
    std::vector<double> target(n_atoms);
    std::vector<double> q(n_actions);
    double loss = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        const Transition& t = batch.transitions[i];
        const auto col = static_cast<Eigen::Index>(i);
        for (std::size_t a = 0; a < n_actions; ++a) {
            const auto block = next_online.col(col).segment(static_cast<Eigen::Index>(a) * atoms, atoms);
            std::copy(block.data(), block.data() + n_atoms, row.begin());
            rl::softmax_inplace(row);
            q[a] = rl::expected_value(row, support);
        }
        const std::size_t best = rl::argmax_lowest(q);
        const auto next_block = next_target.col(col).segment(static_cast<Eigen::Index>(best) * atoms, atoms);
        std::copy(next_block.data(), next_block.data() + n_atoms, row.begin());
        rl::softmax_inplace(row);
        rl::project_distribution(t.return_n, t.done, t.gamma_n, row, support, target);

        const auto offset = static_cast<Eigen::Index>(t.action) * atoms;
        const auto pred = logits.col(col).segment(offset, atoms);
        std::copy(pred.data(), pred.data() + n_atoms, row.begin());
        const double sample_loss = rl::cross_entropy(row, target);
        rl::softmax_inplace(row);
        const double scale = batch.weights[i] / static_cast<double>(b);
        for (std::size_t j = 0; j < n_atoms; ++j) {
            grad(offset + static_cast<Eigen::Index>(j), col) = (row[j] - target[j]) * scale;
        }
        report.sample_losses.push_back(sample_loss);
        report.new_priorities.push_back(sample_loss);
        loss += batch.weights[i] * sample_loss;
    }
    report.loss = loss / static_cast<double>(b);
    apply_gradient(online_.backward(cache, grad));
    return report;
}

TrainReport Agent::train_scalar(const SampledBatch& batch)
{
    const std::size_t b = batch.transitions.size();
    TrainReport report;
    report.indices = batch.indices;
    report.weights = batch.weights;

    const Eigen::MatrixXd states = stack_states(batch.transitions, false);
    const Eigen::MatrixXd next_states = stack_states(batch.transitions, true);
    rl::Network::Cache cache;
    const Eigen::MatrixXd q = online_.forward_logits(states, {}, &cache);
    const Eigen::MatrixXd next_q = target_.forward_logits(next_states, {});

    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(q.rows(), q.cols());
    double loss = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        const Transition& t = batch.transitions[i];
        const auto col = static_cast<Eigen::Index>(i);
        const double bootstrap = t.done ? 0.0 : t.gamma_n * next_q.col(col).maxCoeff();
        const double td = q(static_cast<Eigen::Index>(t.action), col) - (t.return_n + bootstrap);
        const double sample_loss = 0.5 * td * td;
        grad(static_cast<Eigen::Index>(t.action), col) = batch.weights[i] * td / static_cast<double>(b);
        report.sample_losses.push_back(sample_loss);
        report.new_priorities.push_back(std::abs(td));
        loss += batch.weights[i] * sample_loss;
    }
    report.loss = loss / static_cast<double>(b);
    apply_gradient(online_.backward(cache, grad));
    return report;
}

void Agent::apply_gradient(Eigen::VectorXd grads)
{
    if (config_.max_grad_norm > 0.0) {
        const double norm = grads.norm();
        if (norm > config_.max_grad_norm) {
            grads *= config_.max_grad_norm / norm;
        }
    }
    rl::adam_step(online_.parameters(), grads, optim_);
}

}  // namespace tsc::agent
