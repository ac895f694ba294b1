#include "tsc/agent/prioritized_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tsc::agent {

PrioritizedBuffer::PrioritizedBuffer(std::size_t capacity, double alpha, double priority_eps)
    : storage_(capacity), raw_(capacity, 0.0), tree_(capacity), alpha_(alpha), priority_eps_(priority_eps)
{
    if (!(alpha >= 0.0) || !(priority_eps > 0.0)) {
        throw std::invalid_argument("PrioritizedBuffer: alpha must be >= 0 and priority_eps > 0");
    }
}

double PrioritizedBuffer::scaled(double raw) const
{
    return std::pow(raw, alpha_);
}

void PrioritizedBuffer::push(Transition t)
{
    storage_[next_] = std::move(t);
    raw_[next_] = max_priority_;
    tree_.set(next_, scaled(max_priority_));
    next_ = (next_ + 1) % storage_.size();
    size_ = std::min(size_ + 1, storage_.size());
}

double PrioritizedBuffer::probability(std::size_t index) const
{
    if (index >= size_) {
        throw std::out_of_range("PrioritizedBuffer::probability: index out of range");
    }
    return tree_.get(index) / tree_.total();
}

SampledBatch PrioritizedBuffer::sample(std::size_t batch_size, double beta, Rng& rng) const
{
    if (batch_size == 0 || size_ < batch_size) {
        throw std::length_error("PrioritizedBuffer::sample: " + std::to_string(size_) +
                                " stored transitions, batch of " + std::to_string(batch_size) + " requested");
    }
    SampledBatch batch;
    batch.indices.reserve(batch_size);
    batch.transitions.reserve(batch_size);
    batch.probabilities.reserve(batch_size);
    batch.weights.reserve(batch_size);

    const double total = tree_.total();
    const double segment = total / static_cast<double>(batch_size);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double max_weight = 0.0;
    for (std::size_t k = 0; k < batch_size; ++k) {
        const double mass = segment * (static_cast<double>(k) + unit(rng));
        const std::size_t index = std::min(tree_.find(mass), size_ - 1);
        const double p = tree_.get(index) / total;
        const double w = std::pow(static_cast<double>(size_) * p, -beta);
        max_weight = std::max(max_weight, w);
        batch.indices.push_back(index);
        batch.transitions.push_back(storage_[index]);
        batch.probabilities.push_back(p);
        batch.weights.push_back(w);
    }
    for (double& w : batch.weights) {
        w /= max_weight;
    }
    return batch;
}

void PrioritizedBuffer::update_priorities(std::span<const std::size_t> indices, std::span<const double> td_errors)
{
    if (indices.size() != td_errors.size()) {
        throw std::invalid_argument("update_priorities: indices and errors differ in length");
    }
    for (std::size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] >= size_) {
            throw std::out_of_range("update_priorities: index " + std::to_string(indices[k]) + " out of range");
        }
        const double p = std::abs(td_errors[k]) + priority_eps_;
        if (!std::isfinite(p)) {
            throw std::invalid_argument("update_priorities: non-finite td error");
        }
        raw_[indices[k]] = p;
        tree_.set(indices[k], scaled(p));
        max_priority_ = std::max(max_priority_, p);
    }
}

}  // namespace tsc::agent
