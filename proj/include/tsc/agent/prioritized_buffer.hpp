#pragma once

#include "tsc/agent/sum_tree.hpp"
#include "tsc/agent/transition.hpp"
#include "tsc/util/seeding.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace tsc::agent {

struct SampledBatch {
    std::vector<std::size_t> indices;
    std::vector<Transition> transitions;
    std::vector<double> probabilities;
    std::vector<double> weights;  // importance weights, max-normalized to 1
};

// Ring buffer with proportional prioritized sampling. Raw priorities
// p_i = |td| + eps are kept alongside the tree; the tree stores p_i^alpha.
class PrioritizedBuffer {
public:
    PrioritizedBuffer(std::size_t capacity, double alpha, double priority_eps);

    // New transitions enter with the largest raw priority seen so far.
    void push(Transition t);

    // Stratified sampling: one draw per equal-mass segment of the tree.
    SampledBatch sample(std::size_t batch_size, double beta, Rng& rng) const;

    void update_priorities(std::span<const std::size_t> indices, std::span<const double> td_errors);

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return storage_.size(); }
    double alpha() const { return alpha_; }
    double max_priority() const { return max_priority_; }
    double priority(std::size_t index) const { return raw_.at(index); }
    double probability(std::size_t index) const;
    const SumTree& tree() const { return tree_; }
    const Transition& at(std::size_t index) const { return storage_.at(index); }

private:
    std::vector<Transition> storage_;
    std::vector<double> raw_;
    SumTree tree_;
    double alpha_;
    double priority_eps_;
    double max_priority_ = 1.0;
    std::size_t next_ = 0;
    std::size_t size_ = 0;

    double scaled(double raw) const;
};

}  // namespace tsc::agent
