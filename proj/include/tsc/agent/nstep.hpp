#pragma once

#include "tsc/agent/transition.hpp"

#include <cstddef>
#include <deque>
#include <vector>

namespace tsc::agent {

// Sliding window that turns single steps into n-step transitions.
class NStepAccumulator {
public:
    NStepAccumulator(double gamma, std::size_t n);

    // Emits the transition starting at the oldest buffered step once n steps
    // are held. A terminal step flushes every buffered window with done set.
    std::vector<Transition> push(StepRecord step);

    // Flushes the buffered windows without marking them terminal, so each
    // bootstraps from the last observed state (time-limit truncation).
    std::vector<Transition> flush_truncated();

    void clear() { window_.clear(); }
    std::size_t pending() const { return window_.size(); }

private:
    double gamma_;
    std::size_t n_;
    std::deque<StepRecord> window_;

    Transition emit_front(std::size_t length) const;
};

}  // namespace tsc::agent
