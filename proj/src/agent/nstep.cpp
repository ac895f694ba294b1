#include "tsc/agent/nstep.hpp"

#include <stdexcept>

namespace tsc::agent {

NStepAccumulator::NStepAccumulator(double gamma, std::size_t n) : gamma_(gamma), n_(n)
{
    if (n_ < 1) {
        throw std::invalid_argument("NStepAccumulator: n must be at least 1");
    }
}

Transition NStepAccumulator::emit_front(std::size_t length) const
{
    Transition t;
    t.state = window_.front().state;
    t.action = window_.front().action;
    double discount = 1.0;
    for (std::size_t k = 0; k < length; ++k) {
        t.return_n += discount * window_[k].reward;
        discount *= gamma_;
    }
    t.gamma_n = discount;
    t.next_state = window_[length - 1].next_state;
    t.done = window_[length - 1].terminal;
    return t;
}

std::vector<Transition> NStepAccumulator::push(StepRecord step)
{
    std::vector<Transition> out;
    const bool terminal = step.terminal;
    window_.push_back(std::move(step));
    if (terminal) {
        while (!window_.empty()) {
            out.push_back(emit_front(window_.size()));
            window_.pop_front();
        }
        return out;
    }
    if (window_.size() == n_) {
        out.push_back(emit_front(n_));
        window_.pop_front();
    }
    return out;
}

std::vector<Transition> NStepAccumulator::flush_truncated()
{
    std::vector<Transition> out;
    while (!window_.empty()) {
        out.push_back(emit_front(window_.size()));
        window_.pop_front();
    }
    return out;
}

}  // namespace tsc::agent
