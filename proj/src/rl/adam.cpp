#include "tsc/rl/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace tsc::rl {

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, OptimState& state)
{
    if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
        throw std::invalid_argument("adam_step: parameter, gradient and moment sizes differ");
    }
    if (!grads.allFinite()) {
        throw std::invalid_argument("adam_step: non-finite gradient entry");
    }
    const AdamConfig& c = state.config;
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double m_corr = 1.0 / (1.0 - std::pow(c.beta1, t));
    const double v_corr = 1.0 / (1.0 - std::pow(c.beta2, t));
    state.m = c.beta1 * state.m + (1.0 - c.beta1) * grads;
    state.v = c.beta2 * state.v + (1.0 - c.beta2) * grads.cwiseAbs2();
    params.array() -= c.lr * (state.m.array() * m_corr) / ((state.v.array() * v_corr).sqrt() + c.eps);
}

}  // namespace tsc::rl
