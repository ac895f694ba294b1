#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace tsc::rl {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct OptimState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    std::uint64_t step = 0;
    AdamConfig config;

    OptimState() = default;
    OptimState(Eigen::Index size, AdamConfig cfg)
        : m(Eigen::VectorXd::Zero(size)), v(Eigen::VectorXd::Zero(size)), config(cfg) {}
};

// Bias-corrected Adam update in place. Throws std::invalid_argument on a
// shape mismatch or a non-finite gradient entry.
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, OptimState& state);

}  // namespace tsc::rl
