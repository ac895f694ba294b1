#pragma once

#include "tsc/util/seeding.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace tsc::rl {

struct NoisyLinearParams {
    Eigen::MatrixXd mu_w;     // out x in
    Eigen::MatrixXd sigma_w;  // out x in
    Eigen::VectorXd mu_b;
    Eigen::VectorXd sigma_b;
    double sigma_init = 0.5;
};

// Factorized Gaussian noise for one layer, already passed through
// f(x) = sign(x) * sqrt(|x|).
struct LayerNoise {
    Eigen::VectorXd f_in;
    Eigen::VectorXd f_out;
};

struct EffectiveLinear {
    Eigen::MatrixXd w;
    Eigen::VectorXd b;
};

double noise_transform(double x);

LayerNoise draw_layer_noise(std::size_t in, std::size_t out, Rng& rng);

EffectiveLinear apply_noise(const NoisyLinearParams& params, const LayerNoise& noise);

// w = mu_w + sigma_w * (f(eps_out) f(eps_in)^T), b = mu_b + sigma_b * f(eps_out).
EffectiveLinear noisy_sample(const NoisyLinearParams& params, Rng& rng);

}  // namespace tsc::rl
