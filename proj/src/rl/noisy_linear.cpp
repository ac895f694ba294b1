#include "tsc/rl/noisy_linear.hpp"

#include <cmath>

namespace tsc::rl {

double noise_transform(double x)
{
    return std::copysign(std::sqrt(std::abs(x)), x);
}

LayerNoise draw_layer_noise(std::size_t in, std::size_t out, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    LayerNoise noise{Eigen::VectorXd(static_cast<Eigen::Index>(in)), Eigen::VectorXd(static_cast<Eigen::Index>(out))};
    for (Eigen::Index i = 0; i < noise.f_in.size(); ++i) {
        noise.f_in[i] = noise_transform(normal(rng));
    }
    for (Eigen::Index i = 0; i < noise.f_out.size(); ++i) {
        noise.f_out[i] = noise_transform(normal(rng));
    }
    return noise;
}

EffectiveLinear apply_noise(const NoisyLinearParams& params, const LayerNoise& noise)
{
    EffectiveLinear eff;
    eff.w = params.mu_w + params.sigma_w.cwiseProduct(noise.f_out * noise.f_in.transpose());
    eff.b = params.mu_b + params.sigma_b.cwiseProduct(noise.f_out);
    return eff;
}

EffectiveLinear noisy_sample(const NoisyLinearParams& params, Rng& rng)
{
    const LayerNoise noise = draw_layer_noise(static_cast<std::size_t>(params.mu_w.cols()),
                                              static_cast<std::size_t>(params.mu_w.rows()), rng);
    return apply_noise(params, noise);
}

}  // namespace tsc::rl
