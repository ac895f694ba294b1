#include "tsc/rl/network.hpp"

#include <cmath>
#include <string>

namespace tsc::rl {

void NetSpec::validate() const
{
    if (input_dim < 1 || n_actions < 1) {
        throw ShapeError("NetSpec: input_dim and n_actions must be at least 1");
    }
    for (std::size_t w : hidden) {
        if (w < 1) {
            throw ShapeError("NetSpec: hidden widths must be at least 1");
        }
    }
    support.validate();
    if (!(sigma_init >= 0.0) || !std::isfinite(sigma_init)) {
        throw ShapeError("NetSpec: sigma_init must be finite and nonnegative");
    }
}

std::size_t NetSpec::head_dim() const
{
    return dueling ? support.n_atoms * (1 + n_actions) : n_actions * support.n_atoms;
}

Network::Network(NetSpec spec, std::uint64_t init_seed) : spec_(std::move(spec))
{
    spec_.validate();
    build_layout();
    Rng rng(init_seed);
    for (const LayerLayout& l : layers_) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(l.in));
        std::uniform_real_distribution<double> uniform(-bound, bound);
        const auto n_w = static_cast<Eigen::Index>(l.in * l.out);
        const auto n_b = static_cast<Eigen::Index>(l.out);
        for (Eigen::Index k = 0; k < n_w; ++k) {
            params_[l.mu_w + k] = uniform(rng);
        }
        for (Eigen::Index k = 0; k < n_b; ++k) {
            params_[l.mu_b + k] = uniform(rng);
        }
        if (spec_.noisy) {
            const double sigma = spec_.sigma_init * bound;
            params_.segment(l.sigma_w, n_w).setConstant(sigma);
            params_.segment(l.sigma_b, n_b).setConstant(sigma);
        }
    }
}

Network::Network(NetSpec spec, Eigen::VectorXd parameters) : spec_(std::move(spec))
{
    spec_.validate();
    build_layout();
    if (parameters.size() != params_.size()) {
        throw ShapeError("Network: expected " + std::to_string(params_.size()) + " parameters, got " +
                         std::to_string(parameters.size()));
    }
    params_ = std::move(parameters);
}

void Network::build_layout()
{
    std::vector<std::size_t> dims{spec_.input_dim};
    dims.insert(dims.end(), spec_.hidden.begin(), spec_.hidden.end());
    dims.push_back(spec_.head_dim());
    layers_.clear();
    Eigen::Index offset = 0;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        LayerLayout l;
        l.in = dims[i];
        l.out = dims[i + 1];
        const auto n_w = static_cast<Eigen::Index>(l.in * l.out);
        const auto n_b = static_cast<Eigen::Index>(l.out);
        l.mu_w = offset;
        offset += n_w;
        l.mu_b = offset;
        offset += n_b;
        if (spec_.noisy) {
            l.sigma_w = offset;
            offset += n_w;
            l.sigma_b = offset;
            offset += n_b;
        }
        layers_.push_back(l);
    }
    params_ = Eigen::VectorXd::Zero(offset);
}

Eigen::Map<const Eigen::MatrixXd> Network::block(Eigen::Index offset, std::size_t rows, std::size_t cols) const
{
    return {params_.data() + offset, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

NetworkNoise Network::sample_noise(Rng& rng) const
{
    NetworkNoise noise;
    if (!spec_.noisy) {
        return noise;
    }
    noise.layers.reserve(layers_.size());
    for (const LayerLayout& l : layers_) {
        noise.layers.push_back(draw_layer_noise(l.in, l.out, rng));
    }
    return noise;
}

Eigen::MatrixXd Network::forward_logits(const Eigen::MatrixXd& inputs, const NetworkNoise& noise, Cache* cache) const
{
    if (static_cast<std::size_t>(inputs.rows()) != spec_.input_dim) {
        throw ShapeError("forward: expected input dimension " + std::to_string(spec_.input_dim) + ", got " +
                         std::to_string(inputs.rows()));
    }
    const bool use_noise = spec_.noisy && !noise.empty();
    if (use_noise && noise.layers.size() != layers_.size()) {
        throw ShapeError("forward: noise draw does not match the layer count");
    }
    if (cache != nullptr) {
        *cache = Cache{};
    }

    Eigen::MatrixXd x = inputs;
    Eigen::MatrixXd z;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const LayerLayout& l = layers_[i];
        Eigen::MatrixXd w = block(l.mu_w, l.out, l.in);
        Eigen::VectorXd b = block(l.mu_b, l.out, 1);
        if (use_noise) {
            const LayerNoise& n = noise.layers[i];
            // sigma_w * (f_out f_in^T) elementwise, without forming the outer product
            w.noalias() += n.f_out.asDiagonal() * block(l.sigma_w, l.out, l.in) * n.f_in.asDiagonal();
            b += block(l.sigma_b, l.out, 1).cwiseProduct(n.f_out);
        }
        z.noalias() = w * x;
        z.colwise() += b;
        if (cache != nullptr) {
            cache->inputs.push_back(std::move(x));
            cache->weights.push_back(std::move(w));
            if (use_noise) {
                cache->f_in.push_back(noise.layers[i].f_in);
                cache->f_out.push_back(noise.layers[i].f_out);
            }
        }
        if (i + 1 < layers_.size()) {
            x = z.cwiseMax(0.0);
        }
    }
    if (cache != nullptr) {
        cache->head = z;
    }
    if (!spec_.dueling) {
        return z;
    }

    const auto n_atoms = static_cast<Eigen::Index>(spec_.support.n_atoms);
    const auto n_actions = static_cast<Eigen::Index>(spec_.n_actions);
    const Eigen::Index batch = z.cols();
    Eigen::MatrixXd mean_adv = Eigen::MatrixXd::Zero(n_atoms, batch);
    for (Eigen::Index a = 0; a < n_actions; ++a) {
        mean_adv += z.middleRows(n_atoms * (1 + a), n_atoms);
    }
    mean_adv /= static_cast<double>(n_actions);
    Eigen::MatrixXd logits(n_atoms * n_actions, batch);
    for (Eigen::Index a = 0; a < n_actions; ++a) {
        logits.middleRows(n_atoms * a, n_atoms) = z.topRows(n_atoms) + z.middleRows(n_atoms * (1 + a), n_atoms) - mean_adv;
    }
    return logits;
}

Eigen::VectorXd Network::backward(const Cache& cache, const Eigen::MatrixXd& grad_logits) const
{
    if (cache.inputs.size() != layers_.size()) {
        throw ShapeError("backward: cache does not come from a forward pass of this network");
    }
    if (static_cast<std::size_t>(grad_logits.rows()) != spec_.logits_dim() ||
        grad_logits.cols() != cache.inputs.front().cols()) {
        throw ShapeError("backward: gradient shape does not match the forward output");
    }
    const bool noisy_pass = !cache.f_out.empty();

    Eigen::MatrixXd dz;
    if (spec_.dueling) {
        const auto n_atoms = static_cast<Eigen::Index>(spec_.support.n_atoms);
        const auto n_actions = static_cast<Eigen::Index>(spec_.n_actions);
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n_atoms, grad_logits.cols());
        for (Eigen::Index a = 0; a < n_actions; ++a) {
            sum += grad_logits.middleRows(n_atoms * a, n_atoms);
        }
        const Eigen::MatrixXd mean = sum / static_cast<double>(n_actions);
        dz.resize(static_cast<Eigen::Index>(spec_.head_dim()), grad_logits.cols());
        dz.topRows(n_atoms) = sum;
        for (Eigen::Index a = 0; a < n_actions; ++a) {
            dz.middleRows(n_atoms * (1 + a), n_atoms) = grad_logits.middleRows(n_atoms * a, n_atoms) - mean;
        }
    } else {
        dz = grad_logits;
    }

    Eigen::VectorXd grads = Eigen::VectorXd::Zero(params_.size());
    for (std::size_t i = layers_.size(); i-- > 0;) {
        const LayerLayout& l = layers_[i];
        const auto rows = static_cast<Eigen::Index>(l.out);
        const auto cols = static_cast<Eigen::Index>(l.in);
        const Eigen::MatrixXd& x = cache.inputs[i];
        Eigen::Map<Eigen::MatrixXd> d_mu_w(grads.data() + l.mu_w, rows, cols);
        Eigen::Map<Eigen::VectorXd> d_mu_b(grads.data() + l.mu_b, rows);
        d_mu_w.noalias() = dz * x.transpose();
        d_mu_b = dz.rowwise().sum();
        if (noisy_pass) {
            Eigen::Map<Eigen::MatrixXd> d_sigma_w(grads.data() + l.sigma_w, rows, cols);
            Eigen::Map<Eigen::VectorXd> d_sigma_b(grads.data() + l.sigma_b, rows);
            d_sigma_w.noalias() = cache.f_out[i].asDiagonal() * d_mu_w * cache.f_in[i].asDiagonal();
            d_sigma_b = d_mu_b.cwiseProduct(cache.f_out[i]);
        }
        if (i > 0) {
            Eigen::MatrixXd dx = cache.weights[i].transpose() * dz;
            dz = dx.cwiseProduct((x.array() > 0.0).cast<double>().matrix());
        }
    }
    return grads;
}

ActionValueDistribution Network::forward_dist(std::span<const double> observation, const NetworkNoise& noise) const
{
    if (observation.size() != spec_.input_dim) {
        throw ShapeError("forward_dist: expected observation of length " + std::to_string(spec_.input_dim) +
                         ", got " + std::to_string(observation.size()));
    }
    const Eigen::Map<const Eigen::MatrixXd> x(observation.data(), static_cast<Eigen::Index>(observation.size()), 1);
    const Eigen::MatrixXd logits = forward_logits(x, noise);
    const auto n_atoms = static_cast<Eigen::Index>(spec_.support.n_atoms);
    ActionValueDistribution dist{Eigen::MatrixXd(static_cast<Eigen::Index>(spec_.n_actions), n_atoms)};
    std::vector<double> row(spec_.support.n_atoms);
    for (Eigen::Index a = 0; a < dist.probs.rows(); ++a) {
        for (Eigen::Index j = 0; j < n_atoms; ++j) {
            row[static_cast<std::size_t>(j)] = logits(a * n_atoms + j, 0);
        }
        softmax_inplace(row);
        for (Eigen::Index j = 0; j < n_atoms; ++j) {
            dist.probs(a, j) = row[static_cast<std::size_t>(j)];
        }
    }
    return dist;
}

NoisyLinearParams Network::layer(std::size_t index) const
{
    const LayerLayout& l = layers_.at(index);
    NoisyLinearParams p;
    p.sigma_init = spec_.sigma_init;
    p.mu_w = block(l.mu_w, l.out, l.in);
    p.mu_b = block(l.mu_b, l.out, 1);
    if (spec_.noisy) {
        p.sigma_w = block(l.sigma_w, l.out, l.in);
        p.sigma_b = block(l.sigma_b, l.out, 1);
    } else {
        p.sigma_w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(l.out), static_cast<Eigen::Index>(l.in));
        p.sigma_b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(l.out));
    }
    return p;
}

}  // namespace tsc::rl
