#pragma once

#include "tsc/rl/distribution.hpp"
#include "tsc/rl/noisy_linear.hpp"
#include "tsc/rl/value_support.hpp"
#include "tsc/util/seeding.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace tsc::rl {

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct NetSpec {
    std::size_t input_dim = 1;
    std::vector<std::size_t> hidden{128, 128};
    std::size_t n_actions = 1;
    ValueSupport support;
    bool dueling = true;
    bool noisy = true;
    double sigma_init = 0.5;

    void validate() const;
    // Rows of the final linear layer: N value atoms plus A*N advantages when
    // dueling, A*N logits otherwise.
    std::size_t head_dim() const;
    std::size_t logits_dim() const { return n_actions * support.n_atoms; }
    friend bool operator==(const NetSpec&, const NetSpec&) = default;
};

// Noise draw for every layer; an empty draw selects evaluation mode (mean
// weights only).
struct NetworkNoise {
    std::vector<LayerNoise> layers;
    bool empty() const { return layers.empty(); }
};

// Fully connected ReLU trunk with an optional dueling distributional head.
// All parameters live in one flat vector; per layer the order is
// mu_w (column-major, out x in), mu_b, then sigma_w and sigma_b for noisy
// networks.
class Network {
public:
    struct Cache {
        std::vector<Eigen::MatrixXd> inputs;       // per layer input activations
        std::vector<Eigen::MatrixXd> weights;      // effective weights used
        std::vector<Eigen::VectorXd> f_in;         // noise factors per layer (noisy only)
        std::vector<Eigen::VectorXd> f_out;
        Eigen::MatrixXd head;                      // raw final-layer output
    };

    Network(NetSpec spec, std::uint64_t init_seed);
    Network(NetSpec spec, Eigen::VectorXd parameters);

    const NetSpec& spec() const { return spec_; }
    std::size_t layer_count() const { return layers_.size(); }
    Eigen::Index parameter_count() const { return params_.size(); }
    const Eigen::VectorXd& parameters() const { return params_; }
    Eigen::VectorXd& parameters() { return params_; }

    NetworkNoise sample_noise(Rng& rng) const;

    // inputs: input_dim x B. Returns logits_dim x B, row index a * N + atom.
    Eigen::MatrixXd forward_logits(const Eigen::MatrixXd& inputs, const NetworkNoise& noise,
                                   Cache* cache = nullptr) const;

    // Reverse pass for d(loss)/d(logits); the cache must come from the
    // forward pass with the same noise. Returns the flat parameter gradient.
    Eigen::VectorXd backward(const Cache& cache, const Eigen::MatrixXd& grad_logits) const;

    ActionValueDistribution forward_dist(std::span<const double> observation, const NetworkNoise& noise) const;

    // Copy of one layer's parameters (sigma blocks are zero for plain layers).
    NoisyLinearParams layer(std::size_t index) const;

private:
    struct LayerLayout {
        std::size_t in = 0;
        std::size_t out = 0;
        Eigen::Index mu_w = 0;
        Eigen::Index mu_b = 0;
        Eigen::Index sigma_w = -1;
        Eigen::Index sigma_b = -1;
    };

    NetSpec spec_;
    std::vector<LayerLayout> layers_;
    Eigen::VectorXd params_;

    void build_layout();
    Eigen::Map<const Eigen::MatrixXd> block(Eigen::Index offset, std::size_t rows, std::size_t cols) const;
};

}  // namespace tsc::rl
