#pragma once

#include "tsc/rl/value_support.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace tsc::rl {

// A x N matrix of per-action probabilities over the value support.
struct ActionValueDistribution {
    Eigen::MatrixXd probs;

    std::size_t actions() const { return static_cast<std::size_t>(probs.rows()); }
    std::size_t atoms() const { return static_cast<std::size_t>(probs.cols()); }
    std::vector<double> row(std::size_t action) const;
};

// q(a) = v + adv(a) - mean_a adv(a), per atom.
Eigen::MatrixXd dueling_aggregate(const Eigen::VectorXd& value_logits, const Eigen::MatrixXd& advantage_logits);

void softmax_inplace(std::span<double> logits);
std::vector<double> softmax(std::span<const double> logits);
double log_sum_exp(std::span<const double> logits);

double expected_value(std::span<const double> probs, const ValueSupport& support);

// Per-action expected values, argmax with ties to the lowest index.
std::vector<double> expected_values(const ActionValueDistribution& dist, const ValueSupport& support);
std::size_t argmax_lowest(std::span<const double> values);

// Categorical Bellman projection of r + gamma_n * Z onto the support.
void project_distribution(double reward_n, bool done, double gamma_n, std::span<const double> next_probs,
                          const ValueSupport& support, std::span<double> out);
std::vector<double> project_distribution(double reward_n, bool done, double gamma_n,
                                         std::span<const double> next_probs, const ValueSupport& support);

// -sum target * log softmax(logits) and its gradient w.r.t. the logits.
double cross_entropy(std::span<const double> logits, std::span<const double> target);
std::vector<double> cross_entropy_grad(std::span<const double> logits, std::span<const double> target);

}  // namespace tsc::rl
