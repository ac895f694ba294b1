#include "tsc/rl/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsc::rl {

std::vector<double> ActionValueDistribution::row(std::size_t action) const
{
    std::vector<double> r(atoms());
    for (std::size_t j = 0; j < r.size(); ++j) {
        r[j] = probs(static_cast<Eigen::Index>(action), static_cast<Eigen::Index>(j));
    }
    return r;
}

Eigen::MatrixXd dueling_aggregate(const Eigen::VectorXd& value_logits, const Eigen::MatrixXd& advantage_logits)
{
    if (advantage_logits.cols() != value_logits.size() || advantage_logits.rows() == 0) {
        throw std::invalid_argument("dueling_aggregate: advantage must be A x N with N = value size");
    }
    const Eigen::RowVectorXd mean_adv = advantage_logits.colwise().mean();
    Eigen::MatrixXd q = advantage_logits.rowwise() - mean_adv;
    q.rowwise() += value_logits.transpose();
    return q;
}

double log_sum_exp(std::span<const double> logits)
{
    const double peak = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double x : logits) {
        sum += std::exp(x - peak);
    }
    return peak + std::log(sum);
}

void softmax_inplace(std::span<double> logits)
{
    const double peak = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& x : logits) {
        x = std::exp(x - peak);
        sum += x;
    }
    for (double& x : logits) {
        x /= sum;
    }
}

std::vector<double> softmax(std::span<const double> logits)
{
    std::vector<double> p(logits.begin(), logits.end());
    softmax_inplace(p);
    return p;
}

double expected_value(std::span<const double> probs, const ValueSupport& support)
{
    double q = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        q += probs[i] * support.atom(i);
    }
    return q;
}

std::vector<double> expected_values(const ActionValueDistribution& dist, const ValueSupport& support)
{
    std::vector<double> q(dist.actions());
    for (std::size_t a = 0; a < q.size(); ++a) {
        q[a] = expected_value(dist.row(a), support);
    }
    return q;
}

std::size_t argmax_lowest(std::span<const double> values)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return best;
}

void project_distribution(double reward_n, bool done, double gamma_n, std::span<const double> next_probs,
                          const ValueSupport& support, std::span<double> out)
{
    const std::size_t n = support.n_atoms;
    std::fill(out.begin(), out.end(), 0.0);
    if (n == 1) {
        out[0] = 1.0;
        return;
    }
    const double delta = support.delta();
    const double top = static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        const double p = next_probs[j];
        if (p == 0.0) {
            continue;
        }
        const double tz = std::clamp(reward_n + (done ? 0.0 : gamma_n * support.atom(j)), support.v_min, support.v_max);
        const double b = std::clamp((tz - support.v_min) / delta, 0.0, top);
        const auto lower = static_cast<std::size_t>(std::floor(b));
        const auto upper = static_cast<std::size_t>(std::ceil(b));
        if (lower == upper) {
            out[lower] += p;
        } else {
            out[lower] += p * (static_cast<double>(upper) - b);
            out[upper] += p * (b - static_cast<double>(lower));
        }
    }
}

std::vector<double> project_distribution(double reward_n, bool done, double gamma_n,
                                         std::span<const double> next_probs, const ValueSupport& support)
{
    std::vector<double> out(support.n_atoms);
    project_distribution(reward_n, done, gamma_n, next_probs, support, out);
    return out;
}

namespace {

void check_target(std::span<const double> logits, std::span<const double> target)
{
    if (logits.size() != target.size() || logits.empty()) {
        throw std::invalid_argument("cross_entropy: logits and target sizes differ");
    }
    double mass = 0.0;
    for (double t : target) {
        if (t < 0.0 || !std::isfinite(t)) {
            throw std::invalid_argument("cross_entropy: target entries must be finite and nonnegative");
        }
        mass += t;
    }
    if (std::abs(mass - 1.0) > 1e-6) {
        throw std::invalid_argument("cross_entropy: target does not sum to 1");
    }
}

}  // namespace

double cross_entropy(std::span<const double> logits, std::span<const double> target)
{
    check_target(logits, target);
    const double lse = log_sum_exp(logits);
    double loss = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (target[i] != 0.0) {
            loss -= target[i] * (logits[i] - lse);
        }
    }
    return loss;
}

std::vector<double> cross_entropy_grad(std::span<const double> logits, std::span<const double> target)
{
    check_target(logits, target);
    std::vector<double> g = softmax(logits);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] -= target[i];
    }
    return g;
}

}  // namespace tsc::rl
