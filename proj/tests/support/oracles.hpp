#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Deliberately written as plain loops without reusing library code paths.

#include "tsc/rl/network.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace tsc::oracle {

struct RewardInputs {
    std::vector<double> avg_waiting;
    std::vector<double> remaining;
    std::vector<double> in_counts;
    std::vector<double> out_counts;
    std::vector<double> speeds;
    double stuck = 0.0;
    double fairness_weight = 2.0;
    bool speed_term = false;
    bool stuck_term = false;
};

// Line-by-line transcription of the reference pseudocode.
inline double reward_oracle(const RewardInputs& s)
{
    const double roads_count = static_cast<double>(s.avg_waiting.size());
    double reward = 0.0;
    double waiting_sum = 0.0;
    for (double w : s.avg_waiting) {
        waiting_sum += w;
    }
    reward -= waiting_sum / (roads_count - 1);
    double remaining_sum = 0.0;
    for (double r : s.remaining) {
        remaining_sum += r;
    }
    reward -= remaining_sum;
    const double hi = *std::max_element(s.avg_waiting.begin(), s.avg_waiting.end());
    const double lo = *std::min_element(s.avg_waiting.begin(), s.avg_waiting.end());
    reward -= (hi - lo) * s.fairness_weight;
    double in_sum = 0.0;
    for (double c : s.in_counts) {
        in_sum += c;
    }
    reward += in_sum;
    double out_sum = 0.0;
    for (double c : s.out_counts) {
        out_sum += c;
    }
    reward += out_sum;
    if (s.speed_term) {
        for (double v : s.speeds) {
            reward += v;
        }
    }
    if (s.stuck_term) {
        reward -= s.stuck;
    }
    return reward;
}

// Per-atom mass splitting with a triangular kernel: atom i receives
// p_j * max(0, 1 - |Tz_j - z_i| / dz) from every source atom j.
inline std::vector<double> projection_oracle(double reward, bool done, double gamma, const std::vector<double>& p,
                                             double v_min, double v_max)
{
    const std::size_t n = p.size();
    std::vector<double> out(n, 0.0);
    if (n == 1) {
        out[0] = 1.0;
        return out;
    }
    const double dz = (v_max - v_min) / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        const double zj = v_min + static_cast<double>(j) * dz;
        double tz = reward + (done ? 0.0 : gamma * zj);
        tz = std::min(v_max, std::max(v_min, tz));
        for (std::size_t i = 0; i < n; ++i) {
            const double zi = v_min + static_cast<double>(i) * dz;
            const double w = 1.0 - std::abs(tz - zi) / dz;
            if (w > 0.0) {
                out[i] += p[j] * w;
            }
        }
    }
    return out;
}

inline std::vector<double> softmax_oracle(const std::vector<double>& x)
{
    double m = x[0];
    for (double v : x) {
        m = std::max(m, v);
    }
    std::vector<double> e(x.size());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        e[i] = std::exp(x[i] - m);
        s += e[i];
    }
    for (double& v : e) {
        v /= s;
    }
    return e;
}

inline double cross_entropy_oracle(const std::vector<double>& logits, const std::vector<double>& target)
{
    const std::vector<double> p = softmax_oracle(logits);
    double loss = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (target[i] > 0.0) {
            loss -= target[i] * std::log(p[i]);
        }
    }
    return loss;
}

// Extended-precision cross-entropy, for finite differences below double
// round-off.
inline long double cross_entropy_extended(const std::vector<double>& logits, const std::vector<double>& target)
{
    long double hi = logits[0];
    for (double v : logits) {
        hi = std::max<long double>(hi, v);
    }
    long double z = 0.0L;
    for (double v : logits) {
        z += std::exp(static_cast<long double>(v) - hi);
    }
    const long double lse = hi + std::log(z);
    long double loss = 0.0L;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        loss -= static_cast<long double>(target[i]) * (static_cast<long double>(logits[i]) - lse);
    }
    return loss;
}

// Forward pass with explicit loops over each layer's parameter copy, in
// scalar type T. Returns logits indexed [a * N + j].
template <typename T>
std::vector<T> forward_oracle_as(const rl::Network& net, const std::vector<double>& x, const rl::NetworkNoise& noise)
{
    const rl::NetSpec& spec = net.spec();
    std::vector<T> h(x.begin(), x.end());
    const std::size_t layers = spec.hidden.size() + 1;
    for (std::size_t li = 0; li < layers; ++li) {
        const rl::NoisyLinearParams p = net.layer(li);
        const auto out = static_cast<Eigen::Index>(p.mu_w.rows());
        const auto in = static_cast<Eigen::Index>(p.mu_w.cols());
        std::vector<T> z(static_cast<std::size_t>(out));
        for (Eigen::Index o = 0; o < out; ++o) {
            T acc = p.mu_b(o);
            if (!noise.empty()) {
                acc += static_cast<T>(p.sigma_b(o)) * static_cast<T>(noise.layers[li].f_out(o));
            }
            for (Eigen::Index i = 0; i < in; ++i) {
                T w = p.mu_w(o, i);
                if (!noise.empty()) {
                    w += static_cast<T>(p.sigma_w(o, i)) * static_cast<T>(noise.layers[li].f_out(o)) *
                         static_cast<T>(noise.layers[li].f_in(i));
                }
                acc += w * h[static_cast<std::size_t>(i)];
            }
            z[static_cast<std::size_t>(o)] = acc;
        }
        if (li + 1 < layers) {
            for (T& v : z) {
                v = v > T(0) ? v : T(0);
            }
        }
        h = z;
    }
    if (!spec.dueling) {
        return h;
    }
    const std::size_t n = spec.support.n_atoms;
    const std::size_t a_count = spec.n_actions;
    std::vector<T> logits(a_count * n);
    for (std::size_t j = 0; j < n; ++j) {
        T mean = 0;
        for (std::size_t a = 0; a < a_count; ++a) {
            mean += h[n * (1 + a) + j];
        }
        mean /= static_cast<T>(a_count);
        for (std::size_t a = 0; a < a_count; ++a) {
            logits[a * n + j] = h[j] + h[n * (1 + a) + j] - mean;
        }
    }
    return logits;
}

inline std::vector<double> forward_oracle(const rl::Network& net, const std::vector<double>& x,
                                          const rl::NetworkNoise& noise)
{
    return forward_oracle_as<double>(net, x, noise);
}

// Upper-tail p-value of Pearson's statistic for observed vs expected counts.
inline double chi_square_p_value(const std::vector<double>& observed, const std::vector<double>& expected)
{
    double stat = 0.0;
    std::size_t cells = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] <= 0.0) {
            continue;
        }
        const double d = observed[i] - expected[i];
        stat += d * d / expected[i];
        ++cells;
    }
    const boost::math::chi_squared dist(static_cast<double>(cells - 1));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace tsc::oracle
