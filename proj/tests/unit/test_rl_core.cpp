#include "oracles.hpp"

#include "tsc/rl/adam.hpp"
#include "tsc/rl/checkpoint.hpp"
#include "tsc/rl/distribution.hpp"
#include "tsc/rl/network.hpp"
#include "tsc/rl/noisy_linear.hpp"
#include "tsc/rl/value_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

using namespace tsc;
using namespace tsc::rl;

namespace {

std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n, bool sparse)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(n);
    double s = 0.0;
    for (double& v : p) {
        v = (sparse && u(rng) < 0.5) ? 0.0 : u(rng);
        s += v;
    }
    if (s == 0.0) {
        p[0] = 1.0;
        s = 1.0;
    }
    for (double& v : p) {
        v /= s;
    }
    return p;
}

NetSpec small_spec(std::size_t in, std::size_t actions, std::size_t atoms, bool dueling, bool noisy)
{
    NetSpec s;
    s.input_dim = in;
    s.hidden = {6, 5};
    s.n_actions = actions;
    s.support = ValueSupport{-10.0, 10.0, atoms};
    s.dueling = dueling;
    s.noisy = noisy;
    return s;
}

// Number of parameters of the final layer, which sits at the end of the flat vector.
Eigen::Index last_layer_size(const NetSpec& s)
{
    const auto in = static_cast<Eigen::Index>(s.hidden.back());
    const auto out = static_cast<Eigen::Index>(s.head_dim());
    return (in * out + out) * (s.noisy ? 2 : 1);
}

}  // namespace

TEST(ValueSupport, AtomsEquallySpaced)
{
    const ValueSupport s{-600.0, 100.0, 51};
    const std::vector<double> z = s.atoms();
    ASSERT_EQ(z.size(), 51u);
    EXPECT_DOUBLE_EQ(z.front(), -600.0);
    EXPECT_DOUBLE_EQ(z.back(), 100.0);
    for (std::size_t i = 1; i < z.size(); ++i) {
        EXPECT_NEAR(z[i] - z[i - 1], 14.0, 1e-9);
    }
    EXPECT_THROW((ValueSupport{1.0, 1.0, 5}.validate()), std::invalid_argument);
    EXPECT_THROW((ValueSupport{0.0, 1.0, 0}.validate()), std::invalid_argument);
}

TEST(Dueling, IdenticalAdvantagesGiveValueRows)
{
    Eigen::VectorXd v(3);
    v << 0.5, -1.0, 2.0;
    Eigen::MatrixXd adv(2, 3);
    adv << 1.0, 2.0, 3.0, 1.0, 2.0, 3.0;
    const Eigen::MatrixXd q = dueling_aggregate(v, adv);
    for (Eigen::Index a = 0; a < 2; ++a) {
        EXPECT_TRUE(q.row(a).transpose().isApprox(v));
    }
}

TEST(Dueling, SingleActionAndHandCase)
{
    Eigen::VectorXd v(2);
    v << 3.0, 4.0;
    Eigen::MatrixXd adv(1, 2);
    adv << 7.0, -2.0;
    EXPECT_TRUE(dueling_aggregate(v, adv).row(0).transpose().isApprox(v));

    Eigen::VectorXd v1(1);
    v1 << 1.0;
    Eigen::MatrixXd adv1(2, 1);
    adv1 << 2.0, 0.0;
    const Eigen::MatrixXd q = dueling_aggregate(v1, adv1);
    // mean advantage 1 is subtracted: 1 + 2 - 1, 1 + 0 - 1
    EXPECT_DOUBLE_EQ(q(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(q(1, 0), 0.0);
    EXPECT_THROW(dueling_aggregate(v1, Eigen::MatrixXd(2, 3)), std::invalid_argument);
}

TEST(Dueling, CenteredAdvantagePerAtom)
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    for (int t = 0; t < 100; ++t) {
        Eigen::VectorXd v(7);
        Eigen::MatrixXd adv(4, 7);
        for (Eigen::Index j = 0; j < 7; ++j) {
            v(j) = g(rng);
            for (Eigen::Index a = 0; a < 4; ++a) {
                adv(a, j) = 10.0 * g(rng);
            }
        }
        const Eigen::MatrixXd q = dueling_aggregate(v, adv);
        for (Eigen::Index j = 0; j < 7; ++j) {
            double mean = 0.0;
            for (Eigen::Index a = 0; a < 4; ++a) {
                mean += q(a, j) - v(j);
            }
            EXPECT_NEAR(mean / 4.0, 0.0, 1e-12);
        }
    }
}

TEST(ExpectedValue, Examples)
{
    const ValueSupport sym{-1.0, 1.0, 3};
    const std::vector<double> uniform(3, 1.0 / 3.0);
    EXPECT_NEAR(expected_value(uniform, sym), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(expected_value(std::vector<double>{0.0, 0.5, 0.5}, sym), 0.0 * 0.5 + 1.0 * 0.5);
    const ValueSupport s{-600.0, 100.0, 51};
    std::vector<double> one_hot(51, 0.0);
    one_hot[17] = 1.0;
    EXPECT_DOUBLE_EQ(expected_value(one_hot, s), s.atom(17));
}

TEST(ArgmaxLowest, TiesGoToLowestIndex)
{
    EXPECT_EQ(argmax_lowest(std::vector<double>{1.0, 3.0, 3.0, 2.0}), 1u);
    EXPECT_EQ(argmax_lowest(std::vector<double>{0.5, 0.2}), 0u);
    EXPECT_EQ(argmax_lowest(std::vector<double>{4.0, 4.0, 4.0}), 0u);
}

TEST(Projection, DoneAtAtom)
{
    const ValueSupport s{-1.0, 1.0, 3};
    const std::vector<double> next{0.2, 0.3, 0.5};
    EXPECT_EQ(project_distribution(0.0, true, 0.99, next, s), (std::vector<double>{0.0, 1.0, 0.0}));
}

TEST(Projection, ClampsToVmax)
{
    const ValueSupport s{-1.0, 1.0, 3};
    const std::vector<double> next{0.2, 0.3, 0.5};
    EXPECT_EQ(project_distribution(5.0, true, 0.99, next, s), (std::vector<double>{0.0, 0.0, 1.0}));
}

TEST(Projection, SplitsBetweenNeighbours)
{
    const ValueSupport s{-1.0, 1.0, 3};
    const std::vector<double> out = project_distribution(0.5, false, 1.0, std::vector<double>{0.0, 1.0, 0.0}, s);
    const std::vector<double> expected = oracle::projection_oracle(0.5, false, 1.0, {0.0, 1.0, 0.0}, -1.0, 1.0);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(out[i], expected[i], 1e-15);
    }
    EXPECT_NEAR(out[1], 0.5, 1e-15);
    EXPECT_NEAR(out[2], 0.5, 1e-15);
}

TEST(Projection, MatchesBruteForceOracle)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> atoms(2, 61);
    for (int t = 0; t < 10000; ++t) {
        const double lo = -100.0 * u(rng);
        const double hi = lo + 0.5 + 150.0 * u(rng);
        const ValueSupport s{lo, hi, atoms(rng)};
        const double span = hi - lo;
        const double reward = lo - 0.3 * span + 1.6 * span * u(rng);
        const double gamma = u(rng) < 0.1 ? 1.0 : u(rng);
        const bool done = u(rng) < 0.2;
        const std::vector<double> p = random_distribution(rng, s.n_atoms, t % 2 == 0);
        const std::vector<double> out = project_distribution(reward, done, gamma, p, s);
        const std::vector<double> expected = oracle::projection_oracle(reward, done, gamma, p, lo, hi);
        double mass = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            ASSERT_NEAR(out[i], expected[i], 1e-9) << "case " << t << " atom " << i;
            ASSERT_GE(out[i], 0.0);
            mass += out[i];
        }
        ASSERT_NEAR(mass, 1.0, 1e-9);

        bool clamped = false;
        double next_mean = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            const double tz = reward + (done ? 0.0 : gamma * s.atom(j));
            clamped = clamped || (p[j] > 0.0 && (tz < lo || tz > hi));
            next_mean += p[j] * s.atom(j);
        }
        if (!clamped) {
            double out_mean = 0.0;
            for (std::size_t i = 0; i < out.size(); ++i) {
                out_mean += out[i] * s.atom(i);
            }
            ASSERT_NEAR(out_mean, reward + (done ? 0.0 : gamma * next_mean), 1e-9) << "case " << t;
        }
    }
}

TEST(Projection, SingleAtomIsDegenerate)
{
    const ValueSupport s{-1.0, 1.0, 1};
    EXPECT_EQ(project_distribution(3.0, false, 0.9, std::vector<double>{1.0}, s), std::vector<double>{1.0});
}

TEST(CrossEntropy, GradientExamples)
{
    const std::vector<double> g = cross_entropy_grad(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 0.0});
    EXPECT_DOUBLE_EQ(g[0], -0.5);
    EXPECT_DOUBLE_EQ(g[1], 0.5);

    const std::vector<double> logits{0.3, -1.2, 2.0, 0.1};
    const std::vector<double> target = oracle::softmax_oracle(logits);
    for (double v : cross_entropy_grad(logits, target)) {
        EXPECT_NEAR(v, 0.0, 1e-15);
    }
    EXPECT_THROW(cross_entropy(logits, std::vector<double>{0.5, 0.2, 0.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(cross_entropy_grad(logits, std::vector<double>{0.5, 0.5}), std::invalid_argument);
}

TEST(CrossEntropy, MatchesFiniteDifferences)
{
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 2.0);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(t % 20);
        std::vector<double> logits(n);
        for (double& v : logits) {
            v = g(rng);
        }
        const std::vector<double> target = random_distribution(rng, n, t % 3 == 0);
        const std::vector<double> grad = cross_entropy_grad(logits, target);
        EXPECT_NEAR(cross_entropy(logits, target), oracle::cross_entropy_oracle(logits, target), 1e-12);
        EXPECT_NEAR(std::accumulate(grad.begin(), grad.end(), 0.0), 0.0, 1e-12);
        const double h = 1e-6;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> up = logits;
            std::vector<double> down = logits;
            up[i] += h;
            down[i] -= h;
            const double fd = static_cast<double>(
                (oracle::cross_entropy_extended(up, target) - oracle::cross_entropy_extended(down, target)) /
                static_cast<long double>(up[i] - down[i]));
            const double denom = std::max({1e-3, std::abs(fd), std::abs(grad[i])});
            EXPECT_LT(std::abs(fd - grad[i]) / denom, 1e-6) << "trial " << t << " index " << i;
        }
    }
}

TEST(Noise, TransformValues)
{
    EXPECT_DOUBLE_EQ(noise_transform(4.0), 2.0);
    EXPECT_DOUBLE_EQ(noise_transform(-9.0), -3.0);
    EXPECT_EQ(noise_transform(0.0), 0.0);
}

TEST(Noise, ZeroSigmaLeavesMeanWeights)
{
    NoisyLinearParams p;
    p.mu_w = Eigen::MatrixXd::Random(3, 4);
    p.mu_b = Eigen::VectorXd::Random(3);
    p.sigma_w = Eigen::MatrixXd::Zero(3, 4);
    p.sigma_b = Eigen::VectorXd::Zero(3);
    Rng rng(5);
    const EffectiveLinear e = noisy_sample(p, rng);
    EXPECT_EQ(e.w, p.mu_w);
    EXPECT_EQ(e.b, p.mu_b);
}

TEST(Noise, FactorizedFormula)
{
    NoisyLinearParams p;
    p.mu_w = Eigen::MatrixXd::Random(2, 3);
    p.mu_b = Eigen::VectorXd::Random(2);
    p.sigma_w = Eigen::MatrixXd::Random(2, 3);
    p.sigma_b = Eigen::VectorXd::Random(2);
    Rng a(12);
    Rng b(12);
    const EffectiveLinear e = noisy_sample(p, a);
    const LayerNoise n = draw_layer_noise(3, 2, b);
    for (Eigen::Index o = 0; o < 2; ++o) {
        for (Eigen::Index i = 0; i < 3; ++i) {
            EXPECT_NEAR(e.w(o, i), p.mu_w(o, i) + p.sigma_w(o, i) * n.f_out(o) * n.f_in(i), 1e-15);
        }
        EXPECT_NEAR(e.b(o), p.mu_b(o) + p.sigma_b(o) * n.f_out(o), 1e-15);
    }
}

TEST(Noise, EffectiveWeightMeanConvergesToMu)
{
    NoisyLinearParams p;
    p.mu_w = Eigen::MatrixXd::Constant(2, 2, 0.25);
    p.mu_b = Eigen::VectorXd::Constant(2, -0.5);
    p.sigma_w = Eigen::MatrixXd::Constant(2, 2, 0.4);
    p.sigma_b = Eigen::VectorXd::Constant(2, 0.4);
    Rng rng(99);
    const int draws = 100000;
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(2, 2);
    Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(2, 2);
    for (int k = 0; k < draws; ++k) {
        const EffectiveLinear e = noisy_sample(p, rng);
        sum += e.w;
        sum_sq += e.w.cwiseAbs2();
    }
    const Eigen::MatrixXd mean = sum / draws;
    const Eigen::MatrixXd var = sum_sq / draws - mean.cwiseAbs2();
    for (Eigen::Index o = 0; o < 2; ++o) {
        for (Eigen::Index i = 0; i < 2; ++i) {
            const double se = std::sqrt(var(o, i) / draws);
            EXPECT_LT(std::abs(mean(o, i) - p.mu_w(o, i)), 3.0 * se);
        }
    }
}

TEST(Adam, ZeroGradientKeepsParameters)
{
    Eigen::VectorXd params = Eigen::VectorXd::Random(5);
    const Eigen::VectorXd before = params;
    OptimState st(5, AdamConfig{});
    adam_step(params, Eigen::VectorXd::Zero(5), st);
    EXPECT_EQ(params, before);
    EXPECT_EQ(st.step, 1u);
}

TEST(Adam, FirstStepMovesByLearningRate)
{
    Eigen::VectorXd params = Eigen::VectorXd::Zero(1);
    OptimState st(1, AdamConfig{});
    adam_step(params, Eigen::VectorXd::Ones(1), st);
    // bias-corrected m = g, v = g^2
    EXPECT_NEAR(params(0), -1e-3 * 1.0 / (1.0 + 1e-8), 1e-15);
}

TEST(Adam, DeterministicAndValidated)
{
    Eigen::VectorXd a = Eigen::VectorXd::Constant(4, 0.3);
    Eigen::VectorXd b = a;
    OptimState sa(4, AdamConfig{});
    OptimState sb(4, AdamConfig{});
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (int k = 0; k < 50; ++k) {
        Eigen::VectorXd grad(4);
        for (Eigen::Index i = 0; i < 4; ++i) {
            grad(i) = g(rng);
        }
        adam_step(a, grad, sa);
        adam_step(b, grad, sb);
    }
    EXPECT_EQ(a, b);
    EXPECT_THROW(adam_step(a, Eigen::VectorXd::Zero(3), sa), std::invalid_argument);
    Eigen::VectorXd bad = Eigen::VectorXd::Zero(4);
    bad(2) = std::nan("");
    EXPECT_THROW(adam_step(a, bad, sa), std::invalid_argument);
}

TEST(Network, RowsAreDistributions)
{
    const NetSpec s = small_spec(5, 3, 11, true, true);
    const Network net(s, 3);
    Rng rng(4);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> x(5);
        for (double& v : x) {
            v = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
        }
        const ActionValueDistribution d = net.forward_dist(x, t % 2 == 0 ? net.sample_noise(rng) : NetworkNoise{});
        ASSERT_EQ(d.actions(), 3u);
        ASSERT_EQ(d.atoms(), 11u);
        for (std::size_t a = 0; a < 3; ++a) {
            const std::vector<double> row = d.row(a);
            EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-9);
            for (double p : row) {
                EXPECT_GE(p, 0.0);
            }
        }
    }
}

TEST(Network, ZeroFinalLayerGivesUniformRows)
{
    for (bool dueling : {true, false}) {
        const NetSpec s = small_spec(4, 2, 7, dueling, true);
        Network net(s, 9);
        const Eigen::Index tail = last_layer_size(s);
        net.parameters().tail(tail).setZero();
        Rng rng(1);
        const ActionValueDistribution d = net.forward_dist(std::vector<double>{0.1, 0.2, 0.3, 0.4}, net.sample_noise(rng));
        for (Eigen::Index a = 0; a < 2; ++a) {
            for (Eigen::Index j = 0; j < 7; ++j) {
                EXPECT_NEAR(d.probs(a, j), 1.0 / 7.0, 1e-15);
            }
        }
    }
}

TEST(Network, ForwardMatchesLoopOracle)
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (bool dueling : {true, false}) {
        for (bool noisy : {true, false}) {
            const NetSpec s = small_spec(6, 3, 5, dueling, noisy);
            const Network net(s, 100 + (dueling ? 1 : 0) + (noisy ? 2 : 0));
            Rng nrng(7);
            const NetworkNoise noise = net.sample_noise(nrng);
            EXPECT_EQ(noise.empty(), !noisy);
            for (int t = 0; t < 10; ++t) {
                std::vector<double> x(6);
                for (double& v : x) {
                    v = u(rng);
                }
                const Eigen::Map<const Eigen::MatrixXd> col(x.data(), 6, 1);
                const Eigen::MatrixXd logits = net.forward_logits(col, noise);
                const std::vector<double> expected = oracle::forward_oracle(net, x, noise);
                ASSERT_EQ(static_cast<std::size_t>(logits.rows()), expected.size());
                for (std::size_t k = 0; k < expected.size(); ++k) {
                    EXPECT_NEAR(logits(static_cast<Eigen::Index>(k), 0), expected[k], 1e-12);
                }
            }
        }
    }
}

TEST(Network, EvaluationModeIsPure)
{
    const NetSpec s = small_spec(4, 2, 5, true, true);
    const Network net(s, 2);
    const std::vector<double> x{0.5, -0.5, 1.0, 0.0};
    const ActionValueDistribution a = net.forward_dist(x, {});
    const ActionValueDistribution b = net.forward_dist(x, {});
    EXPECT_EQ(a.probs, b.probs);
    EXPECT_THROW(net.forward_dist(std::vector<double>{1.0, 2.0}, {}), ShapeError);
}

TEST(Network, DefaultInitialisation)
{
    NetSpec s;
    s.input_dim = 21;
    s.n_actions = 4;
    const Network net(s, 1);
    const NoisyLinearParams first = net.layer(0);
    EXPECT_EQ(first.mu_w.rows(), 128);
    EXPECT_EQ(first.mu_w.cols(), 21);
    EXPECT_LE(first.mu_w.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(21.0));
    EXPECT_NEAR(first.sigma_w(0, 0), 0.5 / std::sqrt(21.0), 1e-15);
    EXPECT_EQ(net.layer(2).mu_w.rows(), static_cast<Eigen::Index>(51 * 5));
    EXPECT_THROW((Network(s, Eigen::VectorXd::Zero(3))), ShapeError);
}

TEST(Checkpoint, RoundTripReproducesEvaluationBitForBit)
{
    const NetSpec s = small_spec(5, 3, 9, true, true);
    const Network net(s, 77);
    std::stringstream buf;
    write_checkpoint(buf, net, "rainbow");
    const Checkpoint c = read_checkpoint(buf);
    EXPECT_EQ(c.label, "rainbow");
    EXPECT_TRUE(c.spec == s);
    const Network loaded = c.network();
    EXPECT_EQ(loaded.parameters(), net.parameters());
    const std::vector<double> x{0.1, 0.9, -0.3, 0.0, 2.0};
    EXPECT_EQ(loaded.forward_dist(x, {}).probs, net.forward_dist(x, {}).probs);
}

TEST(Checkpoint, RejectsCorruptInput)
{
    std::stringstream junk("not a checkpoint at all");
    EXPECT_THROW(read_checkpoint(junk), CheckpointError);

    const Network net(small_spec(3, 2, 3, false, false), 1);
    std::stringstream buf;
    write_checkpoint(buf, net, "x");
    std::string bytes = buf.str();
    std::stringstream truncated(bytes.substr(0, bytes.size() - 5));
    EXPECT_THROW(read_checkpoint(truncated), CheckpointError);
    bytes[8] = 9;  // version field
    std::stringstream bad_version(bytes);
    EXPECT_THROW(read_checkpoint(bad_version), CheckpointError);
    EXPECT_THROW(load_checkpoint("/nonexistent/dir/ckpt.bin"), CheckpointError);
}
