#include "tsc/cli/commands.hpp"

#include "tsc/feed/detection_event.hpp"
#include "tsc/feed/synthetic_feed.hpp"
#include "tsc/feed/aggregate.hpp"
#include "tsc/rl/checkpoint.hpp"
#include "tsc/sim/network_env.hpp"
#include "tsc/sim/observation.hpp"
#include "tsc/util/seeding.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace tsc::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kEvalStream = 0xe7a1;
constexpr std::uint64_t kAgentStream = 0xa93;
constexpr std::uint64_t kIntersectionStream = 0x1e7;
constexpr std::uint64_t kRoutingStream = 0x5017;
constexpr const char* kFixedTime = "fixed_time";

void reset_env(sim::IntersectionEnv& env, std::uint64_t seed, const std::shared_ptr<const sim::RoadArrivals>& schedule)
{
    if (schedule) {
        env.reset(seed, schedule);
    } else {
        env.reset(seed);
    }
}

std::unique_ptr<agent::Agent> make_agent(const RunConfig& config, agent::Variant variant, const sim::SimConfig& sim,
                                         std::uint64_t seed, std::size_t planned_episodes)
{
    agent::AgentConfig ac = config.agent;
    ac.variant = variant;
    auto a = std::make_unique<agent::Agent>(ac, config.net, sim::observation_size(sim.roads_count), sim.roads_count,
                                            seed);
    a->set_planned_steps(planned_episodes * agent::max_decisions_per_episode(sim));
    return a;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out.flush()) {
        throw std::runtime_error("failed writing '" + path.string() + "'");
    }
}

void write_resolved(const RunConfig& config, const fs::path& dir)
{
    write_text(dir / "resolved_config.json", resolved_config(config).dump(2) + "\n");
}

double mean_of(const std::vector<agent::EpisodeStats>& s, std::size_t begin, std::size_t end,
               double agent::EpisodeStats::*field)
{
    if (end <= begin) {
        return 0.0;
    }
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        sum += s[i].*field;
    }
    return sum / static_cast<double>(end - begin);
}

std::string hex(std::uint64_t v)
{
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct NetworkRun {
    std::vector<std::unique_ptr<agent::Agent>> agents;  // kept for checkpoints
    std::vector<agent::EpisodeStats> combined;
};

std::vector<std::uint64_t> intersection_bases(std::uint64_t seed, std::size_t n, bool eval)
{
    std::vector<std::uint64_t> bases(n);
    for (std::size_t i = 0; i < n; ++i) {
        bases[i] = eval ? derive_seed(seed, kEvalStream, i) : derive_seed(seed, kIntersectionStream, i);
    }
    return bases;
}

std::vector<agent::EpisodeStats> play_network(const RunConfig& config, std::vector<agent::Agent>& agents,
                                              std::uint64_t seed, std::size_t episodes, bool train)
{
    sim::NetworkEnv env(*config.network);
    const auto bases = intersection_bases(seed, env.size(), !train);
    const std::uint64_t routing = train ? derive_seed(seed, kRoutingStream) : derive_seed(seed, kRoutingStream, 1);
    const auto per = agent::run_multi_agent(env, agents, episodes, bases, routing, train);
    std::vector<agent::EpisodeStats> combined;
    for (std::size_t e = 0; e < episodes; ++e) {
        std::vector<agent::EpisodeStats> slice;
        for (const auto& s : per) {
            slice.push_back(s[e]);
        }
        combined.push_back(combine_intersections(slice));
    }
    return combined;
}

std::vector<agent::Agent> make_network_agents(const RunConfig& config, agent::Variant variant, std::uint64_t seed)
{
    std::vector<agent::Agent> agents;
    agents.reserve(config.network->intersections.size());
    for (std::size_t i = 0; i < config.network->intersections.size(); ++i) {
        const sim::SimConfig& s = config.network->intersections[i];
        agent::AgentConfig ac = config.agent;
        ac.variant = variant;
        agents.emplace_back(ac, config.net, sim::observation_size(s.roads_count), s.roads_count,
                            derive_seed(seed, kAgentStream, i));
        agents.back().set_planned_steps(config.episodes * agent::max_decisions_per_episode(s));
    }
    return agents;
}

void load_into(agent::Agent& a, const fs::path& path)
{
    const rl::Checkpoint ckpt = rl::load_checkpoint(path);
    if (ckpt.label != agent::to_string(a.config().variant)) {
        throw rl::CheckpointError("checkpoint '" + path.string() + "' holds variant '" + ckpt.label +
                                  "' but the config selects '" + std::string(agent::to_string(a.config().variant)) +
                                  "'");
    }
    if (!(ckpt.spec == a.online().spec())) {
        throw rl::CheckpointError("checkpoint '" + path.string() + "' network shape does not match the config");
    }
    a.online().parameters() = ckpt.parameters;
    a.target().parameters() = ckpt.parameters;
}

}  // namespace

std::uint64_t eval_episode_seed(std::uint64_t seed, std::size_t episode)
{
    return agent::episode_seed(derive_seed(seed, kEvalStream), episode);
}

std::shared_ptr<const sim::RoadArrivals> load_feed_schedule(const RunConfig& config)
{
    if (config.feed.source != FeedSource::file) {
        return nullptr;
    }
    if (config.network) {
        throw ConfigError("feed.source", "a file feed drives single-intersection runs only");
    }
    std::ifstream in(config.feed.path);
    if (!in) {
        throw ConfigError("feed.path", "cannot open feed file '" + config.feed.path + "'");
    }
    const auto events = feed::read_events(in);
    return feed::arrivals_from_events(events, config.feed.intersection_id, config.sim.roads_count);
}

TrainedAgent train_agent(const RunConfig& config, agent::Variant variant, std::uint64_t seed,
                         std::shared_ptr<const sim::RoadArrivals> schedule)
{
    TrainedAgent out;
    out.agent = make_agent(config, variant, config.sim, seed, config.episodes);
    sim::IntersectionEnv env(config.sim);
    out.stats.reserve(config.episodes);
    for (std::size_t e = 0; e < config.episodes; ++e) {
        reset_env(env, agent::episode_seed(seed, e), schedule);
        out.stats.push_back(agent::run_episode(*out.agent, env, true, e));
    }
    return out;
}

std::vector<agent::EpisodeStats> evaluate_agent(agent::Agent& a, const RunConfig& config, std::uint64_t seed,
                                                std::shared_ptr<const sim::RoadArrivals> schedule)
{
    sim::IntersectionEnv env(config.sim);
    std::vector<agent::EpisodeStats> stats;
    for (std::size_t e = 0; e < config.eval_episodes; ++e) {
        reset_env(env, eval_episode_seed(seed, e), schedule);
        stats.push_back(agent::run_episode(a, env, false, e));
    }
    return stats;
}

std::vector<agent::EpisodeStats> run_fixed_time(const RunConfig& config, std::uint64_t seed, bool eval,
                                                std::shared_ptr<const sim::RoadArrivals> schedule)
{
    sim::IntersectionEnv env(config.sim);
    const std::size_t n = eval ? config.eval_episodes : config.episodes;
    std::vector<agent::EpisodeStats> stats;
    for (std::size_t e = 0; e < n; ++e) {
        reset_env(env, eval ? eval_episode_seed(seed, e) : agent::episode_seed(seed, e), schedule);
        stats.push_back(agent::run_fixed_time_episode(env, e));
    }
    return stats;
}

agent::EpisodeStats combine_intersections(const std::vector<agent::EpisodeStats>& per)
{
    agent::EpisodeStats c;
    if (per.empty()) {
        return c;
    }
    c.episode = per.front().episode;
    double loss = 0.0;
    std::size_t losses = 0;
    for (const agent::EpisodeStats& s : per) {
        c.total_reward += s.total_reward;
        c.mean_waiting_s += s.mean_waiting_s;
        c.throughput += s.throughput;
        c.reward_terms += s.reward_terms;
        c.fairness_mean += s.fairness_mean;
        c.decisions += s.decisions;
        c.arrival_checksum = mix_seed(c.arrival_checksum ^ s.arrival_checksum);
        if (s.loss_mean) {
            loss += *s.loss_mean;
            ++losses;
        }
    }
    const auto n = static_cast<double>(per.size());
    c.mean_waiting_s /= n;
    c.fairness_mean /= n;
    if (losses > 0) {
        c.loss_mean = loss / static_cast<double>(losses);
    }
    return c;
}

void run_parallel(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& task)
{
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n = std::min(std::max<std::size_t>(threads, 1), std::max<std::size_t>(count, 1));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n; ++t) {
            pool.emplace_back(worker);
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }
    for (const std::exception_ptr& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

std::uint64_t combine_checksums(const std::vector<agent::EpisodeStats>& stats)
{
    std::uint64_t h = 0;
    for (const agent::EpisodeStats& s : stats) {
        h = mix_seed(h ^ s.arrival_checksum);
    }
    return h;
}

fs::path checkpoint_path(const fs::path& out_dir, std::uint64_t seed, std::optional<std::size_t> intersection)
{
    std::string name = "checkpoint_seed" + std::to_string(seed);
    if (intersection) {
        name += "_i" + std::to_string(*intersection);
    }
    return out_dir / (name + ".bin");
}

OutputDir::OutputDir(fs::path dir, const std::string& command) : dir_(std::move(dir))
{
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
        throw std::runtime_error("cannot create output directory '" + dir_.string() + "'");
    }
    write_text(dir_ / kIncompleteMarker, command + " did not finish; outputs in this directory are partial\n");
}

void OutputDir::commit()
{
    std::error_code ec;
    fs::remove(dir_ / kIncompleteMarker, ec);
}

fs::path resolve_output_dir(const RunConfig& config, const std::optional<std::string>& cli_out)
{
    if (cli_out && !cli_out->empty()) {
        return *cli_out;
    }
    if (const char* env = std::getenv(kEnvOutDir); env != nullptr && *env != '\0') {
        return env;
    }
    return config.output_dir;
}

std::vector<MetricsRow> cmd_train(const RunConfig& config, const fs::path& out_dir)
{
    config.validate();
    OutputDir out(out_dir, "train");
    write_resolved(config, out.path());
    const auto schedule = load_feed_schedule(config);
    const agent::Variant variant = config.agent.variant;
    const std::string label(agent::to_string(variant));

    std::vector<std::vector<MetricsRow>> per_seed(config.seeds.size());
    run_parallel(config.seeds.size(), config.threads, [&](std::size_t k) {
        const std::uint64_t seed = config.seeds[k];
        std::vector<agent::EpisodeStats> stats;
        if (config.network) {
            auto agents = make_network_agents(config, variant, seed);
            stats = play_network(config, agents, seed, config.episodes, true);
            for (std::size_t i = 0; i < agents.size(); ++i) {
                rl::save_checkpoint(checkpoint_path(out.path(), seed, i), agents[i].online(), label);
            }
        } else {
            TrainedAgent t = train_agent(config, variant, seed, schedule);
            stats = std::move(t.stats);
            rl::save_checkpoint(checkpoint_path(out.path(), seed), t.agent->online(), label);
        }
        for (const agent::EpisodeStats& s : stats) {
            per_seed[k].push_back(to_row(seed, label, s));
        }
    });
    std::vector<MetricsRow> rows;
    for (auto& r : per_seed) {
        rows.insert(rows.end(), r.begin(), r.end());
    }
    write_metrics(rows, out.path() / "metrics.csv");
    out.commit();
    return rows;
}

std::vector<MetricsRow> cmd_eval(const RunConfig& config, const fs::path& out_dir)
{
    config.validate();
    if (!config.checkpoint.empty() && config.seeds.size() != 1) {
        throw ConfigError("checkpoint", "an explicit checkpoint needs exactly one seed");
    }
    OutputDir out(out_dir, "eval");
    write_resolved(config, out.path());
    const auto schedule = load_feed_schedule(config);
    const agent::Variant variant = config.agent.variant;
    const std::string label(agent::to_string(variant));

    std::vector<std::vector<MetricsRow>> per_seed(config.seeds.size());
    run_parallel(config.seeds.size(), config.threads, [&](std::size_t k) {
        const std::uint64_t seed = config.seeds[k];
        std::vector<agent::EpisodeStats> stats;
        if (config.network) {
            auto agents = make_network_agents(config, variant, seed);
            for (std::size_t i = 0; i < agents.size(); ++i) {
                load_into(agents[i], checkpoint_path(out.path(), seed, i));
            }
            stats = play_network(config, agents, seed, config.eval_episodes, false);
        } else {
            auto a = make_agent(config, variant, config.sim, seed, config.episodes);
            load_into(*a, config.checkpoint.empty() ? checkpoint_path(out.path(), seed) : fs::path(config.checkpoint));
            stats = evaluate_agent(*a, config, seed, schedule);
        }
        for (const agent::EpisodeStats& s : stats) {
            per_seed[k].push_back(to_row(seed, label, s));
        }
    });
    std::vector<MetricsRow> rows;
    for (auto& r : per_seed) {
        rows.insert(rows.end(), r.begin(), r.end());
    }
    write_metrics(rows, out.path() / "eval_metrics.csv");
    out.commit();
    return rows;
}

CompareResult cmd_compare(const RunConfig& config, const fs::path& out_dir)
{
    config.validate();
    if (config.network) {
        throw ConfigError("network", "compare runs on a single intersection; remove the network section");
    }
    OutputDir out(out_dir, "compare");
    write_resolved(config, out.path());
    const auto schedule = load_feed_schedule(config);

    const std::size_t n_seeds = config.seeds.size();
    const std::size_t n_var = config.variants.size();
    struct Slot {
        std::vector<agent::EpisodeStats> train;
        std::vector<agent::EpisodeStats> eval;
    };
    std::vector<Slot> slots(n_seeds * n_var);
    run_parallel(slots.size(), config.threads, [&](std::size_t k) {
        const std::uint64_t seed = config.seeds[k / n_var];
        const std::string& name = config.variants[k % n_var];
        Slot& slot = slots[k];
        if (name == kFixedTime) {
            slot.train = run_fixed_time(config, seed, false, schedule);
            slot.eval = run_fixed_time(config, seed, true, schedule);
        } else {
            TrainedAgent t = train_agent(config, agent::parse_variant(name), seed, schedule);
            slot.train = std::move(t.stats);
            slot.eval = evaluate_agent(*t.agent, config, seed, schedule);
        }
    });

    CompareResult result;
    result.window = std::min<std::size_t>(100, config.episodes);
    const std::size_t w = result.window;
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    nlohmann::ordered_json winners = nlohmann::ordered_json::array();
    for (std::size_t s = 0; s < n_seeds; ++s) {
        const std::uint64_t seed = config.seeds[s];
        std::size_t best_reward = 0;
        std::size_t best_wait = 0;
        for (std::size_t v = 0; v < n_var; ++v) {
            const Slot& slot = slots[s * n_var + v];
            const std::string& name = config.variants[v];
            const std::size_t n = slot.train.size();
            VariantSummary e;
            e.seed = seed;
            e.variant = name;
            e.first_window_mean_reward = mean_of(slot.train, 0, w, &agent::EpisodeStats::total_reward);
            e.last_window_mean_reward = mean_of(slot.train, n - w, n, &agent::EpisodeStats::total_reward);
            e.last_window_mean_waiting_s = mean_of(slot.train, n - w, n, &agent::EpisodeStats::mean_waiting_s);
            e.mean_waiting_s = mean_of(slot.train, 0, n, &agent::EpisodeStats::mean_waiting_s);
            if (!slot.eval.empty()) {
                e.eval_mean_reward = mean_of(slot.eval, 0, slot.eval.size(), &agent::EpisodeStats::total_reward);
                e.eval_mean_waiting_s =
                    mean_of(slot.eval, 0, slot.eval.size(), &agent::EpisodeStats::mean_waiting_s);
            }
            e.arrival_checksum = combine_checksums(slot.train);
            e.eval_arrival_checksum = combine_checksums(slot.eval);
            for (const auto& st : slot.train) {
                result.rows.push_back(to_row(seed, name, st));
            }
            for (const auto& st : slot.eval) {
                result.eval_rows.push_back(to_row(seed, name, st));
            }

            nlohmann::ordered_json j;
            j["seed"] = e.seed;
            j["variant"] = e.variant;
            j["first_window_mean_reward"] = e.first_window_mean_reward;
            j["last_window_mean_reward"] = e.last_window_mean_reward;
            j["last_window_mean_waiting_s"] = e.last_window_mean_waiting_s;
            j["mean_waiting_s"] = e.mean_waiting_s;
            j["eval_mean_reward"] = e.eval_mean_reward ? nlohmann::ordered_json(*e.eval_mean_reward) : nullptr;
            j["eval_mean_waiting_s"] =
                e.eval_mean_waiting_s ? nlohmann::ordered_json(*e.eval_mean_waiting_s) : nullptr;
            j["arrival_checksum"] = hex(e.arrival_checksum);
            j["eval_arrival_checksum"] = hex(e.eval_arrival_checksum);
            entries.push_back(j);

            const VariantSummary& br = v == 0 ? e : result.entries[s * n_var + best_reward];
            if (v > 0 && e.last_window_mean_reward > br.last_window_mean_reward) {
                best_reward = v;
            }
            const VariantSummary& bw = v == 0 ? e : result.entries[s * n_var + best_wait];
            if (v > 0 && e.last_window_mean_waiting_s < bw.last_window_mean_waiting_s) {
                best_wait = v;
            }
            result.entries.push_back(std::move(e));
        }
        winners.push_back({{"seed", seed},
                           {"by_reward", config.variants[best_reward]},
                           {"by_waiting", config.variants[best_wait]}});
    }

    // Variants ranked by their across-seed mean of the last-window figures.
    auto ranking = [&](double VariantSummary::*field, bool higher_better) {
        std::vector<double> mean(n_var, 0.0);
        for (const VariantSummary& e : result.entries) {
            const auto v = static_cast<std::size_t>(
                std::find(config.variants.begin(), config.variants.end(), e.variant) - config.variants.begin());
            mean[v] += e.*field / static_cast<double>(n_seeds);
        }
        std::vector<std::size_t> order(n_var);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return higher_better ? mean[a] > mean[b] : mean[a] < mean[b];
        });
        nlohmann::ordered_json list = nlohmann::ordered_json::array();
        for (std::size_t v : order) {
            list.push_back({{"variant", config.variants[v]}, {"mean", mean[v]}});
        }
        return list;
    };

    result.summary["episodes"] = config.episodes;
    result.summary["window"] = w;
    result.summary["eval_episodes"] = config.eval_episodes;
    result.summary["entries"] = entries;
    result.summary["winners"] = winners;
    result.summary["ranking"] = {
        {"by_reward", ranking(&VariantSummary::last_window_mean_reward, true)},
        {"by_waiting", ranking(&VariantSummary::last_window_mean_waiting_s, false)}};

    write_metrics(result.rows, out.path() / "compare.csv");
    if (config.eval_episodes > 0) {
        write_metrics(result.eval_rows, out.path() / "compare_eval.csv");
    }
    write_text(out.path() / "summary.json", result.summary.dump(2) + "\n");
    out.commit();
    return result;
}

fs::path cmd_gen_feed(const RunConfig& config, const fs::path& out_dir)
{
    config.validate();
    OutputDir out(out_dir, "gen-feed");
    feed::SyntheticFeedOptions options;
    options.intersection_id = config.feed.intersection_id;
    options.service_delay_s = config.feed.service_delay_s;
    options.speed_min_mps = config.feed.speed_min_mps;
    options.speed_max_mps = config.feed.speed_max_mps;
    const double duration = config.feed.duration_s.value_or(config.sim.episode_length_s);
    const auto events = feed::gen_synthetic_feed(config.sim.arrival_rates, duration, config.seeds.front(), options);
    const fs::path target = out.path() / config.feed.output;
    write_text(target, feed::to_ndjson(events));
    out.commit();
    return target;
}

}  // namespace tsc::cli
