#include "tsc/cli/run_config.hpp"

#include "tsc/sim/observation.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace tsc::cli {

namespace {

using json = nlohmann::json;

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

// Message of a ConfigError without its "key: " prefix.
std::string bare_message(const ConfigError& e)
{
    std::string what = e.what();
    const std::string prefix = e.key() + ": ";
    return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path))
    {
        if (!node_.is_object()) {
            throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
        }
    }

    const std::string& path() const { return path_; }

    const json* find(const std::string& key)
    {
        known_.push_back(key);
        const auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_number()) {
                throw ConfigError(join(path_, key), "expected a number");
            }
            out = v->get<double>();
        }
    }

    void count(const std::string& key, std::size_t& out)
    {
        if (const json* v = find(key)) {
            out = as_count(*v, join(path_, key));
        }
    }

    void optional_count(const std::string& key, std::optional<std::size_t>& out)
    {
        if (const json* v = find(key)) {
            if (v->is_null()) {
                out.reset();
            } else {
                out = as_count(*v, join(path_, key));
            }
        }
    }

    void optional_number(const std::string& key, std::optional<double>& out)
    {
        if (const json* v = find(key)) {
            if (v->is_null()) {
                out.reset();
            } else if (!v->is_number()) {
                throw ConfigError(join(path_, key), "expected a number or null");
            } else {
                out = v->get<double>();
            }
        }
    }

    void boolean(const std::string& key, bool& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) {
                throw ConfigError(join(path_, key), "expected true or false");
            }
            out = v->get<bool>();
        }
    }

    void text(const std::string& key, std::string& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_string()) {
                throw ConfigError(join(path_, key), "expected a string");
            }
            out = v->get<std::string>();
        }
    }

    void numbers(const std::string& key, std::vector<double>& out)
    {
        if (const json* v = find(key)) {
            const std::string where = join(path_, key);
            if (!v->is_array()) {
                throw ConfigError(where, "expected an array of numbers");
            }
            out.clear();
            for (const json& e : *v) {
                if (!e.is_number()) {
                    throw ConfigError(where, "expected an array of numbers");
                }
                out.push_back(e.get<double>());
            }
        }
    }

    template <typename T>
    void counts(const std::string& key, std::vector<T>& out)
    {
        if (const json* v = find(key)) {
            const std::string where = join(path_, key);
            if (!v->is_array()) {
                throw ConfigError(where, "expected an array of nonnegative integers");
            }
            out.clear();
            for (const json& e : *v) {
                out.push_back(static_cast<T>(as_count(e, where)));
            }
        }
    }

    void strings(const std::string& key, std::vector<std::string>& out)
    {
        if (const json* v = find(key)) {
            const std::string where = join(path_, key);
            if (!v->is_array()) {
                throw ConfigError(where, "expected an array of strings");
            }
            out.clear();
            for (const json& e : *v) {
                if (!e.is_string()) {
                    throw ConfigError(where, "expected an array of strings");
                }
                out.push_back(e.get<std::string>());
            }
        }
    }

    // Rejects any key that no reader asked for.
    void finish() const
    {
        for (const auto& [key, value] : node_.items()) {
            if (std::find(known_.begin(), known_.end(), key) != known_.end()) {
                continue;
            }
            std::string message = "unknown key";
            const std::string* best = nullptr;
            std::size_t best_distance = std::numeric_limits<std::size_t>::max();
            for (const std::string& candidate : known_) {
                const std::size_t d = edit_distance(key, candidate);
                if (d < best_distance) {
                    best_distance = d;
                    best = &candidate;
                }
            }
            if (best != nullptr && best_distance <= std::max<std::size_t>(2, key.size() / 3)) {
                message += "; did you mean '" + join(path_, *best) + "'?";
            }
            throw ConfigError(join(path_, key), message);
        }
    }

private:
    const json& node_;
    std::string path_;
    std::vector<std::string> known_;

    static std::uint64_t as_count(const json& v, const std::string& where)
    {
        if (v.is_number_unsigned()) {
            return v.get<std::uint64_t>();
        }
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
            return static_cast<std::uint64_t>(v.get<std::int64_t>());
        }
        throw ConfigError(where, "expected a nonnegative integer");
    }
};

sim::SimConfig parse_sim(const json& node, const std::string& path, sim::SimConfig c)
{
    Section s(node, path);
    s.count("roads_count", c.roads_count);
    s.number("green_duration_s", c.green_duration_s);
    s.number("inter_green_s", c.inter_green_s);
    s.number("saturation_headway_s", c.saturation_headway_s);
    const bool rates_given = node.contains("arrival_rates");
    s.numbers("arrival_rates", c.arrival_rates);
    if (!rates_given && c.arrival_rates.size() != c.roads_count) {
        c.arrival_rates.assign(c.roads_count, sim::kDefaultArrivalRate);
    }
    s.number("episode_length_s", c.episode_length_s);
    s.optional_count("queue_capacity", c.queue_capacity);
    s.number("fairness_weight", c.fairness_weight);
    s.boolean("enable_speed_term", c.enable_speed_term);
    s.boolean("enable_stuck_term", c.enable_stuck_term);
    s.number("stuck_probability", c.stuck_probability);
    if (const json* scale = s.find("observation_scale")) {
        Section o(*scale, join(path, "observation_scale"));
        o.number("queue", c.scale.queue);
        o.number("waiting_s", c.scale.waiting_s);
        o.number("count", c.scale.count);
        o.finish();
    }
    s.finish();
    try {
        c.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(join(path, e.key()), bare_message(e));
    }
    return c;
}

sim::NetworkConfig parse_network(const json& node, const sim::SimConfig& base)
{
    Section s(node, "network");
    sim::NetworkConfig net;
    const json* list = s.find("intersections");
    if (list == nullptr) {
        throw ConfigError("network.intersections", "required when a network is configured");
    }
    if (list->is_number_unsigned() || list->is_number_integer()) {
        std::size_t n = 0;
        s.count("intersections", n);
        net.intersections.assign(n, base);
    } else if (list->is_array()) {
        for (std::size_t i = 0; i < list->size(); ++i) {
            net.intersections.push_back(
                parse_sim((*list)[i], "network.intersections[" + std::to_string(i) + "]", base));
        }
    } else {
        throw ConfigError("network.intersections", "expected a count or an array of sim overrides");
    }
    if (const json* links = s.find("links")) {
        if (!links->is_array()) {
            throw ConfigError("network.links", "expected an array");
        }
        for (std::size_t k = 0; k < links->size(); ++k) {
            Section l((*links)[k], "network.links[" + std::to_string(k) + "]");
            sim::Link link;
            l.count("from_intersection", link.from_intersection);
            l.count("from_road", link.from_road);
            l.count("to_intersection", link.to_intersection);
            l.count("to_road", link.to_road);
            l.number("travel_time_s", link.travel_time_s);
            l.number("turn_fraction", link.turn_fraction);
            l.finish();
            net.links.push_back(link);
        }
    }
    s.finish();
    net.validate();
    return net;
}

agent::AgentConfig parse_agent(const json& node)
{
    Section s(node, "agent");
    agent::AgentConfig c;
    std::string variant(agent::to_string(c.variant));
    s.text("variant", variant);
    c.variant = agent::parse_variant(variant);
    s.number("gamma", c.gamma);
    s.count("n_step", c.n_step);
    s.count("batch_size", c.batch_size);
    s.count("buffer_capacity", c.buffer_capacity);
    s.count("target_sync_interval", c.target_sync_interval);
    s.count("train_start", c.train_start);
    s.number("beta_start", c.beta_start);
    s.number("beta_end", c.beta_end);
    s.number("alpha", c.alpha);
    s.number("priority_eps", c.priority_eps);
    s.number("epsilon_start", c.epsilon_start);
    s.number("epsilon_end", c.epsilon_end);
    s.number("epsilon_fraction", c.epsilon_fraction);
    s.number("reward_scale", c.reward_scale);
    s.number("max_grad_norm", c.max_grad_norm);
    s.boolean("bootstrap_on_time_limit", c.bootstrap_on_time_limit);
    s.number("lr", c.adam.lr);
    s.number("adam_beta1", c.adam.beta1);
    s.number("adam_beta2", c.adam.beta2);
    s.number("adam_eps", c.adam.eps);
    s.finish();
    c.validate();
    return c;
}

rl::NetSpec parse_net(const json& node)
{
    Section s(node, "net");
    rl::NetSpec spec;
    s.counts("hidden", spec.hidden);
    s.number("v_min", spec.support.v_min);
    s.number("v_max", spec.support.v_max);
    s.count("n_atoms", spec.support.n_atoms);
    s.boolean("dueling", spec.dueling);
    s.boolean("noisy", spec.noisy);
    s.number("sigma_init", spec.sigma_init);
    s.finish();
    return spec;
}

FeedConfig parse_feed(const json& node)
{
    Section s(node, "feed");
    FeedConfig f;
    std::string source = "synthetic";
    s.text("source", source);
    if (source == "synthetic") {
        f.source = FeedSource::synthetic;
    } else if (source == "file") {
        f.source = FeedSource::file;
    } else {
        throw ConfigError("feed.source", "expected \"synthetic\" or \"file\", got \"" + source + "\"");
    }
    s.text("path", f.path);
    s.text("output", f.output);
    s.optional_number("duration_s", f.duration_s);
    s.text("intersection_id", f.intersection_id);
    s.number("service_delay_s", f.service_delay_s);
    s.number("speed_min_mps", f.speed_min_mps);
    s.number("speed_max_mps", f.speed_max_mps);
    s.finish();
    return f;
}

nlohmann::ordered_json sim_json(const sim::SimConfig& c)
{
    nlohmann::ordered_json j;
    j["roads_count"] = c.roads_count;
    j["green_duration_s"] = c.green_duration_s;
    j["inter_green_s"] = c.inter_green_s;
    j["saturation_headway_s"] = c.saturation_headway_s;
    j["arrival_rates"] = c.arrival_rates;
    j["episode_length_s"] = c.episode_length_s;
    j["queue_capacity"] = c.queue_capacity ? nlohmann::ordered_json(*c.queue_capacity) : nlohmann::ordered_json(nullptr);
    j["fairness_weight"] = c.fairness_weight;
    j["enable_speed_term"] = c.enable_speed_term;
    j["enable_stuck_term"] = c.enable_stuck_term;
    j["stuck_probability"] = c.stuck_probability;
    j["observation_scale"] = {{"queue", c.scale.queue}, {"waiting_s", c.scale.waiting_s}, {"count", c.scale.count}};
    return j;
}

}  // namespace

std::size_t edit_distance(const std::string& a, const std::string& b)
{
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) {
        row[j] = j;
    }
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

void RunConfig::validate() const
{
    try {
        sim.validate();
    } catch (const ConfigError& e) {
        throw ConfigError("sim." + e.key(), bare_message(e));
    }
    if (network) {
        network->validate();
    }
    agent.validate();
    rl::NetSpec spec = net;
    spec.input_dim = sim::observation_size(sim.roads_count);
    spec.n_actions = sim.roads_count;
    try {
        spec.validate();
    } catch (const std::exception& e) {
        throw ConfigError("net", e.what());
    }
    if (episodes < 1) {
        throw ConfigError("episodes", "must be at least 1");
    }
    if (seeds.empty()) {
        throw ConfigError("seeds", "at least one seed is required");
    }
    if (threads < 1) {
        throw ConfigError("threads", "must be at least 1");
    }
    if (variants.empty()) {
        throw ConfigError("variants", "at least one variant is required");
    }
    std::set<std::string> seen;
    for (const std::string& v : variants) {
        if (std::find(kCompareVariants.begin(), kCompareVariants.end(), v) == kCompareVariants.end()) {
            throw ConfigError("variants", "unknown variant '" + v + "' (rainbow | vanilla_dqn | fixed_time)");
        }
        if (!seen.insert(v).second) {
            throw ConfigError("variants", "variant '" + v + "' listed twice");
        }
    }
    if (feed.source == FeedSource::file && feed.path.empty()) {
        throw ConfigError("feed.path", "required when feed.source is \"file\"");
    }
    if (feed.duration_s && !(*feed.duration_s >= 0.0)) {
        throw ConfigError("feed.duration_s", "must be nonnegative");
    }
    if (!(feed.service_delay_s >= 0.0)) {
        throw ConfigError("feed.service_delay_s", "must be nonnegative");
    }
    if (!(feed.speed_min_mps >= 0.0 && feed.speed_max_mps >= feed.speed_min_mps)) {
        throw ConfigError("feed.speed_min_mps", "speed range must satisfy 0 <= min <= max");
    }
}

RunConfig parse_config(const nlohmann::json& doc)
{
    Section root(doc, "");
    RunConfig c;
    if (const json* sim = root.find("sim")) {
        c.sim = parse_sim(*sim, "sim", c.sim);
    }
    if (const json* network = root.find("network"); network != nullptr && !network->is_null()) {
        c.network = parse_network(*network, c.sim);
    }
    if (const json* agent = root.find("agent")) {
        c.agent = parse_agent(*agent);
    }
    if (const json* net = root.find("net")) {
        c.net = parse_net(*net);
    }
    root.count("episodes", c.episodes);
    root.count("eval_episodes", c.eval_episodes);
    root.counts("seeds", c.seeds);
    root.text("output_dir", c.output_dir);
    root.text("checkpoint", c.checkpoint);
    root.strings("variants", c.variants);
    root.count("threads", c.threads);
    if (const json* feed = root.find("feed")) {
        c.feed = parse_feed(*feed);
    }
    root.finish();
    c.validate();
    return c;
}

RunConfig parse_config_text(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

RunConfig parse_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("<file>", "cannot open config file '" + path.string() + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

nlohmann::ordered_json resolved_config(const RunConfig& c)
{
    nlohmann::ordered_json j;
    j["sim"] = sim_json(c.sim);
    if (c.network) {
        nlohmann::ordered_json net;
        net["intersections"] = nlohmann::ordered_json::array();
        for (const sim::SimConfig& s : c.network->intersections) {
            net["intersections"].push_back(sim_json(s));
        }
        net["links"] = nlohmann::ordered_json::array();
        for (const sim::Link& l : c.network->links) {
            net["links"].push_back({{"from_intersection", l.from_intersection},
                                    {"from_road", l.from_road},
                                    {"to_intersection", l.to_intersection},
                                    {"to_road", l.to_road},
                                    {"travel_time_s", l.travel_time_s},
                                    {"turn_fraction", l.turn_fraction}});
        }
        j["network"] = net;
    } else {
        j["network"] = nullptr;
    }
    const agent::AgentConfig& a = c.agent;
    nlohmann::ordered_json agent;
    agent["variant"] = agent::to_string(a.variant);
    agent["gamma"] = a.gamma;
    agent["n_step"] = a.n_step;
    agent["batch_size"] = a.batch_size;
    agent["buffer_capacity"] = a.buffer_capacity;
    agent["target_sync_interval"] = a.target_sync_interval;
    agent["train_start"] = a.train_start;
    agent["beta_start"] = a.beta_start;
    agent["beta_end"] = a.beta_end;
    agent["alpha"] = a.alpha;
    agent["priority_eps"] = a.priority_eps;
    agent["epsilon_start"] = a.epsilon_start;
    agent["epsilon_end"] = a.epsilon_end;
    agent["epsilon_fraction"] = a.epsilon_fraction;
    agent["reward_scale"] = a.reward_scale;
    agent["max_grad_norm"] = a.max_grad_norm;
    agent["bootstrap_on_time_limit"] = a.bootstrap_on_time_limit;
    agent["lr"] = a.adam.lr;
    agent["adam_beta1"] = a.adam.beta1;
    agent["adam_beta2"] = a.adam.beta2;
    agent["adam_eps"] = a.adam.eps;
    j["agent"] = agent;
    nlohmann::ordered_json net;
    net["hidden"] = c.net.hidden;
    net["v_min"] = c.net.support.v_min;
    net["v_max"] = c.net.support.v_max;
    net["n_atoms"] = c.net.support.n_atoms;
    net["dueling"] = c.net.dueling;
    net["noisy"] = c.net.noisy;
    net["sigma_init"] = c.net.sigma_init;
    j["net"] = net;
    j["episodes"] = c.episodes;
    j["eval_episodes"] = c.eval_episodes;
    j["seeds"] = c.seeds;
    j["output_dir"] = c.output_dir;
    j["checkpoint"] = c.checkpoint;
    j["variants"] = c.variants;
    j["threads"] = c.threads;
    nlohmann::ordered_json feed;
    feed["source"] = c.feed.source == FeedSource::file ? "file" : "synthetic";
    feed["path"] = c.feed.path;
    feed["output"] = c.feed.output;
    feed["duration_s"] = c.feed.duration_s ? nlohmann::ordered_json(*c.feed.duration_s) : nlohmann::ordered_json(nullptr);
    feed["intersection_id"] = c.feed.intersection_id;
    feed["service_delay_s"] = c.feed.service_delay_s;
    feed["speed_min_mps"] = c.feed.speed_min_mps;
    feed["speed_max_mps"] = c.feed.speed_max_mps;
    j["feed"] = feed;
    return j;
}

}  // namespace tsc::cli
