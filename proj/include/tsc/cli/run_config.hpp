#pragma once

#include "tsc/agent/agent_config.hpp"
#include "tsc/rl/network.hpp"
#include "tsc/sim/network_env.hpp"
#include "tsc/sim/sim_config.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tsc::cli {

using sim::ConfigError;

enum class FeedSource { synthetic, file };

struct FeedConfig {
    FeedSource source = FeedSource::synthetic;
    std::string path;                 // NDJSON file read when source == file
    std::string output = "feed.ndjson";  // gen-feed target, relative to the output dir
    std::optional<double> duration_s;  // gen-feed horizon; defaults to the episode length
    std::string intersection_id = "x0";
    double service_delay_s = 5.0;
    double speed_min_mps = 6.0;
    double speed_max_mps = 14.0;
};

// compare runs each of these on the same environment seeds.
inline const std::vector<std::string> kCompareVariants{"rainbow", "vanilla_dqn", "fixed_time"};

struct RunConfig {
    sim::SimConfig sim;
    std::optional<sim::NetworkConfig> network;
    agent::AgentConfig agent;
    rl::NetSpec net;  // input_dim and n_actions are derived from the environment
    std::size_t episodes = 1000;
    std::size_t eval_episodes = 20;
    std::vector<std::uint64_t> seeds{1};
    std::string output_dir = "out";
    std::string checkpoint;  // eval: explicit checkpoint (single seed); empty = <out>/checkpoint_seed<N>.bin
    std::vector<std::string> variants = kCompareVariants;
    std::size_t threads = 1;  // seed-parallel workers
    FeedConfig feed;

    void validate() const;
};

// Strict parse: unknown keys are errors that suggest the closest known key,
// invalid values raise ConfigError naming the full key path.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::filesystem::path& path);

// Every field, defaults included; parse_config(resolved_config(c)) == c.
nlohmann::ordered_json resolved_config(const RunConfig& config);

std::size_t edit_distance(const std::string& a, const std::string& b);

}  // namespace tsc::cli
