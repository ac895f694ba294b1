#pragma once

#include "tsc/agent/agent.hpp"
#include "tsc/agent/runner.hpp"
#include "tsc/cli/metrics.hpp"
#include "tsc/cli/run_config.hpp"
#include "tsc/sim/arrivals.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tsc::cli {

inline constexpr const char* kEnvOutDir = "TSC_OUT_DIR";
inline constexpr const char* kIncompleteMarker = "INCOMPLETE";

// Environment seed of evaluation episode e under an experiment seed; kept
// apart from the training episode seeds.
std::uint64_t eval_episode_seed(std::uint64_t seed, std::size_t episode);

// Arrival schedule read from the configured NDJSON feed, or null for the
// simulator's own Poisson arrivals.
std::shared_ptr<const sim::RoadArrivals> load_feed_schedule(const RunConfig& config);

struct TrainedAgent {
    std::unique_ptr<agent::Agent> agent;
    std::vector<agent::EpisodeStats> stats;
};

// Single intersection: trains one agent for config.episodes episodes.
TrainedAgent train_agent(const RunConfig& config, agent::Variant variant, std::uint64_t seed,
                         std::shared_ptr<const sim::RoadArrivals> schedule = nullptr);

std::vector<agent::EpisodeStats> evaluate_agent(agent::Agent& agent, const RunConfig& config, std::uint64_t seed,
                                                std::shared_ptr<const sim::RoadArrivals> schedule = nullptr);

// Round-robin baseline over the training (eval = false) or evaluation
// episode seeds.
std::vector<agent::EpisodeStats> run_fixed_time(const RunConfig& config, std::uint64_t seed, bool eval,
                                                std::shared_ptr<const sim::RoadArrivals> schedule = nullptr);

// Folds per-intersection stats of one network episode into a single row:
// rewards and throughput summed, waiting and fairness averaged.
agent::EpisodeStats combine_intersections(const std::vector<agent::EpisodeStats>& per_intersection);

// Runs task(i) for i in [0, count) on up to `threads` workers; the first
// failure (by index) is rethrown after all workers finish.
void run_parallel(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& task);

struct VariantSummary {
    std::uint64_t seed = 0;
    std::string variant;
    double first_window_mean_reward = 0.0;
    double last_window_mean_reward = 0.0;
    double last_window_mean_waiting_s = 0.0;
    double mean_waiting_s = 0.0;
    std::optional<double> eval_mean_reward;
    std::optional<double> eval_mean_waiting_s;
    std::uint64_t arrival_checksum = 0;
    std::uint64_t eval_arrival_checksum = 0;
};

struct CompareResult {
    std::size_t window = 0;  // episodes averaged at each end of the curve
    std::vector<VariantSummary> entries;  // seed-major, variants in config order
    std::vector<MetricsRow> rows;
    std::vector<MetricsRow> eval_rows;
    nlohmann::ordered_json summary;
};

// Folds the per-episode checksums of a run into one value.
std::uint64_t combine_checksums(const std::vector<agent::EpisodeStats>& stats);

// Library forms of the commands; each writes into out_dir.
std::vector<MetricsRow> cmd_train(const RunConfig& config, const std::filesystem::path& out_dir);
std::vector<MetricsRow> cmd_eval(const RunConfig& config, const std::filesystem::path& out_dir);
CompareResult cmd_compare(const RunConfig& config, const std::filesystem::path& out_dir);
std::filesystem::path cmd_gen_feed(const RunConfig& config, const std::filesystem::path& out_dir);

std::filesystem::path checkpoint_path(const std::filesystem::path& out_dir, std::uint64_t seed,
                                      std::optional<std::size_t> intersection = std::nullopt);

// Creates the output directory with an INCOMPLETE marker that stays behind
// unless commit() runs.
class OutputDir {
public:
    OutputDir(std::filesystem::path dir, const std::string& command);
    const std::filesystem::path& path() const { return dir_; }
    void commit();

private:
    std::filesystem::path dir_;
};

// Resolves --out, then $TSC_OUT_DIR, then the config's output_dir.
std::filesystem::path resolve_output_dir(const RunConfig& config, const std::optional<std::string>& cli_out);

}  // namespace tsc::cli
