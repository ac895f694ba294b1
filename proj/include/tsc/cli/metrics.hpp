#pragma once

#include "tsc/agent/runner.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace tsc::cli {

inline constexpr const char* kMetricsHeader =
    "seed,episode,variant,total_reward,waiting_mean_s,throughput,fairness_mean,loss_mean";

struct MetricsRow {
    std::uint64_t seed = 0;
    std::size_t episode = 0;
    std::string variant;
    double total_reward = 0.0;
    double waiting_mean_s = 0.0;
    std::size_t throughput = 0;
    double fairness_mean = 0.0;
    std::optional<double> loss_mean;  // empty field when absent

    friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

MetricsRow to_row(std::uint64_t seed, const std::string& variant, const agent::EpisodeStats& stats);

// 9 significant digits, shortest form ("%.9g").
std::string format_number(double value);

std::string metrics_csv(const std::vector<MetricsRow>& rows);
void write_metrics(const std::vector<MetricsRow>& rows, const std::filesystem::path& path);
std::vector<MetricsRow> read_metrics(std::istream& in);

}  // namespace tsc::cli
