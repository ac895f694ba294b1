#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsc::sim {

class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& message)
        : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

// Divisors applied to the raw observation quantities before clamping.
struct ObservationScale {
    double queue = 50.0;
    double waiting_s = 120.0;
    double count = 20.0;
};

inline constexpr double kDefaultArrivalRate = 0.1;

struct SimConfig {
    std::size_t roads_count = 4;
    double green_duration_s = 10.0;
    double inter_green_s = 3.0;
    double saturation_headway_s = 2.0;
    std::vector<double> arrival_rates = std::vector<double>(4, kDefaultArrivalRate);  // vehicles / s per road
    double episode_length_s = 3600.0;
    std::optional<std::size_t> queue_capacity;
    double fairness_weight = 2.0;
    bool enable_speed_term = false;
    bool enable_stuck_term = false;
    double stuck_probability = 0.0;
    ObservationScale scale;

    static SimConfig with_roads(std::size_t roads, double rate = kDefaultArrivalRate)
    {
        SimConfig c;
        c.roads_count = roads;
        c.arrival_rates.assign(roads, rate);
        return c;
    }

    // Throws ConfigError naming the offending field.
    void validate() const;

    // Upper bound on departures from the served road in one decision interval.
    std::size_t green_capacity() const;

    // Longest decision interval (a switch plus a full green).
    double max_interval_s() const { return inter_green_s + green_duration_s; }
};

}  // namespace tsc::sim
