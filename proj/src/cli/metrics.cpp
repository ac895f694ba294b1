#include "tsc/cli/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tsc::cli {

MetricsRow to_row(std::uint64_t seed, const std::string& variant, const agent::EpisodeStats& stats)
{
    return MetricsRow{seed,          stats.episode,    variant,         stats.total_reward, stats.mean_waiting_s,
                      stats.throughput, stats.fairness_mean, stats.loss_mean};
}

std::string format_number(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows)
{
    std::string out = kMetricsHeader;
    out += '\n';
    for (const MetricsRow& r : rows) {
        out += std::to_string(r.seed) + ',' + std::to_string(r.episode) + ',' + r.variant + ',' +
               format_number(r.total_reward) + ',' + format_number(r.waiting_mean_s) + ',' +
               std::to_string(r.throughput) + ',' + format_number(r.fairness_mean) + ',' +
               (r.loss_mean ? format_number(*r.loss_mean) : std::string()) + '\n';
    }
    return out;
}

void write_metrics(const std::vector<MetricsRow>& rows, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write metrics file '" + path.string() + "'");
    }
    out << metrics_csv(rows);
    out.flush();
    if (!out) {
        throw std::runtime_error("failed writing metrics file '" + path.string() + "'");
    }
}

std::vector<MetricsRow> read_metrics(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != kMetricsHeader) {
        throw std::runtime_error("metrics CSV: missing or unexpected header");
    }
    std::vector<MetricsRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        if (!line.empty() && line.back() == ',') {
            fields.emplace_back();
        }
        if (fields.size() != 8) {
            throw std::runtime_error("metrics CSV line " + std::to_string(line_no) + ": expected 8 fields");
        }
        try {
            MetricsRow r;
            r.seed = std::stoull(fields[0]);
            r.episode = std::stoull(fields[1]);
            r.variant = fields[2];
            r.total_reward = std::stod(fields[3]);
            r.waiting_mean_s = std::stod(fields[4]);
            r.throughput = std::stoull(fields[5]);
            r.fairness_mean = std::stod(fields[6]);
            if (!fields[7].empty()) {
                r.loss_mean = std::stod(fields[7]);
            }
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw std::runtime_error("metrics CSV line " + std::to_string(line_no) + ": bad number");
        }
    }
    return rows;
}

}  // namespace tsc::cli
