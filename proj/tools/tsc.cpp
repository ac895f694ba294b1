#include "tsc/cli/commands.hpp"
#include "tsc/feed/detection_event.hpp"
#include "tsc/rl/checkpoint.hpp"
#include "tsc/util/allocator.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Options& opts)
{
    cmd->add_option("--config", opts.config, "run configuration (JSON)")->required();
    cmd->add_option("--seed", opts.seed, "run a single seed instead of the configured list");
    cmd->add_option("--out", opts.out, "output directory (overrides $TSC_OUT_DIR and output_dir)");
}

int run(const std::string& command, const Options& opts)
{
    using namespace tsc::cli;
    RunConfig config = parse_config_file(opts.config);
    if (opts.seed) {
        config.seeds = {*opts.seed};
    }
    const auto out_dir = resolve_output_dir(config, opts.out);

    if (command == "train") {
        const auto rows = cmd_train(config, out_dir);
        std::cout << "train: " << rows.size() << " episodes written to " << (out_dir / "metrics.csv").string() << "\n";
    } else if (command == "eval") {
        const auto rows = cmd_eval(config, out_dir);
        double waiting = 0.0;
        for (const MetricsRow& r : rows) {
            waiting += r.waiting_mean_s;
        }
        std::cout << "eval: " << rows.size() << " episodes, mean waiting "
                  << format_number(rows.empty() ? 0.0 : waiting / static_cast<double>(rows.size())) << " s\n";
    } else if (command == "compare") {
        const CompareResult result = cmd_compare(config, out_dir);
        for (const auto& w : result.summary["winners"]) {
            std::cout << "seed " << w["seed"].get<std::uint64_t>() << ": best reward "
                      << w["by_reward"].get<std::string>() << ", lowest waiting "
                      << w["by_waiting"].get<std::string>() << "\n";
        }
        std::cout << "summary: " << (out_dir / "summary.json").string() << "\n";
    } else {
        const auto path = cmd_gen_feed(config, out_dir);
        std::cout << "gen-feed: wrote " << path.string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    tsc::tune_allocator();
    CLI::App app{"Adaptive traffic signal control: simulator, Rainbow DQN training and evaluation"};
    app.require_subcommand(1);
    Options opts;
    add_common(app.add_subcommand("train", "train agents and write metrics.csv plus checkpoints"), opts);
    add_common(app.add_subcommand("eval", "evaluate saved checkpoints greedily"), opts);
    add_common(app.add_subcommand("compare", "train and evaluate every variant on shared arrivals"), opts);
    add_common(app.add_subcommand("gen-feed", "write a synthetic NDJSON detection feed"), opts);
    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, opts);
    } catch (const tsc::sim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const tsc::feed::FeedError& e) {
        std::cerr << "feed error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << command << " failed: " << e.what() << "\n";
        return 1;
    }
}
