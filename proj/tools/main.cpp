#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "harness/config.hpp"
#include "harness/experiments.hpp"
#include "harness/table.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

std::string stem_of(const std::string& path) {
    const std::size_t dot = path.rfind('.');
    const std::size_t slash = path.rfind('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
    return path.substr(0, dot);
}

void write_meta(const std::string& out_path, const mom::harness::ExperimentConfig& config) {
    const nlohmann::json meta = {{"config", mom::harness::to_json(config)},
                                 {"format", "csv"},
                                 {"tool", "mom"}};
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw mom::IoError("cannot open '" + out_path + "' for writing");
    out << meta.dump(2) << '\n';
}

int run(const std::string& command, const std::string& config_path,
        std::optional<std::uint64_t> seed, std::optional<std::string> out) {
    mom::harness::ExperimentConfig config = mom::harness::load_config(config_path);
    const mom::harness::Command requested = mom::harness::command_from_string(command);
    config.command = requested;
    if (seed) config.seed = *seed;
    if (out) config.out = *out;
    if (config.out.empty()) throw mom::harness::ConfigError("no output path (config 'out' or --out)");

    const mom::harness::RunOutput result = mom::harness::run_experiment(config);
    mom::harness::write_results(config.out, result.table);
    for (const auto& [name, table] : result.extra) {
        mom::harness::write_results(stem_of(config.out) + "_" + name + ".csv", table);
    }
    write_meta(config.out + ".meta.json", config);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust estimation workbench: contamination-calibrated medians of means and "
                 "U-statistics, deviation certificates, and median-block gradient descent"};
    app.require_subcommand(1);

    const std::vector<std::string> commands = {"break-mean",   "break-median", "break-variance",
                                               "mann-whitney", "coverage",     "learn-ranking",
                                               "learn-metric", "calibrate"};
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    for (const std::string& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON experiment configuration")->required();
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--out", out, "override the config output path");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, config_path, seed, out);
    } catch (const mom::harness::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const mom::ParseError& e) {
        std::cerr << "parse error (line " << e.line() << "): " << e.what() << '\n';
        return kExitConfig;
    } catch (const mom::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const mom::Error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}
