// Command-line front end for the experiment harness.
//
// Subcommands mirror the experiment kinds; a JSON config file supplies
// defaults and individual flags override it. Exit codes: 0 success,
// 2 configuration error, 3 numeric/domain error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bentkus/harness.hpp"

namespace {

struct CliOverrides {
    std::string config_path;
    std::string out;
    std::string format;
    std::string methods;
    std::uint64_t seed = 0;
    long long reps = 0, horizon = 0;
    double delta = 0.0;
    bool has_seed = false, has_reps = false, has_horizon = false, has_delta = false;
};

void add_common_flags(CLI::App* cmd, CliOverrides& ov) {
    cmd->add_option("--config", ov.config_path, "JSON config file");
    cmd->add_option("--out", ov.out, "output path (default: stdout)");
    cmd->add_option("--format", ov.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--methods", ov.methods, "comma-separated method list");
    cmd->add_option("--seed", ov.seed, "RNG seed")->each([&ov](const std::string&) {
        ov.has_seed = true;
    });
    cmd->add_option("--reps", ov.reps, "replications")->each([&ov](const std::string&) {
        ov.has_reps = true;
    });
    cmd->add_option("--horizon", ov.horizon, "sample horizon")
        ->each([&ov](const std::string&) { ov.has_horizon = true; });
    cmd->add_option("--delta", ov.delta, "error probability")
        ->each([&ov](const std::string&) { ov.has_delta = true; });
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int run(bentkus::ExperimentKind kind, const CliOverrides& ov) {
    bentkus::ExperimentConfig cfg;
    if (!ov.config_path.empty()) cfg = bentkus::ExperimentConfig::from_file(ov.config_path);
    cfg.kind = kind;
    if (!ov.out.empty()) cfg.out = ov.out;
    if (!ov.format.empty()) cfg.format = ov.format;
    if (!ov.methods.empty()) cfg.methods = split_csv(ov.methods);
    if (ov.has_seed) cfg.seed = ov.seed;
    if (ov.has_reps) cfg.replications = static_cast<int>(ov.reps);
    if (ov.has_horizon) cfg.horizon = ov.horizon;
    if (ov.has_delta) cfg.delta = ov.delta;
    cfg.validate();
    bentkus::Report report = bentkus::run_experiment(cfg);
    if (cfg.out.empty()) {
        report.write(std::cout, cfg.format);
    } else {
        std::ofstream out(cfg.out, std::ios::binary);
        if (!out) throw bentkus::ConfigError("cannot open output file: " + cfg.out);
        report.write(out, cfg.format);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Near-optimal confidence sequences: experiment runner"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        bentkus::ExperimentKind kind;
    };
    const Sub subs[] = {
        {"coverage", "miscoverage and width study", bentkus::ExperimentKind::coverage},
        {"stopping", "adaptive stopping-time study", bentkus::ExperimentKind::stopping},
        {"bestarm", "best-arm identification study", bentkus::ExperimentKind::bestarm},
        {"bound-table", "tabulate boundary values", bentkus::ExperimentKind::bound_table},
        {"sweep", "hyperparameter sweep of stitched boundaries",
         bentkus::ExperimentKind::sweep},
    };
    std::vector<CliOverrides> overrides(std::size(subs));
    std::vector<CLI::App*> cmds;
    for (std::size_t i = 0; i < std::size(subs); ++i) {
        CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].help);
        add_common_flags(cmd, overrides[i]);
        cmds.push_back(cmd);
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < std::size(subs); ++i) {
        if (!cmds[i]->parsed()) continue;
        try {
            return run(subs[i].kind, overrides[i]);
        } catch (const bentkus::ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        } catch (const std::domain_error& e) {
            std::cerr << "domain error: " << e.what() << "\n";
            return 3;
        } catch (const std::runtime_error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 3;
        }
    }
    return 0;
}
