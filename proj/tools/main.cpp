#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dressim/config.hpp"
#include "dressim/experiments.hpp"

namespace {

// exit codes: 0 success, 1 assertion failure, 2 config error, 3 numerical failure
constexpr int kOk = 0;
constexpr int kAssertFail = 1;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

dressim::Scenario load(const std::string& source) {
    for (const auto& name : dressim::fixture_names())
        if (name == source) return dressim::load_fixture(source);
    std::ifstream f(source);
    if (!f) throw std::invalid_argument("cannot open config file or fixture '" + source + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return dressim::validate_config_text(ss.str());
}

void apply_overrides(dressim::Scenario& s, const std::optional<std::uint64_t>& seed,
                     const std::optional<int>& traj, const std::optional<std::string>& out,
                     const std::optional<std::string>& format) {
    if (seed) {
        s.seed = *seed;
        s.evolve.master_seed = *seed;
        s.noise.seed = *seed;
    }
    if (traj) s.n_traj = *traj;
    if (out) s.out_dir = *out;
    if (format) s.format = *format;
}

int run_command(const std::string& source, bool check,
                const std::optional<std::uint64_t>& seed, const std::optional<int>& traj,
                const std::optional<std::string>& out, const std::optional<std::string>& format) {
    dressim::Scenario s;
    try {
        s = load(source);
        apply_overrides(s, seed, traj, out, format);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }

    dressim::ResultBundle bundle;
    try {
        bundle = dressim::run_scenario(s);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumericalError;
    }

    auto manifest = dressim::emit_results(bundle, s.out_dir, s.format);
    std::cout << "wrote " << manifest.size() + 1 << " files to " << s.out_dir << "\n";

    if (!check) return kOk;
    auto checks = dressim::check_scenario(s, bundle);
    bool all_pass = true;
    for (const auto& c : checks) {
        std::printf("%-24s %s  %s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL", c.detail.c_str());
        all_pass = all_pass && c.pass;
    }
    if (checks.empty()) std::cout << "(no checks registered for this scenario)\n";
    return all_pass ? kOk : kAssertFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pulse-level simulator for driven-qubit storage and two-qubit gates"};
    app.require_subcommand(1);

    std::string source;
    std::optional<std::uint64_t> seed;
    std::optional<int> traj;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", source, "config file path or fixture name")->required();
        cmd->add_option("--seed", seed, "override all seeds");
        cmd->add_option("--traj", traj, "override trajectory count");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--format", format, "csv or structured");
    };

    CLI::App* run = app.add_subcommand("run", "execute a scenario and write results");
    add_common(run);
    CLI::App* check = app.add_subcommand("check", "run and assert the scenario's expectations");
    add_common(check);
    CLI::App* validate = app.add_subcommand("validate", "parse and validate a config");
    validate->add_option("config", source, "config file path or fixture name")->required();
    app.add_subcommand("list-fixtures", "list built-in scenario fixtures");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("list-fixtures")) {
            for (const auto& name : dressim::fixture_names()) std::cout << name << "\n";
            return kOk;
        }
        if (app.got_subcommand("validate")) {
            try {
                dressim::Scenario s = load(source);
                std::cout << dressim::scenario_to_json(s).dump(2) << "\n";
                return kOk;
            } catch (const std::invalid_argument& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kConfigError;
            }
        }
        return run_command(source, app.got_subcommand("check"), seed, traj, out_dir, format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumericalError;
    }
}
