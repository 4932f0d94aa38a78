// Copyright 2026 The QTS Tomography Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qts - command-line driver.
//
//   qts sweep --preset fig3 --out out/fig3
//   qts spectrum --config chain.ini
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure.

#include "qts/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

enum Exit { kOk = 0, kInvalid = 1, kNumerical = 2 };

struct Options {
    std::string config;
    std::string preset;
    std::optional<std::string> out;
    std::size_t threads = 1;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;
};

int run(const std::string& command, const Options& opt) {
    qts::RunConfig cfg;
    try {
        if (opt.config.empty() == opt.preset.empty()) {
            throw qts::ConfigError({"give exactly one of --config or --preset"});
        }
        cfg = opt.preset.empty() ? qts::load_config(opt.config) : qts::preset_config(opt.preset);
        if (opt.seed) cfg.seed = *opt.seed;
        if (opt.out) cfg.out_dir = *opt.out;
        if (opt.format) cfg.format = *opt.format == "tree" ? qts::OutputFormat::Tree : qts::OutputFormat::Table;
        cfg.threads = opt.threads;
    } catch (const qts::ConfigError& e) {
        std::cerr << "qts: " << e.what() << "\n";
        return kInvalid;
    }

    try {
        qts::CommandResult result;
        if (command == "spectrum") {
            result = qts::spectrum_command(cfg);
        } else if (command == "sweep") {
            result = qts::sweep_command(cfg);
        } else if (command == "evolve") {
            result = qts::evolve_command(cfg);
        } else {
            result = qts::validate_command(cfg);
        }
        qts::write_outputs(cfg, result, cfg.out_dir);
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
        for (const auto& s : result.summary) std::cout << s << "\n";
        std::cout << "wrote " << result.tables.size() << " file(s) to " << cfg.out_dir << "\n";
        return kOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "qts: invalid input: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::out_of_range& e) {
        std::cerr << "qts: invalid input: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "qts: numerical failure: " << e.what() << "\n";
        return kNumerical;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Qubit tunneling spectroscopy and kink eigenstate tomography"};
    app.set_version_flag("--version", std::string(QTS_VERSION));
    app.require_subcommand(1);

    Options opt;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"spectrum", "Lowest eigenvalues of the source Hamiltonian"},
        {"sweep", "Probe-bias sweep over kink reference states, peaks and amplitudes"},
        {"evolve", "Master-equation trajectory at a fixed probe bias"},
        {"validate", "Check the configuration and every reference state"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "INI configuration file");
        sub->add_option("--preset", opt.preset, "Built-in configuration")
            ->check(CLI::IsMember(qts::preset_names()));
        sub->add_option("--out", opt.out, "Output directory (overrides [output] dir)");
        sub->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", opt.seed, "Lanczos starting-vector seed");
        sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"table", "tree"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }
    return run(app.get_subcommands().front()->get_name(), opt);
}
