// Copyright 2026 The kapitza-floq Authors
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

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "kapitza/config.hpp"

namespace {

using kapitza::ExperimentConfig;
using kapitza::cli::RunContext;
using kapitza::cli::RunOutput;
using Command = std::function<void(const ExperimentConfig&, const RunContext&, RunOutput&)>;

struct Options {
    std::string config;
    std::vector<std::string> sets;
    bool check = false;
    std::string out;
    std::optional<int> threads;
    std::optional<long long> seed;
};

int resolve_threads(const Options& o) {
    if (o.threads) return std::max(1, *o.threads);
    if (const char* env = std::getenv("KAPITZA_FLOQ_THREADS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            throw kapitza::Error("KAPITZA_FLOQ_THREADS must be an integer, got '" + std::string(env) + "'");
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int run(const std::string& name, const Options& o, const Command& cmd) {
    auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

    std::vector<std::string> sets = o.sets;
    if (o.seed) sets.push_back("measure.seed=" + std::to_string(*o.seed));
    if (!o.out.empty()) sets.push_back("output.dir=" + o.out);

    ExperimentConfig cfg;
    RunContext ctx;
    try {
        cfg = o.config.empty() ? kapitza::parse_config("", sets) : kapitza::load_config(o.config, sets);
        ctx.threads = resolve_threads(o);
        ctx.check = o.check;
    } catch (const std::exception& e) {
        std::cerr << "kapitza-floq " << name << ": " << e.what() << "\n";
        return 2;
    }

    std::string snapshot = kapitza::to_ini(cfg);
    std::optional<RunOutput> out;
    try {
        out.emplace(cfg.output_dir, name);
        out->write("config.ini", snapshot);
        cmd(cfg, ctx, *out);
        out->finish(snapshot, elapsed(), "");
    } catch (const std::exception& e) {
        std::cerr << "kapitza-floq " << name << ": " << e.what() << "\n";
        if (out) {
            try {
                out->finish(snapshot, elapsed(), e.what());
            } catch (const std::exception&) {
            }
        }
        return 1;
    }

    for (const auto& c : out->checks())
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << kapitza::cli::format_number(c.value)
                  << " expected " << c.expected << "\n";
    std::cout << "wrote " << cfg.output_dir << "/run_report.json\n";
    return out->checks_passed() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Floquet simulation of the Kapitzonium qubit"};
    app.require_subcommand(1);

    const std::map<std::string, std::pair<std::string, Command>> commands = {
        {"floquet", {"Quasienergies, micromotion and mode localization", kapitza::cli::cmd_floquet}},
        {"spectrum", {"Emission spectrum and protection metrics", kapitza::cli::cmd_spectrum}},
        {"gate", {"Gate simulation and fidelity report", kapitza::cli::cmd_gate}},
        {"measure", {"Heterodyne measurement trajectories and fidelity", kapitza::cli::cmd_measure}},
        {"sweep", {"Parameter sweep of quasienergies, lines and rates", kapitza::cli::cmd_sweep}},
    };

    Options opts;
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, entry] : commands) {
        CLI::App* sub = app.add_subcommand(name, entry.first);
        sub->add_option("--config", opts.config, "INI configuration file")->check(CLI::ExistingFile);
        sub->add_option("--set", opts.sets, "Override, section.key=value (repeatable)");
        sub->add_flag("--check", opts.check, "Evaluate acceptance checks; nonzero exit if any fails");
        sub->add_option("--out", opts.out, "Output directory (overrides output.dir)");
        sub->add_option("--threads", opts.threads, "Worker threads (default: KAPITZA_FLOQ_THREADS or all cores)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", opts.seed, "Base trajectory seed (measure.seed)")->check(CLI::NonNegativeNumber);
        subs[name] = sub;
    }

    CLI11_PARSE(app, argc, argv);

    for (const auto& [name, sub] : subs)
        if (sub->parsed()) return run(name, opts, commands.at(name).second);
    return 2;
}
