// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The crsma-energy Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "crsma/harness.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>
#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumericalFailure = 1;
constexpr int kExitBadInput = 2;

bool looks_like_experiment(const std::string& path) {
    try {
        const YAML::Node root = YAML::LoadFile(path);
        return root.IsMap() && root["axis"];
    } catch (const YAML::Exception&) {
        return false;
    }
}

int cmd_run(const std::string& spec_path, std::optional<std::uint64_t> seed, std::optional<int> draws,
            std::optional<std::string> output, std::optional<int> workers, bool quiet) {
    crsma::ExperimentSpec spec = crsma::load_experiment(spec_path);
    if (seed) spec.base.rng_seed = *seed;
    if (draws) {
        spec.n_channel_draws = *draws;
        spec.draws_from_default = false;
    }
    if (output) spec.output_dir = *output;
    if (workers) spec.workers = *workers;
    spec.validate();

    spdlog::info("experiment '{}': axis {} over {} values, {} schemes, {} draws, {} worker(s), output {}", spec.name,
                 crsma::to_string(spec.axis), spec.values.size(), spec.schemes.size(), spec.n_channel_draws,
                 spec.workers, spec.output_dir.string());
    crsma::RunOptions opt;
    if (!quiet)
        opt.progress = [](std::size_t done, std::size_t total) {
            if (done == total || done % 10 == 0) spdlog::info("{}/{} draws done", done, total);
        };
    const auto res = crsma::run_experiment(spec, opt);
    for (const auto& c : res.summary) {
        if (c.has_mean())
            spdlog::info("{:<12} {}={:<8g} mean {:.6e} W  ci95 {:.2e}  infeasible {:.0f}%",
                         crsma::to_string(c.scheme), crsma::to_string(spec.axis), c.axis_value, c.mean, c.ci95,
                         100.0 * c.infeasible_fraction);
        else
            spdlog::info("{:<12} {}={:<8g} all draws infeasible", crsma::to_string(c.scheme),
                         crsma::to_string(spec.axis), c.axis_value);
    }
    if (res.numerical_failures > 0) {
        spdlog::error("{} row(s) hit a numerical failure", res.numerical_failures);
        return kExitNumericalFailure;
    }
    return kExitOk;
}

int cmd_list_schemes() {
    for (crsma::SchemeId id : crsma::all_schemes())
        std::printf("%-12s %s\n", crsma::to_string(id), crsma::describe(id).c_str());
    return kExitOk;
}

int cmd_validate(const std::string& path) {
    if (looks_like_experiment(path)) {
        const auto spec = crsma::load_experiment(path);
        std::printf("valid experiment '%s': axis %s, %zu values, %zu schemes, %d draws\n", spec.name.c_str(),
                    crsma::to_string(spec.axis), spec.values.size(), spec.schemes.size(), spec.n_channel_draws);
    } else {
        const auto cfg = crsma::load_config(path);
        std::printf("valid configuration: N_t = %d, M = %d, %zu delta grid points\n", cfg.n_antennas,
                    cfg.n_ris_elements, cfg.delta_grid.size());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy minimization for RIS-assisted cooperative rate-splitting downlinks"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a Monte Carlo experiment sweep");
    std::string spec_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> draws, workers;
    std::optional<std::string> output;
    bool quiet = false;
    run->add_option("spec", spec_path, "Experiment YAML file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the base random seed");
    run->add_option("--draws", draws, "Override the number of channel draws per axis value");
    run->add_option("--output", output, "Override the output directory");
    run->add_option("--workers", workers, "Number of worker threads");
    run->add_flag("--quiet", quiet, "Suppress progress messages");

    app.add_subcommand("list-schemes", "List the available schemes");

    auto* validate = app.add_subcommand("validate-config", "Check a configuration or experiment file");
    std::string validate_path;
    validate->add_option("path", validate_path, "YAML file")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitBadInput;
    }

    spdlog::set_pattern("[%H:%M:%S] %v");
    try {
        if (app.got_subcommand(run)) return cmd_run(spec_path, seed, draws, output, workers, quiet);
        if (app.got_subcommand("list-schemes")) return cmd_list_schemes();
        if (app.got_subcommand(validate)) return cmd_validate(validate_path);
    } catch (const crsma::ConfigError& e) {
        spdlog::error("invalid input: {}", e.what());
        return kExitBadInput;
    } catch (const crsma::HarnessError& e) {
        spdlog::error("{}", e.what());
        return kExitBadInput;
    } catch (const std::exception& e) {
        spdlog::error("unexpected failure: {}", e.what());
        return kExitBadInput;
    }
    return kExitBadInput;
}
