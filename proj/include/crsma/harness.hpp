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

#pragma once

#include "crsma/baselines.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crsma {

class HarnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SweepAxis { rate_threshold_far, ris_elements, ris_x_position };
const char* to_string(SweepAxis axis);
std::optional<SweepAxis> parse_axis(std::string_view name);

inline constexpr int kDefaultDraws = 50;

struct ExperimentSpec {
    std::string name = "experiment";
    SystemConfig base;
    SweepAxis axis = SweepAxis::rate_threshold_far;
    std::vector<double> values;
    std::vector<SchemeId> schemes = all_schemes();
    int n_channel_draws = kDefaultDraws;
    bool draws_from_default = true;
    std::filesystem::path output_dir = "results";
    int workers = 1;

    /// Throws ConfigError naming the first violated invariant, including those
    /// of the configuration at every axis value.
    void validate() const;
};

/// YAML experiment file. `base_config` names a configuration file relative to
/// `base_dir`; `config` holds inline overrides applied on top of it.
ExperimentSpec parse_experiment(const std::string& yaml_text, const std::filesystem::path& base_dir = ".");
ExperimentSpec load_experiment(const std::filesystem::path& path);

/// The base configuration with the swept parameter set to `value`.
SystemConfig config_at(const ExperimentSpec& spec, double value);

/// Channel-draw seed shared by every scheme and axis value for draw `d`.
std::uint64_t draw_seed(const SystemConfig& base, int d);

struct ResultRow {
    SchemeId scheme = SchemeId::CRSMA_RIS;
    double axis_value = 0.0;
    int draw = 0;
    std::uint64_t seed = 0;
    std::uint64_t channel_digest = 0;
    bool feasible = false;
    double energy = 0.0;  // watts, meaningful only when feasible
    double best_delta = 0.0;
    int ao_iterations = 0;
    bool numerical_failure = false;
    std::vector<DeltaEntry> delta_table;
    double wall_seconds = 0.0;  // kept out of the deterministic table
};

struct CellSummary {
    SchemeId scheme = SchemeId::CRSMA_RIS;
    double axis_value = 0.0;
    int n_rows = 0;
    int n_feasible = 0;
    double mean = 0.0;  // over feasible rows; NaN when there are none
    double ci95 = 0.0;  // Student-t half-width; NaN with fewer than two feasible rows
    double infeasible_fraction = 0.0;
    bool has_mean() const { return n_feasible > 0; }
};

/// Cells ordered by scheme (in `schemes` order) then axis value (in `values` order).
std::vector<CellSummary> summarize(const std::vector<ResultRow>& rows, const std::vector<SchemeId>& schemes,
                                   const std::vector<double>& values);
/// Same with schemes and values in order of first appearance.
std::vector<CellSummary> summarize(const std::vector<ResultRow>& rows);

/// Half-width of the two-sided 95% Student-t interval of the mean.
double ci95_halfwidth(const std::vector<double>& samples);

struct PlotTable {
    std::string axis;
    std::vector<SchemeId> schemes;
    std::vector<double> values;
    std::vector<std::vector<double>> mean;  // [value][scheme], NaN when missing
    std::vector<std::vector<double>> ci95;
};

PlotTable plot_table(const std::vector<CellSummary>& summary, SweepAxis axis, const std::vector<SchemeId>& schemes,
                     const std::vector<double>& values);
/// Comma-separated: axis value, one mean column per scheme, then one ci95
/// column per scheme. Lines starting with '#' carry labels.
void emit_plot_data(const PlotTable& table, const std::filesystem::path& path, const std::string& note = {});
PlotTable read_plot_data(const std::filesystem::path& path);

std::string row_to_json(const ResultRow& row, SweepAxis axis);

struct ExperimentResult {
    std::vector<ResultRow> rows;  // ordered by axis value, draw, scheme
    std::vector<CellSummary> summary;
    int numerical_failures = 0;
};

struct RunOptions {
    /// Called once per finished work item (one axis value and draw).
    std::function<void(std::size_t done, std::size_t total)> progress;
    bool write_outputs = true;
};

/// Runs every scheme on the same channel draw for every (axis value, draw)
/// pair with a bounded worker pool, then writes results.jsonl, summary.csv,
/// plot.csv, timing.csv and run_info.json into spec.output_dir.
ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& opt = {});

}  // namespace crsma
