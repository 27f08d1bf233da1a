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

#include "doctest.h"

#include "crsma/harness.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

using namespace crsma;
namespace fs = std::filesystem;

namespace {

ResultRow row(SchemeId s, double v, int d, bool feasible, double e) {
    ResultRow r;
    r.scheme = s;
    r.axis_value = v;
    r.draw = d;
    r.feasible = feasible;
    r.energy = e;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("crsma_test_" + name);
    fs::remove_all(p);
    return p;
}

const char* kTiny = R"(
name: tiny
config:
  n_ris_elements: 4
  delta_grid: [0.5, 1.0]
axis: rate_threshold_far
values: [1, 2]
schemes: [CRSMA_RIS, RSMA_RIS, CNOMA_NORIS]
n_channel_draws: 2
)";

}  // namespace

TEST_CASE("a single row summarizes to itself") {
    const auto s = summarize({row(SchemeId::RSMA_RIS, 2.0, 0, true, 0.25)});
    REQUIRE(s.size() == 1);
    CHECK(s[0].mean == 0.25);
    CHECK(s[0].n_rows == 1);
    CHECK(s[0].infeasible_fraction == 0.0);
    CHECK(std::isnan(s[0].ci95));
}

TEST_CASE("an all-infeasible cell has no mean") {
    const auto s = summarize({row(SchemeId::CRSMA_RIS, 1.0, 0, false, 0.0), row(SchemeId::CRSMA_RIS, 1.0, 1, false, 0.0)});
    REQUIRE(s.size() == 1);
    CHECK_FALSE(s[0].has_mean());
    CHECK(s[0].infeasible_fraction == 1.0);
    CHECK(std::isnan(s[0].mean));
}

TEST_CASE("three-row mean and Student-t interval") {
    const auto s = summarize({row(SchemeId::CRSMA_RIS, 1.0, 0, true, 1.0), row(SchemeId::CRSMA_RIS, 1.0, 1, true, 2.0),
                              row(SchemeId::CRSMA_RIS, 1.0, 2, true, 6.0), row(SchemeId::CRSMA_RIS, 1.0, 3, false, 0.0)});
    REQUIRE(s.size() == 1);
    CHECK(s[0].mean == doctest::Approx(3.0));
    CHECK(s[0].n_feasible == 3);
    CHECK(s[0].infeasible_fraction == doctest::Approx(0.25));
    // sd = sqrt(7); with two degrees of freedom t_q = (2q - 1) / sqrt(2 q (1 - q)).
    const double t = 0.95 / std::sqrt(2.0 * 0.975 * 0.025);
    CHECK(s[0].ci95 == doctest::Approx(t * std::sqrt(7.0) / std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("plot data round-trips and keeps the scheme order") {
    const std::vector<SchemeId> schemes{SchemeId::CNOMA_RIS, SchemeId::CRSMA_RIS};
    const std::vector<double> values{1.0, 1.5};
    std::vector<ResultRow> rows;
    int d = 0;
    for (SchemeId s : schemes)
        for (double v : values)
            for (int k = 0; k < 3; ++k) rows.push_back(row(s, v, d++, true, 0.1 * v + 0.01 * k + (s == schemes[0])));
    rows.push_back(row(SchemeId::CNOMA_RIS, 1.5, 99, false, 0.0));
    const auto summary = summarize(rows, schemes, values);
    const auto table = plot_table(summary, SweepAxis::rate_threshold_far, schemes, values);
    const fs::path dir = scratch("plot");
    fs::create_directories(dir);
    emit_plot_data(table, dir / "plot.csv", "note");
    const auto back = read_plot_data(dir / "plot.csv");
    CHECK(back.axis == "rate_threshold_far");
    CHECK(back.schemes == schemes);
    CHECK(back.values == values);
    for (std::size_t v = 0; v < values.size(); ++v)
        for (std::size_t s = 0; s < schemes.size(); ++s) {
            CHECK(back.mean[v][s] == table.mean[v][s]);
            CHECK(back.ci95[v][s] == table.ci95[v][s]);
        }
    std::ifstream in(dir / "plot.csv");
    std::string first, header;
    std::getline(in, first);
    std::getline(in, header);
    CHECK(first == "# note");
    CHECK(header == "rate_threshold_far,CNOMA_RIS,CRSMA_RIS,CNOMA_RIS_ci95,CRSMA_RIS_ci95");
}

TEST_CASE("an empty summary gives a header-only plot file") {
    const std::vector<SchemeId> schemes{SchemeId::RSMA_RIS};
    const auto table = plot_table({}, SweepAxis::ris_elements, schemes, {});
    const fs::path dir = scratch("empty");
    fs::create_directories(dir);
    emit_plot_data(table, dir / "plot.csv");
    CHECK(slurp(dir / "plot.csv") == "ris_elements,RSMA_RIS,RSMA_RIS_ci95\n");
    const auto back = read_plot_data(dir / "plot.csv");
    CHECK(back.values.empty());
}

TEST_CASE("experiment files are validated") {
    CHECK_NOTHROW(parse_experiment(kTiny));
    const auto spec = parse_experiment(kTiny);
    CHECK(spec.base.n_ris_elements == 4);
    CHECK(spec.schemes.size() == 3);
    CHECK_FALSE(spec.draws_from_default);
    CHECK(config_at(spec, 2.0).rate_thresholds[1] == 2.0);

    CHECK_THROWS_AS(parse_experiment("axis: ris_elements\nvalues: [20, 10]\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment("axis: ris_elements\nvalues: [10.5]\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment("axis: ris_elements\nvalues: []\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment("axis: depth\nvalues: [1]\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment("axis: ris_elements\nvalues: [1]\nn_channel_draws: 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment("axis: ris_elements\nvalues: [1]\nschemes: [SDMA]\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment("axis: ris_elements\nvalues: [1]\nschemes: [NOMA_RIS, NOMA_RIS]\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment("axis: ris_elements\nvalues: [1]\ncolour: red\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment("axis: rate_threshold_far\nvalues: [-1]\n"), ConfigError);

    const auto def = parse_experiment("axis: ris_x_position\nvalues: [10, 50]\n");
    CHECK(def.n_channel_draws == kDefaultDraws);
    CHECK(def.draws_from_default);
    CHECK(config_at(def, 50.0).pos_ris[0] == 50.0);
}

TEST_CASE("identical specs give byte-identical tables, paired across schemes") {
    auto spec = parse_experiment(kTiny);
    spec.output_dir = scratch("run_a");
    const auto a = run_experiment(spec);
    spec.output_dir = scratch("run_b");
    spec.workers = 2;
    const auto b = run_experiment(spec);
    for (const char* f : {"results.jsonl", "summary.csv", "plot.csv", "run_info.json"}) {
        CHECK(slurp(scratch("run_a").parent_path() / "crsma_test_run_a" / f) ==
              slurp(scratch("run_b").parent_path() / "crsma_test_run_b" / f));
    }
    REQUIRE(a.rows.size() == 2 * 2 * 3);
    CHECK(a.numerical_failures == 0);
    for (std::size_t i = 0; i < a.rows.size(); i += 3) {
        CHECK(a.rows[i].channel_digest == a.rows[i + 1].channel_digest);
        CHECK(a.rows[i].channel_digest == a.rows[i + 2].channel_digest);
        CHECK(a.rows[i].scheme == SchemeId::CRSMA_RIS);
    }
    // The same draw index sees the same channels at every axis value.
    CHECK(a.rows[0].channel_digest == a.rows[6].channel_digest);
    CHECK(a.rows[0].channel_digest != a.rows[3].channel_digest);
}

TEST_CASE("an unwritable output directory is reported") {
    auto spec = parse_experiment(kTiny);
    spec.output_dir = "/proc/crsma_no_such_dir";
    CHECK_THROWS_AS(run_experiment(spec), HarnessError);
}
