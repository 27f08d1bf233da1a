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

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace crsma {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

const char* to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::rate_threshold_far: return "rate_threshold_far";
        case SweepAxis::ris_elements: return "ris_elements";
        case SweepAxis::ris_x_position: return "ris_x_position";
    }
    return "unknown";
}

std::optional<SweepAxis> parse_axis(std::string_view name) {
    for (SweepAxis a : {SweepAxis::rate_threshold_far, SweepAxis::ris_elements, SweepAxis::ris_x_position})
        if (name == to_string(a)) return a;
    return std::nullopt;
}

SystemConfig config_at(const ExperimentSpec& spec, double value) {
    SystemConfig cfg = spec.base;
    switch (spec.axis) {
        case SweepAxis::rate_threshold_far: cfg.rate_thresholds[1] = value; break;
        case SweepAxis::ris_elements: cfg.n_ris_elements = static_cast<int>(std::lround(value)); break;
        case SweepAxis::ris_x_position: cfg.pos_ris[0] = value; break;
    }
    return cfg;
}

void ExperimentSpec::validate() const {
    if (values.empty()) throw ConfigError("axis values must not be empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) throw ConfigError("axis values must be finite");
        if (i > 0 && !(values[i] > values[i - 1])) throw ConfigError("axis values must be strictly increasing");
    }
    if (axis == SweepAxis::ris_elements)
        for (double v : values)
            if (v < 0.0 || v != std::floor(v)) throw ConfigError("ris_elements values must be non-negative integers");
    if (n_channel_draws < 1) throw ConfigError("n_channel_draws must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (schemes.empty()) throw ConfigError("scheme list must not be empty");
    if (std::set<SchemeId>(schemes.begin(), schemes.end()).size() != schemes.size())
        throw ConfigError("scheme list has duplicates");
    if (output_dir.empty()) throw ConfigError("output directory must be set");
    for (double v : values) {
        try {
            config_at(*this, v).validate();
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("configuration at {} = {}: {}", to_string(axis), v, e.what()));
        }
    }
}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

ExperimentSpec parse_experiment(const std::string& yaml_text, const fs::path& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("cannot parse experiment: ") + e.what());
    }
    if (!root.IsMap()) throw ConfigError("experiment must be a mapping");
    static const std::set<std::string> known{"name",    "base_config",     "config",  "axis",   "values",
                                             "schemes", "n_channel_draws", "output",  "workers"};
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        if (!known.count(key)) throw ConfigError("unknown experiment key '" + key + "'");
    }
    ExperimentSpec spec;
    try {
        if (root["name"]) spec.name = root["name"].as<std::string>();
        YAML::Node cfg_node(YAML::NodeType::Map);
        if (root["base_config"]) {
            const fs::path p = base_dir / root["base_config"].as<std::string>();
            cfg_node = YAML::Load(read_file(p));
            if (!cfg_node.IsMap()) throw ConfigError("base configuration must be a mapping");
        }
        if (const auto over = root["config"]) {
            if (!over.IsMap()) throw ConfigError("config overrides must be a mapping");
            for (const auto& kv : over) cfg_node[kv.first.as<std::string>()] = kv.second;
        }
        spec.base = parse_config(YAML::Dump(cfg_node));
        if (!root["axis"]) throw ConfigError("experiment needs an axis");
        const auto axis = parse_axis(root["axis"].as<std::string>());
        if (!axis) throw ConfigError("unknown axis '" + root["axis"].as<std::string>() + "'");
        spec.axis = *axis;
        if (!root["values"]) throw ConfigError("experiment needs axis values");
        spec.values = root["values"].as<std::vector<double>>();
        if (const auto s = root["schemes"]) {
            spec.schemes.clear();
            for (const auto& n : s) {
                const auto name = n.as<std::string>();
                const auto id = parse_scheme(name);
                if (!id) throw ConfigError("unknown scheme '" + name + "'");
                spec.schemes.push_back(*id);
            }
        }
        if (root["n_channel_draws"]) {
            spec.n_channel_draws = root["n_channel_draws"].as<int>();
            spec.draws_from_default = false;
        }
        if (root["output"]) spec.output_dir = root["output"].as<std::string>();
        if (root["workers"]) spec.workers = root["workers"].as<int>();
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("bad experiment value: ") + e.what());
    }
    spec.validate();
    return spec;
}

ExperimentSpec load_experiment(const fs::path& path) {
    return parse_experiment(read_file(path), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

std::uint64_t draw_seed(const SystemConfig& base, int d) {
    return derive_seed(base.rng_seed, static_cast<std::uint64_t>(d));
}

double ci95_halfwidth(const std::vector<double>& x) {
    const auto n = x.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const boost::math::students_t dist(static_cast<double>(n - 1));
    return boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(static_cast<double>(n));
}

std::vector<CellSummary> summarize(const std::vector<ResultRow>& rows, const std::vector<SchemeId>& schemes,
                                   const std::vector<double>& values) {
    std::vector<CellSummary> out;
    for (SchemeId s : schemes) {
        for (double v : values) {
            CellSummary c;
            c.scheme = s;
            c.axis_value = v;
            std::vector<double> e;
            for (const auto& r : rows) {
                if (r.scheme != s || r.axis_value != v) continue;
                ++c.n_rows;
                if (r.feasible) e.push_back(r.energy);
            }
            if (c.n_rows == 0) continue;
            c.n_feasible = static_cast<int>(e.size());
            c.infeasible_fraction = 1.0 - static_cast<double>(c.n_feasible) / c.n_rows;
            c.mean = std::numeric_limits<double>::quiet_NaN();
            if (!e.empty()) {
                double sum = 0.0;
                for (double x : e) sum += x;
                c.mean = sum / static_cast<double>(e.size());
            }
            c.ci95 = ci95_halfwidth(e);
            out.push_back(c);
        }
    }
    return out;
}

std::vector<CellSummary> summarize(const std::vector<ResultRow>& rows) {
    std::vector<SchemeId> schemes;
    std::vector<double> values;
    for (const auto& r : rows) {
        if (std::find(schemes.begin(), schemes.end(), r.scheme) == schemes.end()) schemes.push_back(r.scheme);
        if (std::find(values.begin(), values.end(), r.axis_value) == values.end()) values.push_back(r.axis_value);
    }
    return summarize(rows, schemes, values);
}

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "";
    return fmt::format("{:.17g}", v);
}

double parse_num(const std::string& s) {
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw HarnessError("bad number '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw HarnessError("cannot write " + path.string());
    return out;
}

}  // namespace

PlotTable plot_table(const std::vector<CellSummary>& summary, SweepAxis axis, const std::vector<SchemeId>& schemes,
                     const std::vector<double>& values) {
    PlotTable t;
    t.axis = to_string(axis);
    t.schemes = schemes;
    t.values = values;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    t.mean.assign(values.size(), std::vector<double>(schemes.size(), nan));
    t.ci95 = t.mean;
    for (const auto& c : summary) {
        const auto si = std::find(schemes.begin(), schemes.end(), c.scheme) - schemes.begin();
        const auto vi = std::find(values.begin(), values.end(), c.axis_value) - values.begin();
        if (si == static_cast<long>(schemes.size()) || vi == static_cast<long>(values.size())) continue;
        t.mean[vi][si] = c.mean;
        t.ci95[vi][si] = c.ci95;
    }
    return t;
}

void emit_plot_data(const PlotTable& t, const fs::path& path, const std::string& note) {
    auto out = open_out(path);
    if (!note.empty()) out << "# " << note << "\n";
    out << t.axis;
    for (SchemeId s : t.schemes) out << "," << to_string(s);
    for (SchemeId s : t.schemes) out << "," << to_string(s) << "_ci95";
    out << "\n";
    for (std::size_t v = 0; v < t.values.size(); ++v) {
        out << num(t.values[v]);
        for (std::size_t s = 0; s < t.schemes.size(); ++s) out << "," << num(t.mean[v][s]);
        for (std::size_t s = 0; s < t.schemes.size(); ++s) out << "," << num(t.ci95[v][s]);
        out << "\n";
    }
    if (!out) throw HarnessError("cannot write " + path.string());
}

PlotTable read_plot_data(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw HarnessError("cannot open " + path.string());
    PlotTable t;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto f = split(line);
        if (!header) {
            if (f.size() % 2 != 1) throw HarnessError("malformed plot header");
            t.axis = f[0];
            const std::size_t k = (f.size() - 1) / 2;
            for (std::size_t i = 0; i < k; ++i) {
                const auto id = parse_scheme(f[1 + i]);
                if (!id || f[1 + k + i] != f[1 + i] + "_ci95") throw HarnessError("malformed plot header");
                t.schemes.push_back(*id);
            }
            header = true;
            continue;
        }
        const std::size_t k = t.schemes.size();
        if (f.size() != 1 + 2 * k) throw HarnessError("malformed plot row");
        t.values.push_back(parse_num(f[0]));
        std::vector<double> m, c;
        for (std::size_t i = 0; i < k; ++i) m.push_back(parse_num(f[1 + i]));
        for (std::size_t i = 0; i < k; ++i) c.push_back(parse_num(f[1 + k + i]));
        t.mean.push_back(m);
        t.ci95.push_back(c);
    }
    if (!header) throw HarnessError("plot file has no header");
    return t;
}

std::string row_to_json(const ResultRow& r, SweepAxis axis) {
    ordered_json j;
    j["scheme"] = to_string(r.scheme);
    j["axis"] = to_string(axis);
    j["axis_value"] = r.axis_value;
    j["draw"] = r.draw;
    j["seed"] = r.seed;
    j["channel_digest"] = fmt::format("{:016x}", r.channel_digest);
    j["feasible"] = r.feasible;
    j["energy_watts"] = r.feasible ? ordered_json(r.energy) : ordered_json(nullptr);
    j["best_delta"] = r.feasible ? ordered_json(r.best_delta) : ordered_json(nullptr);
    j["ao_iterations"] = r.ao_iterations;
    j["numerical_failure"] = r.numerical_failure;
    ordered_json table = ordered_json::array();
    for (const auto& e : r.delta_table) {
        ordered_json t;
        t["delta"] = e.delta;
        t["energy_watts"] = std::isfinite(e.energy) ? ordered_json(e.energy) : ordered_json(nullptr);
        t["status"] = to_string(e.status);
        t["iterations"] = e.iterations;
        table.push_back(t);
    }
    j["delta_table"] = table;
    return j.dump();
}

namespace {

std::vector<ResultRow> run_item(const ExperimentSpec& spec, double value, int d) {
    const SystemConfig cfg = config_at(spec, value);
    const std::uint64_t seed = draw_seed(spec.base, d);
    Rng rng(derive_seed(seed, 0));
    const ChannelSet ch = generate_channels(cfg, rng);
    const PhaseVector theta1 = initial_phases(cfg.n_ris_elements, derive_seed(seed, 1));
    const std::uint64_t digest = channel_digest(ch);
    std::vector<ResultRow> rows;
    for (SchemeId id : spec.schemes) {
        const auto t0 = std::chrono::steady_clock::now();
        const AOResult res = solve_scheme(id, ch, cfg, theta1);
        ResultRow r;
        r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.scheme = id;
        r.axis_value = value;
        r.draw = d;
        r.seed = seed;
        r.channel_digest = digest;
        r.feasible = res.feasible;
        r.energy = res.feasible ? res.energy : 0.0;
        r.best_delta = res.feasible ? res.best_delta : 0.0;
        r.ao_iterations = res.trace.empty() ? 0 : static_cast<int>(res.trace.size()) - 1;
        r.numerical_failure = res.numerical_failure;
        r.delta_table = res.table;
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_outputs(const ExperimentSpec& spec, const ExperimentResult& res) {
    const fs::path dir = spec.output_dir;
    {
        auto out = open_out(dir / "results.jsonl");
        for (const auto& r : res.rows) out << row_to_json(r, spec.axis) << "\n";
        if (!out) throw HarnessError("cannot write results.jsonl");
    }
    const std::string label =
        fmt::format("mean energy [W] over feasible draws; ci95 = Student-t 95% half-width; {} draws per cell{}",
                    spec.n_channel_draws, spec.draws_from_default ? " (default)" : "");
    {
        auto out = open_out(dir / "summary.csv");
        out << "# " << label << "\n";
        out << "scheme," << to_string(spec.axis)
            << ",n_draws,n_feasible,mean_energy_watts,ci95_halfwidth,infeasible_fraction\n";
        for (const auto& c : res.summary)
            out << to_string(c.scheme) << "," << num(c.axis_value) << "," << c.n_rows << "," << c.n_feasible << ","
                << num(c.mean) << "," << num(c.ci95) << "," << num(c.infeasible_fraction) << "\n";
        if (!out) throw HarnessError("cannot write summary.csv");
    }
    emit_plot_data(plot_table(res.summary, spec.axis, spec.schemes, spec.values), dir / "plot.csv", label);
    {
        auto out = open_out(dir / "timing.csv");
        out << "scheme," << to_string(spec.axis) << ",draw,wall_seconds\n";
        for (const auto& r : res.rows)
            out << to_string(r.scheme) << "," << num(r.axis_value) << "," << r.draw << ","
                << fmt::format("{:.6f}", r.wall_seconds) << "\n";
    }
    {
        ordered_json j;
        j["name"] = spec.name;
        j["axis"] = to_string(spec.axis);
        j["values"] = spec.values;
        std::vector<std::string> names;
        for (SchemeId s : spec.schemes) names.push_back(to_string(s));
        j["schemes"] = names;
        j["n_channel_draws"] = spec.n_channel_draws;
        j["n_channel_draws_is_default"] = spec.draws_from_default;
        j["confidence_interval"] = "two-sided 95% Student-t over feasible draws";
        j["infeasible_cells"] = "excluded from means, counted in infeasible_fraction";
        j["rows"] = res.rows.size();
        j["numerical_failures"] = res.numerical_failures;
        j["config"] = dump_config(spec.base);
        auto out = open_out(dir / "run_info.json");
        out << j.dump(2) << "\n";
    }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& opt) {
    spec.validate();
    if (opt.write_outputs) {
        std::error_code ec;
        fs::create_directories(spec.output_dir, ec);
        if (ec || !fs::is_directory(spec.output_dir))
            throw HarnessError("cannot create output directory " + spec.output_dir.string());
        const fs::path probe = spec.output_dir / ".write_probe";
        {
            std::ofstream p(probe);
            if (!p) throw HarnessError("output directory " + spec.output_dir.string() + " is not writable");
        }
        fs::remove(probe, ec);
    }

    struct Item {
        double value;
        int draw;
    };
    std::vector<Item> items;
    for (double v : spec.values)
        for (int d = 0; d < spec.n_channel_draws; ++d) items.push_back({v, d});
    std::vector<std::vector<ResultRow>> slots(items.size());

    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t done = 0;
    std::exception_ptr error;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= items.size()) return;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (error) return;
            }
            try {
                auto rows = run_item(spec, items[i].value, items[i].draw);
                std::lock_guard<std::mutex> lock(mu);
                slots[i] = std::move(rows);
                ++done;
                if (opt.progress) opt.progress(done, items.size());
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    const int n_workers = std::max(1, std::min<int>(spec.workers, static_cast<int>(items.size())));
    std::vector<std::thread> pool;
    for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    ExperimentResult res;
    for (auto& s : slots)
        for (auto& r : s) {
            if (r.numerical_failure) ++res.numerical_failures;
            res.rows.push_back(std::move(r));
        }
    // Paired comparison: every scheme in a cell saw the same draw.
    for (std::size_t i = 0; i + 1 < res.rows.size(); ++i) {
        const auto& a = res.rows[i];
        const auto& b = res.rows[i + 1];
        if (a.axis_value == b.axis_value && a.draw == b.draw && a.channel_digest != b.channel_digest)
            throw HarnessError("schemes in one cell consumed different channels");
    }
    res.summary = summarize(res.rows, spec.schemes, spec.values);
    if (opt.write_outputs) write_outputs(spec, res);
    return res;
}

}  // namespace crsma
