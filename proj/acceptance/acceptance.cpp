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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. `--only 1,4,5` restricts the run; `--workers N` sets the pool size
// of the two figure sweeps.

#include "crsma/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifndef CRSMA_SOURCE_DIR
#define CRSMA_SOURCE_DIR "."
#endif
#ifndef CRSMA_BINARY_DIR
#define CRSMA_BINARY_DIR "."
#endif

using namespace crsma;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int g_workers = 1;
const fs::path g_out = fs::path(CRSMA_BINARY_DIR) / "acceptance_runs";

ChannelSet draw_channels(const SystemConfig& cfg, std::uint64_t stream) {
    Rng rng(derive_seed(cfg.rng_seed, stream));
    return generate_channels(cfg, rng);
}

SystemConfig m20() {
    SystemConfig cfg;
    cfg.n_antennas = 4;
    cfg.n_ris_elements = 20;
    return cfg;
}

// 1. SCA descent over 100 instances.
Verdict sca_descent() {
    const SystemConfig cfg = m20();
    int feasible = 0, converged = 0, worst_n = 0, bad_traces = 0;
    double worst_rise = -1.0, worst_time = 0.0;
    for (int i = 0; i < 100; ++i) {
        const ChannelSet ch = draw_channels(cfg, 1000 + i);
        const PhaseVector th1 = initial_phases(cfg.n_ris_elements, derive_seed(7, i));
        const PhaseVector th2 = closed_form_theta2(ch.h_12, ch.h_1r, ch.hhat_r2);
        const double delta = cfg.delta_grid[i % cfg.delta_grid.size()];
        const auto t0 = Clock::now();
        const auto res = sca_solve(ScaContext(ch, th1, th2, delta, cfg));
        worst_time = std::max(worst_time, seconds_since(t0));
        if (!res.ok()) continue;
        ++feasible;
        double prev = std::numeric_limits<double>::infinity();
        int iters = 0;
        bool ok = true;
        for (const auto& e : res.trace) {
            if (e.restoration || e.status != conic::SolveStatus::optimal) continue;
            if (e.n > 0 && e.max_violation == 0.0) ++iters;
            if (std::isfinite(prev)) {
                worst_rise = std::max(worst_rise, e.eta - prev);
                if (e.eta > prev + 1e-6) ok = false;
            }
            prev = e.eta;
        }
        if (!ok) ++bad_traces;
        worst_n = std::max(worst_n, iters);
        if (res.status == ScaStatus::converged) ++converged;
    }
    Verdict v;
    const double frac = feasible ? static_cast<double>(converged) / feasible : 0.0;
    v.pass = feasible > 0 && bad_traces == 0 && frac >= 0.95 && worst_time < 5.0;
    v.detail = fmt::format(
        "{} of 100 instances feasible, {} non-monotone traces (largest rise {:.2e} W), {:.0f}% converged within "
        "{} iterations, slowest instance {:.2f} s",
        feasible, bad_traces, worst_rise, 100.0 * frac, cfg.max_iter_sca, worst_time);
    return v;
}

// 2. Every returned solution of every scheme passes the rate-model audit.
Verdict feasibility_soundness() {
    const SystemConfig cfg = m20();
    int solutions = 0, failures = 0, infeasible = 0;
    std::string first;
    for (int i = 0; i < 100; ++i) {
        const ChannelSet ch = draw_channels(cfg, 2000 + i);
        const PhaseVector th1 = initial_phases(cfg.n_ris_elements, derive_seed(8, i));
        for (SchemeId id : all_schemes()) {
            const auto res = solve_scheme(id, ch, cfg, th1);
            if (!res.feasible) {
                ++infeasible;
                continue;
            }
            ++solutions;
            const SchemeSetup setup = scheme_setup(id);
            const ChannelSet used = setup.uses_ris ? ch : without_ris(ch);
            const auto rep = check_feasibility(res.solution, used, res.theta1, res.theta2, cfg, setup.protocol);
            if (!rep.ok(1e-6, 1e-9)) {
                ++failures;
                if (first.empty())
                    first = fmt::format(" (first: {} instance {}: {})", to_string(id), i, rep.describe_violations());
            }
        }
    }
    Verdict v;
    v.pass = failures == 0 && solutions > 0;
    v.detail = fmt::format("{} solutions audited, {} violations, {} infeasible verdicts{}", solutions, failures,
                           infeasible, first);
    return v;
}

// 3. Rank-one certificate and constraint preservation of the phase step.
Verdict rank_one_certificate() {
    const SystemConfig cfg = m20();
    int steps = 0, rank_one = 0, candidates = 0, margin_bad = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100; ++i) {
        const ChannelSet ch = draw_channels(cfg, 3000 + i);
        const PhaseVector th1 = initial_phases(cfg.n_ris_elements, derive_seed(9, i));
        const PhaseVector th2 = closed_form_theta2(ch.h_12, ch.h_1r, ch.hhat_r2);
        for (double delta : {0.5, 1.0}) {
            const auto sca = sca_solve(ScaContext(ch, th1, th2, delta, cfg));
            if (!sca.ok()) continue;
            const auto ps = phase_step(ch, sca.sol, th1, th2, cfg);
            if (ps.dc.trace.empty()) continue;
            ++steps;
            if (ps.dc.status == DcStatus::rank_one && ps.dc.V.dc_residual <= 1e-5) ++rank_one;
            if (ps.candidate.size() == cfg.n_ris_elements) {
                ++candidates;
                worst_margin = std::min(worst_margin, ps.candidate_rate_margin);
                if (ps.candidate_rate_margin < -1e-5) ++margin_bad;
            }
        }
    }
    Verdict v;
    const double frac = steps ? static_cast<double>(rank_one) / steps : 0.0;
    v.pass = steps > 0 && frac >= 0.9 && margin_bad == 0;
    v.detail = fmt::format(
        "{} phase steps at M = 20, {:.1f}% rank-one within 1e-5; {} extracted phase sets, {} with a rate margin "
        "below -1e-5 (worst {:.2e})",
        steps, 100.0 * frac, candidates, margin_bad, worst_margin);
    return v;
}

// 4. Closed-form slot-2 phases.
Verdict slot2_optimality() {
    SystemConfig cfg;
    Rng rng(44);
    int beaten = 0;
    double worst_rel = 0.0;
    for (int i = 0; i < 100; ++i) {
        const ChannelSet ch = draw_channels(cfg, 4000 + i);
        const PhaseVector th2 = closed_form_theta2(ch.h_12, ch.h_1r, ch.hhat_r2);
        const double gain = std::abs(slot2_channel(ch, th2));
        const double bound = std::abs(ch.h_12) + ch.h_1r.cwiseProduct(ch.hhat_r2).cwiseAbs().sum();
        worst_rel = std::max(worst_rel, std::abs(gain - bound) / bound);
        for (int t = 0; t < 10000; ++t) {
            const auto rnd = PhaseVector::uniform_random(cfg.n_ris_elements, rng);
            if (std::abs(slot2_channel(ch, rnd)) > gain) ++beaten;
        }
    }
    Verdict v;
    v.pass = beaten == 0 && worst_rel <= 1e-10;
    v.detail = fmt::format("100 instances x 10^4 random phase vectors: {} exceed the closed form; |gain - bound| "
                           "relative error at most {:.1e}",
                           beaten, worst_rel);
    return v;
}

// 5. Lifting identity.
Verdict lifting_identity() {
    double worst = 0.0;
    int pairs = 0;
    Rng rng(55);
    std::normal_distribution<double> g;
    for (int m : {1, 8, 20}) {
        SystemConfig cfg;
        cfg.n_ris_elements = m;
        for (int t = 0; t < 100; ++t) {
            const ChannelSet ch = draw_channels(cfg, 5000 + 100 * m + t);
            const PhaseVector th = PhaseVector::uniform_random(m, rng);
            PowerSolution sol = PowerSolution::zeros(cfg.n_antennas, 1.0);
            for (CVec* p : {&sol.p_c, &sol.p_1, &sol.p_2})
                for (int a = 0; a < cfg.n_antennas; ++a) (*p)(a) = {g(rng), g(rng)};
            const auto lp = build_lifted_problem(ch, sol, th, cfg);
            const CVec vbar = lift(th);
            const CMat v = vbar * vbar.adjoint();
            const CVec* p[3] = {&sol.p_c, &sol.p_1, &sol.p_2};
            for (int k = 0; k < 2; ++k) {
                const CVec h = user_channel(k + 1, ch, th);
                for (int j = 0; j < 3; ++j) {
                    const double direct = std::norm(h.dot(*p[j])) / cfg.noise_power();
                    worst = std::max(worst, std::abs(lp.power(k, j, v) - direct) / direct);
                }
            }
            ++pairs;
        }
    }
    Verdict v;
    v.pass = worst <= 1e-10;
    v.detail = fmt::format("{} (phase, precoder) pairs at M in {{1, 8, 20}}, largest relative error {:.1e}", pairs,
                           worst);
    return v;
}

// 6. Degeneracy equivalences.
Verdict degeneracies() {
    double worst_a = 0.0, worst_b = 0.0;
    int count_a = 0, count_b = 0, infeasible = 0;
    for (int s = 0; s < 20; ++s) {
        SystemConfig cfg;
        cfg.n_ris_elements = 0;
        cfg.rng_seed = 600 + s;
        const ChannelSet ch = draw_channels(cfg, 0);
        const PhaseVector none = PhaseVector::zeros(0);
        const auto prop = solve_scheme(SchemeId::CRSMA_RIS, ch, cfg, none);
        const auto noris = solve_scheme(SchemeId::CRSMA_NORIS, ch, cfg, none);
        if (prop.feasible != noris.feasible) worst_a = std::numeric_limits<double>::infinity();
        if (prop.feasible && noris.feasible) {
            worst_a = std::max(worst_a, std::abs(prop.energy - noris.energy) / noris.energy);
            ++count_a;
        }

        SystemConfig one;
        one.n_ris_elements = 20;
        one.rng_seed = 700 + s;
        const ChannelSet ch2 = draw_channels(one, 0);
        const PhaseVector th = initial_phases(20, derive_seed(one.rng_seed, 1));
        const auto rsma = solve_scheme(SchemeId::RSMA_RIS, ch2, one, th);
        one.delta_grid = {1.0};
        one.p_d2d_dbm = -300.0;  // 1e-33 W: the relay has no budget
        const auto frozen = solve_scheme(SchemeId::CRSMA_RIS, ch2, one, th);
        if (rsma.feasible != frozen.feasible) worst_b = std::numeric_limits<double>::infinity();
        if (rsma.feasible && frozen.feasible) {
            worst_b = std::max(worst_b, std::abs(rsma.energy - frozen.energy) / rsma.energy);
            ++count_b;
        }
        if (!prop.feasible || !rsma.feasible) ++infeasible;
    }
    Verdict v;
    v.pass = worst_a <= 1e-6 && worst_b <= 1e-6 && count_a > 0 && count_b > 0;
    v.detail = fmt::format("M = 0 vs no-RIS: {} seeds, max relative gap {:.1e}; no relay budget with delta = 1 vs "
                           "RSMA with RIS: {} seeds, max relative gap {:.1e}; {} infeasible seeds",
                           count_a, worst_a, count_b, worst_b, infeasible);
    return v;
}

ExperimentSpec figure_spec(const std::string& file, const std::string& out) {
    ExperimentSpec spec = load_experiment(fs::path(CRSMA_SOURCE_DIR) / "configs" / file);
    spec.output_dir = g_out / out;
    spec.workers = g_workers;
    return spec;
}

const CellSummary* cell(const std::vector<CellSummary>& s, SchemeId id, double value) {
    for (const auto& c : s)
        if (c.scheme == id && c.axis_value == value) return &c;
    return nullptr;
}

double mean_of(const std::vector<CellSummary>& s, SchemeId id, double value) {
    const auto* c = cell(s, id, value);
    return c && c->has_mean() ? c->mean : std::numeric_limits<double>::quiet_NaN();
}

// 7. Energy versus the far user's rate threshold.
Verdict fig2_trend() {
    const ExperimentSpec spec = figure_spec("fig2.yaml", "fig2");
    const auto t0 = Clock::now();
    const auto res = run_experiment(spec);
    const double wall = seconds_since(t0);
    std::vector<std::string> broken;
    for (SchemeId id : spec.schemes) {
        for (std::size_t i = 1; i < spec.values.size(); ++i) {
            const double a = mean_of(res.summary, id, spec.values[i - 1]);
            const double b = mean_of(res.summary, id, spec.values[i]);
            if (!(b > a)) {
                broken.push_back(fmt::format("{} at {}", to_string(id), spec.values[i]));
                break;
            }
        }
    }
    const double top = spec.values.back();
    const double prop = mean_of(res.summary, SchemeId::CRSMA_RIS, top);
    const double rival = std::min({mean_of(res.summary, SchemeId::CNOMA_RIS, top),
                                   mean_of(res.summary, SchemeId::RSMA_RIS, top),
                                   mean_of(res.summary, SchemeId::CRSMA_NORIS, top)});
    const bool ordered = prop <= rival;
    Verdict v;
    v.pass = broken.empty() && ordered && wall < 7200.0 && res.numerical_failures == 0;
    std::string b;
    for (const auto& s : broken) b += (b.empty() ? "" : ", ") + s;
    v.detail = fmt::format("{} draws; increasing for all schemes: {}{}; at {} bits/s/Hz CRSMA_RIS {:.4e} W vs best "
                           "rival {:.4e} W; {} numerical failures; {:.0f} s",
                           spec.n_channel_draws, broken.empty() ? "yes" : "no", b.empty() ? "" : " (" + b + ")", top,
                           prop, rival, res.numerical_failures, wall);
    return v;
}

// 8. Energy versus the number of RIS elements.
Verdict fig3_trend() {
    const ExperimentSpec spec = figure_spec("fig3.yaml", "fig3");
    const auto t0 = Clock::now();
    const auto res = run_experiment(spec);
    const double wall = seconds_since(t0);
    bool monotone = true;
    std::string notes;
    for (SchemeId id : {SchemeId::CRSMA_RIS, SchemeId::RSMA_RIS, SchemeId::NOMA_RIS, SchemeId::CNOMA_RIS}) {
        int inversions = 0;
        bool within_ci = true;
        for (std::size_t i = 1; i < spec.values.size(); ++i) {
            const auto* a = cell(res.summary, id, spec.values[i - 1]);
            const auto* b = cell(res.summary, id, spec.values[i]);
            if (!a || !b || !a->has_mean() || !b->has_mean()) {
                within_ci = false;
                continue;
            }
            if (b->mean > a->mean) {
                ++inversions;
                const double ci = std::max(std::isnan(a->ci95) ? 0.0 : a->ci95, std::isnan(b->ci95) ? 0.0 : b->ci95);
                if (b->mean - a->mean > ci) within_ci = false;
            }
        }
        if (inversions > 1 || !within_ci) {
            monotone = false;
            notes += fmt::format(" {}: {} inversion(s){};", to_string(id), inversions,
                                 within_ci ? "" : " outside the CI");
        }
    }
    const double lo = spec.values.front(), hi = spec.values.back();
    const double gap_lo = mean_of(res.summary, SchemeId::CNOMA_RIS, lo) - mean_of(res.summary, SchemeId::CRSMA_RIS, lo);
    const double gap_hi = mean_of(res.summary, SchemeId::CNOMA_RIS, hi) - mean_of(res.summary, SchemeId::CRSMA_RIS, hi);
    Verdict v;
    v.pass = monotone && gap_hi < gap_lo && res.numerical_failures == 0;
    v.detail = fmt::format("{} draws; RIS schemes non-increasing in M: {}{}; CNOMA_RIS - CRSMA_RIS gap {:.4e} W at "
                           "M = {} vs {:.4e} W at M = {}; {} numerical failures; {:.0f} s",
                           spec.n_channel_draws, monotone ? "yes" : "no", notes, gap_hi, hi, gap_lo, lo,
                           res.numerical_failures, wall);
    return v;
}

// 9. Scalar closed form.
Verdict scalar_closed_form() {
    SystemConfig cfg;
    cfg.n_ris_elements = 0;
    cfg.n_antennas = 1;
    cfg.rate_thresholds = {1.5, 0.0};
    cfg.tol_sca = 1e-12;
    double worst = 0.0;
    int runs = 0, failed = 0;
    for (int s = 0; s < 20; ++s) {
        ChannelSet ch = draw_channels(cfg, 9000 + s);
        ch.h_b2.setZero();
        ch.h_12 = 0.0;
        const double delta = s % 2 == 0 ? 1.0 : 0.5;
        const PhaseVector none = PhaseVector::zeros(0);
        const auto res = sca_solve(ScaContext(ch, none, none, delta, cfg));
        ++runs;
        if (!res.ok()) {
            ++failed;
            continue;
        }
        const double want = delta * cfg.noise_power() * (std::exp2(1.5 / delta) - 1.0) / std::norm(ch.h_b1(0));
        worst = std::max(worst, std::abs(res.energy - want) / want);
    }
    Verdict v;
    v.pass = failed == 0 && worst <= 1e-4;
    v.detail = fmt::format("{} single-user toys, {} solver failures, largest relative error {:.1e}", runs, failed,
                           worst);
    return v;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 10. Determinism of the result tables.
Verdict determinism() {
    const std::string text = R"(
name: determinism
config:
  n_ris_elements: 20
axis: rate_threshold_far
values: [1, 2, 3]
n_channel_draws: 3
)";
    ExperimentSpec spec = parse_experiment(text);
    spec.output_dir = g_out / "determinism_a";
    spec.workers = 1;
    run_experiment(spec);
    spec.output_dir = g_out / "determinism_b";
    spec.workers = 2;
    run_experiment(spec);
    std::vector<std::string> differ;
    for (const char* f : {"results.jsonl", "summary.csv", "plot.csv", "run_info.json"}) {
        const auto a = slurp(g_out / "determinism_a" / f);
        const auto b = slurp(g_out / "determinism_b" / f);
        if (a.empty() || a != b) differ.push_back(f);
    }
    Verdict v;
    v.pass = differ.empty();
    std::string d;
    for (const auto& s : differ) d += " " + s;
    v.detail = differ.empty() ? "two runs (1 and 2 workers) wrote byte-identical results, summary, plot and run files"
                              : "files differ:" + d;
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--only" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string tok;
            while (std::getline(ss, tok, ',')) only.insert(std::stoi(tok));
        } else if (a == "--workers" && i + 1 < argc) {
            g_workers = std::max(1, std::atoi(argv[++i]));
        } else {
            fmt::print(stderr, "usage: {} [--only 1,2,...] [--workers N]\n", argv[0]);
            return 2;
        }
    }
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"SCA descent", sca_descent},
        {"feasibility soundness", feasibility_soundness},
        {"rank-one certificate", rank_one_certificate},
        {"closed-form slot-2 optimality", slot2_optimality},
        {"lifting identity", lifting_identity},
        {"degeneracy equivalences", degeneracies},
        {"rate-threshold trend", fig2_trend},
        {"RIS-size trend", fig3_trend},
        {"scalar closed form", scalar_closed_form},
        {"determinism", determinism},
    };
    std::error_code ec;
    fs::create_directories(g_out, ec);
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = Clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass) ++failed;
        fmt::print("criterion {:>2} [{}] {}: {} ({:.1f} s)\n", id, v.pass ? "PASS" : "FAIL", criteria[i].first,
                   v.detail, seconds_since(t0));
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
