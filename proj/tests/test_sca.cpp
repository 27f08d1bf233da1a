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

#include "crsma/sca_power.hpp"

#include <cmath>

using namespace crsma;

namespace {

SystemConfig small_config(int m) {
    SystemConfig cfg;
    cfg.n_ris_elements = m;
    return cfg;
}

struct Instance {
    ChannelSet ch;
    PhaseVector theta;
};

Instance draw(const SystemConfig& cfg, std::uint64_t seed) {
    Rng rng(derive_seed(cfg.rng_seed, seed));
    Instance in{generate_channels(cfg, rng), {}};
    in.theta = PhaseVector::uniform_random(cfg.n_ris_elements, rng);
    return in;
}

}  // namespace

TEST_CASE("lower bound is tight at the expansion point") {
    Rng rng(1);
    std::normal_distribution<double> g;
    for (int i = 0; i < 100; ++i) {
        const double u = 0.1 + std::abs(g(rng));
        const cdouble v(g(rng), g(rng));
        const auto lb = lower_bound_approx(u, v);
        CHECK(lb(u, v) == doctest::Approx(std::norm(v) / u).epsilon(1e-12));
    }
    const auto z = lower_bound_approx(2.0, 0.0);
    CHECK(z.coef_u == 0.0);
    CHECK(z.coef_v == cdouble(0.0));
    CHECK_THROWS_AS(lower_bound_approx(0.0, 1.0), std::domain_error);
}

TEST_CASE("lower bound never exceeds |v|^2/u") {
    Rng rng(2);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> pos(1e-3, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double u = pos(rng), un = pos(rng);
        const cdouble v(g(rng), g(rng)), vn(g(rng), g(rng));
        CHECK(lower_bound_approx(un, vn)(u, v) <= std::norm(v) / u + 1e-12);
    }
}

TEST_CASE("power program variable and constraint counts") {
    for (int nt : {1, 2, 4, 6}) {
        SystemConfig cfg = small_config(5);
        cfg.n_antennas = nt;
        const auto in = draw(cfg, 0);
        ScaContext ctx(in.ch, in.theta, in.theta, 0.5, cfg);
        const auto it = make_iterate(ctx, PowerSolution::zeros(nt, 0.5));
        SocpLayout layout;
        build_socp(ctx, it, &layout);
        // (5 + N_t) K + N_t + 2 with K = 2, and 7 K + 2
        CHECK(layout.logical_variables == (5 + nt) * 2 + nt + 2);
        CHECK(layout.logical_constraints == 7 * 2 + 2);
    }
}

TEST_CASE("with zero thresholds the iterates collapse to the zero solution") {
    // The log minorant is negative at zero SINR away from its expansion
    // point, so zero is reached through the iterations rather than in one step.
    SystemConfig cfg = small_config(4);
    cfg.rate_thresholds = {0.0, 0.0};
    cfg.tol_sca = 1e-9;
    cfg.max_iter_sca = 200;
    const auto in = draw(cfg, 1);
    ScaContext ctx(in.ch, in.theta, in.theta, 0.6, cfg);
    const auto res = sca_solve(ctx);
    REQUIRE(res.ok());
    CHECK(res.energy < 1e-6);
    CHECK(res.energy >= 0.0);
}

TEST_CASE("initial point: generous budget is feasible, zero budget is not") {
    SystemConfig cfg = small_config(6);
    cfg.rate_thresholds = {0.05, 0.05};
    const auto in = draw(cfg, 2);
    ScaContext ctx(in.ch, in.theta, in.theta, 0.5, cfg);
    const auto it = initial_feasible_point(ctx);
    REQUIRE(it.has_value());
    CHECK(check_feasibility(it->sol, in.ch, in.theta, in.theta, cfg).ok());

    // beta values are the exact interference-plus-noise levels
    const double sigma2 = cfg.noise_power();
    const CVec h1 = user_channel(1, in.ch, in.theta), h2 = user_channel(2, in.ch, in.theta);
    const double i12 = std::norm(h1.dot(it->sol.p_2)), i21 = std::norm(h2.dot(it->sol.p_1));
    CHECK(it->beta_p[0] == doctest::Approx((i12 + sigma2) / sigma2).epsilon(1e-12));
    CHECK(it->beta_p[1] == doctest::Approx((i21 + sigma2) / sigma2).epsilon(1e-12));

    SystemConfig starved = cfg;
    starved.p_bs_dbm = -200.0;  // 1e-23 W
    starved.p_d2d_dbm = -200.0;
    starved.rate_thresholds = {1.0, 1.0};
    ScaContext dead(in.ch, in.theta, in.theta, 0.5, starved);
    conic::SolveStatus why = conic::SolveStatus::optimal;
    CHECK_FALSE(initial_feasible_point(dead, {}, nullptr, &why).has_value());
    CHECK(why == conic::SolveStatus::infeasible);
    CHECK(sca_solve(dead).status == ScaStatus::infeasible);
}

TEST_CASE("SCA trace is non-increasing and every iterate is feasible") {
    const SystemConfig cfg = small_config(20);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        CAPTURE(seed);
        const auto in = draw(cfg, seed);
        ScaContext ctx(in.ch, in.theta, in.theta, 0.5, cfg);
        const auto res = sca_solve(ctx);
        REQUIRE(res.ok());
        double prev = 0.0;
        bool first = true;
        for (const auto& e : res.trace) {
            if (e.restoration) continue;
            CHECK(e.max_violation <= 1e-6);
            if (!first) CHECK(e.eta <= prev + 1e-6);
            prev = e.eta;
            first = false;
        }
        CHECK(check_feasibility(res.sol, in.ch, in.theta, in.theta, cfg).ok());
        CHECK(res.energy == doctest::Approx(total_energy(res.sol)).epsilon(1e-15));
        if (res.status == ScaStatus::converged) {
            const auto& t = res.trace;
            CHECK(std::abs(t[t.size() - 1].eta - t[t.size() - 2].eta) <= cfg.tol_sca);
        }
    }
}

TEST_CASE("NOMA protocol keeps the far private stream and near split at zero") {
    const SystemConfig cfg = small_config(10);
    const auto in = draw(cfg, 3);
    const Protocol noma{false, true};
    ScaContext ctx(in.ch, in.theta, in.theta, 0.7, cfg, noma);
    const auto res = sca_solve(ctx);
    REQUIRE(res.ok());
    CHECK(res.sol.p_2.squaredNorm() == 0.0);
    CHECK(res.sol.c_split[0] == 0.0);
    CHECK(check_feasibility(res.sol, in.ch, in.theta, in.theta, cfg, noma).ok());
}

TEST_CASE("without relaying the relay power stays at zero") {
    const SystemConfig cfg = small_config(10);
    const auto in = draw(cfg, 4);
    const Protocol direct{true, false};
    ScaContext ctx(in.ch, in.theta, in.theta, 1.0, cfg, direct);
    const auto res = sca_solve(ctx);
    REQUIRE(res.ok());
    CHECK(res.sol.p_d == 0.0);
}

TEST_CASE("M = 0 channels match the same run on RIS-stripped channels") {
    SystemConfig cfg = small_config(0);
    const auto in = draw(cfg, 5);
    SystemConfig with = small_config(8);
    const auto big = draw(with, 5);
    // strip a RIS instance and rebuild the direct links from the M = 0 draw
    ChannelSet stripped = without_ris(big.ch);
    stripped.h_b1 = in.ch.h_b1;
    stripped.h_b2 = in.ch.h_b2;
    stripped.h_12 = in.ch.h_12;
    const PhaseVector none = PhaseVector::zeros(0);
    const auto a = sca_solve(ScaContext(in.ch, none, none, 0.5, cfg));
    const auto b = sca_solve(ScaContext(stripped, none, none, 0.5, cfg));
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(a.energy == doctest::Approx(b.energy).epsilon(1e-6));
}

TEST_CASE("single-antenna single-user toy matches the rate-inversion minimum") {
    // Far user silent: its channels and the D2D link are zero, R_th,2 = 0.
    SystemConfig cfg = small_config(0);
    cfg.n_antennas = 1;
    cfg.rate_thresholds = {1.5, 0.0};
    cfg.tol_sca = 1e-12;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto in = draw(cfg, seed);
        in.ch.h_b2.setZero();
        in.ch.h_12 = 0.0;
        for (double delta : {0.5, 1.0}) {
            const PhaseVector none = PhaseVector::zeros(0);
            const auto res = sca_solve(ScaContext(in.ch, none, none, delta, cfg));
            REQUIRE(res.ok());
            const double g = std::norm(in.ch.h_b1(0));
            const double want = delta * cfg.noise_power() * (std::pow(2.0, 1.5 / delta) - 1.0) / g;
            CHECK(res.energy == doctest::Approx(want).epsilon(1e-4));
        }
    }
}
