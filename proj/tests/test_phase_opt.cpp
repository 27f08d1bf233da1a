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

#include "crsma/phase_opt.hpp"
#include "crsma/sca_power.hpp"

#include <cmath>
#include <numbers>

using namespace crsma;

namespace {

constexpr double kPi = std::numbers::pi;

SystemConfig config_with(int m) {
    SystemConfig cfg;
    cfg.n_ris_elements = m;
    return cfg;
}

struct Instance {
    ChannelSet ch;
    PhaseVector theta1, theta2;
};

Instance draw(const SystemConfig& cfg, std::uint64_t stream) {
    Rng rng(derive_seed(cfg.rng_seed, stream));
    Instance in{generate_channels(cfg, rng), {}, {}};
    in.theta1 = PhaseVector::uniform_random(cfg.n_ris_elements, rng);
    in.theta2 = closed_form_theta2(in.ch.h_12, in.ch.h_1r, in.ch.hhat_r2);
    return in;
}

PowerSolution random_precoders(int nt, double delta, Rng& rng) {
    std::normal_distribution<double> g;
    auto vec = [&] {
        CVec v(nt);
        for (int i = 0; i < nt; ++i) v(i) = {g(rng), g(rng)};
        return v;
    };
    PowerSolution s = PowerSolution::zeros(nt, delta);
    s.p_c = vec();
    s.p_1 = vec();
    s.p_2 = vec();
    return s;
}

double wrap(double a) {
    double r = std::remainder(a, 2.0 * kPi);
    return std::abs(r);
}

}  // namespace

TEST_CASE("slot-2 phases vanish for co-phased real channels") {
    const CVec h1r = CVec::Constant(5, 0.7);
    const CVec hh = CVec::Constant(5, 1.3);
    const auto th = closed_form_theta2(2.0, h1r, hh);
    for (int i = 0; i < 5; ++i) CHECK(wrap(th.theta(i)) < 1e-15);
}

TEST_CASE("slot-2 phase aligns a single element with the direct link") {
    const cdouble h12 = std::polar(1.0, kPi / 3.0);
    CVec h1r(1), hh(1);
    h1r(0) = std::polar(2.0, -kPi / 12.0);
    hh(0) = std::polar(0.5, -kPi / 12.0);  // product e^{-j pi/6}
    const auto th = closed_form_theta2(h12, h1r, hh);
    CHECK(wrap(th.theta(0) - kPi / 2.0) < 1e-12);
}

TEST_CASE("closed-form slot-2 gain reaches the triangle bound and beats random phases") {
    const SystemConfig cfg = config_with(12);
    Rng rng(7);
    for (int inst = 0; inst < 5; ++inst) {
        const auto in = draw(cfg, inst);
        const double bound = std::abs(in.ch.h_12) + in.ch.h_1r.cwiseProduct(in.ch.hhat_r2).cwiseAbs().sum();
        const double best = std::abs(slot2_channel(in.ch, in.theta2));
        CHECK(best == doctest::Approx(bound).epsilon(1e-10));
        for (int t = 0; t < 2000; ++t) {
            const auto rnd = PhaseVector::uniform_random(cfg.n_ris_elements, rng);
            CHECK(std::abs(slot2_channel(in.ch, rnd)) <= best * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("lifted quadratic equals the effective-channel power") {
    Rng rng(11);
    for (int m : {1, 8, 20}) {
        SystemConfig cfg = config_with(m);
        for (int t = 0; t < 20; ++t) {
            const auto in = draw(cfg, 100 + t);
            const PowerSolution sol = random_precoders(cfg.n_antennas, 0.5, rng);
            const auto lp = build_lifted_problem(in.ch, sol, in.theta2, cfg);
            const CVec vbar = lift(in.theta1);
            const CMat v = vbar * vbar.adjoint();
            const CVec* p[3] = {&sol.p_c, &sol.p_1, &sol.p_2};
            for (int k = 0; k < 2; ++k) {
                const CVec h = user_channel(k + 1, in.ch, in.theta1);
                for (int j = 0; j < 3; ++j) {
                    const double direct = std::norm(h.dot(*p[j])) / cfg.noise_power();
                    CHECK(lp.power(k, j, v) == doctest::Approx(direct).epsilon(1e-10));
                    const cdouble quad = lp.lifted(k, j).dot(v * lp.lifted(k, j));
                    CHECK(quad.real() == doctest::Approx(direct).epsilon(1e-10));
                }
            }
        }
    }
}

TEST_CASE("a silent stream lifts to a zero matrix") {
    const SystemConfig cfg = config_with(6);
    const auto in = draw(cfg, 3);
    Rng rng(5);
    PowerSolution sol = random_precoders(cfg.n_antennas, 1.0, rng);
    sol.p_2.setZero();
    const auto lp = build_lifted_problem(in.ch, sol, in.theta2, cfg);
    CHECK(lp.q(0, 2).norm() == 0.0);
    CHECK(lp.q(1, 2).norm() == 0.0);
    CHECK(std::abs(lp.b[1][2]) == 0.0);
}

TEST_CASE("an empty common split drops the near user's common requirement") {
    const SystemConfig cfg = config_with(6);
    const auto in = draw(cfg, 4);
    Rng rng(6);
    PowerSolution sol = random_precoders(cfg.n_antennas, 1.0, rng);
    sol.c_split = {0.0, 0.0};
    const auto lp = build_lifted_problem(in.ch, sol, in.theta2, cfg);
    CHECK(lp.mu_c1 == 0.0);
    for (const auto& row : lp.rows) CHECK(row.name != "common_1");
    CHECK(lp.mu_p[0] == doctest::Approx(std::exp2(cfg.rate_thresholds[0]) - 1.0));
}

TEST_CASE("NOMA lifting has no far private row") {
    const SystemConfig cfg = config_with(4);
    const auto in = draw(cfg, 5);
    Rng rng(8);
    PowerSolution sol = random_precoders(cfg.n_antennas, 1.0, rng);
    sol.p_2.setZero();
    sol.c_split = {0.0, 2.0};
    const auto lp = build_lifted_problem(in.ch, sol, in.theta2, cfg, {false, false});
    for (const auto& row : lp.rows) CHECK(row.name != "private_2");
    CHECK(lp.r_c2_slot2 == 0.0);
}

TEST_CASE("spectral subgradient is a unit-trace projector onto the top eigenvector") {
    Rng rng(9);
    std::normal_distribution<double> g;
    for (int t = 0; t < 20; ++t) {
        CMat a(7, 7);
        for (int i = 0; i < 7; ++i)
            for (int j = 0; j < 7; ++j) a(i, j) = {g(rng), g(rng)};
        const CMat v = a * a.adjoint();
        const CMat s = spectral_subgradient(v);
        CHECK(s.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((s - s.adjoint()).norm() < 1e-12);
        CHECK((s * s - s).norm() < 1e-10);
        const double l2 = Eigen::SelfAdjointEigenSolver<CMat>(v).eigenvalues().maxCoeff();
        CHECK((s * v).trace().real() == doctest::Approx(l2).epsilon(1e-10));
    }
}

TEST_CASE("DC residual is the sum of the non-leading eigenvalues") {
    Rng rng(10);
    std::normal_distribution<double> g;
    CMat a(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) a(i, j) = {g(rng), g(rng)};
    const CMat q = Eigen::HouseholderQR<CMat>(a).householderQ();
    const double eig[3] = {5.0, 0.3, 0.02};
    for (int rank = 1; rank <= 3; ++rank) {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(6);
        double tail = 0.0;
        for (int i = 0; i < rank; ++i) {
            d(i) = eig[i];
            if (i > 0) tail += eig[i];
        }
        const CMat v = q * d.cast<cdouble>().asDiagonal() * q.adjoint();
        CHECK(std::abs(dc_residual(v) - tail) <= 1e-10 * (1.0 + tail));
    }
}

TEST_CASE("lifting then extracting returns the phases") {
    Rng rng(12);
    for (int m : {1, 5, 30}) {
        const auto th = PhaseVector::uniform_random(m, rng);
        const CVec vbar = lift(th);
        const auto ex = extract_phases({vbar * vbar.adjoint(), 0.0});
        REQUIRE(ex.ok);
        CHECK(ex.projection_error < 1e-10);
        for (int i = 0; i < m; ++i) CHECK(wrap(ex.theta.theta(i) - th.theta(i)) < 1e-10);
    }
    const auto bad = extract_phases({CMat::Zero(4, 4), 0.0});
    CHECK_FALSE(bad.ok);
}

TEST_CASE("a rank-one start without requirements stops after one round") {
    SystemConfig cfg = config_with(8);
    Rng rng(13);
    LiftedProblem lp;
    lp.m = 8;
    const CVec vbar = lift(PhaseVector::uniform_random(8, rng));
    const auto res = dc_rank_one_solve(lp, vbar * vbar.adjoint(), cfg);
    CHECK(res.status == DcStatus::rank_one);
    REQUIRE(res.trace.size() == 1);
    CHECK(res.V.dc_residual <= cfg.zeta_dc);
    CHECK((res.V.V - vbar * vbar.adjoint()).norm() < 1e-5 * vbar.squaredNorm());
}

TEST_CASE("DC residual does not increase across rounds without the margin reward") {
    SystemConfig cfg = config_with(10);
    for (int t = 0; t < 3; ++t) {
        const auto in = draw(cfg, 200 + t);
        ScaContext ctx(in.ch, in.theta1, in.theta2, 0.6, cfg);
        const auto sca = sca_solve(ctx);
        REQUIRE(sca.ok());
        auto lp = build_lifted_problem(in.ch, sca.sol, in.theta2, cfg);
        DcOptions opt;
        opt.margin_weight = 0.0;
        const CMat v0 = CMat::Identity(11, 11);
        const auto res = dc_rank_one_solve(lp, v0, cfg, opt);
        REQUIRE_FALSE(res.trace.empty());
        double prev = dc_residual(v0);
        for (const auto& e : res.trace) {
            CHECK(e.residual <= prev + 1e-6);
            prev = e.residual;
        }
        for (int i = 0; i <= 10; ++i) CHECK(res.V.V(i, i).real() == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("phase step keeps the incumbent feasible and lets power drop") {
    SystemConfig cfg = config_with(20);
    int accepted = 0;
    for (int t = 0; t < 4; ++t) {
        const auto in = draw(cfg, 300 + t);
        const auto before = sca_solve(ScaContext(in.ch, in.theta1, in.theta2, 0.5, cfg));
        REQUIRE(before.ok());
        const auto ps = phase_step(in.ch, before.sol, in.theta1, in.theta2, cfg);
        if (!ps.accepted) continue;
        ++accepted;
        CHECK(ps.dc.status == DcStatus::rank_one);
        CHECK(ps.dc.V.dc_residual <= cfg.zeta_dc);
        CHECK(check_feasibility(before.sol, in.ch, ps.theta1, in.theta2, cfg).ok());
        const auto after = sca_solve(ScaContext(in.ch, ps.theta1, in.theta2, 0.5, cfg), &before.sol);
        REQUIRE(after.ok());
        CHECK(after.energy <= before.energy + cfg.tol_sca);
    }
    CHECK(accepted >= 3);
}

TEST_CASE("phase step is a no-op without RIS elements") {
    SystemConfig cfg = config_with(0);
    const auto in = draw(cfg, 1);
    const auto sol = PowerSolution::zeros(cfg.n_antennas, 1.0);
    const auto ps = phase_step(in.ch, sol, in.theta1, in.theta2, cfg);
    CHECK_FALSE(ps.accepted);
    CHECK(ps.theta1.size() == 0);
}
