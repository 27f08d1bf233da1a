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

#include "crsma/rate_model.hpp"

#include <cmath>
#include <numbers>

using namespace crsma;

namespace {

CVec rvec(int n, Rng& rng, double scale = 1.0) {
    std::normal_distribution<double> g;
    CVec v(n);
    for (int i = 0; i < n; ++i) v(i) = scale * cdouble(g(rng), g(rng));
    return v;
}

ChannelSet random_channels(int nt, int m, Rng& rng) {
    ChannelSet ch;
    ch.h_b1 = rvec(nt, rng);
    ch.h_b2 = rvec(nt, rng, 0.3);
    ch.H_br = CMat(nt, m);
    for (int j = 0; j < m; ++j) ch.H_br.col(j) = rvec(nt, rng);
    ch.h_r1 = rvec(m, rng, 0.5);
    ch.h_r2 = rvec(m, rng, 0.5);
    ch.hhat_r2 = rvec(m, rng, 0.5);
    ch.h_1r = rvec(m, rng, 0.5);
    ch.h_12 = cdouble(0.4, -0.2);
    return ch;
}

PowerSolution random_solution(int nt, double delta, Rng& rng) {
    PowerSolution s;
    s.p_c = rvec(nt, rng);
    s.p_1 = rvec(nt, rng, 0.5);
    s.p_2 = rvec(nt, rng, 0.7);
    s.p_d = 0.3;
    s.delta = delta;
    return s;
}

// Row vector h_b^H + h_r^H diag(e^{j theta}) H_br^H built literally.
Eigen::RowVectorXcd effective_row(const CVec& hb, const CVec& hr, const Eigen::VectorXd& theta, const CMat& H) {
    Eigen::RowVectorXcd row = hb.adjoint();
    if (hr.size() == 0) return row;
    CMat diag = CMat::Zero(hr.size(), hr.size());
    for (Eigen::Index m = 0; m < hr.size(); ++m) diag(m, m) = std::polar(1.0, theta(m));
    row += hr.adjoint() * diag * H.adjoint();
    return row;
}

// |row * p|^2 with an explicit loop.
double power_through(const Eigen::RowVectorXcd& row, const CVec& p) {
    cdouble acc = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) acc += row(i) * p(i);
    return std::norm(acc);
}

}  // namespace

TEST_CASE("effective channel without RIS is the direct channel") {
    Rng rng(1);
    const CVec h = rvec(3, rng);
    const CVec out = effective_channel(h, CVec(0), PhaseVector::zeros(0), CMat(3, 0));
    CHECK((out - h).norm() == 0.0);
}

TEST_CASE("effective channel 1x1 hand computation") {
    // N_t = M = 1, h_direct = 0, theta = 0: column form is H_br * h_r
    CVec hb = CVec::Zero(1), hr(1);
    CMat H(1, 1);
    hr(0) = cdouble(0.0, 1.0);
    H(0, 0) = cdouble(2.0, 1.0);
    const CVec out = effective_channel(hb, hr, PhaseVector::zeros(1), H);
    CHECK(std::abs(out(0) - cdouble(2.0, 1.0) * cdouble(0.0, 1.0)) < 1e-15);
    // theta = pi/2 rotates the row by e^{j pi/2}, hence the column by e^{-j pi/2}
    PhaseVector th{Eigen::VectorXd::Constant(1, std::numbers::pi / 2)};
    const CVec rot = effective_channel(hb, hr, th, H);
    CHECK(std::abs(rot(0) - cdouble(0.0, -1.0) * cdouble(2.0, 1.0) * cdouble(0.0, 1.0)) < 1e-15);
}

TEST_CASE("effective channel matches the literal row-vector form") {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const int nt = 1 + trial % 4, m = trial % 7;
        const auto ch = random_channels(nt, m, rng);
        const auto th = PhaseVector::uniform_random(m, rng);
        const CVec col = effective_channel(ch.h_b1, ch.h_r1, th, ch.H_br);
        const Eigen::RowVectorXcd row = effective_row(ch.h_b1, ch.h_r1, th.theta, ch.H_br);
        CHECK((col.adjoint() - row).norm() <= 1e-12 * (1.0 + row.norm()));
    }
}

TEST_CASE("effective channel is linear in the RIS link") {
    Rng rng(3);
    const auto ch = random_channels(3, 5, rng);
    const auto th = PhaseVector::uniform_random(5, rng);
    const CVec zero = CVec::Zero(3);
    const CVec a = effective_channel(zero, ch.h_r1, th, ch.H_br);
    const CVec b = effective_channel(zero, CVec(2.5 * ch.h_r1), th, ch.H_br);
    CHECK((b - 2.5 * a).norm() <= 1e-14 * a.norm());
}

TEST_CASE("common SINR trivial cases") {
    Rng rng(4);
    auto ch = random_channels(2, 3, rng);
    auto sol = random_solution(2, 0.5, rng);
    const auto th = PhaseVector::uniform_random(3, rng);
    sol.p_c.setZero();
    CHECK(sinr_common_slot1(1, ch, th, sol, 1e-2) == 0.0);

    ChannelSet one;
    one.h_b1 = CVec::Constant(1, cdouble(0.0, 2.0));
    one.h_b2 = one.h_b1;
    one.H_br = CMat(1, 0);
    auto s = PowerSolution::zeros(1, 1.0);
    s.p_c(0) = cdouble(0.25, 0.0);  // |h|^2 |p|^2 = 4 * 1/16 = 0.25
    CHECK(sinr_common_slot1(1, one, PhaseVector::zeros(0), s, 0.25) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("SINRs match an independent scalar evaluation") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto ch = random_channels(2, 4, rng);
        const auto sol = random_solution(2, 0.6, rng);
        const auto th = PhaseVector::uniform_random(4, rng);
        const double noise = 0.05;
        for (int k = 1; k <= 2; ++k) {
            const auto row = k == 1 ? effective_row(ch.h_b1, ch.h_r1, th.theta, ch.H_br)
                                    : effective_row(ch.h_b2, ch.h_r2, th.theta, ch.H_br);
            const double gc = power_through(row, sol.p_c);
            const double g1 = power_through(row, sol.p_1);
            const double g2 = power_through(row, sol.p_2);
            const double want_c = gc / (g1 + g2 + noise);
            const double want_p = (k == 1 ? g1 / (g2 + noise) : g2 / (g1 + noise));
            CHECK(sinr_common_slot1(k, ch, th, sol, noise) == doctest::Approx(want_c).epsilon(1e-12));
            CHECK(sinr_private_slot1(k, ch, th, sol, noise) == doctest::Approx(want_p).epsilon(1e-12));
        }
    }
}

TEST_CASE("private SINR closed forms and SIC independence") {
    Rng rng(6);
    auto ch = random_channels(3, 0, rng);
    auto sol = PowerSolution::zeros(3, 1.0);
    sol.p_1 = 0.8 * ch.h_b1 / ch.h_b1.norm();  // aligned, |p|^2 = 0.64
    const double noise = 0.1;
    CHECK(sinr_private_slot1(1, ch, PhaseVector::zeros(0), sol, noise) ==
          doctest::Approx(ch.h_b1.squaredNorm() * 0.64 / noise).epsilon(1e-12));
    CHECK(sinr_private_slot1(2, ch, PhaseVector::zeros(0), sol, noise) == 0.0);
    const double before = sinr_private_slot1(1, ch, PhaseVector::zeros(0), sol, noise);
    sol.p_c = rvec(3, rng, 10.0);
    CHECK(sinr_private_slot1(1, ch, PhaseVector::zeros(0), sol, noise) == before);
}

TEST_CASE("slot-2 rate cases") {
    Rng rng(7);
    ChannelSet ch = random_channels(2, 1, rng);
    ch.h_12 = cdouble(0.3, 0.1);
    ch.hhat_r2(0) = cdouble(0.5, -0.5);
    ch.h_1r(0) = cdouble(1.0, 2.0);
    PhaseVector th{Eigen::VectorXd::Constant(1, 0.9)};
    CHECK(rate_common_slot2(ch, th, 0.0, 0.5, 0.01) == 0.0);
    CHECK(rate_common_slot2(ch, th, 1.0, 1.0, 0.01) == 0.0);
    const cdouble g = cdouble(0.3, 0.1) + cdouble(0.5, -0.5) * cdouble(1.0, 2.0) * std::polar(1.0, 0.9);
    const double want = 0.4 * std::log2(1.0 + std::norm(g) * 0.7 / 0.01);
    CHECK(rate_common_slot2(ch, th, 0.7, 0.6, 0.01) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("common rate is the min of its two terms") {
    Rng rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const auto ch = random_channels(2, 3, rng);
        auto sol = random_solution(2, 0.4 + 0.05 * trial, rng);
        const auto t1 = PhaseVector::uniform_random(3, rng), t2 = PhaseVector::uniform_random(3, rng);
        const double noise = 0.2;
        const double a = sol.delta * std::log2(1.0 + sinr_common_slot1(1, ch, t1, sol, noise));
        const double b = sol.delta * std::log2(1.0 + sinr_common_slot1(2, ch, t1, sol, noise)) +
                         rate_common_slot2(ch, t2, sol.p_d, sol.delta, noise);
        CHECK(common_rate(ch, t1, t2, sol, noise) == doctest::Approx(std::min(a, b)).epsilon(1e-14));
        const auto r = evaluate_rates(ch, t1, t2, sol, noise);
        CHECK(r.r_c == doctest::Approx(std::min(r.r_c1_slot1, r.r_c2_ndf)).epsilon(1e-15));
        // a huge relay power saturates the min at the near user's term
        sol.p_d = 1e12;
        CHECK(common_rate(ch, t1, t2, sol, noise) == doctest::Approx(a).epsilon(1e-14));
    }
}

TEST_CASE("total energy") {
    Rng rng(9);
    auto s = random_solution(3, 1.0, rng);
    CHECK(total_energy(s) == doctest::Approx(s.bs_power()).epsilon(1e-15));
    auto h = PowerSolution::zeros(2, 0.5);
    h.p_c(0) = 1.0;
    h.p_1(1) = cdouble(0.0, std::sqrt(0.5));
    h.p_2(0) = std::sqrt(0.5);
    h.p_d = 1.0;
    CHECK(total_energy(h) == doctest::Approx(1.5).epsilon(1e-15));  // 0.5 * 2 + 0.5 * 1
    CHECK(total_energy(PowerSolution::zeros(4, 0.3)) == 0.0);
}

TEST_CASE("feasibility margins") {
    Rng rng(10);
    SystemConfig cfg;
    cfg.n_antennas = 2;
    cfg.n_ris_elements = 3;
    const auto ch = random_channels(2, 3, rng);
    const auto th = PhaseVector::uniform_random(3, rng);
    auto zero = PowerSolution::zeros(2, 0.5);
    auto rep = check_feasibility(zero, ch, th, th, cfg);
    CHECK_FALSE(rep.ok());
    CHECK(rep.worst(Margin::Kind::rate) < 0.0);

    auto over = zero;
    over.p_d = cfg.p_d2d() + 1e-3;
    rep = check_feasibility(over, ch, th, th, cfg);
    for (const auto& m : rep.margins)
        if (m.name == "relay_budget") CHECK(m.value == doctest::Approx(-1e-3).epsilon(1e-9));
    CHECK(rep.describe_violations().find("relay_budget") != std::string::npos);

    Protocol noma{false, true};
    auto bad = zero;
    bad.p_2(0) = 1.0;
    rep = check_feasibility(bad, ch, th, th, cfg, noma);
    CHECK(rep.describe_violations().find("noma_far_private_off") != std::string::npos);
}

TEST_CASE("SINRs are invariant under a 2 pi phase shift") {
    Rng rng(11);
    const auto ch = random_channels(3, 6, rng);
    const auto sol = random_solution(3, 0.5, rng);
    const auto th = PhaseVector::uniform_random(6, rng);
    PhaseVector shifted{th.theta.array() + 2.0 * std::numbers::pi};
    for (int k = 1; k <= 2; ++k) {
        CHECK(sinr_common_slot1(k, ch, th, sol, 0.1) ==
              doctest::Approx(sinr_common_slot1(k, ch, shifted, sol, 0.1)).epsilon(1e-12));
        CHECK(sinr_private_slot1(k, ch, th, sol, 0.1) ==
              doctest::Approx(sinr_private_slot1(k, ch, shifted, sol, 0.1)).epsilon(1e-12));
    }
}

TEST_CASE("common SINR is non-increasing in noise and interference") {
    Rng rng(12);
    const auto ch = random_channels(2, 3, rng);
    auto sol = random_solution(2, 0.5, rng);
    const auto th = PhaseVector::uniform_random(3, rng);
    double prev = sinr_common_slot1(1, ch, th, sol, 0.01);
    for (double n : {0.02, 0.1, 1.0}) {
        const double v = sinr_common_slot1(1, ch, th, sol, n);
        CHECK(v <= prev);
        prev = v;
    }
    prev = sinr_common_slot1(2, ch, th, sol, 0.1);
    for (double a : {1.5, 2.0, 4.0}) {
        auto s = sol;
        s.p_1 *= a;
        const double v = sinr_common_slot1(2, ch, th, s, 0.1);
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("energy is affine in stream powers and relay power") {
    Rng rng(13);
    auto a = random_solution(2, 0.3, rng), b = random_solution(2, 0.3, rng);
    auto mix = a;
    // scaling every precoder by sqrt(t) scales each Gram power by t
    const double t = 0.35;
    mix.p_c = std::sqrt(t) * a.p_c;
    mix.p_1 = std::sqrt(t) * a.p_1;
    mix.p_2 = std::sqrt(t) * a.p_2;
    mix.p_d = t * a.p_d + (1 - t) * b.p_d;
    auto rest = b;
    rest.p_c = std::sqrt(1 - t) * b.p_c;
    rest.p_1 = std::sqrt(1 - t) * b.p_1;
    rest.p_2 = std::sqrt(1 - t) * b.p_2;
    rest.p_d = 0.0;
    CHECK(total_energy(mix) + total_energy(rest) == doctest::Approx(t * total_energy(a) + (1 - t) * total_energy(b)).epsilon(1e-13));
}

TEST_CASE("phase vector helpers") {
    CVec v(3);
    v << cdouble(1, 1), cdouble(0, 0), cdouble(-1, 0);
    const auto p = PhaseVector::from_complex(v);
    CHECK(p.theta(0) == doctest::Approx(std::numbers::pi / 4));
    CHECK(p.theta(1) == 0.0);
    CHECK(p.theta(2) == doctest::Approx(std::numbers::pi));
    Rng rng(1);
    const auto r = PhaseVector::uniform_random(50, rng);
    const CVec ph = r.phases();
    for (int i = 0; i < 50; ++i) {
        CHECK(std::abs(std::abs(ph(i)) - 1.0) <= 1e-12);
        CHECK(r.theta(i) >= 0.0);
        CHECK(r.theta(i) <= 2.0 * std::numbers::pi);
    }
}
